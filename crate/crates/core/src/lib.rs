pub mod bench;
pub mod budget;
pub mod compress;
pub mod curvefit;
pub mod eval;
pub mod experiment;
pub mod harness;
pub mod schema;
pub mod stats;
pub mod sweeps;
pub mod tokens;
