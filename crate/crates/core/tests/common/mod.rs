#![allow(dead_code)]

pub mod stub;

use proptest::prelude::*;
use toolbudget::schema::{ParamType, ParameterSpec, ScalarKind, ToolCatalog, ToolDefinition};

pub fn ident() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,11}"
}

fn param_name() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_-]{0,11}"
}

fn scalar() -> impl Strategy<Value = ScalarKind> {
    prop_oneof![
        Just(ScalarKind::String),
        Just(ScalarKind::Number),
        Just(ScalarKind::Integer),
        Just(ScalarKind::Boolean)
    ]
}

/// Free text, including characters the compact format must quote.
fn text() -> impl Strategy<Value = String> {
    prop_oneof!["[a-zA-Z0-9 ]{1,16}", "[a-z]{1,6}[,:#()=| \"\\\\]{1,3}[a-z]{0,6}", "\\PC{1,10}",]
}

fn default_for(kind: ScalarKind) -> BoxedStrategy<String> {
    match kind {
        ScalarKind::String => text().boxed(),
        ScalarKind::Integer => (-10_000i64..10_000).prop_map(|v| v.to_string()).boxed(),
        ScalarKind::Number => {
            (-1e6f64..1e6).prop_map(|v| serde_json::Number::from_f64(v).expect("finite").to_string()).boxed()
        }
        ScalarKind::Boolean => prop_oneof![Just("true".to_string()), Just("false".to_string())].boxed(),
    }
}

fn leaf(name: String) -> BoxedStrategy<ParameterSpec> {
    let scalar_param = scalar().prop_flat_map(|k| (Just(k), proptest::option::of(default_for(k)))).prop_map({
        let name = name.clone();
        move |(k, d)| ParameterSpec { default_value: d, ..ParameterSpec::scalar(name.clone(), k) }
    });
    let enum_param = proptest::collection::btree_set(text(), 1..5)
        .prop_flat_map(|vals| {
            let vals: Vec<String> = vals.into_iter().collect();
            let n = vals.len();
            (Just(vals), proptest::option::of(0..n))
        })
        .prop_map({
            let name = name.clone();
            move |(vals, d)| {
                let default_value = d.map(|i| vals[i].clone());
                ParameterSpec { default_value, ..ParameterSpec::enumeration(name.clone(), vals) }
            }
        });
    let array_param = scalar().prop_map(move |k| ParameterSpec::array(name.clone(), k));
    prop_oneof![3 => scalar_param, 2 => enum_param, 1 => array_param].boxed()
}

fn with_description(p: BoxedStrategy<ParameterSpec>) -> impl Strategy<Value = ParameterSpec> {
    (p, proptest::option::of(text())).prop_map(|(p, d)| ParameterSpec { description: d, ..p })
}

fn unique_names(range: std::ops::Range<usize>) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::btree_set(param_name(), range).prop_map(|s| s.into_iter().collect())
}

fn param() -> impl Strategy<Value = ParameterSpec> {
    param_name().prop_flat_map(|name| {
        let object = unique_names(0..4).prop_flat_map({
            let name = name.clone();
            move |children| {
                let kids: Vec<_> = children.into_iter().map(|c| with_description(leaf(c)).boxed()).collect();
                let name = name.clone();
                kids.prop_map(move |kids| ParameterSpec::object(name.clone(), kids))
            }
        });
        prop_oneof![5 => with_description(leaf(name)).boxed(), 1 => with_description(object.boxed()).boxed()]
    })
}

/// Valid tool definitions across the supported subset.
pub fn arb_tool() -> impl Strategy<Value = ToolDefinition> {
    (ident(), text(), unique_names(0..7))
        .prop_flat_map(|(name, desc, names)| {
            let n = names.len();
            let params: Vec<_> = names
                .into_iter()
                .map(|pn| param().prop_map(move |p| ParameterSpec { name: pn.clone(), ..p }))
                .collect();
            (Just(name), Just(desc), params, proptest::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(name, desc, params, req)| {
            let mut t = ToolDefinition::new(name, desc);
            for (p, r) in params.into_iter().zip(req) {
                t = t.param(p, r);
            }
            t
        })
}

pub fn arb_catalog(max: usize) -> impl Strategy<Value = ToolCatalog> {
    proptest::collection::vec(arb_tool(), 1..max).prop_map(|tools| {
        let mut seen = std::collections::BTreeSet::new();
        let tools: Vec<_> = tools.into_iter().filter(|t| seen.insert(t.name.clone())).collect();
        ToolCatalog::new(tools).expect("unique valid tools")
    })
}

pub fn is_object(p: &ParameterSpec) -> bool {
    matches!(p.ty, ParamType::Object(_))
}
