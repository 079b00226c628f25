//! Vocabulary tables for generated tools and documents.

/// Optional enum parameters. Values are listed longest-useful-first; a tool
/// starts with a short prefix and calibration draws further values.
pub const ENUM_PARAMS: &[(&str, &str)] = &[
    ("region", "emea apac americas latam north_america western_europe central_europe nordics middle_east africa south_asia southeast_asia oceania greater_china japan_korea uk_ireland iberia dach benelux caucasus central_asia andean_region caribbean central_america gulf_states baltics balkans alpine_region"),
    ("currency", "EUR USD GBP CHF JPY SEK NOK DKK PLN CZK CAD AUD SGD INR BRL MXN ZAR HKD NZD TRY ILS AED SAR KRW CNY TWD THB MYR IDR PHP HUF RON BGN ISK"),
    ("output_format", "json csv xlsx pdf html markdown parquet xml plain_text ndjson tsv yaml avro orc jsonl ods docx pptx rtf latex msgpack protobuf"),
    ("sort_order", "ascending descending relevance newest_first oldest_first alphabetical reverse_alphabetical largest_first smallest_first most_recently_updated least_recently_updated highest_priority lowest_priority by_owner by_due_date by_created_date custom_rank"),
    ("status_filter", "active inactive pending archived suspended draft under_review approved rejected cancelled on_hold completed expired in_progress blocked awaiting_input awaiting_approval scheduled deferred superseded reopened escalated closed_won closed_lost"),
    ("priority", "low medium high critical urgent blocker trivial normal elevated emergency highest_impact routine deferred best_effort time_critical scheduled_maintenance"),
    ("department", "finance engineering sales marketing human_resources legal operations procurement customer_success product_management information_technology facilities research_and_development internal_audit corporate_strategy treasury tax investor_relations communications security data_platform business_intelligence quality_assurance supply_chain logistics"),
    ("language", "en de fr es it pt nl sv pl cs ja ko zh ar hi tr fi da no hu ro bg el he uk ru th vi id ms ca eu gl"),
    ("granularity", "daily weekly monthly quarterly yearly hourly fiscal_month fiscal_quarter fiscal_year rolling_twelve_months week_to_date month_to_date minute half_hour biweekly semi_annual trailing_quarter year_to_date quarter_to_date season"),
    ("access_level", "public internal confidential restricted secret management_only board_only legal_hold team_only department_only project_members external_partners auditors_only privileged export_controlled"),
    ("channel_type", "email chat sms push voice webhook pager teams_channel slack_channel in_app_banner mobile_push desktop_notification fax postal_mail whatsapp signal matrix_room rss_feed"),
    ("timezone", "UTC Europe_Berlin Europe_Lisbon Europe_London Europe_Paris America_New_York America_Chicago America_Los_Angeles Asia_Singapore Asia_Tokyo Australia_Sydney America_Sao_Paulo Asia_Kolkata Europe_Madrid Europe_Warsaw Europe_Dublin Europe_Amsterdam Europe_Helsinki America_Toronto America_Denver Asia_Dubai Asia_Shanghai Asia_Seoul Pacific_Auckland Africa_Johannesburg"),
    ("document_type", "policy procedure guideline contract invoice memo report presentation specification runbook playbook template minutes handbook white_paper case_study faq release_notes architecture_decision_record risk_assessment audit_report budget_plan org_announcement training_material"),
    ("employment_type", "full_time part_time contractor intern temporary freelance apprentice working_student fixed_term seasonal consultant secondee agency_worker volunteer board_member retiree_advisor"),
    ("account_tier", "bronze silver gold platinum enterprise strategic key_account startup public_sector nonprofit mid_market small_business education government_agency channel_partner distributor trial churned"),
    ("job_level", "associate professional senior_professional lead principal manager senior_manager director vice_president executive junior intermediate staff senior_staff distinguished fellow team_lead head_of chief_officer"),
    ("office_location", "berlin munich hamburg lisbon porto madrid barcelona paris lyon amsterdam dublin london toronto austin singapore tokyo frankfurt stuttgart cologne valencia seville marseille rotterdam utrecht cork manchester edinburgh vancouver boston warsaw krakow prague"),
    ("cost_category", "revenue cost_of_goods_sold research_and_development sales_and_marketing general_and_administrative capital_expenditure depreciation amortization interest taxes travel_and_entertainment facilities_costs professional_fees software_licenses cloud_infrastructure training recruitment insurance bad_debt restructuring"),
    ("product_line", "helix_platform atlas_analytics nimbus_storage orion_security vega_mobile lyra_connect pulsar_edge quasar_ai draco_observability carina_payments sirius_identity altair_workflow rigel_billing polaris_search mira_collaboration cygnus_backup"),
    ("approval_state", "not_submitted submitted manager_approved finance_approved director_approved rejected escalated withdrawn auto_approved pending_legal_review pending_security_review awaiting_documents partially_approved conditionally_approved expired cancelled"),
    ("aggregation", "sum mean median min max count count_distinct p90 p95 p99 stddev variance first last mode range sum_distinct geometric_mean harmonic_mean p50 p75 p999"),
    ("warehouse", "berlin_central lisbon_north madrid_hub rotterdam_port dublin_west warsaw_east milan_south lyon_depot hamburg_harbor antwerp_gateway prague_logistics lodz_fulfillment zaragoza_hub porto_coastal budapest_inland vienna_transit"),
    ("payment_method", "bank_transfer credit_card direct_debit purchase_card wire cheque paypal sepa_instant ach letter_of_credit virtual_card net_settlement crypto_stablecoin cash_on_delivery invoice_factoring mobile_wallet"),
    ("compliance_framework", "gdpr iso_27001 soc2 hipaa pci_dss sox nis2 dora tisax cyber_essentials iso_9001 iso_22301 nist_csf fedramp c5 ens csa_star bsi_grundschutz ccpa lgpd"),
    ("ticket_category", "billing technical account access hardware software network security onboarding offboarding procurement facilities data_request legal_hold compliance_question vendor_issue payroll_question expense_question benefits travel_booking"),
    ("contract_type", "master_services statement_of_work nda license subscription reseller framework amendment renewal service_level_agreement data_processing_agreement joint_venture memorandum_of_understanding consulting_agreement purchase_agreement lease"),
    ("unit_system", "metric imperial us_customary si nautical astronomical imperial_uk metric_engineering"),
    ("revision_policy", "latest approved_only all_revisions major_only draft_included published_only pending_review superseded_included since_last_audit last_five"),
];

/// Optional scalar parameters: `(name, kind, default)`. Kinds are
/// `s`tring, `i`nteger, `n`umber and `b`oolean.
pub const SCALAR_PARAMS: &[(&str, char, Option<&str>)] = &[
    ("limit", 'i', Some("50")),
    ("offset", 'i', Some("0")),
    ("page_size", 'i', Some("25")),
    ("include_archived", 'b', Some("false")),
    ("include_inactive", 'b', Some("false")),
    ("dry_run", 'b', Some("false")),
    ("page_token", 's', None),
    ("as_of_date", 's', None),
    ("requested_by", 's', None),
    ("min_amount", 'n', None),
    ("max_amount", 'n', None),
    ("timeout_seconds", 'i', Some("30")),
    ("confidence_threshold", 'n', Some("0.75")),
    ("search_text", 's', None),
    ("locale", 's', Some("en-US")),
    ("max_results", 'i', Some("100")),
    ("include_attachments", 'b', Some("false")),
    ("correlation_id", 's', None),
    ("rounding_digits", 'i', Some("2")),
    ("notify_watchers", 'b', Some("true")),
];

/// Optional array parameters: `(name, item kind)`.
pub const ARRAY_PARAMS: &[(&str, char)] = &[
    ("fields", 's'),
    ("tags", 's'),
    ("cost_center_codes", 's'),
    ("exclude_ids", 's'),
    ("cc_recipients", 's'),
    ("fiscal_years", 'i'),
    ("label_filters", 's'),
];

/// Optional object parameters: `(name, [(child, kind)])`.
pub const OBJECT_PARAMS: &[(&str, &[(&str, char)])] = &[
    ("date_range", &[("start_date", 's'), ("end_date", 's')]),
    ("pagination", &[("page", 'i'), ("per_page", 'i')]),
    ("amount_range", &[("min", 'n'), ("max", 'n')]),
    ("sort", &[("field", 's'), ("descending", 'b')]),
    ("audit", &[("reason", 's'), ("ticket_ref", 's')]),
];

/// Detail sentences appended after a tool's summary. They carry usage notes
/// that only the full JSON schema repeats.
pub const DETAIL_SENTENCES: &[&str] = &[
    "Results are paginated and sorted by the requested field, with the default ordering applied when no sort field is supplied.",
    "Only records visible to the calling user are returned, and restricted records are silently omitted from the response.",
    "Archived entries are excluded unless explicitly requested through the corresponding flag.",
    "Monetary values are reported in the requested currency using the month-end exchange rate published by treasury.",
    "Requests exceeding the rate limit are rejected with an error that includes a retry hint in seconds.",
    "Use the filters to narrow the result set before exporting large volumes of data.",
    "Dates are interpreted in the caller's configured timezone unless an explicit offset is included.",
    "Every call is written to the audit log together with the requesting user and the correlation identifier.",
    "Partial failures are reported per item so that callers can retry only the affected entries.",
    "Large responses are truncated at the configured limit and include a token for fetching the next page.",
    "Field names follow the internal data dictionary and are stable across minor releases of the service.",
    "The operation is idempotent when the same correlation identifier is supplied within twenty-four hours.",
    "Values marked as confidential are masked unless the caller holds the matching access level.",
    "Numbers are rounded half away from zero to the requested number of digits before formatting.",
    "When several filters are combined they are applied conjunctively, and empty filters are ignored.",
    "The service reads from a replica that may lag the primary database by up to five minutes.",
];

/// Filler words of assorted lengths, used for exact-size padding.
pub const TAG_WORDS: &[&str] = &[
    "api",
    "ops",
    "ledger",
    "audit",
    "batch",
    "export",
    "report",
    "review",
    "sync",
    "query",
    "quota",
    "index",
    "refund",
    "payroll",
    "billing",
    "vendor",
    "archive",
    "catalog",
    "dispatch",
    "forecast",
    "headcount",
    "inventory",
    "analytics",
    "procurement",
    "compliance",
    "onboarding",
    "escalation",
    "reconciliation",
    "settlement",
    "retention",
    "workflow",
    "registry",
    "pipeline",
    "schedule",
    "telemetry",
    "approval",
    "budget",
    "fx",
    "kpi",
    "hr",
    "crm",
    "erp",
    "sla",
    "etl",
    "cdc",
    "pii",
    "mfa",
    "sso",
    "gl",
    "po",
];

pub const FIRST_NAMES: &[&str] = &[
    "Mira", "Joana", "Tomasz", "Aiko", "Lukas", "Ines", "Rafael", "Sofia", "Niamh", "Emre", "Priya", "Jonas", "Clara",
    "Mateo", "Elif", "Anton", "Leonie", "Ravi", "Marta", "Oskar", "Yara", "Henrik", "Beatriz", "Kenji",
];

pub const LAST_NAMES: &[&str] = &[
    "Okafor",
    "Reis",
    "Nowak",
    "Tanaka",
    "Brandt",
    "Costa",
    "Moreau",
    "Lindqvist",
    "Byrne",
    "Yilmaz",
    "Raman",
    "Keller",
    "Santos",
    "Novak",
    "Fischer",
    "Duarte",
    "Haddad",
    "Larsen",
    "Silva",
    "Weber",
    "Ferreira",
    "Kowalski",
];

pub const OFFICES: &[&str] = &["Berlin", "Lisbon", "Madrid", "Dublin", "Amsterdam", "Munich", "Warsaw", "Toronto"];

pub const PRODUCTS: &[&str] = &["Helix", "Atlas", "Nimbus", "Orion", "Vega", "Lyra", "Pulsar", "Quasar"];

pub const PROJECTS: &[&str] = &[
    "Atlas Migration",
    "Beacon",
    "Cobalt",
    "Driftwood",
    "Ember",
    "Falcon",
    "Granite",
    "Harbor",
    "Juniper",
    "Keystone",
    "Lantern",
    "Meridian",
];

pub const JOB_TITLES: &[&str] = &[
    "Staff Data Engineer",
    "Senior Financial Analyst",
    "Procurement Lead",
    "Principal Product Manager",
    "Security Architect",
    "Customer Success Manager",
    "Payroll Specialist",
    "Head of Facilities",
    "Senior Legal Counsel",
    "Platform Engineering Manager",
    "Treasury Analyst",
    "Talent Partner",
];

pub const VENDOR_NAMES: &[&str] = &[
    "Ostrava Metals",
    "Baltic Circuits",
    "Tagus Logistics",
    "Rhine Polymers",
    "Alpine Optics",
    "Nordic Cables",
    "Douro Packaging",
    "Vistula Components",
    "Liffey Systems",
    "Ebro Fasteners",
];

pub const SEGMENTS: &[&str] =
    &["retail", "healthcare", "public sector", "manufacturing", "financial services", "logistics"];
