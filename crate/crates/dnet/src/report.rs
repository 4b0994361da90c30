//! JSON rendering of evaluator results.

use dnet_core::{DiscrepancyReport, Metric};
use serde_json::{json, Map, Value};

use crate::{SCHEMA, VERSION};

/// Name used on the command line and in JSON, e.g. `extreme-l2`.
pub fn metric_label(metric: Metric, p: f64) -> String {
    if metric == Metric::Diaphony {
        "diaphony".into()
    } else if p == 2.0 {
        format!("{metric}-l2")
    } else {
        format!("{metric}-lp")
    }
}

pub fn report_json(rep: &DiscrepancyReport) -> Value {
    let mut v = json!({
        "schema": SCHEMA,
        "version": VERSION,
        "metric": metric_label(rep.metric, rep.p),
        "p": rep.p,
        "value": rep.value,
        "value_squared": rep.value_squared,
        "method": rep.method.as_str(),
        "error_estimate": rep.error_estimate,
        "n": rep.n,
        "d": rep.d,
        "seed": rep.seed,
        "converged": rep.converged,
    });
    if let Some(e) = &rep.exact_squared {
        v["exact_squared"] = json!(e);
    }
    v
}

/// Adds the schema and version keys to an object.
pub fn stamped(mut fields: Map<String, Value>) -> Value {
    fields.insert("schema".into(), json!(SCHEMA));
    fields.insert("version".into(), json!(VERSION));
    Value::Object(fields)
}
