//! Versioned JSON reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::field_tower::Laurent;
use crate::hodge_pink::quotient::KVec;
use crate::tate::TateSeries;

pub const REPORT_VERSION: &str = "motcoh-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_UNDETERMINED: i32 = 4;

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    /// Module the error originated in.
    pub module: String,
    pub kind: &'static str,
    pub message: String,
}

impl ErrorInfo {
    pub fn new(module: &str, e: &Error) -> Self {
        ErrorInfo { module: module.into(), kind: kind(e), message: e.to_string() }
    }
}

pub fn kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } | Error::InvalidTau(_) | Error::NonPrime(_) | Error::FieldTooLarge { .. } => "config",
        Error::Undetermined(_) | Error::PrecisionExhausted(_) | Error::DivisionByZero { .. } => "undetermined",
        Error::Precondition(_)
        | Error::UnsupportedShape(_)
        | Error::NotInTower
        | Error::NotInNA(_)
        | Error::NonStrict(_)
        | Error::Hypothesis(_)
        | Error::Unsolvable { .. } => "precondition",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match kind(e) {
        "config" => EXIT_CONFIG,
        "undetermined" => EXIT_UNDETERMINED,
        _ => EXIT_PRECONDITION,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrecisionMeta {
    pub t: usize,
    pub u: i64,
    pub j: usize,
    pub degree_bound: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    /// Canonical config text and effective flags.
    pub inputs: Value,
    pub precision: PrecisionMeta,
    pub status: &'static str,
    pub exit_code: i32,
    pub results: Value,
    pub error: Option<ErrorInfo>,
    /// Seconds since the epoch; excluded from comparisons.
    pub timestamp: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON value without the timestamp, for determinism checks.
    pub fn comparable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timestamp");
        }
        v
    }
}

pub fn laurent(x: &Laurent) -> Value {
    let (start, coeffs, prec) = x.dump();
    json!({ "start": start, "coeffs": coeffs, "prec": prec, "exact": x.is_exact() })
}

/// t-coefficients up to the last nonzero one.
pub fn tate(x: &TateSeries<Laurent>) -> Value {
    let cs = x.coeffs();
    let n = cs.iter().rposition(|c| !c.is_zero()).map_or(0, |k| k + 1);
    json!({ "nt": x.nt(), "coeffs": cs[..n].iter().map(laurent).collect::<Vec<_>>() })
}

/// Normal-form coordinates keyed "row:j-exponent".
pub fn kvec(v: &KVec) -> Value {
    let m: serde_json::Map<String, Value> = v.iter().map(|((i, k), x)| (format!("{i}:{k}"), laurent(x))).collect();
    Value::Object(m)
}
