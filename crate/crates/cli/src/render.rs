//! `key=value` reports with an optional JSON block and a provenance block.

use std::fmt::{self, Write as _};

use num_traits::ToPrimitive;
use pgroup_core::bounds::BigRational;
use pgroup_core::Rational;
use serde_json::{json, Map, Value};

/// Shortest decimal with at most six fractional digits.
pub fn decimal(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn rational(r: &Rational) -> String {
    format!("{} (≈{})", r, decimal(*r.numer() as f64 / *r.denom() as f64))
}

pub fn big_rational(r: &BigRational) -> String {
    let approx = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    format!("{} (≈{})", r, decimal(approx))
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": r.to_string(), "approx": *r.numer() as f64 / *r.denom() as f64 })
}

#[derive(Default)]
pub struct Report {
    body: String,
    json: Map<String, Value>,
    sections: Vec<(String, String)>,
    provenance: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kv(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        let v = value.to_string();
        writeln!(self.body, "{key}={v}").unwrap();
        self.json.insert(key.into(), Value::String(v));
        self
    }

    pub fn int(&mut self, key: &str, value: u64) -> &mut Self {
        writeln!(self.body, "{key}={value}").unwrap();
        self.json.insert(key.into(), json!(value));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        writeln!(self.body, "{key}={value}").unwrap();
        self.json.insert(key.into(), json!(value));
        self
    }

    pub fn rat(&mut self, key: &str, value: &Rational) -> &mut Self {
        writeln!(self.body, "{key}={}", rational(value)).unwrap();
        self.json.insert(key.into(), rational_json(value));
        self
    }

    /// A value already rendered, with its JSON form supplied separately.
    pub fn raw(&mut self, key: &str, text: &str, value: Value) -> &mut Self {
        writeln!(self.body, "{key}={text}").unwrap();
        self.json.insert(key.into(), value);
        self
    }

    /// A bracketed block of free text, e.g. an embedded set file.
    pub fn section(&mut self, name: &str, text: String) -> &mut Self {
        self.json.insert(name.into(), Value::String(text.clone()));
        self.sections.push((name.into(), text));
        self
    }

    /// Non-deterministic context, kept out of the body and the JSON block.
    pub fn provenance(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.provenance.push((key.into(), value.to_string()));
        self
    }

    /// Body, sections, then the JSON block when asked for. Never includes
    /// provenance, so the result is stable across runs.
    pub fn deterministic(&self, with_json: bool) -> String {
        let mut out = self.body.clone();
        for (name, text) in &self.sections {
            writeln!(out, "[{name}]").unwrap();
            out.push_str(text);
            if !text.ends_with('\n') {
                out.push('\n');
            }
        }
        if with_json {
            out.push_str("[json]\n");
            out.push_str(&serde_json::to_string_pretty(&Value::Object(self.json.clone())).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn with_provenance(&self, with_json: bool) -> String {
        let mut out = self.deterministic(with_json);
        out.push_str("[provenance]\n");
        for (k, v) in &self.provenance {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}
