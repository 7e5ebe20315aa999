//! JSON shapes for results, shared by the CLI and the Python bindings.

use std::time::Duration;

use serde_json::{json, Value};

use crate::search::{DavenportResult, EnumerationReport};
use crate::sequence::Sequence;
use crate::structure::ClassificationResult;
use crate::verify::VerificationReport;

pub(crate) fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

/// Fields that vary between otherwise identical runs; golden comparisons drop them.
pub const TIMING_FIELDS: &[&str] = &["elapsed_ms"];

/// Removes [`TIMING_FIELDS`] from a JSON object, recursively.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for f in TIMING_FIELDS {
                map.remove(*f);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

impl DavenportResult {
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.to_string(),
            "D": self.d,
            "witness": self.witness.to_string(),
            "elapsed_ms": self.elapsed.as_millis() as u64,
            "nodes": self.nodes_explored,
        })
    }
}

impl EnumerationReport {
    pub fn to_json(&self) -> Value {
        let reps: Vec<String> = self.orbit_representatives.iter().map(Sequence::to_string).collect();
        json!({
            "group": self.group.to_string(),
            "D": self.length,
            "total": self.total_count,
            "orbits": self.orbit_count,
            "representatives": reps,
            "elapsed_ms": self.elapsed.as_millis() as u64,
            "nodes": self.nodes,
        })
    }
}

impl ClassificationResult {
    pub fn to_json(&self, seq: &Sequence) -> Value {
        json!({
            "group": seq.group().to_string(),
            "sequence": seq.to_string(),
            "is_type1": self.is_type1,
            "type1_witnesses": self.type1_witnesses,
            "is_type2": self.is_type2,
            "type2_witnesses": self.type2_witnesses,
        })
    }
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_timing_removes_nested_fields() {
        let mut v = json!({"a": 1, "elapsed_ms": 5, "inner": [{"elapsed_ms": 3, "b": 2}]});
        strip_timing(&mut v);
        assert_eq!(v, json!({"a": 1, "inner": [{"b": 2}]}));
    }
}
