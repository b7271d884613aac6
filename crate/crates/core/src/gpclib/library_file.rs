//! JSON library files.
//!
//! ```json
//! {
//!   "name": "my-cell",
//!   "final_rule": "ragged-cpa",
//!   "fused_unit_cost": 2,
//!   "overhead": { "area": 1.0, "delay": 1.0 },
//!   "gpcs": [
//!     { "name": "C6:111", "inputs": [6], "outputs": [1, 1, 1], "cost": 3, "delay": 0.38 }
//!   ]
//! }
//! ```
//!
//! Tuples are written most-significant column first. `kind` defaults to
//! `lut-based` and `enabled` to `true`. `C1:1` is added when missing.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArchProfile, FinalRule, Gpc, GpcError, GpcKind, Overhead};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryFile {
    name: String,
    final_rule: FinalRule,
    #[serde(default = "default_fused", skip_serializing_if = "Option::is_none")]
    fused_unit_cost: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overhead: Option<Overhead>,
    gpcs: Vec<GpcEntry>,
}

fn default_fused() -> Option<u32> {
    Some(2)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GpcEntry {
    name: String,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    cost: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delay: Option<f64>,
    #[serde(default = "default_kind")]
    kind: GpcKind,
    #[serde(default = "default_enabled")]
    enabled: bool,
}

fn default_kind() -> GpcKind {
    GpcKind::LutBased
}

fn default_enabled() -> bool {
    true
}

fn field_error(index: usize, field: &'static str, message: impl Into<String>) -> GpcError {
    GpcError::LibraryField {
        index,
        field,
        message: message.into(),
    }
}

/// Parses a library from JSON text.
pub fn parse_library(text: &str) -> Result<ArchProfile, GpcError> {
    let file: LibraryFile = serde_json::from_str(text).map_err(|e| GpcError::LibrarySyntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut gpcs = Vec::with_capacity(file.gpcs.len());
    for (i, entry) in file.gpcs.into_iter().enumerate() {
        let delay_ps = match entry.delay {
            None => None,
            Some(d) if d.is_finite() && d > 0.0 && d < 1.0e6 => Some((d * 1000.0).round() as u32),
            Some(d) => return Err(field_error(i, "delay", format!("{d} is not a positive delay in ns"))),
        };
        let gpc = Gpc::from_tuples(&entry.inputs, &entry.outputs, entry.cost, entry.kind)
            .map_err(|e| field_error(i, "inputs/outputs", e.to_string()))?;
        if gpc.name() != entry.name {
            return Err(field_error(
                i,
                "name",
                format!("{} does not match the tuples, expected {}", entry.name, gpc.name()),
            ));
        }
        gpcs.push(gpc.with_delay_ps(delay_ps).with_enabled(entry.enabled));
    }
    let fused = file.fused_unit_cost.unwrap_or(2);
    ArchProfile::new(file.name, file.final_rule, gpcs, fused, file.overhead)
}

/// Serializes a profile to pretty-printed JSON.
pub fn library_to_string(profile: &ArchProfile) -> String {
    let file = LibraryFile {
        name: profile.name().to_string(),
        final_rule: profile.final_rule(),
        fused_unit_cost: Some(profile.fused_unit_cost()),
        overhead: profile.overhead(),
        gpcs: profile
            .gpcs()
            .iter()
            .map(|g| GpcEntry {
                name: g.name().to_string(),
                inputs: g.inputs_msb_first(),
                outputs: g.outputs_msb_first(),
                cost: g.cost(),
                delay: g.delay_ps().map(|d| f64::from(d) / 1000.0),
                kind: g.kind(),
                enabled: g.enabled(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("library serializes");
    s.push('\n');
    s
}

pub fn load_library(path: impl AsRef<Path>) -> Result<ArchProfile, GpcError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| GpcError::Io(format!("{}: {e}", path.display())))?;
    parse_library(&text)
}

pub fn save_library(profile: &ArchProfile, path: impl AsRef<Path>) -> Result<(), GpcError> {
    let path = path.as_ref();
    fs::write(path, library_to_string(profile)).map_err(|e| GpcError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpclib::{builtin_library, ProfileKind};

    #[test]
    fn builtins_round_trip() {
        for kind in ProfileKind::BUILTIN {
            let p = builtin_library(kind);
            let back = parse_library(&library_to_string(&p)).unwrap();
            assert_eq!(back, p, "{kind}");
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        let p = builtin_library(ProfileKind::XLuxorPlus);
        save_library(&p, &path).unwrap();
        assert_eq!(load_library(&path).unwrap(), p);
    }

    #[test]
    fn negative_slack_rejected() {
        let text = r#"{"name":"bad","final_rule":"ternary","gpcs":[
            {"name":"C3:11","inputs":[3],"outputs":[1,1],"cost":1},
            {"name":"C6:111","inputs":[6],"outputs":[1,1,1],"cost":3},
            {"name":"C7:11","inputs":[7],"outputs":[1,1],"cost":1}]}"#;
        let err = parse_library(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("arithmetic slack negative"), "{msg}");
        assert!(msg.contains("gpcs[2]"), "{msg}");
    }

    #[test]
    fn missing_cost_rejected() {
        let text = "{\"name\":\"bad\",\"final_rule\":\"ternary\",\"gpcs\":[\n  {\"name\":\"C3:11\",\"inputs\":[3],\"outputs\":[1,1]}]}";
        let err = parse_library(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cost"), "{msg}");
        assert!(matches!(err, GpcError::LibrarySyntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn name_mismatch_rejected() {
        let text = r#"{"name":"bad","final_rule":"ternary","gpcs":[
            {"name":"C3:11","inputs":[3],"outputs":[1,1],"cost":1},
            {"name":"C6:11","inputs":[6],"outputs":[1,1,1],"cost":3}]}"#;
        assert!(matches!(parse_library(text), Err(GpcError::LibraryField { index: 1, field: "name", .. })));
    }

    #[test]
    fn pseudo_wire_added() {
        let text = r#"{"name":"mine","final_rule":"ragged-cpa","gpcs":[
            {"name":"C3:11","inputs":[3],"outputs":[1,1],"cost":1},
            {"name":"C6:111","inputs":[6],"outputs":[1,1,1],"cost":2}]}"#;
        let p = parse_library(text).unwrap();
        assert_eq!(p.kind(), ProfileKind::Custom);
        assert!(p.gpc("C1:1").is_some());
        assert_eq!(p.fused_unit_cost(), 2);
    }
}
