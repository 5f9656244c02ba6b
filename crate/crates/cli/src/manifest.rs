//! Dataset manifest, schema version 1.
//!
//! Unknown fields at any level are kept in `extra` and written back, so a
//! read/write cycle preserves them. Output is canonical: sorted keys and
//! pretty-printed with a trailing newline.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use lightstage::LightRigF64;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Angle agreement required between an entry and the rig file, in degrees.
pub const ANGLE_TOLERANCE_DEG: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LightRef {
    Index(usize),
    Uniform,
}

impl Serialize for LightRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LightRef::Index(i) => s.serialize_u64(*i as u64),
            LightRef::Uniform => s.serialize_str("uniform"),
        }
    }
}

impl<'de> Deserialize<'de> for LightRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = LightRef;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative light index or \"uniform\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LightRef, E> {
                usize::try_from(v).map(LightRef::Index).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LightRef, E> {
                u64::try_from(v)
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
                    .and_then(|v| self.visit_u64(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<LightRef, E> {
                match v {
                    "uniform" => Ok(LightRef::Uniform),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// One captured frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlatEntry {
    pub subject: String,
    pub view: u32,
    pub expression: u32,
    pub light_index: LightRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub path: String,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

/// One synthesized relit frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelitEntry {
    pub env: String,
    pub yaw_deg: f64,
    pub alpha_blend: f64,
    pub exposure: f64,
    pub path: String,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(default)]
    pub entries: Vec<OlatEntry>,
    #[serde(default)]
    pub relit: Vec<RelitEntry>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            entries: Vec::new(),
            relit: Vec::new(),
            extra: BTreeMap::new(),
        }
    }
}

/// Counts returned by a successful validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestSummary {
    pub olat_entries: usize,
    pub uniform_entries: usize,
    pub relit_entries: usize,
}

impl Manifest {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let m: Manifest = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::parse(format!("manifest {}: {}", e.path(), e.inner())))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::parse(format!(
                "manifest schema_version: unsupported version {} (expected {SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }

    pub fn to_canonical_json(&self) -> CliResult<String> {
        let v = crate::report::to_canonical_value(self)?;
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::validation(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Checks path uniqueness and, given a rig, index range and angle agreement.
    /// All problems are reported together, each naming its entry.
    pub fn validate(&self, rig: Option<&LightRigF64>) -> CliResult<ManifestSummary> {
        let mut problems = Vec::new();
        let mut seen: HashMap<String, String> = HashMap::new();
        let mut check_path = |path: &str, at: String, problems: &mut Vec<String>| {
            if path.is_empty()
                || Path::new(path).is_absolute()
                || Path::new(path).components().any(|c| c.as_os_str() == "..")
            {
                problems.push(format!("{at}.path: {path:?} is not a relative path inside the dataset"));
            }
            if let Some(first) = seen.insert(path.to_string(), at.clone()) {
                problems.push(format!("{at}.path: {path:?} duplicates {first}"));
            }
        };
        let rig_entries = rig.map(|r| r.to_file_entries());

        let mut uniform = 0;
        for (i, e) in self.entries.iter().enumerate() {
            let at = format!("entries[{i}]");
            check_path(&e.path, at.clone(), &mut problems);
            let LightRef::Index(idx) = e.light_index else {
                uniform += 1;
                continue;
            };
            for (name, v) in [("theta", e.theta), ("phi", e.phi)] {
                if v.is_none_or(|v| !v.is_finite()) {
                    problems.push(format!("{at}.{name}: required and finite for an OLAT frame"));
                }
            }
            if let Some(rig) = &rig_entries {
                match rig.get(idx) {
                    None => problems.push(format!("{at}.light_index: {idx} outside rig of {} lights", rig.len())),
                    Some(r) => {
                        if let Some(t) = e.theta.filter(|t| (t - r.theta).abs() > ANGLE_TOLERANCE_DEG) {
                            problems.push(format!("{at}.theta: {t} disagrees with rig light {idx} ({})", r.theta));
                        }
                        if let Some(p) = e.phi.filter(|p| wrapped_deg(p - r.phi) > ANGLE_TOLERANCE_DEG) {
                            problems.push(format!("{at}.phi: {p} disagrees with rig light {idx} ({})", r.phi));
                        }
                    }
                }
            } else if e.theta.is_some_and(|t| !(0.0..=180.0).contains(&t)) {
                problems.push(format!("{at}.theta: outside [0, 180]"));
            }
        }
        for (i, e) in self.relit.iter().enumerate() {
            let at = format!("relit[{i}]");
            check_path(&e.path, at.clone(), &mut problems);
            if !(0.0..=1.0).contains(&e.alpha_blend) {
                problems.push(format!("{at}.alpha_blend: {} outside [0, 1]", e.alpha_blend));
            }
            if !(e.exposure > 0.0 && e.exposure.is_finite()) {
                problems.push(format!("{at}.exposure: must be positive"));
            }
            if !e.yaw_deg.is_finite() {
                problems.push(format!("{at}.yaw_deg: must be finite"));
            }
        }
        if !problems.is_empty() {
            return Err(CliError::validation(problems.join("; ")));
        }
        Ok(ManifestSummary {
            olat_entries: self.entries.len() - uniform,
            uniform_entries: uniform,
            relit_entries: self.relit.len(),
        })
    }
}

fn wrapped_deg(d: f64) -> f64 {
    let r = d.rem_euclid(360.0);
    r.min(360.0 - r)
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Manifest::from_json(&text).map_err(|e| e.context(path.display()))
}

pub fn write_manifest(path: &Path, m: &Manifest) -> CliResult<()> {
    std::fs::write(path, m.to_canonical_json()?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}
