//! Report types and their byte-deterministic JSON encoding.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::verify::spec::{Check, CheckKind, ExperimentSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// One compared pair of quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub trial: usize,
    /// Which frames / subsystems / form the row refers to.
    pub context: String,
    pub alpha: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` for identities, the amount of violation for bounds.
    pub residual: f64,
    pub extras: BTreeMap<String, f64>,
}

impl Row {
    pub fn equality(trial: usize, context: String, alpha: Option<f64>, lhs: f64, rhs: f64) -> Self {
        Self {
            trial,
            context,
            alpha,
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            extras: BTreeMap::new(),
        }
    }

    /// `lhs <= rhs`; residual is the overshoot.
    pub fn upper_bound(trial: usize, context: String, alpha: Option<f64>, lhs: f64, rhs: f64) -> Self {
        Self {
            residual: (lhs - rhs).max(0.0),
            ..Self::equality(trial, context, alpha, lhs, rhs)
        }
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }
}

/// A state found by the tradeoff search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub attempt: usize,
    pub frames: [String; 2],
    pub gap: f64,
    pub threshold: f64,
    /// Physical state amplitudes as `[re, im]` in the canonical product basis.
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: Check,
    pub kind: CheckKind,
    pub tolerance: f64,
    pub max_residual: f64,
    pub trials_run: usize,
    /// Trials skipped because a coherent-state conditioning had zero overlap.
    pub trials_excluded: usize,
    /// Rows whose residual exceeds the tolerance.
    pub violations: usize,
    pub passed: bool,
    /// Check-level numbers that do not belong to a single row.
    pub summary: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON encoding of the spec.
    pub spec_hash: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub spec: ExperimentSpec,
    pub checks: Vec<CheckReport>,
    pub witness: Option<Witness>,
    pub passed: bool,
}

impl InvariantReport {
    pub fn check(&self, check: Check) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == check)
    }

    pub fn to_json(&self) -> Result<String> {
        to_deterministic_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
    }
}

pub fn spec_hash(spec: &ExperimentSpec) -> String {
    let canonical = serde_json::to_vec(spec).expect("spec serializes");
    hex::encode(Sha256::digest(&canonical))
}

/// Pretty JSON with every float written to 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_deterministic_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Consistency(format!("report serialization: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Text form of a float used in tables: same 17 digits as the JSON.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
