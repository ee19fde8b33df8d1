//! TOML experiment documents and bundled presets.
//!
//! ```toml
//! trials = 20
//! seed = 7
//! alphas = [0.5, 1.0, 2.0]
//! checks = ["diagonal_invariant", "frame_change"]
//!
//! [group]
//! kind = "cyclic"
//! n = 3
//!
//! [system]
//! regular = true        # or: mults = [1, 1, 0]
//!
//! [[frames]]
//! ideal = true
//!
//! [[frames]]
//! mults = [1, 1, 0]
//! seed = [[0.7, 0.0], [0.7, 0.1]]   # optional, [re, im] per basis vector
//! qrf_wellformed = true             # optional, default true
//! ```
//!
//! Optional top-level keys: `trials`, `seed`, `alphas`, `tolerance`,
//! `log_base` (`"natural"` or `"two"`), `checks`, `subset_cap`,
//! `witness_attempts`. Omitted `checks` means every applicable check except
//! `tradeoff_violation`.

use serde::{Deserialize, Serialize};

use crate::entropy::LogBase;
use crate::error::{Error, Result};
use crate::group::GroupKind;
use crate::verify::spec::{
    Check, ExperimentSpec, FrameConfig, SystemConfig, DEFAULT_ALPHAS, DEFAULT_SUBSET_CAP,
    DEFAULT_TRIALS, DEFAULT_WITNESS_ATTEMPTS,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    kind: String,
    n: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ideal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mults: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qrf_wellformed: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    regular: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mults: Option<Vec<usize>>,
}

// Scalars first: TOML needs plain keys ahead of tables.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_base: Option<LogBase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subset_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_attempts: Option<usize>,
    group: RawGroup,
    system: RawSystem,
    frames: Vec<RawFrame>,
}

fn group_kind(raw: &RawGroup) -> Result<GroupKind> {
    match raw.kind.as_str() {
        "cyclic" => Ok(GroupKind::Cyclic(raw.n)),
        "dihedral" => Ok(GroupKind::Dihedral(raw.n)),
        "symmetric" => Ok(GroupKind::Symmetric(raw.n)),
        other => Err(Error::Config(format!(
            "group.kind: unknown group `{other}` (expected cyclic, dihedral or symmetric)"
        ))),
    }
}

fn frame_config(k: usize, raw: RawFrame) -> Result<FrameConfig> {
    let at = |msg: &str| Error::Config(format!("frames[{k}]: {msg}"));
    match (raw.ideal, raw.mults) {
        (Some(true), None) => {
            if raw.seed.is_some() || raw.qrf_wellformed.is_some() {
                return Err(at("`seed` and `qrf_wellformed` apply to non-ideal frames only"));
            }
            Ok(FrameConfig::Ideal)
        }
        (Some(false) | None, Some(mults)) => Ok(FrameConfig::NonIdeal {
            mults,
            seed: raw.seed,
            qrf_wellformed: raw.qrf_wellformed.unwrap_or(true),
        }),
        (Some(true), Some(_)) => Err(at("`ideal = true` conflicts with `mults`")),
        _ => Err(at("needs either `ideal = true` or `mults`")),
    }
}

fn system_config(raw: RawSystem) -> Result<SystemConfig> {
    match (raw.regular, raw.mults) {
        (Some(true), None) => Ok(SystemConfig::Regular),
        (Some(false) | None, Some(m)) => Ok(SystemConfig::Mults(m)),
        (Some(true), Some(_)) => Err(Error::Config("system: `regular = true` conflicts with `mults`".into())),
        _ => Err(Error::Config("system: needs either `regular = true` or `mults`".into())),
    }
}

/// Parses and validates a TOML experiment document.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let group = group_kind(&raw.group)?;
    let frames = raw
        .frames
        .into_iter()
        .enumerate()
        .map(|(k, f)| frame_config(k, f))
        .collect::<Result<Vec<_>>>()?;
    let system = system_config(raw.system)?;
    let mut spec = ExperimentSpec::new(group, frames, system);
    spec.trials = raw.trials.unwrap_or(DEFAULT_TRIALS);
    spec.seed = raw.seed.unwrap_or(0);
    spec.alphas = raw.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    spec.tolerance = raw.tolerance;
    spec.log_base = raw.log_base.unwrap_or_default();
    spec.subset_cap = raw.subset_cap.unwrap_or(DEFAULT_SUBSET_CAP);
    spec.witness_attempts = raw.witness_attempts.unwrap_or(DEFAULT_WITNESS_ATTEMPTS);
    if let Some(names) = raw.checks {
        spec.checks = names
            .iter()
            .map(|n| {
                Check::from_name(n).ok_or_else(|| {
                    Error::Config(format!(
                        "checks: unknown check `{n}` (known: {})",
                        Check::ALL.map(Check::name).join(", ")
                    ))
                })
            })
            .collect::<Result<_>>()?;
    }
    spec.validate()?;
    Ok(spec)
}

/// Writes a spec as a TOML document with every field explicit.
pub fn to_toml(spec: &ExperimentSpec) -> Result<String> {
    let (kind, n) = match spec.group {
        GroupKind::Cyclic(n) => ("cyclic", n),
        GroupKind::Dihedral(n) => ("dihedral", n),
        GroupKind::Symmetric(n) => ("symmetric", n),
    };
    let frames = spec
        .frames
        .iter()
        .map(|f| match f {
            FrameConfig::Ideal => RawFrame {
                ideal: Some(true),
                ..RawFrame::default()
            },
            FrameConfig::NonIdeal {
                mults,
                seed,
                qrf_wellformed,
            } => RawFrame {
                ideal: None,
                mults: Some(mults.clone()),
                seed: seed.clone(),
                qrf_wellformed: Some(*qrf_wellformed),
            },
        })
        .collect();
    let system = match &spec.system {
        SystemConfig::Regular => RawSystem {
            regular: Some(true),
            mults: None,
        },
        SystemConfig::Mults(m) => RawSystem {
            regular: None,
            mults: Some(m.clone()),
        },
    };
    let raw = RawConfig {
        trials: Some(spec.trials),
        seed: Some(spec.seed),
        alphas: Some(spec.alphas.clone()),
        tolerance: spec.tolerance,
        log_base: Some(spec.log_base),
        checks: Some(spec.checks.iter().map(|c| c.name().to_string()).collect()),
        subset_cap: Some(spec.subset_cap),
        witness_attempts: Some(spec.witness_attempts),
        group: RawGroup {
            kind: kind.to_string(),
            n,
        },
        system,
        frames,
    };
    toml::to_string(&raw).map_err(|e| Error::Config(e.to_string()))
}

/// A bundled experiment.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub document: &'static str,
}

impl Preset {
    pub fn spec(&self) -> Result<ExperimentSpec> {
        parse_config(self.document)
    }
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "z2-ideal-pair",
        description: "Z2, two ideal frames, regular system; every applicable check",
        document: r#"
trials = 50
seed = 1

[group]
kind = "cyclic"
n = 2

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
ideal = true
"#,
    },
    Preset {
        name: "z3-three-frames",
        description: "Z3, three ideal frames, regular system (kinematical dimension 81)",
        document: r#"
trials = 20
seed = 3

[group]
kind = "cyclic"
n = 3

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
ideal = true

[[frames]]
ideal = true
"#,
    },
    Preset {
        name: "s3-two-frames",
        description: "S3, two ideal frames, regular system; frame changes for a non-abelian group",
        document: r#"
trials = 20
seed = 6

[group]
kind = "symmetric"
n = 3

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
ideal = true
"#,
    },
    Preset {
        name: "z2-nonideal-deff1",
        description: "Z2, two frames carrying only the trivial charge; effective dimension 1, no entropy gap",
        document: r#"
trials = 200
seed = 2
checks = ["nonideal_bound", "povm_resolution"]

[group]
kind = "cyclic"
n = 2

[system]
mults = [1, 1]

[[frames]]
mults = [1, 0]

[[frames]]
mults = [1, 0]
"#,
    },
    Preset {
        name: "z3-tradeoff-violation",
        description: "Z3, one ideal frame and one frame missing a charge sector; the dephased tradeoff breaks",
        document: r#"
trials = 50
seed = 5
checks = ["tradeoff_violation", "nonideal_bound", "povm_resolution"]
witness_attempts = 200

[group]
kind = "cyclic"
n = 3

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
mults = [1, 1, 0]
"#,
    },
    Preset {
        name: "zn-clock-cutoff",
        description: "Z8 clocks keeping charges |q| <= 2 only; effective dimension 5 of 8",
        document: r#"
trials = 50
seed = 8
checks = ["nonideal_bound", "povm_resolution"]

[group]
kind = "cyclic"
n = 8

[system]
regular = true

[[frames]]
mults = [1, 1, 1, 0, 0, 0, 1, 1]

[[frames]]
mults = [1, 1, 1, 0, 0, 0, 1, 1]
"#,
    },
];

pub fn presets() -> &'static [Preset] {
    &PRESETS
}

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.map(|p| p.name).join(", ")
            ))
        })?
        .spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[group]
kind = "cyclic"
n = 2

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
ideal = true
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.trials, 50);
        assert_eq!(spec.alphas, DEFAULT_ALPHAS.to_vec());
        assert_eq!(spec.tolerance, None);
        assert_eq!(spec.checks, spec.default_checks());
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config(&format!("colour = 3\n{MINIMAL}")).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let err = parse_config(&MINIMAL.replace("ideal = true\n\n[[frames]]", "ideal = true\nspin = 1\n\n[[frames]]"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("spin"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("trials = \"many\"\n[group]\nkind = \"cyclic\"\nn = 2\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn overfull_wellformed_frame_is_rejected() {
        let doc = MINIMAL.replacen("ideal = true", "mults = [2, 0]\nqrf_wellformed = true", 1);
        let err = parse_config(&doc).unwrap_err().to_string();
        assert!(err.contains("the multiplicities must satisfy"), "{err}");
        let loose = doc.replace("qrf_wellformed = true", "qrf_wellformed = false");
        parse_config(&loose).unwrap();
    }

    #[test]
    fn bad_frames_and_checks_are_rejected() {
        assert!(parse_config(&MINIMAL.replacen("ideal = true", "ideal = true\nmults = [1, 1]", 1)).is_err());
        assert!(parse_config(&format!("checks = [\"bogus_check\"]\n{MINIMAL}")).is_err());
        assert!(parse_config(&MINIMAL.replace("cyclic", "cubic")).is_err());
    }

    #[test]
    fn round_trip_through_toml() {
        for p in presets() {
            let spec = p.spec().unwrap();
            let text = to_toml(&spec).unwrap();
            assert_eq!(parse_config(&text).unwrap(), spec, "{}", p.name);
        }
        let mut spec = parse_config(MINIMAL).unwrap();
        spec.tolerance = Some(1e-7);
        spec.log_base = LogBase::Two;
        spec.frames[1] = FrameConfig::NonIdeal {
            mults: vec![1, 1],
            seed: Some(vec![[0.1, -0.3], [1.0 / 3.0, 0.0]]),
            qrf_wellformed: true,
        };
        spec.checks = spec.default_checks();
        assert_eq!(parse_config(&to_toml(&spec).unwrap()).unwrap(), spec);
    }

    #[test]
    fn all_presets_parse() {
        let names: Vec<&str> = presets().iter().map(|p| p.name).collect();
        for n in [
            "z2-ideal-pair",
            "z3-three-frames",
            "s3-two-frames",
            "z2-nonideal-deff1",
            "z3-tradeoff-violation",
            "zn-clock-cutoff",
        ] {
            assert!(names.contains(&n));
            preset(n).unwrap();
        }
        assert!(preset("nope").is_err());
    }
}
