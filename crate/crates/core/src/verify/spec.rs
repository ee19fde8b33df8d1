use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::entropy::LogBase;
use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupTable};
use crate::irreps::IrrepTable;
use crate::reps::{CompositeSpace, FrameSpec, RepSpec};
use crate::C64;

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_ALPHAS: [f64; 5] = [0.3, 0.5, 1.0, 2.0, 3.0];
pub const DEFAULT_SUBSET_CAP: usize = 64;
pub const DEFAULT_WITNESS_ATTEMPTS: usize = 200;
/// Above this many factors, kept sets are sampled instead of enumerated.
pub const MAX_ENUMERATED_FACTORS: usize = 6;

/// Invariant checks the engine knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Dephased reduced states of `X` and `Y` differ by a basis permutation.
    DephasedPermutation,
    /// `S_α(Δρ_X^{(i)}) = S_α(Δρ_Y^{(j)})`, plus the entanglement/coherence split.
    DiagonalInvariant,
    /// `S_α(ρ_Ω̄) + C_α(ρ_{Ω∖R_i})` agrees for every frame in `Ω`.
    SubsetAgreement,
    /// Moments of diagonal observables agree across the two perspectives.
    DiagonalMoments,
    /// Entropy difference equals the coherence difference and its
    /// single-frame-plus-correlation form.
    EntropyDecomposition,
    /// Max-minus-min system entropy equals the coherence spread.
    MaxDisagreement,
    /// Effective-dimension bound on the entropy gap between two frames.
    NonidealBound,
    /// Coherent-state POVM resolves the identity iff `m_q <= d_q`.
    PovmResolution,
    /// Frame-change unitary reproduces the direct reduction.
    FrameChange,
    /// Trivialization recovers the relational state.
    Trivialization,
    /// Search for a state breaking the two-frame tradeoff (non-ideal frames).
    TradeoffViolation,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::DephasedPermutation,
        Check::DiagonalInvariant,
        Check::SubsetAgreement,
        Check::DiagonalMoments,
        Check::EntropyDecomposition,
        Check::MaxDisagreement,
        Check::NonidealBound,
        Check::PovmResolution,
        Check::FrameChange,
        Check::Trivialization,
        Check::TradeoffViolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::DephasedPermutation => "dephased_permutation",
            Check::DiagonalInvariant => "diagonal_invariant",
            Check::SubsetAgreement => "subset_agreement",
            Check::DiagonalMoments => "diagonal_moments",
            Check::EntropyDecomposition => "entropy_decomposition",
            Check::MaxDisagreement => "max_disagreement",
            Check::NonidealBound => "nonideal_bound",
            Check::PovmResolution => "povm_resolution",
            Check::FrameChange => "frame_change",
            Check::Trivialization => "trivialization",
            Check::TradeoffViolation => "tradeoff_violation",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Tolerance used when the experiment does not override it.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::DephasedPermutation => 1e-12,
            Check::DiagonalMoments | Check::FrameChange | Check::Trivialization => 1e-10,
            _ => 1e-9,
        }
    }

    pub fn kind(self) -> CheckKind {
        match self {
            Check::NonidealBound => CheckKind::Bound,
            Check::TradeoffViolation => CheckKind::Existence,
            _ => CheckKind::Equality,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Equality,
    Bound,
    Existence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FrameConfig {
    Ideal,
    NonIdeal {
        mults: Vec<usize>,
        /// Complex amplitudes as `[re, im]` pairs; default seed when absent.
        seed: Option<Vec<[f64; 2]>>,
        /// When set, `m_q <= d_q` is enforced.
        qrf_wellformed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "mults", rename_all = "snake_case")]
pub enum SystemConfig {
    Regular,
    Mults(Vec<usize>),
}

/// Everything needed to reproduce a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub group: GroupKind,
    pub frames: Vec<FrameConfig>,
    pub system: SystemConfig,
    pub trials: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    /// Overrides every check's default tolerance when set.
    pub tolerance: Option<f64>,
    pub log_base: LogBase,
    pub checks: Vec<Check>,
    pub subset_cap: usize,
    pub witness_attempts: usize,
}

pub fn seed_vector(pairs: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])))
}

impl ExperimentSpec {
    /// A spec with defaults and the checks applicable to its frames.
    pub fn new(group: GroupKind, frames: Vec<FrameConfig>, system: SystemConfig) -> Self {
        let mut spec = Self {
            group,
            frames,
            system,
            trials: DEFAULT_TRIALS,
            seed: 0,
            alphas: DEFAULT_ALPHAS.to_vec(),
            tolerance: None,
            log_base: LogBase::Natural,
            checks: Vec::new(),
            subset_cap: DEFAULT_SUBSET_CAP,
            witness_attempts: DEFAULT_WITNESS_ATTEMPTS,
        };
        spec.checks = spec.default_checks();
        spec
    }

    pub fn with_checks(mut self, checks: &[Check]) -> Self {
        self.checks = checks.to_vec();
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tolerance_for(&self, check: Check) -> f64 {
        self.tolerance.unwrap_or_else(|| check.default_tolerance())
    }

    pub fn ideal_count(&self) -> usize {
        self.frames
            .iter()
            .filter(|f| matches!(f, FrameConfig::Ideal))
            .count()
    }

    pub fn all_ideal(&self) -> bool {
        self.ideal_count() == self.frames.len()
    }

    /// Checks that make sense for this frame configuration.
    pub fn default_checks(&self) -> Vec<Check> {
        Check::ALL
            .into_iter()
            .filter(|&c| c != Check::TradeoffViolation && self.applicability(c).is_ok())
            .collect()
    }

    fn applicability(&self, check: Check) -> Result<()> {
        let need = |ok: bool, why: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("check `{check}` {why}")))
            }
        };
        match check {
            Check::DephasedPermutation
            | Check::DiagonalInvariant
            | Check::SubsetAgreement
            | Check::DiagonalMoments
            | Check::FrameChange => need(self.ideal_count() >= 2, "needs at least two ideal frames"),
            Check::Trivialization => need(self.ideal_count() >= 1, "needs an ideal frame"),
            Check::EntropyDecomposition | Check::MaxDisagreement => need(
                self.frames.len() >= 2 && self.all_ideal(),
                "needs at least two frames, all ideal",
            ),
            Check::NonidealBound => need(self.frames.len() == 2, "needs exactly two frames"),
            Check::TradeoffViolation => need(
                self.frames.len() >= 2 && !self.all_ideal(),
                "needs at least two frames with at least one non-ideal",
            ),
            Check::PovmResolution => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::Config("at least one frame is required".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("alpha grid is empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::Config(format!("alpha values must be positive, got {a}")));
        }
        if self.subset_cap < 1 {
            return Err(Error::Config("subset_cap must be at least 1".into()));
        }
        for (k, c) in self.checks.iter().enumerate() {
            if self.checks[..k].contains(c) {
                return Err(Error::Config(format!("check `{c}` listed twice")));
            }
            self.applicability(*c)?;
        }
        self.build_space().map(|_| ())
    }

    pub fn build_irreps(&self) -> Result<Arc<IrrepTable>> {
        let group = GroupTable::from_kind(self.group)?;
        Ok(Arc::new(IrrepTable::for_group(&group)?))
    }

    pub fn build_space(&self) -> Result<Arc<CompositeSpace>> {
        let irreps = self.build_irreps()?;
        let frames = self
            .frames
            .iter()
            .enumerate()
            .map(|(k, f)| match f {
                FrameConfig::Ideal => Ok(FrameSpec::ideal(&irreps)),
                FrameConfig::NonIdeal {
                    mults,
                    seed,
                    qrf_wellformed,
                } => {
                    let seed = seed.as_deref().map(seed_vector);
                    let built = if *qrf_wellformed {
                        FrameSpec::non_ideal(&irreps, mults, seed)
                    } else {
                        FrameSpec::unchecked(&irreps, mults, seed)
                    };
                    built.map_err(|e| Error::Config(format!("frame {}: {e}", k + 1)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let system = match &self.system {
            SystemConfig::Regular => RepSpec::regular(&irreps),
            SystemConfig::Mults(m) => RepSpec::from_mults(&irreps, m)
                .map_err(|e| Error::Config(format!("system: {e}")))?,
        };
        Ok(Arc::new(CompositeSpace::new(irreps, frames, system)?))
    }
}
