//! Scalar functionals: Rényi and von Neumann entropies, relative entropy of
//! coherence, total correlation, and the representation-theoretic effective
//! dimension that caps how far two frames can disagree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irreps::IrrepTable;
use crate::relational::{reduce_nonideal, Perspective, PhysicalState};
use crate::reps::{frame_id, CompositeSpace, SYSTEM_ID};
use crate::tensor::{dephase, numeric_rank, spectrum, LabeledDensity, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn ln_factor(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_factor()
    }
}

pub const DEFAULT_EIG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    pub alpha: f64,
    pub log_base: LogBase,
    /// Eigenvalues at or below this are treated as exact zeros.
    pub eig_floor: f64,
}

impl EntropyParams {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_base(alpha, LogBase::Natural)
    }

    pub fn with_base(alpha: f64, log_base: LogBase) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            alpha,
            log_base,
            eig_floor: DEFAULT_EIG_FLOOR,
        })
    }

    pub fn von_neumann() -> Self {
        Self {
            alpha: 1.0,
            log_base: LogBase::Natural,
            eig_floor: DEFAULT_EIG_FLOOR,
        }
    }

    pub fn is_von_neumann(&self) -> bool {
        self.alpha == 1.0
    }
}

/// Rényi entropy of a probability vector (already validated).
pub fn renyi_of_probabilities(probs: &[f64], params: &EntropyParams) -> Result<f64> {
    if !(params.alpha > 0.0) {
        return Err(Error::InvalidAlpha(params.alpha));
    }
    let support = probs.iter().copied().filter(|&p| p > params.eig_floor);
    let nats = if params.is_von_neumann() {
        -support.map(|p| p * p.ln()).sum::<f64>()
    } else {
        let power: f64 = support.map(|p| p.powf(params.alpha)).sum();
        power.ln() / (1.0 - params.alpha)
    };
    Ok((nats / params.log_base.ln_factor()).max(0.0))
}

fn is_diagonal(rho: &LabeledDensity) -> bool {
    let m = rho.matrix();
    (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r == c || m[(r, c)].norm() == 0.0))
}

/// Eigenvalues of `rho`, read off the diagonal when it is already diagonal.
fn probabilities(rho: &LabeledDensity) -> Result<Vec<f64>> {
    if !is_diagonal(rho) {
        return spectrum(rho);
    }
    let d = rho.diagonal();
    if let Some(&min) = d.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -crate::tensor::POSITIVITY_TOL {
            return Err(Error::Positivity(min));
        }
    }
    Ok(d.into_iter().map(|p| p.clamp(0.0, 1.0)).collect())
}

/// `S_α(ρ) = log(Tr ρ^α)/(1-α)`, von Neumann at `α = 1`.
pub fn renyi(rho: &LabeledDensity, params: &EntropyParams) -> Result<f64> {
    if !(params.alpha > 0.0) {
        return Err(Error::InvalidAlpha(params.alpha));
    }
    renyi_of_probabilities(&probabilities(rho)?, params)
}

/// `S_α(ρ)` for several orders from a single diagonalization.
pub fn renyi_many(rho: &LabeledDensity, params: &[EntropyParams]) -> Result<Vec<f64>> {
    let probs = probabilities(rho)?;
    params.iter().map(|p| renyi_of_probabilities(&probs, p)).collect()
}

/// `C_α(ρ) = S_α(Δρ) - S_α(ρ)`. Only `C_1` is guaranteed non-negative.
pub fn coherence(rho: &LabeledDensity, params: &EntropyParams) -> Result<f64> {
    Ok(renyi(&dephase(rho), params)? - renyi(rho, params)?)
}

/// `Σ_k S(ρ_k) - S(ρ)` over every factor of `rho`; von Neumann only.
pub fn total_correlation(rho: &LabeledDensity, params: &EntropyParams) -> Result<f64> {
    if !params.is_von_neumann() {
        return Err(Error::Unsupported(format!(
            "total correlation is defined at alpha = 1 only (got {})",
            params.alpha
        )));
    }
    let ids = rho.factor_ids();
    let marginals = ids
        .iter()
        .map(|id| renyi(&rho.keep(&[id])?, params))
        .sum::<Result<f64>>()?;
    Ok(marginals - renyi(rho, params)?)
}

/// Frames other than the perspective frame, in canonical order.
fn other_frames(space: &CompositeSpace, persp: &Perspective) -> Vec<String> {
    (0..space.num_frames())
        .map(frame_id)
        .filter(|id| *id != persp.frame_id)
        .collect()
}

/// Correlation among the remaining frames that dephasing destroys:
/// `I(σ) - I(Δσ)` with `σ` the frames-only relational state.
pub fn gamma(space: &CompositeSpace, persp: &Perspective, frames_only: &[&str]) -> Result<f64> {
    let expected = other_frames(space, persp);
    let mut given: Vec<&str> = frames_only.to_vec();
    given.sort_unstable();
    let mut want: Vec<&str> = expected.iter().map(String::as_str).collect();
    want.sort_unstable();
    if given != want {
        return Err(Error::InvalidSelection(format!(
            "gamma needs exactly the frames {want:?}, got {given:?}"
        )));
    }
    let sigma = persp.reduced(frames_only)?;
    let params = EntropyParams::von_neumann();
    Ok(total_correlation(&sigma, &params)? - total_correlation(&dephase(&sigma), &params)?)
}

/// Perspective of any frame by coherent-state conditioning at `g = e`
/// (identical to the label reduction for ideal frames).
pub fn perspective_of(phys: &PhysicalState, id: &str) -> Result<Perspective> {
    let e = phys.space().irreps().group().identity();
    reduce_nonideal(phys, id, e).map(|(p, _)| p)
}

fn system_entropy(phys: &PhysicalState, id: &str, params: &EntropyParams) -> Result<f64> {
    renyi(&perspective_of(phys, id)?.reduced(&[SYSTEM_ID])?, params)
}

/// `|S(ρ_S^{(i)}) - S(ρ_S^{(j)})|` from two independent reductions.
pub fn entropy_difference(
    phys: &PhysicalState,
    i: &str,
    j: &str,
    params: &EntropyParams,
) -> Result<f64> {
    if i == j {
        phys.space().frame_by_id(i)?;
        return Ok(0.0);
    }
    Ok((system_entropy(phys, i, params)? - system_entropy(phys, j, params)?).abs())
}

/// Coherence the frame assigns to all other frames, `C(ρ_{R_ī}^{(i)})`.
pub fn frame_coherence(
    space: &CompositeSpace,
    persp: &Perspective,
    params: &EntropyParams,
) -> Result<f64> {
    let others = other_frames(space, persp);
    let ids: Vec<&str> = others.iter().map(String::as_str).collect();
    coherence(&persp.reduced(&ids)?, params)
}

/// Largest disagreement about `S` over ideal frames, computed both from the
/// system entropies and from the coherence spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxDisagreement {
    pub value: f64,
    pub argmax: String,
    pub argmin: String,
    pub coherence_spread: f64,
    pub coherence_argmax: String,
    pub coherence_argmin: String,
    pub residual: f64,
}

/// First index attaining the max / min.
fn arg_extrema(values: &[f64]) -> (usize, usize) {
    let mut hi = 0;
    let mut lo = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[hi] {
            hi = k;
        }
        if v < values[lo] {
            lo = k;
        }
    }
    (hi, lo)
}

pub fn max_entropy_difference(
    phys: &PhysicalState,
    params: &EntropyParams,
) -> Result<MaxDisagreement> {
    let space = phys.space();
    let ideal = space.ideal_frame_indices();
    if ideal.len() < 2 || ideal.len() != space.num_frames() {
        return Err(Error::Unsupported(
            "maximal disagreement needs at least two frames, all ideal".into(),
        ));
    }
    let ids: Vec<String> = ideal.iter().map(|&i| frame_id(i)).collect();
    let mut entropies = Vec::with_capacity(ids.len());
    let mut coherences = Vec::with_capacity(ids.len());
    for id in &ids {
        let persp = perspective_of(phys, id)?;
        entropies.push(renyi(&persp.reduced(&[SYSTEM_ID])?, params)?);
        coherences.push(frame_coherence(space, &persp, params)?);
    }
    let (smax, smin) = arg_extrema(&entropies);
    let (cmax, cmin) = arg_extrema(&coherences);
    let value = entropies[smax] - entropies[smin];
    let coherence_spread = coherences[cmax] - coherences[cmin];
    Ok(MaxDisagreement {
        value,
        argmax: ids[smax].clone(),
        argmin: ids[smin].clone(),
        coherence_spread,
        coherence_argmax: ids[cmax].clone(),
        coherence_argmin: ids[cmin].clone(),
        residual: (value - coherence_spread).abs(),
    })
}

/// `d_eff(target | cond) = Σ_a d_a min(m_a^target, Σ_{b,c} m_b^cond m_c^S N_{bc}^{ā})`.
pub fn effective_dimension(
    irreps: &IrrepTable,
    target: &[usize],
    cond: &[usize],
    system: &[usize],
) -> Result<usize> {
    let k = irreps.len();
    for (name, m) in [("target", target), ("conditioning", cond), ("system", system)] {
        if m.len() != k {
            return Err(Error::Config(format!(
                "{name} multiplicities list {} irreps, group has {k}",
                m.len()
            )));
        }
    }
    let mut total = 0;
    for a in 0..k {
        let abar = irreps.conjugate(a);
        let mut available = 0;
        for b in 0..k {
            for c in 0..k {
                if cond[b] > 0 && system[c] > 0 {
                    available += cond[b] * system[c] * irreps.fusion_coefficient(b, c, abar)?;
                }
            }
        }
        total += irreps.dim(a) * target[a].min(available);
    }
    Ok(total)
}

/// State-independent bound for a pair of frames, and what one state shows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBound {
    /// `d_eff(R1 | R2)`
    pub deff_1_given_2: usize,
    /// `d_eff(R2 | R1)`
    pub deff_2_given_1: usize,
    /// `log max(d_eff(R1|R2), d_eff(R2|R1))`
    pub bound: f64,
    /// `max(log d_R1, log d_R2)`
    pub dimension_bound: f64,
    /// `log d_S`
    pub system_bound: f64,
    pub observed: f64,
    /// rank of `ρ_{R2}^{(R1)}`
    pub rank_2_from_1: usize,
    /// rank of `ρ_{R1}^{(R2)}`
    pub rank_1_from_2: usize,
    pub holds: bool,
}

/// Both effective dimensions of a two-frame space: `(d_eff(R1|R2), d_eff(R2|R1))`.
pub fn pair_effective_dimensions(space: &CompositeSpace) -> Result<(usize, usize)> {
    if space.num_frames() != 2 {
        return Err(Error::Unsupported(format!(
            "the pairwise bound needs exactly two frames, got {}",
            space.num_frames()
        )));
    }
    let irreps = space.irreps();
    let m1 = space.frame(0).rep().mults();
    let m2 = space.frame(1).rep().mults();
    let ms = space.system().mults();
    Ok((
        effective_dimension(irreps, m1, m2, ms)?,
        effective_dimension(irreps, m2, m1, ms)?,
    ))
}

/// Evaluates the effective-dimension bound on `ΔS_α(S)` for one physical state.
pub fn entropy_gap_bound(phys: &PhysicalState, params: &EntropyParams) -> Result<PairBound> {
    let space = phys.space();
    let (d12, d21) = pair_effective_dimensions(space)?;
    let (r1, r2) = (frame_id(0), frame_id(1));
    let p1 = perspective_of(phys, &r1)?;
    let p2 = perspective_of(phys, &r2)?;
    let s1 = renyi(&p1.reduced(&[SYSTEM_ID])?, params)?;
    let s2 = renyi(&p2.reduced(&[SYSTEM_ID])?, params)?;
    let observed = (s1 - s2).abs();
    let log = |x: usize| params.log_base.log(x as f64);
    let bound = log(d12.max(d21));
    Ok(PairBound {
        deff_1_given_2: d12,
        deff_2_given_1: d21,
        bound,
        dimension_bound: log(space.frame(0).dim().max(space.frame(1).dim())),
        system_bound: log(space.system().dim()),
        observed,
        rank_2_from_1: numeric_rank(&p1.reduced(&[&r2])?, DEFAULT_RANK_TOL)?,
        rank_1_from_2: numeric_rank(&p2.reduced(&[&r1])?, DEFAULT_RANK_TOL)?,
        holds: observed <= bound + 1e-9,
    })
}
