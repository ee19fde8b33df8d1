//! Dense states and density matrices over an ordered product of labeled factors.
//!
//! Basis ordering is the Kronecker convention: the first factor is the most
//! significant digit of the flat index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below `-POSITIVITY_TOL` are a hard error, anything in
/// `[-POSITIVITY_TOL, 0)` is float noise and gets clamped.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Conditioning weights at or below this count as zero overlap.
pub const ZERO_WEIGHT: f64 = 1e-12;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// One tensor factor: an id plus the names of its basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLabel {
    pub id: String,
    pub basis_names: Vec<String>,
}

impl FactorLabel {
    pub fn new(id: impl Into<String>, basis_names: Vec<String>) -> Result<Self> {
        let id = id.into();
        if basis_names.is_empty() {
            return Err(Error::Config(format!("factor `{id}` has dimension 0")));
        }
        let mut sorted = basis_names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != basis_names.len() {
            return Err(Error::Config(format!(
                "factor `{id}` has repeated basis names"
            )));
        }
        Ok(Self { id, basis_names })
    }

    /// Factor with basis names `0..dim`.
    pub fn numbered(id: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(id, (0..dim).map(|i| i.to_string()).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }
}

fn check_distinct(factors: &[FactorLabel]) -> Result<()> {
    for (i, f) in factors.iter().enumerate() {
        if factors[..i].iter().any(|g| g.id == f.id) {
            return Err(Error::DuplicateFactor(f.id.clone()));
        }
    }
    Ok(())
}

fn total_dim(factors: &[FactorLabel]) -> usize {
    factors.iter().map(FactorLabel::dim).product()
}

fn position(factors: &[FactorLabel], id: &str) -> Result<usize> {
    factors
        .iter()
        .position(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFactor(id.to_string()))
}

/// Splits a flat index into per-factor digits.
pub fn unflatten(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    digits
}

pub fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// For a reordering `order` of factors (new position `k` holds old factor
/// `order[k]`), maps each new flat index to the old flat index.
fn reorder_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let total: usize = dims.iter().product();
    (0..total)
        .map(|new| {
            let digits = unflatten(new, &new_dims);
            let mut old = vec![0; dims.len()];
            for (pos, &k) in order.iter().enumerate() {
                old[k] = digits[pos];
            }
            flatten(&old, dims)
        })
        .collect()
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidSelection("factor order has wrong length".into()));
    }
    for &k in order {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidSelection("factor order is not a permutation".into()));
        }
    }
    Ok(())
}

/// A pure state over labeled factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    factors: Vec<FactorLabel>,
    amplitudes: DVector<C64>,
}

impl LabeledState {
    pub fn new(factors: Vec<FactorLabel>, amplitudes: DVector<C64>) -> Result<Self> {
        check_distinct(&factors)?;
        let dim = total_dim(&factors);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            factors,
            amplitudes,
        })
    }

    /// Basis vector of a single factor.
    pub fn basis(factor: FactorLabel, index: usize) -> Result<Self> {
        let dim = factor.dim();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(vec![factor], v)
    }

    pub fn factors(&self) -> &[FactorLabel] {
        &self.factors
    }

    pub fn factor_ids(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.id.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(FactorLabel::dim).collect()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `true` when the norm is 1 to within 1e-10.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOL
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n * n <= ZERO_WEIGHT {
            return Err(Error::Annihilated(n * n));
        }
        self.amplitudes /= C64::new(n, 0.0);
        Ok(self)
    }

    pub fn density(&self) -> LabeledDensity {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        LabeledDensity {
            factors: self.factors.clone(),
            matrix: m,
        }
    }

    /// `|<self|other>|^2`; factor ids and dims must agree.
    pub fn fidelity(&self, other: &LabeledState) -> Result<f64> {
        if self.factor_ids() != other.factor_ids() || self.dims() != other.dims() {
            return Err(Error::InvalidSelection(
                "fidelity between states on different factors".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }

    /// Reorders factors; new position `k` holds old factor `order[k]`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        check_order(self.factors.len(), order)?;
        let map = reorder_map(&self.dims(), order);
        let amplitudes = DVector::from_iterator(map.len(), map.iter().map(|&old| self.amplitudes[old]));
        Ok(Self {
            factors: order.iter().map(|&k| self.factors[k].clone()).collect(),
            amplitudes,
        })
    }

    /// Reorders factors to match the given id sequence.
    pub fn reorder_to(&self, ids: &[&str]) -> Result<Self> {
        let order = ids
            .iter()
            .map(|id| position(&self.factors, id))
            .collect::<Result<Vec<_>>>()?;
        self.permute_factors(&order)
    }
}

/// Kronecker product of states in the given order.
pub fn tensor(states: &[LabeledState]) -> Result<LabeledState> {
    let factors: Vec<FactorLabel> = states.iter().flat_map(|s| s.factors.clone()).collect();
    check_distinct(&factors)?;
    let amplitudes = states
        .iter()
        .fold(DVector::from_element(1, C64::new(1.0, 0.0)), |acc, s| {
            acc.kronecker(&s.amplitudes)
        });
    LabeledState::new(factors, amplitudes)
}

/// A density operator over labeled factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDensity {
    factors: Vec<FactorLabel>,
    matrix: DMatrix<C64>,
}

impl LabeledDensity {
    /// Wraps a matrix; it must be square, sized to the factors, and Hermitian.
    pub fn new(factors: Vec<FactorLabel>, matrix: DMatrix<C64>) -> Result<Self> {
        check_distinct(&factors)?;
        let dim = total_dim(&factors);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::Consistency(format!(
                "density matrix is not Hermitian (deviation {dev:.3e})"
            )));
        }
        Ok(Self { factors, matrix })
    }

    /// Maximally mixed state on the given factors.
    pub fn maximally_mixed(factors: Vec<FactorLabel>) -> Result<Self> {
        let d = total_dim(&factors);
        Self::new(
            factors,
            DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        )
    }

    pub fn factors(&self) -> &[FactorLabel] {
        &self.factors
    }

    pub fn factor_ids(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.id.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(FactorLabel::dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() < NORM_TOL
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Full validation: Hermitian, positive semidefinite, and unit trace if
    /// `expect_normalized`.
    pub fn validate(&self, expect_normalized: bool) -> Result<()> {
        let dev = hermitian_deviation(&self.matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::Consistency(format!(
                "density matrix is not Hermitian (deviation {dev:.3e})"
            )));
        }
        if expect_normalized && !self.is_normalized() {
            return Err(Error::Consistency(format!(
                "density matrix trace is {} instead of 1",
                self.trace()
            )));
        }
        raw_eigenvalues(&self.matrix)
            .into_iter()
            .try_for_each(|l| if l < -POSITIVITY_TOL { Err(Error::Positivity(l)) } else { Ok(()) })
    }

    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        check_order(self.factors.len(), order)?;
        let map = reorder_map(&self.dims(), order);
        let n = map.len();
        let matrix = DMatrix::from_fn(n, n, |r, c| self.matrix[(map[r], map[c])]);
        Ok(Self {
            factors: order.iter().map(|&k| self.factors[k].clone()).collect(),
            matrix,
        })
    }

    pub fn reorder_to(&self, ids: &[&str]) -> Result<Self> {
        let order = ids
            .iter()
            .map(|id| position(&self.factors, id))
            .collect::<Result<Vec<_>>>()?;
        self.permute_factors(&order)
    }

    /// Partial trace keeping the listed factor ids (in this density's order).
    pub fn keep(&self, kept: &[&str]) -> Result<Self> {
        let sel = SubsystemSelection::keep(self.factors(), kept)?;
        partial_trace(self, &sel)
    }

    /// `Tr(ρ A)` for a matrix of matching size.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: op.nrows(),
            });
        }
        Ok((&self.matrix * op).trace())
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

/// Which factors survive a partial trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemSelection {
    pub kept: Vec<String>,
    pub traced: Vec<String>,
}

impl SubsystemSelection {
    /// Keep `kept`, trace everything else in `factors`.
    pub fn keep(factors: &[FactorLabel], kept: &[&str]) -> Result<Self> {
        for id in kept {
            position(factors, id)?;
        }
        for (i, id) in kept.iter().enumerate() {
            if kept[..i].contains(id) {
                return Err(Error::DuplicateFactor(id.to_string()));
            }
        }
        let traced = factors
            .iter()
            .filter(|f| !kept.contains(&f.id.as_str()))
            .map(|f| f.id.clone())
            .collect();
        Ok(Self {
            kept: kept.iter().map(|s| s.to_string()).collect(),
            traced,
        })
    }

    /// Checks that the selection partitions the given factors.
    pub fn validate_for(&self, factors: &[FactorLabel]) -> Result<()> {
        for id in self.kept.iter().chain(&self.traced) {
            position(factors, id)?;
        }
        let covered = self.kept.len() + self.traced.len();
        let overlap = self.kept.iter().any(|k| self.traced.contains(k));
        let mut all: Vec<&String> = self.kept.iter().chain(&self.traced).collect();
        all.sort();
        all.dedup();
        if overlap || covered != factors.len() || all.len() != covered {
            return Err(Error::InvalidSelection(format!(
                "kept {:?} and traced {:?} do not partition the factors",
                self.kept, self.traced
            )));
        }
        Ok(())
    }
}

/// Traces out `sel.traced`; kept factors stay in the density's original order.
pub fn partial_trace(rho: &LabeledDensity, sel: &SubsystemSelection) -> Result<LabeledDensity> {
    sel.validate_for(&rho.factors)?;
    let dims = rho.dims();
    let kept_pos: Vec<usize> = (0..rho.factors.len())
        .filter(|&k| sel.kept.contains(&rho.factors[k].id))
        .collect();
    let traced_pos: Vec<usize> = (0..rho.factors.len())
        .filter(|&k| !kept_pos.contains(&k))
        .collect();
    let kept_dims: Vec<usize> = kept_pos.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced_pos.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // full_of[a * dt + t] = flat index of (kept digits a, traced digits t)
    let mut full_of = vec![0usize; dk * dt];
    let mut digits = vec![0usize; dims.len()];
    for a in 0..dk {
        let ad = unflatten(a, &kept_dims);
        for t in 0..dt {
            let td = unflatten(t, &traced_dims);
            for (i, &k) in kept_pos.iter().enumerate() {
                digits[k] = ad[i];
            }
            for (i, &k) in traced_pos.iter().enumerate() {
                digits[k] = td[i];
            }
            full_of[a * dt + t] = flatten(&digits, &dims);
        }
    }
    let m = &rho.matrix;
    let out = DMatrix::from_fn(dk, dk, |a, b| {
        (0..dt)
            .map(|t| m[(full_of[a * dt + t], full_of[b * dt + t])])
            .sum()
    });
    Ok(LabeledDensity {
        factors: kept_pos.iter().map(|&k| rho.factors[k].clone()).collect(),
        matrix: out,
    })
}

/// Zeroes every off-diagonal entry in the labeled product basis.
pub fn dephase(rho: &LabeledDensity) -> LabeledDensity {
    let n = rho.dim();
    LabeledDensity {
        factors: rho.factors.clone(),
        matrix: DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                rho.matrix[(r, r)]
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    }
}

/// Applies `<probe|` to one factor. Returns the normalized remainder and the
/// squared norm before renormalization.
pub fn condition(
    psi: &LabeledState,
    factor_id: &str,
    probe: &DVector<C64>,
) -> Result<(LabeledState, f64)> {
    let (rest, weight) = condition_unnormalized(psi, factor_id, probe)?;
    if weight <= ZERO_WEIGHT {
        return Err(Error::ZeroOverlap {
            factor: factor_id.to_string(),
            weight,
        });
    }
    let norm = weight.sqrt();
    let amplitudes = rest.amplitudes / C64::new(norm, 0.0);
    Ok((
        LabeledState {
            factors: rest.factors,
            amplitudes,
        },
        weight,
    ))
}

/// `<probe|` on one factor without renormalizing; the weight is the squared
/// norm of the result.
pub fn condition_unnormalized(
    psi: &LabeledState,
    factor_id: &str,
    probe: &DVector<C64>,
) -> Result<(LabeledState, f64)> {
    let k = position(&psi.factors, factor_id)?;
    let dims = psi.dims();
    if probe.len() != dims[k] {
        return Err(Error::DimensionMismatch {
            expected: dims[k],
            got: probe.len(),
        });
    }
    let before: usize = dims[..k].iter().product();
    let after: usize = dims[k + 1..].iter().product();
    let d = dims[k];
    let mut out = DVector::zeros(before * after);
    for a in 0..before {
        for b in 0..after {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..d {
                acc += probe[x].conj() * psi.amplitudes[(a * d + x) * after + b];
            }
            out[a * after + b] = acc;
        }
    }
    let weight = out.norm_squared();
    let mut factors = psi.factors.clone();
    factors.remove(k);
    Ok((
        LabeledState {
            factors,
            amplitudes: out,
        },
        weight,
    ))
}

fn raw_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.iter().copied().collect()
}

/// Eigenvalues in descending order, clamped to `[0, 1]` after checking that
/// none falls below `-1e-9`.
pub fn spectrum(rho: &LabeledDensity) -> Result<Vec<f64>> {
    let mut vals = raw_eigenvalues(&rho.matrix);
    if let Some(&min) = vals.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -POSITIVITY_TOL {
            return Err(Error::Positivity(min));
        }
    }
    for v in &mut vals {
        *v = v.clamp(0.0, 1.0);
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Number of eigenvalues above `tol`.
pub fn numeric_rank(rho: &LabeledDensity, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::Config(format!("rank tolerance must be positive, got {tol}")));
    }
    Ok(spectrum(rho)?.into_iter().filter(|&l| l > tol).count())
}
