//! Physical states and the relational maps between frame perspectives.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::reps::{apply_product, coherent_orbit, frame_id, CompositeSpace};
use crate::tensor::{
    condition, condition_unnormalized, tensor, FactorLabel, LabeledDensity, LabeledState,
    ZERO_WEIGHT,
};
use crate::C64;

/// Invariance tolerance for physical states.
pub const INVARIANCE_TOL: f64 = 1e-10;

/// A normalized state in the invariant subspace of the diagonal action.
#[derive(Debug, Clone)]
pub struct PhysicalState {
    space: Arc<CompositeSpace>,
    psi: LabeledState,
}

impl PhysicalState {
    /// Wraps a kinematical vector after checking norm and invariance.
    pub fn new(space: Arc<CompositeSpace>, amplitudes: DVector<C64>) -> Result<Self> {
        let psi = LabeledState::new(space.factors().to_vec(), amplitudes)?;
        if !psi.is_normalized() {
            return Err(Error::Consistency(format!(
                "physical state has norm {}",
                psi.norm()
            )));
        }
        let residual = invariance_residual(&space, psi.amplitudes());
        if residual > INVARIANCE_TOL {
            return Err(Error::Consistency(format!(
                "state is not invariant under the group action (residual {residual:.3e})"
            )));
        }
        Ok(Self { space, psi })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<CompositeSpace> {
        Arc::clone(&self.space)
    }

    pub fn state(&self) -> &LabeledState {
        &self.psi
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        self.psi.amplitudes()
    }

    pub fn density(&self) -> LabeledDensity {
        self.psi.density()
    }
}

/// `max_g ||U(g)ψ - ψ||`.
pub fn invariance_residual(space: &CompositeSpace, v: &DVector<C64>) -> f64 {
    space
        .irreps()
        .group()
        .elements()
        .map(|g| (apply_product(&space.local_actions(g), v) - v).norm())
        .fold(0.0, f64::max)
}

/// `(1/|G|) Σ_g U(g) v`.
pub fn group_average(space: &CompositeSpace, v: &DVector<C64>) -> DVector<C64> {
    let group = space.irreps().group();
    let mut acc = DVector::zeros(v.len());
    for g in group.elements() {
        acc += apply_product(&space.local_actions(g), v);
    }
    acc / C64::new(group.order() as f64, 0.0)
}

/// Projects a kinematical state onto the physical subspace. Returns the
/// normalized result and the squared norm of the projection.
pub fn project_physical(
    psi_kin: &LabeledState,
    space: &Arc<CompositeSpace>,
) -> Result<(PhysicalState, f64)> {
    if psi_kin.factor_ids() != space.factor_ids() || psi_kin.dims() != space.factors().iter().map(FactorLabel::dim).collect::<Vec<_>>() {
        return Err(Error::InvalidSelection(
            "kinematical state does not live on the composite space".into(),
        ));
    }
    let projected = group_average(space, psi_kin.amplitudes());
    let weight = projected.norm_squared();
    if weight < ZERO_WEIGHT {
        return Err(Error::Annihilated(weight));
    }
    let amplitudes = projected / C64::new(weight.sqrt(), 0.0);
    Ok((PhysicalState::new(Arc::clone(space), amplitudes)?, weight))
}

/// The relational state seen from one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Perspective {
    pub frame_id: String,
    pub state: LabeledState,
}

impl Perspective {
    pub fn density(&self) -> LabeledDensity {
        self.state.density()
    }

    /// Reduced density on the listed factors (in canonical order).
    pub fn reduced(&self, kept: &[&str]) -> Result<LabeledDensity> {
        let ordered: Vec<&str> = self
            .state
            .factor_ids()
            .into_iter()
            .filter(|id| kept.contains(id))
            .collect();
        if ordered.len() != kept.len() {
            let missing = kept.iter().find(|k| !ordered.contains(k)).unwrap();
            return Err(Error::UnknownFactor(missing.to_string()));
        }
        self.density().keep(&ordered)
    }
}

fn require_ideal(space: &CompositeSpace, id: &str) -> Result<usize> {
    let i = space
        .frame_index(id)
        .ok_or_else(|| Error::UnknownFactor(id.to_string()))?;
    if !space.frame(i).is_ideal() {
        return Err(Error::Unsupported(format!(
            "frame `{id}` is not ideal; this map is only defined for ideal frames"
        )));
    }
    Ok(i)
}

fn label_vector(dim: usize, index: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Conditions an ideal frame on its identity label `|e>` and renormalizes.
pub fn reduce(phys: &PhysicalState, frame: &str) -> Result<Perspective> {
    let e = phys.space().irreps().group().identity();
    reduce_at(phys, frame, e)
}

/// Conditions an ideal frame on the label `|g>`.
pub fn reduce_at(phys: &PhysicalState, frame: &str, g: usize) -> Result<Perspective> {
    let i = require_ideal(phys.space(), frame)?;
    let probe = label_vector(phys.space().frame(i).dim(), g);
    let (state, _) = condition(phys.state(), frame, &probe)?;
    Ok(Perspective {
        frame_id: frame.to_string(),
        state,
    })
}

/// Conditions any frame on its coherent state `|φ(g)>`. Returns the
/// perspective and the conditioning weight `||<φ(g)|ψ>||²`.
pub fn reduce_nonideal(phys: &PhysicalState, frame: &str, g: usize) -> Result<(Perspective, f64)> {
    let spec = phys.space().frame_by_id(frame)?;
    let probe = coherent_orbit(spec, frame, g)?;
    let (state, weight) = condition(phys.state(), frame, &probe)?;
    Ok((
        Perspective {
            frame_id: frame.to_string(),
            state,
        },
        weight,
    ))
}

/// Ids of all factors except one, in canonical order.
fn complement_ids(space: &CompositeSpace, id: &str) -> Vec<String> {
    space
        .factor_ids()
        .into_iter()
        .filter(|f| *f != id)
        .map(str::to_string)
        .collect()
}

/// `U_{i→j}` applied to a vector on the complement of `R_i` (canonical order),
/// returning a vector on the complement of `R_j` (canonical order).
fn frame_change_vector(
    space: &CompositeSpace,
    i: usize,
    j: usize,
    v: &DVector<C64>,
) -> Result<DVector<C64>> {
    let group = space.irreps().group();
    let id_i = frame_id(i);
    let id_j = frame_id(j);
    let in_ids = complement_ids(space, &id_i);
    let in_factors: Vec<FactorLabel> = in_ids
        .iter()
        .map(|id| space.factors().iter().find(|f| &f.id == id).unwrap().clone())
        .collect();
    let psi = LabeledState::new(in_factors, v.clone())?;
    let frame_i_factor = space.factors()[i].clone();

    let mut parts: Option<DVector<C64>> = None;
    let mut rest_factors = Vec::new();
    for g in group.elements() {
        // <g|_{R_j} ψ, then U_rest(g⁻¹) on everything else
        let (slice, _) = condition_unnormalized(&psi, &id_j, &label_vector(space.frame(j).dim(), g))?;
        let ginv = group.inv(g);
        let ops: Vec<&DMatrix<C64>> = slice
            .factor_ids()
            .iter()
            .map(|id| space.rep_of(id).map(|r| r.matrix(ginv)))
            .collect::<Result<_>>()?;
        let moved = apply_product(&ops, slice.amplitudes());
        rest_factors = slice.factors().to_vec();
        let rest = LabeledState::new(rest_factors.clone(), moved)?;
        let frame_part = LabeledState::basis(frame_i_factor.clone(), ginv)?;
        let term = tensor(&[frame_part, rest])?.into_amplitudes();
        parts = Some(match parts {
            Some(acc) => acc + term,
            None => term,
        });
    }
    let mut factors = vec![frame_i_factor];
    factors.extend(rest_factors);
    let combined = LabeledState::new(factors, parts.unwrap())?;
    let out_ids = complement_ids(space, &id_j);
    let out_refs: Vec<&str> = out_ids.iter().map(String::as_str).collect();
    Ok(combined.reorder_to(&out_refs)?.into_amplitudes())
}

/// Changes the perspective of an ideal frame `R_i` to the ideal frame `j`.
pub fn frame_change(space: &CompositeSpace, persp: &Perspective, j: &str) -> Result<Perspective> {
    let i = require_ideal(space, &persp.frame_id)?;
    let jx = require_ideal(space, j)?;
    if i == jx {
        return Err(Error::InvalidSelection(
            "frame change needs two distinct frames".into(),
        ));
    }
    let expected = complement_ids(space, &persp.frame_id);
    if persp.state.factor_ids() != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::InvalidSelection(
            "perspective state does not live on the complement of its frame".into(),
        ));
    }
    let v = frame_change_vector(space, i, jx, persp.state.amplitudes())?;
    let out_ids = complement_ids(space, j);
    let factors = out_ids
        .iter()
        .map(|id| space.factors().iter().find(|f| &f.id == id).unwrap().clone())
        .collect();
    Ok(Perspective {
        frame_id: j.to_string(),
        state: LabeledState::new(factors, v)?,
    })
}

/// Matrix of `U_{i→j}` from the complement of `R_i` to the complement of `R_j`.
pub fn frame_change_operator(space: &CompositeSpace, i: &str, j: &str) -> Result<DMatrix<C64>> {
    let ix = require_ideal(space, i)?;
    let jx = require_ideal(space, j)?;
    if ix == jx {
        return Err(Error::InvalidSelection(
            "frame change needs two distinct frames".into(),
        ));
    }
    let dim = space.kin_dim() / space.frame(ix).dim();
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let v = frame_change_vector(space, ix, jx, &label_vector(dim, col))?;
        m.set_column(col, &v);
    }
    Ok(m)
}

/// Trivialization `|ψ> ↦ |e>_{R_i} ⊗ |ψ(e)>`, returned in canonical factor order.
///
/// Computed by applying the controlled unitary `Σ_g |g><g| ⊗ U_rest(g⁻¹)`,
/// which disentangles the frame into its uniform superposition, and then
/// swapping that frame state for `|e>`.
pub fn trivialize(phys: &PhysicalState, frame: &str) -> Result<LabeledState> {
    let i = require_ideal(phys.space(), frame)?;
    let space = phys.space();
    let group = space.irreps().group();
    let n = group.order();
    let psi = phys.state();

    let mut rest_factors = Vec::new();
    let mut pieces: Option<DVector<C64>> = None;
    for g in group.elements() {
        let (slice, _) = condition_unnormalized(psi, frame, &label_vector(n, g))?;
        let ginv = group.inv(g);
        let ops: Vec<&DMatrix<C64>> = slice
            .factor_ids()
            .iter()
            .map(|id| space.rep_of(id).map(|r| r.matrix(ginv)))
            .collect::<Result<_>>()?;
        let moved = apply_product(&ops, slice.amplitudes());
        rest_factors = slice.factors().to_vec();
        let term = LabeledState::basis(space.factors()[i].clone(), g)?;
        let v = tensor(&[term, LabeledState::new(rest_factors.clone(), moved)?])?.into_amplitudes();
        pieces = Some(match pieces {
            Some(acc) => acc + v,
            None => v,
        });
    }
    let mut factors = vec![space.factors()[i].clone()];
    factors.extend(rest_factors.clone());
    let disentangled = LabeledState::new(factors, pieces.unwrap())?;

    let uniform = DVector::from_element(n, C64::new(1.0 / (n as f64).sqrt(), 0.0));
    let (rest, weight) = condition_unnormalized(&disentangled, frame, &uniform)?;
    if (weight - 1.0).abs() > 1e-10 {
        return Err(Error::Consistency(format!(
            "controlled disentangler left weight {weight} on the uniform frame state"
        )));
    }
    let theta = LabeledState::basis(space.factors()[i].clone(), group.identity())?;
    let product = tensor(&[theta, rest])?;
    product.reorder_to(&space.factor_ids())
}

/// Basis relabeling `|g, k> ↦ |g⁻¹, g⁻¹k>` from a kept set `X ∋ R_j` in the
/// perspective of `R_i` to `Y = X \ {R_j} ∪ {R_i}` in the perspective of `R_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePermutation {
    pub x_factors: Vec<String>,
    pub y_factors: Vec<String>,
    /// `map[x] = y` on flat basis indices.
    pub map: Vec<usize>,
}

impl FramePermutation {
    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (x, &y) in self.map.iter().enumerate() {
            m[(y, x)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `true` when the map is a bijection.
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        self.map
            .iter()
            .all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
    }

    /// `P A P†` by relabeling rows and columns.
    pub fn conjugate(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(self.map[r], self.map[c])] = a[(r, c)];
            }
        }
        out
    }
}

/// Ids of `Y` for a kept set `X` (canonical order).
pub fn swapped_subset(space: &CompositeSpace, i: &str, j: &str, x: &[&str]) -> Vec<String> {
    space
        .factor_ids()
        .into_iter()
        .filter(|id| *id == i || (x.contains(id) && *id != j))
        .map(str::to_string)
        .collect()
}

pub fn build_permutation(
    space: &CompositeSpace,
    i: &str,
    j: &str,
    kept: &[&str],
) -> Result<FramePermutation> {
    let ix = require_ideal(space, i)?;
    require_ideal(space, j)?;
    if i == j {
        return Err(Error::InvalidSelection("i and j must differ".into()));
    }
    if !kept.contains(&j) {
        return Err(Error::InvalidSelection(format!(
            "kept set {kept:?} does not contain frame `{j}`"
        )));
    }
    if kept.contains(&i) {
        return Err(Error::InvalidSelection(format!(
            "kept set {kept:?} contains the perspective frame `{i}`"
        )));
    }
    let x_ids: Vec<String> = space
        .factor_ids()
        .into_iter()
        .filter(|id| kept.contains(id))
        .map(str::to_string)
        .collect();
    if x_ids.len() != kept.len() {
        let bad = kept.iter().find(|k| !x_ids.iter().any(|x| x == *k)).unwrap();
        return Err(Error::UnknownFactor(bad.to_string()));
    }
    let group = space.irreps().group();
    let mut actions = Vec::with_capacity(x_ids.len());
    for id in &x_ids {
        if id == j {
            actions.push(None);
            continue;
        }
        let perm = space.rep_of(id)?.permutation_action().ok_or_else(|| {
            Error::Unsupported(format!(
                "factor `{id}` does not carry a permutation representation"
            ))
        })?;
        actions.push(Some(perm));
    }
    let y_ids = swapped_subset(space, i, j, kept);
    let dim_of = |id: &str| space.rep_of(id).map(|r| r.dim());
    let x_dims: Vec<usize> = x_ids.iter().map(|id| dim_of(id)).collect::<Result<_>>()?;
    let y_dims: Vec<usize> = y_ids.iter().map(|id| dim_of(id)).collect::<Result<_>>()?;
    let j_pos = x_ids.iter().position(|id| id == j).unwrap();
    let i_pos = y_ids.iter().position(|id| id == i).unwrap();
    debug_assert_eq!(space.frame(ix).dim(), group.order());

    let total: usize = x_dims.iter().product();
    let map = (0..total)
        .map(|x| {
            let digits = crate::tensor::unflatten(x, &x_dims);
            let g = digits[j_pos];
            let ginv = group.inv(g);
            let mut y_digits = Vec::with_capacity(y_ids.len());
            let mut others = x_ids
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != j_pos)
                .map(|(p, _)| actions[p].as_ref().unwrap()[ginv][digits[p]]);
            for pos in 0..y_ids.len() {
                if pos == i_pos {
                    y_digits.push(ginv);
                } else {
                    y_digits.push(others.next().unwrap());
                }
            }
            crate::tensor::flatten(&y_digits, &y_dims)
        })
        .collect();
    Ok(FramePermutation {
        x_factors: x_ids,
        y_factors: y_ids,
        map,
    })
}
