//! Concrete unitary representations for frames and the system.
//!
//! Ideal frames live natively in the group-label basis where `U(g)|h> = |gh>`.
//! Everything else is built block-diagonally as `⊕_q I_{m_q} ⊗ D_q(g)` with
//! basis labels `(q,m,n)`: irrep, copy index, internal index.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::irreps::{max_abs, IrrepTable};
use crate::tensor::FactorLabel;
use crate::C64;

const POVM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepBasis {
    /// Regular representation in the group-label basis.
    GroupLabels,
    /// Block-diagonal irrep basis.
    IrrepBlocks,
}

/// A unitary representation with known irrep multiplicities.
#[derive(Debug, Clone)]
pub struct RepSpec {
    basis: RepBasis,
    mults: Vec<usize>,
    matrices: Vec<DMatrix<C64>>,
    basis_names: Vec<String>,
    /// For the regular rep: unitary `V` with `V† U(g) V = ⊕_q I_{d_q} ⊗ D_q(g)`.
    peter_weyl: Option<DMatrix<C64>>,
}

impl RepSpec {
    /// Left-regular representation in the group-label basis.
    pub fn regular(irreps: &IrrepTable) -> Self {
        let group = irreps.group();
        let n = group.order();
        let matrices = group
            .elements()
            .map(|g| {
                let mut m = DMatrix::zeros(n, n);
                for h in group.elements() {
                    m[(group.mul(g, h), h)] = C64::new(1.0, 0.0);
                }
                m
            })
            .collect();

        let mut v = DMatrix::zeros(n, n);
        let mut col = 0;
        for irrep in irreps.irreps() {
            let d = irrep.dim;
            let scale = (d as f64 / n as f64).sqrt();
            for m in 0..d {
                for k in 0..d {
                    for h in group.elements() {
                        v[(h, col)] = irrep.matrices[h][(k, m)].conj() * scale;
                    }
                    col += 1;
                }
            }
        }

        Self {
            basis: RepBasis::GroupLabels,
            mults: irreps.dims(),
            matrices,
            basis_names: group.labels().to_vec(),
            peter_weyl: Some(v),
        }
    }

    /// `⊕_q I_{m_q} ⊗ D_q(g)`.
    pub fn from_mults(irreps: &IrrepTable, mults: &[usize]) -> Result<Self> {
        if mults.len() != irreps.len() {
            return Err(Error::Config(format!(
                "expected {} multiplicities, got {}",
                irreps.len(),
                mults.len()
            )));
        }
        let dim: usize = mults.iter().zip(irreps.dims()).map(|(m, d)| m * d).sum();
        if dim == 0 {
            return Err(Error::Config("all multiplicities are zero".into()));
        }
        let group = irreps.group();
        let matrices = group
            .elements()
            .map(|g| {
                let mut u = DMatrix::zeros(dim, dim);
                let mut offset = 0;
                for (q, &m) in mults.iter().enumerate() {
                    let block = &irreps.irrep(q).matrices[g];
                    let d = block.nrows();
                    for _ in 0..m {
                        u.view_mut((offset, offset), (d, d)).copy_from(block);
                        offset += d;
                    }
                }
                u
            })
            .collect();
        let mut basis_names = Vec::with_capacity(dim);
        for (q, &m) in mults.iter().enumerate() {
            for copy in 0..m {
                for k in 0..irreps.dim(q) {
                    basis_names.push(format!("({q},{copy},{k})"));
                }
            }
        }
        Ok(Self {
            basis: RepBasis::IrrepBlocks,
            mults: mults.to_vec(),
            matrices,
            basis_names,
            peter_weyl: None,
        })
    }

    pub fn basis(&self) -> &RepBasis {
        &self.basis
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    pub fn matrix(&self, g: usize) -> &DMatrix<C64> {
        &self.matrices[g]
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn peter_weyl(&self) -> Option<&DMatrix<C64>> {
        self.peter_weyl.as_ref()
    }

    pub fn character(&self, g: usize) -> C64 {
        self.matrices[g].trace()
    }

    /// Flat index of basis vector `(q, copy, k)` in the block layout.
    pub fn block_index(&self, irreps: &IrrepTable, q: usize, copy: usize, k: usize) -> usize {
        let offset: usize = (0..q).map(|p| self.mults[p] * irreps.dim(p)).sum();
        offset + copy * irreps.dim(q) + k
    }

    /// `perm[g][k]` = index of `U(g)|k>` when every `U(g)` is a 0/1
    /// permutation matrix, `None` otherwise.
    pub fn permutation_action(&self) -> Option<Vec<Vec<usize>>> {
        self.matrices
            .iter()
            .map(|u| {
                (0..u.ncols())
                    .map(|k| {
                        let col = u.column(k);
                        let hits: Vec<usize> = (0..col.len())
                            .filter(|&r| col[r].norm() > 1e-12)
                            .collect();
                        match hits.as_slice() {
                            [r] if (col[*r] - C64::new(1.0, 0.0)).norm() < 1e-12 => Some(*r),
                            _ => None,
                        }
                    })
                    .collect::<Option<Vec<usize>>>()
            })
            .collect()
    }

    /// Checks `U(g)U(h) = U(gh)` and unitarity on all pairs.
    pub fn validate(&self, irreps: &IrrepTable) -> Result<()> {
        let group = irreps.group();
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        for g in group.elements() {
            let u = &self.matrices[g];
            if max_abs(&(u.adjoint() * u - &id)) > 1e-12 {
                return Err(Error::Consistency(format!("U({g}) is not unitary")));
            }
            for h in group.elements() {
                if max_abs(&(u * &self.matrices[h] - &self.matrices[group.mul(g, h)])) > 1e-12 {
                    return Err(Error::Consistency(format!(
                        "representation fails homomorphism at ({g}, {h})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A reference frame: its representation, whether it is ideal, and the seed
/// of its coherent-state system.
#[derive(Debug, Clone)]
pub struct FrameSpec {
    rep: RepSpec,
    ideal: bool,
    seed: Option<DVector<C64>>,
}

impl FrameSpec {
    /// Ideal frame (regular rep, group-label basis) seeded at `|e>`.
    pub fn ideal(irreps: &IrrepTable) -> Self {
        let rep = RepSpec::regular(irreps);
        let mut seed = DVector::zeros(rep.dim());
        seed[irreps.group().identity()] = C64::new(1.0, 0.0);
        Self {
            rep,
            ideal: true,
            seed: Some(seed),
        }
    }

    /// Non-ideal frame; requires `m_q <= d_q` for every irrep. Without an
    /// explicit seed the default one from [`default_seed`] is used.
    pub fn non_ideal(
        irreps: &IrrepTable,
        mults: &[usize],
        seed: Option<DVector<C64>>,
    ) -> Result<Self> {
        if let Some((q, m)) = mults
            .iter()
            .enumerate()
            .find(|&(q, &m)| q < irreps.len() && m > irreps.dim(q))
        {
            return Err(Error::Config(format!(
                "multiplicity m_{q} = {m} exceeds irrep dimension d_{q} = {}; \
                 the multiplicities must satisfy m_q <= d_q for every irrep",
                irreps.dim(q)
            )));
        }
        Self::unchecked(irreps, mults, seed)
    }

    /// Non-ideal frame without the `m_q <= d_q` check; such a frame admits
    /// no covariant resolution of the identity.
    pub fn unchecked(
        irreps: &IrrepTable,
        mults: &[usize],
        seed: Option<DVector<C64>>,
    ) -> Result<Self> {
        let rep = RepSpec::from_mults(irreps, mults)?;
        let seed = match seed {
            Some(s) => {
                if s.len() != rep.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: rep.dim(),
                        got: s.len(),
                    });
                }
                let n = s.norm();
                if n < 1e-12 {
                    return Err(Error::Config("frame seed is the zero vector".into()));
                }
                s / C64::new(n, 0.0)
            }
            None => default_seed(irreps, &rep),
        };
        Ok(Self {
            rep,
            ideal: false,
            seed: Some(seed),
        })
    }

    /// Frame without a seed (only useful to exercise the missing-seed paths).
    pub fn without_seed(mut self) -> Self {
        self.seed = None;
        self
    }

    pub fn rep(&self) -> &RepSpec {
        &self.rep
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    pub fn seed(&self) -> Option<&DVector<C64>> {
        self.seed.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// Seed with `sqrt(d_q / dim)` on `(q, m, m)` for every copy `m < m_q`.
///
/// When `m_q <= d_q` this seed generates an exact resolution of the identity.
/// If some `m_q > d_q`, the surplus copies get no weight.
pub fn default_seed(irreps: &IrrepTable, rep: &RepSpec) -> DVector<C64> {
    let dim = rep.dim();
    let mut seed = DVector::zeros(dim);
    for (q, &m) in rep.mults().iter().enumerate() {
        let d = irreps.dim(q);
        let amp = (d as f64 / dim as f64).sqrt();
        for copy in 0..m.min(d) {
            seed[rep.block_index(irreps, q, copy, copy)] = C64::new(amp, 0.0);
        }
    }
    let n = seed.norm();
    seed / C64::new(n, 0.0)
}

/// `U_R(g)|φ>`.
pub fn coherent_orbit(frame: &FrameSpec, frame_id: &str, g: usize) -> Result<DVector<C64>> {
    let seed = frame
        .seed()
        .ok_or_else(|| Error::MissingSeed(frame_id.to_string()))?;
    Ok(frame.rep().matrix(g) * seed)
}

/// Outcome of the covariant POVM test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmCheck {
    pub is_resolution: bool,
    /// Max-abs entry of `A - I` with `A = (dim/|G|) Σ_g |φ(g)><φ(g)|`.
    pub residual: f64,
    /// Whether `m_q <= d_q` holds for every irrep.
    pub multiplicities_ok: bool,
}

pub fn check_povm_resolution(
    irreps: &IrrepTable,
    frame: &FrameSpec,
    frame_id: &str,
) -> Result<PovmCheck> {
    let group = irreps.group();
    let dim = frame.dim();
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for g in group.elements() {
        let v = coherent_orbit(frame, frame_id, g)?;
        a += &v * v.adjoint();
    }
    a *= C64::new(dim as f64 / group.order() as f64, 0.0);
    let residual = max_abs(&(a - DMatrix::identity(dim, dim)));
    let multiplicities_ok = frame
        .rep()
        .mults()
        .iter()
        .enumerate()
        .all(|(q, &m)| m <= irreps.dim(q));
    Ok(PovmCheck {
        is_resolution: multiplicities_ok && residual < POVM_TOL,
        residual,
        multiplicities_ok,
    })
}

/// Frames `R1..RN` followed by the system `S`.
#[derive(Debug, Clone)]
pub struct CompositeSpace {
    irreps: Arc<IrrepTable>,
    frames: Vec<FrameSpec>,
    system: RepSpec,
    factors: Vec<FactorLabel>,
}

pub const SYSTEM_ID: &str = "S";

pub fn frame_id(index: usize) -> String {
    format!("R{}", index + 1)
}

impl CompositeSpace {
    pub fn new(irreps: Arc<IrrepTable>, frames: Vec<FrameSpec>, system: RepSpec) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Config("at least one frame is required".into()));
        }
        let mut factors = Vec::with_capacity(frames.len() + 1);
        for (i, f) in frames.iter().enumerate() {
            factors.push(FactorLabel::new(frame_id(i), f.rep().basis_names().to_vec())?);
        }
        factors.push(FactorLabel::new(SYSTEM_ID, system.basis_names().to_vec())?);
        Ok(Self {
            irreps,
            frames,
            system,
            factors,
        })
    }

    pub fn irreps(&self) -> &IrrepTable {
        &self.irreps
    }

    pub fn irreps_arc(&self) -> Arc<IrrepTable> {
        Arc::clone(&self.irreps)
    }

    pub fn frames(&self) -> &[FrameSpec] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &FrameSpec {
        &self.frames[i]
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn system(&self) -> &RepSpec {
        &self.system
    }

    pub fn factors(&self) -> &[FactorLabel] {
        &self.factors
    }

    pub fn factor_ids(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.id.as_str()).collect()
    }

    pub fn kin_dim(&self) -> usize {
        self.factors.iter().map(FactorLabel::dim).product()
    }

    /// Index of a frame id, `None` for the system or unknown ids.
    pub fn frame_index(&self, id: &str) -> Option<usize> {
        (0..self.frames.len()).find(|&i| frame_id(i) == id)
    }

    pub fn frame_by_id(&self, id: &str) -> Result<&FrameSpec> {
        self.frame_index(id)
            .map(|i| &self.frames[i])
            .ok_or_else(|| Error::UnknownFactor(id.to_string()))
    }

    /// Representation carried by any factor.
    pub fn rep_of(&self, id: &str) -> Result<&RepSpec> {
        if id == SYSTEM_ID {
            return Ok(&self.system);
        }
        self.frame_by_id(id).map(FrameSpec::rep)
    }

    /// Ideal frames and permutation-representation systems have a
    /// group-label-like basis permuted by the group action.
    pub fn is_permutation_factor(&self, id: &str) -> bool {
        match self.frame_index(id) {
            Some(i) => self.frames[i].is_ideal(),
            None => id == SYSTEM_ID && self.system.permutation_action().is_some(),
        }
    }

    pub fn ideal_frame_indices(&self) -> Vec<usize> {
        (0..self.frames.len())
            .filter(|&i| self.frames[i].is_ideal())
            .collect()
    }

    /// Per-factor matrices of `U(g)` in factor order.
    pub fn local_actions(&self, g: usize) -> Vec<&DMatrix<C64>> {
        self.frames
            .iter()
            .map(|f| f.rep().matrix(g))
            .chain(std::iter::once(self.system.matrix(g)))
            .collect()
    }
}

/// Full `U(g) = U_{R1}(g) ⊗ ... ⊗ U_{RN}(g) ⊗ U_S(g)` on the kinematical space.
pub fn diagonal_action(space: &CompositeSpace, g: usize) -> DMatrix<C64> {
    space
        .local_actions(g)
        .into_iter()
        .fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, u| {
            acc.kronecker(u)
        })
}

/// Applies a product operator `ops[0] ⊗ ops[1] ⊗ ...` to a flat vector
/// without forming the Kronecker product.
pub fn apply_product(ops: &[&DMatrix<C64>], v: &DVector<C64>) -> DVector<C64> {
    let dims: Vec<usize> = ops.iter().map(|o| o.ncols()).collect();
    let mut cur = v.clone();
    for (k, op) in ops.iter().enumerate() {
        let before: usize = dims[..k].iter().product();
        let after: usize = dims[k + 1..].iter().product();
        let d = dims[k];
        let mut next = DVector::zeros(cur.len());
        for a in 0..before {
            for b in 0..after {
                for r in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..d {
                        let x = op[(r, c)];
                        if x.re != 0.0 || x.im != 0.0 {
                            acc += x * cur[(a * d + c) * after + b];
                        }
                    }
                    next[(a * d + r) * after + b] = acc;
                }
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupKind, GroupTable};

    fn irreps(kind: GroupKind) -> Arc<IrrepTable> {
        Arc::new(IrrepTable::for_group(&GroupTable::from_kind(kind).unwrap()).unwrap())
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn regular_z2_is_identity_and_x() {
        let t = irreps(GroupKind::Cyclic(2));
        let reg = RepSpec::regular(&t);
        assert_eq!(reg.matrix(0), &DMatrix::identity(2, 2));
        assert_eq!(reg.matrix(1), &DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn regular_z3_is_cyclic_shift() {
        let t = irreps(GroupKind::Cyclic(3));
        let reg = RepSpec::regular(&t);
        // U(a)|h> = |h+1>
        for h in 0..3 {
            assert_eq!(reg.matrix(1)[((h + 1) % 3, h)], c(1.0));
        }
        reg.validate(&t).unwrap();
    }

    #[test]
    fn regular_character_and_peter_weyl() {
        for kind in [GroupKind::Symmetric(3), GroupKind::Dihedral(4), GroupKind::Cyclic(5)] {
            let t = irreps(kind);
            let reg = RepSpec::regular(&t);
            let n = t.group().order();
            for g in t.group().elements() {
                let want = if g == t.group().identity() { n as f64 } else { 0.0 };
                assert!((reg.character(g) - c(want)).norm() < 1e-12);
            }
            let blocks = RepSpec::from_mults(&t, &t.dims()).unwrap();
            let v = reg.peter_weyl().unwrap();
            assert!(max_abs(&(v.adjoint() * v - DMatrix::identity(n, n))) < 1e-12);
            for g in t.group().elements() {
                let conj = v.adjoint() * reg.matrix(g) * v;
                assert!(max_abs(&(conj - blocks.matrix(g))) < 1e-12, "{kind} g={g}");
                assert!((blocks.character(g) - reg.character(g)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rep_from_mults_examples() {
        let z2 = irreps(GroupKind::Cyclic(2));
        let triv = RepSpec::from_mults(&z2, &[1, 0]).unwrap();
        assert_eq!(triv.dim(), 1);
        assert_eq!(triv.matrix(1)[(0, 0)], c(1.0));
        assert!(RepSpec::from_mults(&z2, &[0, 0]).is_err());
        assert!(RepSpec::from_mults(&z2, &[1]).is_err());

        let s3 = irreps(GroupKind::Symmetric(3));
        let r = RepSpec::from_mults(&s3, &[1, 0, 1]).unwrap();
        assert_eq!(r.dim(), 3);
        for g in 0..6 {
            let want = C64::new(1.0, 0.0) + s3.character(2, g);
            assert!((r.character(g) - want).norm() < 1e-12);
        }
        r.validate(&s3).unwrap();
    }

    #[test]
    fn every_rep_is_a_unitary_homomorphism() {
        for kind in [GroupKind::Cyclic(4), GroupKind::Dihedral(5), GroupKind::Symmetric(3)] {
            let t = irreps(kind);
            RepSpec::regular(&t).validate(&t).unwrap();
            let mults: Vec<usize> = (0..t.len()).map(|q| q % 3).collect();
            if mults.iter().any(|&m| m > 0) {
                RepSpec::from_mults(&t, &mults).unwrap().validate(&t).unwrap();
            }
        }
    }

    #[test]
    fn diagonal_action_examples() {
        let z2 = irreps(GroupKind::Cyclic(2));
        let space = CompositeSpace::new(
            Arc::clone(&z2),
            vec![FrameSpec::ideal(&z2), FrameSpec::ideal(&z2)],
            RepSpec::from_mults(&z2, &[1, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(diagonal_action(&space, 0), DMatrix::identity(4, 4));
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let want = x.kronecker(&x).kronecker(&DMatrix::identity(1, 1));
        assert_eq!(diagonal_action(&space, 1), want);

        let s3 = irreps(GroupKind::Symmetric(3));
        let space = CompositeSpace::new(
            Arc::clone(&s3),
            vec![FrameSpec::ideal(&s3), FrameSpec::non_ideal(&s3, &[1, 0, 1], None).unwrap()],
            RepSpec::from_mults(&s3, &[0, 1, 1]).unwrap(),
        )
        .unwrap();
        for g in 0..6 {
            for h in 0..6 {
                let lhs = diagonal_action(&space, g) * diagonal_action(&space, h);
                let rhs = diagonal_action(&space, s3.group().mul(g, h));
                assert!(max_abs(&(lhs - rhs)) < 1e-12);
            }
        }
    }

    #[test]
    fn apply_product_matches_kronecker() {
        let s3 = irreps(GroupKind::Symmetric(3));
        let space = CompositeSpace::new(
            Arc::clone(&s3),
            vec![FrameSpec::ideal(&s3), FrameSpec::non_ideal(&s3, &[1, 1, 1], None).unwrap()],
            RepSpec::from_mults(&s3, &[0, 1, 1]).unwrap(),
        )
        .unwrap();
        let v = DVector::from_fn(space.kin_dim(), |i, _| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03));
        for g in 0..6 {
            let direct = diagonal_action(&space, g) * &v;
            let fast = apply_product(&space.local_actions(g), &v);
            assert!((direct - fast).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_orbit_examples() {
        let s3 = irreps(GroupKind::Symmetric(3));
        let ideal = FrameSpec::ideal(&s3);
        assert_eq!(&coherent_orbit(&ideal, "R1", 0).unwrap(), ideal.seed().unwrap());
        for g in 0..6 {
            let v = coherent_orbit(&ideal, "R1", g).unwrap();
            // orbit of |e> is |g>
            for h in 0..6 {
                assert_eq!(v[h], c(if h == g { 1.0 } else { 0.0 }));
            }
        }
        let nonideal = FrameSpec::non_ideal(&s3, &[1, 1, 1], None).unwrap();
        for g in 0..6 {
            let v = coherent_orbit(&nonideal, "R1", g).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        let bare = nonideal.without_seed();
        assert!(matches!(coherent_orbit(&bare, "R1", 0), Err(Error::MissingSeed(_))));
    }

    #[test]
    fn povm_ideal_and_one_dimensional() {
        for kind in [GroupKind::Cyclic(2), GroupKind::Cyclic(3), GroupKind::Symmetric(3), GroupKind::Dihedral(4)] {
            let t = irreps(kind);
            let check = check_povm_resolution(&t, &FrameSpec::ideal(&t), "R1").unwrap();
            assert!(check.is_resolution, "{kind}: {check:?}");
            assert!(check.residual < 1e-9);
        }
        let z2 = irreps(GroupKind::Cyclic(2));
        let seed = DVector::from_element(1, C64::new(0.3, -0.4));
        let f = FrameSpec::non_ideal(&z2, &[1, 0], Some(seed)).unwrap();
        assert!(check_povm_resolution(&z2, &f, "R1").unwrap().is_resolution);
    }

    #[test]
    fn povm_default_seed_resolves_identity_for_wellformed_frames() {
        let s3 = irreps(GroupKind::Symmetric(3));
        for mults in [[1, 0, 1], [1, 1, 2], [0, 1, 1], [1, 1, 0]] {
            let f = FrameSpec::non_ideal(&s3, &mults, None).unwrap();
            let check = check_povm_resolution(&s3, &f, "R1").unwrap();
            assert!(check.is_resolution, "{mults:?}: {check:?}");
        }
    }

    #[test]
    fn povm_fails_when_multiplicity_exceeds_dimension() {
        let z2 = irreps(GroupKind::Cyclic(2));
        assert!(FrameSpec::non_ideal(&z2, &[2, 0], None).is_err());
        let f = FrameSpec::unchecked(&z2, &[2, 0], None).unwrap();
        let check = check_povm_resolution(&z2, &f, "R1").unwrap();
        assert!(!check.is_resolution);
        assert!(!check.multiplicities_ok);
    }

    #[test]
    fn seeds_are_normalized_and_checked() {
        let z3 = irreps(GroupKind::Cyclic(3));
        let seed = DVector::from_vec(vec![c(2.0), c(0.0)]);
        let f = FrameSpec::non_ideal(&z3, &[1, 1, 0], Some(seed)).unwrap();
        assert!((f.seed().unwrap().norm() - 1.0).abs() < 1e-15);
        assert!(FrameSpec::non_ideal(&z3, &[1, 1, 0], Some(DVector::zeros(2))).is_err());
        assert!(FrameSpec::non_ideal(&z3, &[1, 1, 0], Some(DVector::zeros(3))).is_err());
    }

    #[test]
    fn permutation_action_detection() {
        let z3 = irreps(GroupKind::Cyclic(3));
        assert!(RepSpec::regular(&z3).permutation_action().is_some());
        assert!(RepSpec::from_mults(&z3, &[2, 0, 0]).unwrap().permutation_action().is_some());
        assert!(RepSpec::from_mults(&z3, &[1, 1, 1]).unwrap().permutation_action().is_none());
    }
}
