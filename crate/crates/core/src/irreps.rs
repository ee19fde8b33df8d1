//! Explicit irreducible representations, characters and fusion multiplicities.
//!
//! Label `0` is always the trivial irrep. Ordering per group kind:
//!
//! - cyclic(n): `q = 0..n`, `D_q(a^k) = exp(2 pi i q k / n)`.
//! - dihedral(n): one-dimensional irreps first (`A1`, `A2`, then `B1`, `B2`
//!   for even n), followed by the two-dimensional `E_p`, `p = 1..=(n-1)/2`.
//! - symmetric(3): trivial, sign, standard.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupTable, S3_PERMS};
use crate::C64;

/// Tolerance for the unitarity, homomorphism and orthogonality checks.
const IRREP_TOL: f64 = 1e-12;
/// A fusion multiplicity before rounding must be this close to an integer.
const FUSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Irrep {
    pub name: String,
    pub dim: usize,
    /// `matrices[g]` is `D_q(g)`.
    pub matrices: Vec<DMatrix<C64>>,
}

impl Irrep {
    pub fn character(&self, g: usize) -> C64 {
        self.matrices[g].trace()
    }
}

/// Complete set of irreps of a finite group.
#[derive(Debug, Clone)]
pub struct IrrepTable {
    group: GroupTable,
    irreps: Vec<Irrep>,
    characters: Vec<Vec<C64>>,
    conjugate: Vec<usize>,
}

impl IrrepTable {
    /// Builds and validates the irreps of a supported group.
    pub fn for_group(group: &GroupTable) -> Result<Self> {
        let irreps = match group.kind() {
            GroupKind::Cyclic(n) => cyclic_irreps(n),
            GroupKind::Dihedral(n) => dihedral_irreps(group, n),
            GroupKind::Symmetric(3) => s3_irreps(),
            other => return Err(Error::Config(format!("no irreps available for {other}"))),
        };
        Self::from_irreps(group.clone(), irreps)
    }

    fn from_irreps(group: GroupTable, irreps: Vec<Irrep>) -> Result<Self> {
        let characters: Vec<Vec<C64>> = irreps
            .iter()
            .map(|irrep| group.elements().map(|g| irrep.character(g)).collect())
            .collect();
        let conjugate = (0..irreps.len())
            .map(|q| {
                (0..irreps.len())
                    .find(|&p| {
                        characters[q]
                            .iter()
                            .zip(&characters[p])
                            .all(|(a, b)| (a.conj() - b).norm() < 1e-9)
                    })
                    .ok_or_else(|| {
                        Error::Consistency(format!("irrep {q} has no conjugate in the table"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let table = Self {
            group,
            irreps,
            characters,
            conjugate,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn irrep(&self, q: usize) -> &Irrep {
        &self.irreps[q]
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn dim(&self, q: usize) -> usize {
        self.irreps[q].dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|i| i.dim).collect()
    }

    pub fn character(&self, q: usize, g: usize) -> C64 {
        self.characters[q][g]
    }

    pub fn characters(&self, q: usize) -> &[C64] {
        &self.characters[q]
    }

    /// The label of the dual irrep `q̄`.
    pub fn conjugate(&self, q: usize) -> usize {
        self.conjugate[q]
    }

    /// `(1/|G|) Σ_g χ_a(g) conj(χ_b(g))`
    pub fn character_inner(&self, a: &[C64], b: &[C64]) -> C64 {
        let sum: C64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
        sum / self.group.order() as f64
    }

    fn check_label(&self, q: usize) -> Result<()> {
        if q < self.len() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "irrep label {q} out of range (group has {} irreps)",
                self.len()
            )))
        }
    }

    /// Multiplicity `N_{ab}^c` of irrep `c` inside `a ⊗ b`, from characters.
    pub fn fusion_coefficient(&self, a: usize, b: usize, c: usize) -> Result<usize> {
        self.check_label(a)?;
        self.check_label(b)?;
        self.check_label(c)?;
        let product: Vec<C64> = self.characters[a]
            .iter()
            .zip(&self.characters[b])
            .map(|(x, y)| x * y)
            .collect();
        let value = self.character_inner(&product, &self.characters[c]);
        let rounded = value.re.round();
        if (value - C64::new(rounded, 0.0)).norm() > FUSION_TOL || rounded < 0.0 {
            return Err(Error::Consistency(format!(
                "fusion multiplicity N_({a},{b})^{c} = {value} is not a non-negative integer"
            )));
        }
        Ok(rounded as usize)
    }

    /// Checks homomorphism, unitarity, the dimension identity and character
    /// orthogonality.
    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        let dim_sq: usize = self.irreps.iter().map(|i| i.dim * i.dim).sum();
        if dim_sq != g.order() {
            return Err(Error::Consistency(format!(
                "sum of squared irrep dimensions {dim_sq} != |G| = {}",
                g.order()
            )));
        }
        for (q, irrep) in self.irreps.iter().enumerate() {
            if irrep.matrices.len() != g.order() {
                return Err(Error::Consistency(format!("irrep {q} has wrong matrix count")));
            }
            let id = DMatrix::<C64>::identity(irrep.dim, irrep.dim);
            for x in g.elements() {
                let m = &irrep.matrices[x];
                if max_abs(&(m.adjoint() * m - &id)) > IRREP_TOL {
                    return Err(Error::Consistency(format!("D_{q}({x}) is not unitary")));
                }
                for y in g.elements() {
                    let lhs = &irrep.matrices[g.mul(x, y)];
                    if max_abs(&(lhs - m * &irrep.matrices[y])) > IRREP_TOL {
                        return Err(Error::Consistency(format!(
                            "D_{q} is not a homomorphism at ({x}, {y})"
                        )));
                    }
                }
            }
        }
        for a in 0..self.len() {
            for b in 0..self.len() {
                let ip = self.character_inner(&self.characters[a], &self.characters[b]);
                let expected = if a == b { 1.0 } else { 0.0 };
                if (ip - C64::new(expected, 0.0)).norm() > IRREP_TOL {
                    return Err(Error::Consistency(format!(
                        "characters {a} and {b} are not orthonormal ({ip})"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn scalar(z: C64) -> DMatrix<C64> {
    DMatrix::from_element(1, 1, z)
}

fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|q| Irrep {
            name: format!("q{q}"),
            dim: 1,
            matrices: (0..n)
                .map(|k| {
                    let phase = 2.0 * PI * ((q * k) % n) as f64 / n as f64;
                    scalar(C64::from_polar(1.0, phase))
                })
                .collect(),
        })
        .collect()
}

fn dihedral_irreps(group: &GroupTable, n: usize) -> Vec<Irrep> {
    // element index f*n + k is r^k s^f
    let one_dim = |name: &str, chi: &dyn Fn(usize, usize) -> f64| Irrep {
        name: name.to_string(),
        dim: 1,
        matrices: group
            .elements()
            .map(|i| scalar(C64::new(chi(i % n, i / n), 0.0)))
            .collect(),
    };
    let sign = |x: usize| if x.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut irreps = vec![
        one_dim("A1", &|_, _| 1.0),
        one_dim("A2", &|_, f| sign(f)),
    ];
    if n.is_multiple_of(2) {
        irreps.push(one_dim("B1", &|k, _| sign(k)));
        irreps.push(one_dim("B2", &|k, f| sign(k + f)));
    }
    for p in 1..=(n - 1) / 2 {
        let matrices = group
            .elements()
            .map(|i| {
                let (k, f) = (i % n, i / n);
                let w = C64::from_polar(1.0, 2.0 * PI * ((p * k) % n) as f64 / n as f64);
                let rot = DMatrix::from_row_slice(2, 2, &[w, C64::new(0.0, 0.0), C64::new(0.0, 0.0), w.conj()]);
                if f == 0 {
                    rot
                } else {
                    let zero = C64::new(0.0, 0.0);
                    let one = C64::new(1.0, 0.0);
                    rot * DMatrix::from_row_slice(2, 2, &[zero, one, one, zero])
                }
            })
            .collect();
        irreps.push(Irrep {
            name: format!("E{p}"),
            dim: 2,
            matrices,
        });
    }
    irreps
}

fn s3_irreps() -> Vec<Irrep> {
    let parity = |p: &[usize; 3]| {
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    // orthonormal basis of the plane orthogonal to (1,1,1)
    let s2 = 1.0 / 2f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let basis = DMatrix::from_row_slice(3, 2, &[s2, s6, -s2, s6, 0.0, -2.0 * s6]);
    let standard = S3_PERMS
        .iter()
        .map(|p| {
            let mut perm = DMatrix::<f64>::zeros(3, 3);
            for x in 0..3 {
                perm[(p[x], x)] = 1.0;
            }
            (basis.transpose() * perm * &basis).map(|v| C64::new(v, 0.0))
        })
        .collect();
    vec![
        Irrep {
            name: "trivial".into(),
            dim: 1,
            matrices: vec![scalar(C64::new(1.0, 0.0)); 6],
        },
        Irrep {
            name: "sign".into(),
            dim: 1,
            matrices: S3_PERMS.iter().map(|p| scalar(C64::new(parity(p), 0.0))).collect(),
        },
        Irrep {
            name: "standard".into(),
            dim: 2,
            matrices: standard,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(kind: GroupKind) -> IrrepTable {
        IrrepTable::for_group(&GroupTable::from_kind(kind).unwrap()).unwrap()
    }

    fn supported() -> Vec<GroupKind> {
        let mut kinds: Vec<GroupKind> = (1..=8).map(GroupKind::Cyclic).collect();
        kinds.extend((3..=8).map(GroupKind::Dihedral));
        kinds.push(GroupKind::Symmetric(3));
        kinds
    }

    #[test]
    fn z2_character_table() {
        let t = table(GroupKind::Cyclic(2));
        assert_eq!(t.dims(), vec![1, 1]);
        let re = |q: usize| t.characters(q).iter().map(|z| z.re).collect::<Vec<_>>();
        assert_eq!(re(0), vec![1.0, 1.0]);
        assert!((re(1)[0] - 1.0).abs() < 1e-15 && (re(1)[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn s3_burnside() {
        let t = table(GroupKind::Symmetric(3));
        assert_eq!(t.dims(), vec![1, 1, 2]);
        assert_eq!(t.dims().iter().map(|d| d * d).sum::<usize>(), 6);
    }

    #[test]
    fn d4_has_five_irreps() {
        let t = table(GroupKind::Dihedral(4));
        assert_eq!(t.dims(), vec![1, 1, 1, 1, 2]);
        // orthogonality recomputed directly
        for a in 0..5 {
            for b in 0..5 {
                let s: C64 = (0..8)
                    .map(|g| t.character(a, g) * t.character(b, g).conj())
                    .sum::<C64>()
                    / 8.0;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn z2_sign_squared_is_trivial() {
        let t = table(GroupKind::Cyclic(2));
        assert_eq!(t.fusion_coefficient(1, 1, 0).unwrap(), 1);
        assert_eq!(t.fusion_coefficient(1, 1, 1).unwrap(), 0);
    }

    #[test]
    fn trivial_irrep_is_fusion_unit() {
        for kind in supported() {
            let t = table(kind);
            for b in 0..t.len() {
                for c in 0..t.len() {
                    let want = usize::from(b == c);
                    assert_eq!(t.fusion_coefficient(0, b, c).unwrap(), want, "{kind}");
                }
            }
        }
    }

    /// Decompose D_2 ⊗ D_2 of S_3 by projecting with the character projectors
    /// `P_c = (d_c/|G|) Σ_g conj(χ_c(g)) D(g)⊗D(g)` and reading off ranks.
    #[test]
    fn s3_standard_squared_decomposes_into_all_three() {
        let t = table(GroupKind::Symmetric(3));
        let std = t.irrep(2);
        let mut ranks = Vec::new();
        for c in 0..3 {
            let mut proj = DMatrix::<C64>::zeros(4, 4);
            for g in 0..6 {
                let kron = std.matrices[g].kronecker(&std.matrices[g]);
                proj += kron * t.character(c, g).conj();
            }
            proj *= C64::new(t.dim(c) as f64 / 6.0, 0.0);
            let trace = proj.trace().re;
            ranks.push((trace / t.dim(c) as f64).round() as usize);
        }
        assert_eq!(ranks, vec![1, 1, 1]);
        for c in 0..3 {
            assert_eq!(t.fusion_coefficient(2, 2, c).unwrap(), ranks[c]);
        }
    }

    #[test]
    fn fusion_symmetry_and_dimension_consistency() {
        for kind in supported() {
            let t = table(kind);
            for a in 0..t.len() {
                for b in 0..t.len() {
                    let mut total = 0;
                    for c in 0..t.len() {
                        let n = t.fusion_coefficient(a, b, c).unwrap();
                        assert_eq!(n, t.fusion_coefficient(b, a, c).unwrap());
                        total += t.dim(c) * n;
                    }
                    assert_eq!(total, t.dim(a) * t.dim(b), "{kind} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn conjugation_is_an_involution() {
        for kind in supported() {
            let t = table(kind);
            for q in 0..t.len() {
                assert_eq!(t.conjugate(t.conjugate(q)), q);
            }
        }
        let z5 = table(GroupKind::Cyclic(5));
        assert_eq!(z5.conjugate(2), 3);
        assert_eq!(z5.conjugate(0), 0);
    }

    #[test]
    fn fusion_rejects_bad_labels() {
        let t = table(GroupKind::Cyclic(3));
        assert!(matches!(t.fusion_coefficient(0, 3, 0), Err(Error::Config(_))));
    }

    #[test]
    fn corrupted_irrep_data_is_reported() {
        let group = GroupTable::from_kind(GroupKind::Cyclic(3)).unwrap();
        let mut irreps = cyclic_irreps(3);
        irreps[1].matrices[1] = scalar(C64::new(0.0, 1.0));
        assert!(matches!(
            IrrepTable::from_irreps(group, irreps),
            Err(Error::Consistency(_))
        ));
    }
}
