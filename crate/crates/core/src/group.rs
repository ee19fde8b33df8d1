//! Finite groups as explicit multiplication tables.
//!
//! Element ordering is fixed per kind so that basis labels are reproducible:
//!
//! - `cyclic(n)`: powers of the generator, `e, a, a^2, ..., a^(n-1)`.
//! - `dihedral(n)`: rotations `r^k` (indices `0..n`) followed by reflections
//!   `r^k s` (indices `n..2n`), with `s r s = r^-1`.
//! - `symmetric(3)`: permutations of `{0,1,2}` in lexicographic order of their
//!   one-line notation, composed as `(gh)(x) = g(h(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which finite group to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "lowercase")]
pub enum GroupKind {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupKind::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupKind::Symmetric(n) => write!(f, "symmetric({n})"),
        }
    }
}

/// A finite group stored as its full multiplication table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTable {
    kind: GroupKind,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    labels: Vec<String>,
}

impl GroupTable {
    /// Builds the table for a supported group kind.
    pub fn from_kind(kind: GroupKind) -> Result<Self> {
        let table = match kind {
            GroupKind::Cyclic(n) => {
                if n < 1 {
                    return Err(Error::Config("cyclic group needs n >= 1".into()));
                }
                cyclic(n)
            }
            GroupKind::Dihedral(n) => {
                if n < 3 {
                    return Err(Error::Config("dihedral group needs n >= 3".into()));
                }
                dihedral(n)
            }
            GroupKind::Symmetric(3) => symmetric3(),
            GroupKind::Symmetric(n) => {
                return Err(Error::Config(format!(
                    "symmetric({n}) is not supported, only symmetric(3)"
                )))
            }
        };
        table.validate()?;
        Ok(table)
    }

    fn from_mul(kind: GroupKind, mul: Vec<Vec<usize>>, labels: Vec<String>) -> Self {
        let order = mul.len();
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e][g] == g && mul[g][e] == g))
            .expect("multiplication table without identity");
        let inv = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&h| mul[g][h] == identity)
                    .expect("element without inverse")
            })
            .collect();
        Self {
            kind,
            mul,
            inv,
            identity,
            labels,
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g][h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// `g^k` by repeated multiplication.
    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..n)
                .map(|h| self.mul(self.mul(h, g), self.inv(h)))
                .collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Checks the group axioms exhaustively.
    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        if self.labels.len() != n || self.inv.len() != n {
            return Err(Error::Consistency("group table size mismatch".into()));
        }
        for g in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for h in 0..n {
                row[self.mul(g, h)] = true;
                col[self.mul(h, g)] = true;
            }
            if row.iter().chain(col.iter()).any(|seen| !seen) {
                return Err(Error::Consistency(format!(
                    "row/column {g} of the multiplication table is not a permutation"
                )));
            }
            if self.mul(self.identity, g) != g || self.mul(g, self.identity) != g {
                return Err(Error::Consistency(format!("identity fails on {g}")));
            }
            if self.mul(g, self.inv(g)) != self.identity {
                return Err(Error::Consistency(format!("inverse fails on {g}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Consistency(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn cyclic(n: usize) -> GroupTable {
    let mul = (0..n)
        .map(|a| (0..n).map(|b| (a + b) % n).collect())
        .collect();
    let labels = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "a".to_string(),
            _ => format!("a^{k}"),
        })
        .collect();
    GroupTable::from_mul(GroupKind::Cyclic(n), mul, labels)
}

fn dihedral(n: usize) -> GroupTable {
    // index = f*n + k  <->  r^k s^f
    let decode = |i: usize| (i % n, i / n);
    let encode = |k: usize, f: usize| f * n + k;
    let mul = (0..2 * n)
        .map(|x| {
            let (a, f) = decode(x);
            (0..2 * n)
                .map(|y| {
                    let (b, h) = decode(y);
                    // r^a s^f r^b s^h = r^(a + (-1)^f b) s^(f+h)
                    let k = if f == 0 { (a + b) % n } else { (a + n - b) % n };
                    encode(k, (f + h) % 2)
                })
                .collect()
        })
        .collect();
    let labels = (0..2 * n)
        .map(|i| {
            let (k, f) = decode(i);
            let rot = match k {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{k}"),
            };
            match (rot.is_empty(), f) {
                (true, 0) => "e".to_string(),
                (true, _) => "s".to_string(),
                (false, 0) => rot,
                (false, _) => format!("{rot}s"),
            }
        })
        .collect();
    GroupTable::from_mul(GroupKind::Dihedral(n), mul, labels)
}

/// One-line notation of the elements of S_3 in the order used by the table.
pub(crate) const S3_PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn symmetric3() -> GroupTable {
    let index = |p: [usize; 3]| S3_PERMS.iter().position(|q| *q == p).unwrap();
    let mul = S3_PERMS
        .iter()
        .map(|g| {
            S3_PERMS
                .iter()
                .map(|h| index([g[h[0]], g[h[1]], g[h[2]]]))
                .collect()
        })
        .collect();
    let labels = S3_PERMS
        .iter()
        .map(|p| format!("[{}{}{}]", p[0], p[1], p[2]))
        .collect();
    GroupTable::from_mul(GroupKind::Symmetric(3), mul, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<GroupKind> {
        let mut kinds: Vec<GroupKind> = (1..=8).map(GroupKind::Cyclic).collect();
        kinds.extend((3..=8).map(GroupKind::Dihedral));
        kinds.push(GroupKind::Symmetric(3));
        kinds
    }

    #[test]
    fn trivial_group() {
        let g = GroupTable::from_kind(GroupKind::Cyclic(1)).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.label(0), "e");
    }

    #[test]
    fn cyclic3_cubes_to_identity() {
        let g = GroupTable::from_kind(GroupKind::Cyclic(3)).unwrap();
        assert_eq!(g.order(), 3);
        for x in g.elements() {
            assert_eq!(g.pow(x, 3), g.identity());
        }
    }

    #[test]
    fn s3_class_sizes() {
        let g = GroupTable::from_kind(GroupKind::Symmetric(3)).unwrap();
        assert_eq!(g.order(), 6);
        // brute force: class of x is {h x h^-1}
        let mut sizes: Vec<usize> = g
            .elements()
            .map(|x| {
                let mut c: Vec<usize> = g
                    .elements()
                    .map(|h| g.mul(g.mul(h, x), g.inv(h)))
                    .collect();
                c.sort();
                c.dedup();
                c
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|c| c.len())
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        let mut from_method: Vec<usize> = g.conjugacy_classes().iter().map(Vec::len).collect();
        from_method.sort();
        assert_eq!(from_method, sizes);
    }

    #[test]
    fn dihedral_relations() {
        for n in 3..=7 {
            let g = GroupTable::from_kind(GroupKind::Dihedral(n)).unwrap();
            assert_eq!(g.order(), 2 * n);
            let r = 1;
            let s = n;
            assert_eq!(g.pow(r, n), g.identity());
            assert_eq!(g.mul(s, s), g.identity());
            assert_eq!(g.mul(g.mul(s, r), s), g.inv(r));
            assert_eq!(g.label(0), "e");
            assert_eq!(g.label(s), "s");
        }
    }

    #[test]
    fn axioms_hold_for_every_supported_group() {
        for kind in all_kinds() {
            let g = GroupTable::from_kind(kind).unwrap();
            g.validate().unwrap();
            let labels: std::collections::BTreeSet<_> = g.labels().iter().collect();
            assert_eq!(labels.len(), g.order(), "{kind}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            GroupTable::from_kind(GroupKind::Cyclic(0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            GroupTable::from_kind(GroupKind::Dihedral(2)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            GroupTable::from_kind(GroupKind::Symmetric(4)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let mut g = GroupTable::from_kind(GroupKind::Cyclic(4)).unwrap();
        g.mul[1][1] = 3;
        assert!(g.validate().is_err());
    }
}
