//! Per-trial evaluation of every invariant and the run loop around it.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::entropy::{
    coherence, entropy_difference, entropy_gap_bound, frame_coherence, gamma,
    max_entropy_difference, pair_effective_dimensions, renyi_many, EntropyParams,
};
use crate::error::{Error, Result};
use crate::relational::{
    build_permutation, frame_change, frame_change_operator, reduce, swapped_subset, trivialize,
    PhysicalState, Perspective,
};
use crate::reps::{check_povm_resolution, frame_id, CompositeSpace};
use crate::tensor::dephase;
use crate::verify::report::{spec_hash, CheckReport, InvariantReport, Provenance, Row, SCHEMA_VERSION};
use crate::verify::sampling::{aux_rng, sample_physical, trial_rng};
use crate::verify::spec::{Check, CheckKind, ExperimentSpec, MAX_ENUMERATED_FACTORS};
use crate::verify::witness::find_tradeoff_violation;
use crate::C64;

/// Highest power checked for diagonal-observable moments.
pub const MOMENT_ORDER: u32 = 4;

enum Outcome {
    Rows(Vec<Row>),
    /// A conditioning had zero overlap; the trial says nothing about this check.
    Excluded,
}

fn is_per_trial(check: Check) -> bool {
    !matches!(check, Check::PovmResolution | Check::TradeoffViolation)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn join(ids: &[String]) -> String {
    if ids.is_empty() {
        "-".to_string()
    } else {
        ids.join("")
    }
}

fn refs(ids: &[String]) -> Vec<&str> {
    ids.iter().map(String::as_str).collect()
}

/// Subsets of `candidates` (each kept in canonical order): all of them when
/// the space is small, otherwise `cap` random draws.
fn subsets<R: Rng>(
    candidates: &[String],
    enumerate: bool,
    cap: usize,
    rng: &mut R,
) -> Vec<Vec<String>> {
    let pick = |mask: u64| {
        candidates
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, id)| id.clone())
            .collect::<Vec<_>>()
    };
    if enumerate {
        (0..1u64 << candidates.len()).map(pick).collect()
    } else {
        (0..cap)
            .map(|_| pick(rng.random::<u64>() & ((1u64 << candidates.len()) - 1)))
            .collect()
    }
}

/// Inserts `extra` into `ids` respecting the canonical factor order.
fn with_factor(space: &CompositeSpace, ids: &[String], extra: &str) -> Vec<String> {
    space
        .factor_ids()
        .into_iter()
        .filter(|id| *id == extra || ids.iter().any(|x| x == id))
        .map(str::to_string)
        .collect()
}

struct Trial<'a> {
    spec: &'a ExperimentSpec,
    space: &'a Arc<CompositeSpace>,
    params: &'a [EntropyParams],
    index: usize,
    phys: PhysicalState,
    /// Label-conditioned perspectives of the ideal frames.
    ideal: BTreeMap<String, Perspective>,
}

impl Trial<'_> {
    fn enumerate(&self) -> bool {
        self.space.factors().len() <= MAX_ENUMERATED_FACTORS
    }

    fn ideal_ids(&self) -> Vec<String> {
        self.space.ideal_frame_indices().into_iter().map(frame_id).collect()
    }

    fn ordered_pairs(&self) -> Vec<(String, String)> {
        let ids = self.ideal_ids();
        let mut out = Vec::new();
        for i in &ids {
            for j in &ids {
                if i != j {
                    out.push((i.clone(), j.clone()));
                }
            }
        }
        out
    }

    /// Permutation factors usable in kept sets, except the listed ones.
    fn permutation_factors_except(&self, skip: &[&str]) -> Vec<String> {
        self.space
            .factor_ids()
            .into_iter()
            .filter(|id| !skip.contains(id) && self.space.is_permutation_factor(id))
            .map(str::to_string)
            .collect()
    }

    /// Kept sets `X ∋ R_j` in the perspective of `R_i`.
    fn kept_sets(&self, i: &str, j: &str, salt: u64) -> Vec<Vec<String>> {
        let mut rng = aux_rng(self.spec.seed, self.index as u64, salt);
        let cands = self.permutation_factors_except(&[i, j]);
        subsets(&cands, self.enumerate(), self.spec.subset_cap, &mut rng)
            .into_iter()
            .map(|s| with_factor(self.space, &s, j))
            .collect()
    }

    fn persp(&self, id: &str) -> &Perspective {
        &self.ideal[id]
    }

    fn dephased_permutation(&self) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for (i, j) in self.ordered_pairs() {
            for x in self.kept_sets(&i, &j, 0) {
                let p = build_permutation(self.space, &i, &j, &refs(&x))?;
                let y = swapped_subset(self.space, &i, &j, &refs(&x));
                let dx = dephase(&self.persp(&i).reduced(&refs(&x))?);
                let dy = dephase(&self.persp(&j).reduced(&refs(&y))?);
                let moved = p.conjugate(dx.matrix());
                let diff = max_abs(&(dy.matrix() - moved));
                let ctx = format!("{i}->{j} X={} Y={}", join(&x), join(&y));
                let mut row = Row::equality(self.index, ctx, None, diff, 0.0);
                if !p.is_bijection() {
                    row.residual = row.residual.max(1.0);
                }
                rows.push(row.with_extra("bijection", f64::from(u8::from(p.is_bijection()))));
            }
        }
        Ok(rows)
    }

    fn diagonal_invariant(&self) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for (i, j) in self.ordered_pairs() {
            for x in self.kept_sets(&i, &j, 0) {
                let y = swapped_subset(self.space, &i, &j, &refs(&x));
                let rx = self.persp(&i).reduced(&refs(&x))?;
                let ry = self.persp(&j).reduced(&refs(&y))?;
                let ctx = format!("{i}->{j} X={} Y={}", join(&x), join(&y));
                let dx = renyi_many(&dephase(&rx), self.params)?;
                let dy = renyi_many(&dephase(&ry), self.params)?;
                let sx = renyi_many(&rx, self.params)?;
                let sy = renyi_many(&ry, self.params)?;
                for (k, p) in self.params.iter().enumerate() {
                    let a = Some(p.alpha);
                    rows.push(Row::equality(self.index, ctx.clone(), a, dx[k], dy[k]));
                    // S_α(ρ) + C_α(ρ) with the coherence taken as its own quantity
                    let (cx, cy) = (dx[k] - sx[k], dy[k] - sy[k]);
                    rows.push(
                        Row::equality(self.index, format!("{ctx} split"), a, sx[k] + cx, sy[k] + cy)
                            .with_extra("entropy_x", sx[k])
                            .with_extra("coherence_x", cx)
                            .with_extra("entropy_y", sy[k])
                            .with_extra("coherence_y", cy),
                    );
                }
            }
        }
        Ok(rows)
    }

    fn subset_agreement(&self) -> Result<Vec<Row>> {
        let mut rng = aux_rng(self.spec.seed, self.index as u64, 1);
        let cands = self.permutation_factors_except(&[]);
        let all = self.space.factor_ids();
        let mut rows = Vec::new();
        for omega in subsets(&cands, self.enumerate(), self.spec.subset_cap, &mut rng) {
            let frames: Vec<&String> = omega
                .iter()
                .filter(|id| self.ideal.contains_key(id.as_str()))
                .collect();
            if frames.len() < 2 {
                continue;
            }
            let outside: Vec<&str> = all
                .iter()
                .copied()
                .filter(|id| !omega.iter().any(|o| o == id))
                .collect();
            let value = |fr: &str| -> Result<Vec<f64>> {
                let persp = self.persp(fr);
                let rest: Vec<&str> = omega.iter().map(String::as_str).filter(|id| *id != fr).collect();
                let rest = persp.reduced(&rest)?;
                let ent = renyi_many(&persp.reduced(&outside)?, self.params)?;
                let deph = renyi_many(&dephase(&rest), self.params)?;
                let full = renyi_many(&rest, self.params)?;
                Ok((0..self.params.len()).map(|k| ent[k] + deph[k] - full[k]).collect())
            };
            let first = value(frames[0])?;
            for fr in &frames[1..] {
                let other = value(fr)?;
                let ctx = format!("Omega={} {}~{}", join(&omega), frames[0], fr);
                for (k, p) in self.params.iter().enumerate() {
                    rows.push(Row::equality(self.index, ctx.clone(), Some(p.alpha), first[k], other[k]));
                }
            }
        }
        Ok(rows)
    }

    fn diagonal_moments(&self) -> Result<Vec<Row>> {
        let mut rng = aux_rng(self.spec.seed, self.index as u64, 2);
        let mut rows = Vec::new();
        for (i, j) in self.ordered_pairs() {
            for x in self.kept_sets(&i, &j, 0) {
                let perm = build_permutation(self.space, &i, &j, &refs(&x))?;
                let y = swapped_subset(self.space, &i, &j, &refs(&x));
                let rx = self.persp(&i).reduced(&refs(&x))?;
                let ry = self.persp(&j).reduced(&refs(&y))?;
                let n = rx.dim();
                let ax = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    n,
                    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0)),
                ));
                let ay = perm.conjugate(&ax);
                let ctx = format!("{i}->{j} X={} Y={}", join(&x), join(&y));
                let (px, py) = (rx.diagonal(), ry.diagonal());
                for order in 1..=MOMENT_ORDER {
                    let moment = |p: &[f64], a: &DMatrix<C64>| {
                        p.iter().enumerate().map(|(k, w)| w * a[(k, k)].re.powi(order as i32)).sum::<f64>()
                    };
                    rows.push(
                        Row::equality(self.index, ctx.clone(), None, moment(&px, &ax), moment(&py, &ay))
                            .with_extra("order", f64::from(order)),
                    );
                }
            }
        }
        Ok(rows)
    }

    fn entropy_decomposition(&self) -> Result<Vec<Row>> {
        let p = self.params_at_one()?;
        let ln = p.log_base.ln_factor();
        let ids = self.ideal_ids();
        let mut global = BTreeMap::new();
        let mut local = BTreeMap::new();
        let mut rows = Vec::new();
        for id in &ids {
            let persp = self.persp(id);
            let whole = frame_coherence(self.space, persp, &p)?;
            let others: Vec<&str> = ids.iter().map(String::as_str).filter(|o| o != id).collect();
            let singles = others
                .iter()
                .map(|o| coherence(&persp.reduced(&[o])?, &p))
                .sum::<Result<f64>>()?;
            let g = gamma(self.space, persp, &others)? / ln;
            rows.push(
                Row::equality(self.index, format!("{id} split"), Some(1.0), whole, singles + g)
                    .with_extra("gamma", g)
                    .with_extra("single_frame_coherence", singles),
            );
            global.insert(id.clone(), whole);
            local.insert(id.clone(), singles + g);
        }
        for (a, i) in ids.iter().enumerate() {
            for j in &ids[a + 1..] {
                let ds = entropy_difference(&self.phys, i, j, &p)?;
                let ctx = format!("{i},{j}");
                rows.push(Row::equality(
                    self.index,
                    format!("{ctx} coherence"),
                    Some(1.0),
                    ds,
                    (global[j] - global[i]).abs(),
                ));
                rows.push(Row::equality(
                    self.index,
                    format!("{ctx} local"),
                    Some(1.0),
                    ds,
                    (local[j] - local[i]).abs(),
                ));
            }
        }
        Ok(rows)
    }

    fn params_at_one(&self) -> Result<EntropyParams> {
        EntropyParams::with_base(1.0, self.spec.log_base)
    }

    fn max_disagreement(&self) -> Result<Vec<Row>> {
        let m = max_entropy_difference(&self.phys, &self.params_at_one()?)?;
        let ctx = format!(
            "entropy {}-{} coherence {}-{}",
            m.argmax, m.argmin, m.coherence_argmax, m.coherence_argmin
        );
        Ok(vec![Row::equality(self.index, ctx, Some(1.0), m.value, m.coherence_spread)])
    }

    fn nonideal_bound(&self) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        let mut ranks = None;
        for p in self.params {
            let b = entropy_gap_bound(&self.phys, p)?;
            rows.push(
                Row::upper_bound(self.index, "entropy gap".into(), Some(p.alpha), b.observed, b.bound)
                    .with_extra("dimension_bound", b.dimension_bound)
                    .with_extra("system_bound", b.system_bound),
            );
            ranks = Some(b);
        }
        if let Some(b) = ranks {
            rows.push(Row::upper_bound(
                self.index,
                "rank R2|R1".into(),
                None,
                b.rank_2_from_1 as f64,
                b.deff_2_given_1 as f64,
            ));
            rows.push(Row::upper_bound(
                self.index,
                "rank R1|R2".into(),
                None,
                b.rank_1_from_2 as f64,
                b.deff_1_given_2 as f64,
            ));
        }
        Ok(rows)
    }

    fn frame_change(&self) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for (i, j) in self.ordered_pairs() {
            let direct = reduce(&self.phys, &j)?;
            let moved = frame_change(self.space, self.persp(&i), &j)?;
            let f = direct.state.fidelity(&moved.state)?;
            rows.push(Row::equality(self.index, format!("{i}->{j} fidelity"), None, f, 1.0));
            if self.index == 0 && i < j {
                let forward = frame_change_operator(self.space, &i, &j)?;
                let back = frame_change_operator(self.space, &j, &i)?;
                let id = DMatrix::<C64>::identity(forward.nrows(), forward.ncols());
                let round = max_abs(&(&back * &forward - &id));
                let unitary = max_abs(&(forward.adjoint() * &forward - &id));
                rows.push(Row::equality(self.index, format!("{i}->{j}->{i} round trip"), None, round, 0.0));
                rows.push(Row::equality(self.index, format!("{i}->{j} unitarity"), None, unitary, 0.0));
            }
        }
        Ok(rows)
    }

    fn trivialization(&self) -> Result<Vec<Row>> {
        let mut rng = aux_rng(self.spec.seed, self.index as u64, 3);
        let mut rows = Vec::new();
        for i in self.ideal_ids() {
            let t = trivialize(&self.phys, &i)?.density();
            let rest: Vec<&str> = self.space.factor_ids().into_iter().filter(|id| *id != i).collect();
            let recovered = t.keep(&rest)?;
            let direct = self.persp(&i).density();
            let diff = max_abs(&(recovered.matrix() - direct.matrix()));
            rows.push(Row::equality(self.index, format!("{i} recovery"), None, diff, 0.0));
            let cands = self.permutation_factors_except(&[&i]);
            for x in subsets(&cands, self.enumerate(), self.spec.subset_cap, &mut rng) {
                if x.is_empty() {
                    continue;
                }
                let dt = renyi_many(&dephase(&t.keep(&refs(&x))?), self.params)?;
                let dr = renyi_many(&dephase(&self.persp(&i).reduced(&refs(&x))?), self.params)?;
                for (k, p) in self.params.iter().enumerate() {
                    rows.push(Row::equality(self.index, format!("{i} X={}", join(&x)), Some(p.alpha), dt[k], dr[k]));
                }
            }
        }
        Ok(rows)
    }

    fn evaluate(&self, check: Check) -> Result<Outcome> {
        let rows = match check {
            Check::DephasedPermutation => self.dephased_permutation(),
            Check::DiagonalInvariant => self.diagonal_invariant(),
            Check::SubsetAgreement => self.subset_agreement(),
            Check::DiagonalMoments => self.diagonal_moments(),
            Check::EntropyDecomposition => self.entropy_decomposition(),
            Check::MaxDisagreement => self.max_disagreement(),
            Check::NonidealBound => self.nonideal_bound(),
            Check::FrameChange => self.frame_change(),
            Check::Trivialization => self.trivialization(),
            Check::PovmResolution | Check::TradeoffViolation => {
                unreachable!("{check} is not evaluated per trial")
            }
        };
        match rows {
            Ok(rows) => Ok(Outcome::Rows(rows)),
            Err(Error::ZeroOverlap { .. }) => Ok(Outcome::Excluded),
            Err(e) => Err(e),
        }
    }
}

fn run_trial(
    spec: &ExperimentSpec,
    space: &Arc<CompositeSpace>,
    params: &[EntropyParams],
    checks: &[Check],
    index: usize,
) -> Result<Vec<Outcome>> {
    let phys = sample_physical(space, &mut trial_rng(spec.seed, index as u64))?;
    let ideal = space
        .ideal_frame_indices()
        .into_iter()
        .map(|i| {
            let id = frame_id(i);
            reduce(&phys, &id).map(|p| (id, p))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let trial = Trial {
        spec,
        space,
        params,
        index,
        phys,
        ideal,
    };
    checks.iter().map(|&c| trial.evaluate(c)).collect()
}

fn povm_rows(space: &CompositeSpace) -> Result<Vec<Row>> {
    (0..space.num_frames())
        .map(|i| {
            let id = frame_id(i);
            let r = check_povm_resolution(space.irreps(), space.frame(i), &id)?;
            // Frames with m_q > d_q must fail to resolve the identity.
            let residual = if r.multiplicities_ok {
                r.residual
            } else if r.residual <= 1e-9 {
                1.0
            } else {
                0.0
            };
            let mut row = Row::equality(0, id, None, r.residual, 0.0)
                .with_extra("multiplicities_ok", f64::from(u8::from(r.multiplicities_ok)))
                .with_extra("is_resolution", f64::from(u8::from(r.is_resolution)));
            row.residual = residual;
            Ok(row)
        })
        .collect()
}

fn finish(
    spec: &ExperimentSpec,
    check: Check,
    rows: Vec<Row>,
    trials_run: usize,
    trials_excluded: usize,
    summary: BTreeMap<String, f64>,
) -> CheckReport {
    let tolerance = spec.tolerance_for(check);
    let max_residual = rows.iter().fold(0.0f64, |m, r| m.max(r.residual));
    let violations = rows.iter().filter(|r| !(r.residual <= tolerance)).count();
    let informative = !rows.is_empty() || trials_excluded == 0;
    CheckReport {
        name: check,
        kind: check.kind(),
        tolerance,
        max_residual,
        trials_run,
        trials_excluded,
        violations,
        passed: violations == 0 && informative,
        summary,
        rows,
    }
}

fn bound_summary(space: &CompositeSpace, rows: &[Row]) -> Result<BTreeMap<String, f64>> {
    let (d12, d21) = pair_effective_dimensions(space)?;
    let mut s = BTreeMap::new();
    s.insert("deff_1_given_2".into(), d12 as f64);
    s.insert("deff_2_given_1".into(), d21 as f64);
    let gaps = rows.iter().filter(|r| r.alpha.is_some());
    s.insert("max_observed".into(), gaps.clone().fold(0.0, |m, r| m.max(r.lhs)));
    if let Some(r) = gaps.clone().next() {
        s.insert("bound".into(), r.rhs);
    }
    Ok(s)
}

/// Samples `spec.trials` physical states and evaluates every enabled check.
pub fn run_checks(spec: &ExperimentSpec) -> Result<InvariantReport> {
    spec.validate()?;
    let space = spec.build_space()?;
    let params = spec
        .alphas
        .iter()
        .map(|&a| EntropyParams::with_base(a, spec.log_base))
        .collect::<Result<Vec<_>>>()?;
    let per_trial: Vec<Check> = spec.checks.iter().copied().filter(|&c| is_per_trial(c)).collect();

    let outcomes: Vec<Vec<Outcome>> = if per_trial.is_empty() {
        Vec::new()
    } else {
        (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, &space, &params, &per_trial, t))
            .collect::<Result<_>>()?
    };
    let mut outcomes: Vec<std::vec::IntoIter<Outcome>> =
        outcomes.into_iter().map(Vec::into_iter).collect();

    let mut reports = Vec::with_capacity(spec.checks.len());
    let mut witness = None;
    for &check in &spec.checks {
        let report = match check {
            Check::PovmResolution => finish(spec, check, povm_rows(&space)?, 1, 0, BTreeMap::new()),
            Check::TradeoffViolation => {
                let threshold = 10.0 * spec.tolerance_for(check);
                let search = find_tradeoff_violation(&space, spec.seed, spec.witness_attempts, threshold)?;
                let mut summary = BTreeMap::new();
                summary.insert("threshold".into(), threshold);
                summary.insert("max_gap".into(), search.max_gap);
                let found = search.witness.is_some();
                witness = search.witness;
                let max_residual = search.max_gap;
                CheckReport {
                    name: check,
                    kind: CheckKind::Existence,
                    tolerance: spec.tolerance_for(check),
                    max_residual,
                    trials_run: search.attempts,
                    trials_excluded: search.excluded,
                    violations: 0,
                    passed: found,
                    summary,
                    rows: search.rows,
                }
            }
            _ => {
                let mut rows = Vec::new();
                let mut excluded = 0;
                for per in outcomes.iter_mut() {
                    match per.next().expect("one outcome per check") {
                        Outcome::Rows(r) => rows.extend(r),
                        Outcome::Excluded => excluded += 1,
                    }
                }
                let summary = if check == Check::NonidealBound {
                    bound_summary(&space, &rows)?
                } else {
                    BTreeMap::new()
                };
                finish(spec, check, rows, spec.trials, excluded, summary)
            }
        };
        reports.push(report);
    }

    let passed = reports.iter().all(|r| r.passed);
    Ok(InvariantReport {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance {
            spec_hash: spec_hash(spec),
            seed: spec.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        spec: spec.clone(),
        checks: reports,
        witness,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn enumeration_covers_the_power_set() {
        let c: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0);
        let all = subsets(&c, true, 1, &mut rng);
        assert_eq!(all.len(), 8);
        assert!(all.contains(&vec![]));
        assert!(all.contains(&c));
        let capped = subsets(&c, false, 5, &mut rng);
        assert_eq!(capped.len(), 5);
    }
}
