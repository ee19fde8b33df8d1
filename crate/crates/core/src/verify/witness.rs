//! Random search for states on which two frames disagree about the
//! dephased entropy of each other.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;

use crate::entropy::{perspective_of, renyi, EntropyParams};
use crate::error::{Error, Result};
use crate::relational::PhysicalState;
use crate::reps::{frame_id, CompositeSpace};
use crate::tensor::dephase;
use crate::verify::report::{Row, Witness};
use crate::verify::sampling::{sample_physical, trial_rng};
use crate::C64;

/// `|S(Δρ_{R_j}^{(i)}) - S(Δρ_{R_i}^{(j)})|`, both perspectives from
/// coherent-state conditioning at the identity.
pub fn pair_gap(phys: &PhysicalState, i: &str, j: &str) -> Result<f64> {
    let p = EntropyParams::von_neumann();
    let seen_from_i = dephase(&perspective_of(phys, i)?.reduced(&[j])?);
    let seen_from_j = dephase(&perspective_of(phys, j)?.reduced(&[i])?);
    Ok((renyi(&seen_from_i, &p)? - renyi(&seen_from_j, &p)?).abs())
}

/// Largest gap over frame pairs that involve a non-ideal frame, with the pair.
pub fn tradeoff_gap(phys: &PhysicalState) -> Result<(f64, [String; 2])> {
    let space = phys.space();
    let n = space.num_frames();
    let mut best: Option<(f64, [String; 2])> = None;
    for a in 0..n {
        for b in a + 1..n {
            if space.frame(a).is_ideal() && space.frame(b).is_ideal() {
                continue;
            }
            let (i, j) = (frame_id(a), frame_id(b));
            let gap = pair_gap(phys, &i, &j)?;
            if best.as_ref().is_none_or(|(g, _)| gap > *g) {
                best = Some((gap, [i, j]));
            }
        }
    }
    best.ok_or_else(|| Error::Unsupported("the tradeoff search needs a non-ideal frame".into()))
}

#[derive(Debug, Clone)]
pub struct WitnessSearch {
    pub witness: Option<Witness>,
    pub attempts: usize,
    pub excluded: usize,
    pub max_gap: f64,
    pub rows: Vec<Row>,
}

/// Samples up to `attempts` physical states and stops at the first gap above
/// `threshold`.
pub fn find_tradeoff_violation(
    space: &Arc<CompositeSpace>,
    seed: u64,
    attempts: usize,
    threshold: f64,
) -> Result<WitnessSearch> {
    let mut search = WitnessSearch {
        witness: None,
        attempts: 0,
        excluded: 0,
        max_gap: 0.0,
        rows: Vec::new(),
    };
    for attempt in 0..attempts {
        search.attempts += 1;
        let phys = sample_physical(space, &mut trial_rng(seed, attempt as u64))?;
        let (gap, frames) = match tradeoff_gap(&phys) {
            Ok(found) => found,
            Err(Error::ZeroOverlap { .. }) => {
                search.excluded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        search.max_gap = search.max_gap.max(gap);
        search.rows.push(Row {
            trial: attempt,
            context: frames.join(","),
            alpha: Some(1.0),
            lhs: gap,
            rhs: threshold,
            residual: gap,
            extras: BTreeMap::new(),
        });
        if gap > threshold {
            search.witness = Some(Witness {
                attempt,
                frames,
                gap,
                threshold,
                amplitudes: phys.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            });
            break;
        }
    }
    Ok(search)
}

/// Rebuilds the witness state and recomputes its gap.
pub fn reverify_witness(space: &Arc<CompositeSpace>, witness: &Witness) -> Result<f64> {
    let amps = DVector::from_iterator(
        witness.amplitudes.len(),
        witness.amplitudes.iter().map(|p| C64::new(p[0], p[1])),
    );
    let phys = PhysicalState::new(Arc::clone(space), amps)?;
    pair_gap(&phys, &witness.frames[0], &witness.frames[1])
}
