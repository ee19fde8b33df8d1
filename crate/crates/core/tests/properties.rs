use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qrf_core::entropy::{coherence, renyi, EntropyParams};
use qrf_core::group::{GroupKind, GroupTable};
use qrf_core::irreps::IrrepTable;
use qrf_core::relational::{
    frame_change, group_average, invariance_residual, reduce, PhysicalState,
};
use qrf_core::reps::{CompositeSpace, FrameSpec, RepSpec};
use qrf_core::tensor::{
    dephase, partial_trace, FactorLabel, LabeledDensity, LabeledState, SubsystemSelection,
};
use qrf_core::verify::sampling::gaussian_vector;
use qrf_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn random_state(dims: &[usize], seed: u64) -> LabeledState {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let factors = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| FactorLabel::numbered(format!("F{k}"), d).unwrap())
        .collect();
    let n = dims.iter().product();
    LabeledState::new(factors, gaussian_vector(&mut rng, n)).unwrap()
}

/// Mixed state with rank up to `rank`, built from random purifications.
fn random_density(dim: usize, rank: usize, seed: u64) -> LabeledDensity {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for _ in 0..rank {
        let v = gaussian_vector(&mut rng, dim);
        m += &v * v.adjoint();
    }
    m /= C64::new(rank as f64, 0.0);
    LabeledDensity::new(vec![FactorLabel::numbered("A", dim).unwrap()], m).unwrap()
}

fn random_unitary(dim: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cols: Vec<DVector<C64>> = (0..dim).map(|_| gaussian_vector(&mut rng, dim)).collect();
    DMatrix::from_columns(&cols).qr().q()
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.3), Just(0.5), Just(1.0), Just(2.0), Just(3.0), 0.1f64..5.0]
}

fn ideal_space(kind: GroupKind, frames: usize) -> Arc<CompositeSpace> {
    let g = GroupTable::from_kind(kind).unwrap();
    let irreps = Arc::new(IrrepTable::for_group(&g).unwrap());
    let f = (0..frames).map(|_| FrameSpec::ideal(&irreps)).collect();
    let s = RepSpec::regular(&irreps);
    Arc::new(CompositeSpace::new(irreps, f, s).unwrap())
}

fn physical(space: &Arc<CompositeSpace>, seed: u64) -> PhysicalState {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let v = group_average(space, &gaussian_vector(&mut rng, space.kin_dim()));
    let n = v.norm();
    PhysicalState::new(Arc::clone(space), v / C64::new(n, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_preserves_trace(d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..3, seed in any::<u64>(), mask in 0u8..8) {
        let rho = random_state(&[d1, d2, d3], seed).density();
        let kept: Vec<&str> = ["F0", "F1", "F2"].into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, id)| id).collect();
        let sel = SubsystemSelection::keep(rho.factors(), &kept).unwrap();
        let reduced = partial_trace(&rho, &sel).unwrap();
        prop_assert!((reduced.trace() - 1.0).abs() < 1e-12);
        reduced.validate(true).unwrap();
    }

    #[test]
    fn complementary_marginals_of_pure_states_share_spectra(d1 in 1usize..5, d2 in 1usize..5, seed in any::<u64>(), a in alpha()) {
        let rho = random_state(&[d1, d2], seed).density();
        let p = EntropyParams::new(a).unwrap();
        let sa = renyi(&rho.keep(&["F0"]).unwrap(), &p).unwrap();
        let sb = renyi(&rho.keep(&["F1"]).unwrap(), &p).unwrap();
        prop_assert!((sa - sb).abs() < 1e-9, "{sa} vs {sb}");
    }

    #[test]
    fn dephasing_is_idempotent(dim in 1usize..6, rank in 1usize..4, seed in any::<u64>()) {
        let rho = random_density(dim, rank, seed);
        let once = dephase(&rho);
        prop_assert_eq!(dephase(&once), once.clone());
        prop_assert!((once.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renyi_is_unitarily_invariant_and_bounded(dim in 1usize..6, rank in 1usize..4, seed in any::<u64>(), a in alpha()) {
        let rho = random_density(dim, rank, seed);
        let u = random_unitary(dim, seed ^ 0xABCD);
        let rotated = LabeledDensity::new(rho.factors().to_vec(), &u * rho.matrix() * u.adjoint()).unwrap();
        let p = EntropyParams::new(a).unwrap();
        let s = renyi(&rho, &p).unwrap();
        prop_assert!((s - renyi(&rotated, &p).unwrap()).abs() < 1e-9);
        prop_assert!(s >= 0.0 && s <= (dim as f64).ln() + 1e-12);
    }

    #[test]
    fn von_neumann_coherence_is_non_negative(dim in 1usize..6, rank in 1usize..4, seed in any::<u64>()) {
        let rho = random_density(dim, rank, seed);
        prop_assert!(coherence(&rho, &EntropyParams::von_neumann()).unwrap() >= -1e-12);
    }

    #[test]
    fn group_average_is_a_projector(seed in any::<u64>(), pick in 0usize..3) {
        let kind = [GroupKind::Cyclic(2), GroupKind::Cyclic(3), GroupKind::Symmetric(3)][pick];
        let space = ideal_space(kind, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let v = gaussian_vector(&mut rng, space.kin_dim());
        let once = group_average(&space, &v);
        let twice = group_average(&space, &once);
        prop_assert!((&once - &twice).norm() < 1e-12);
        prop_assert!(invariance_residual(&space, &once) < 1e-12);
    }

    #[test]
    fn frame_change_matches_direct_reduction(seed in any::<u64>(), pick in 0usize..3) {
        let kind = [GroupKind::Cyclic(2), GroupKind::Cyclic(4), GroupKind::Dihedral(3)][pick];
        let space = ideal_space(kind, 2);
        let phys = physical(&space, seed);
        let from_1 = reduce(&phys, "R1").unwrap();
        let direct = reduce(&phys, "R2").unwrap();
        let moved = frame_change(&space, &from_1, "R2").unwrap();
        prop_assert!(direct.state.fidelity(&moved.state).unwrap() > 1.0 - 1e-10);
    }
}
