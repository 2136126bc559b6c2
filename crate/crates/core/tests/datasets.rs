mod common;

use common::*;
use proptest::prelude::*;
use qha::datasets::*;
use qha::metrics::von_neumann_entropy;
use qha::operators::{data_operator, spectral_decompose, HermitianOperator};
use qha::tf::{gaussian_window, hermite_basis, tf_shift, PhaseGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_set_normalizes_to_unit_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let raw = DataSet::new((0..10).map(|_| random_signal(12, &mut rng)).collect(), "r").unwrap();
    let n = normalize_dataset(&raw).unwrap();
    let sum: f64 = n.signals().iter().map(|s| s.norm_sqr()).sum();
    assert!((sum - 1.0).abs() < 1e-12);
    let ratio = n.signals()[3].norm() / raw.signals()[3].norm();
    assert!((n.signals()[7].norm() / raw.signals()[7].norm() - ratio).abs() < 1e-14);
}

#[test]
fn generators_are_deterministic() {
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (
            gen_chirps(5, 280, &mut rng, DEFAULT_CHIRP_RATE).unwrap(),
            gen_random_tf_weighted(5, 64, default_tf_weight, &mut rng).unwrap(),
            gen_gaussian_combos(5, 64, (2.1875, 0.3125), 3, &mut rng).unwrap(),
            gen_local_components(5, 64, 0.1, 0.6, &mut rng).unwrap().data,
        )
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7).0, run(8).0);
}

#[test]
fn hermite_pair_states() {
    let h = hermite_basis(64, 2).unwrap();
    let s0 = gen_hermite_pair_state(0.0, &h[0], &h[1]).unwrap();
    assert!(von_neumann_entropy(&s0).unwrap().abs() < 1e-10);
    let half = gen_hermite_pair_state(0.5, &h[0], &h[1]).unwrap();
    assert!((von_neumann_entropy(&half).unwrap() - 2f64.ln()).abs() < 1e-9);
    let spec = spectral_decompose(&gen_hermite_pair_state(0.3, &h[0], &h[1]).unwrap()).unwrap();
    assert!((spec.eigenvalues[0] - 0.7).abs() < 1e-12 && (spec.eigenvalues[1] - 0.3).abs() < 1e-12);
}

#[test]
fn noiseless_components_are_shifted_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let lc = gen_local_components(30, 128, 0.0, 0.6, &mut rng).unwrap();
    let g = gaussian_window(128).unwrap();
    let scale = c((30f64).sqrt().recip(), 0.0);
    for (f, &z) in lc.data.signals().iter().zip(&lc.positions) {
        let expected = tf_shift(&g, z).unwrap().scaled(scale);
        assert!(max_abs(f.values(), expected.values()) < 1e-14);
    }
}

#[test]
fn noise_is_orthogonal_to_its_atom() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let g = gaussian_window(64).unwrap();
    let grid = PhaseGrid::new(64).unwrap();
    let positions: Vec<_> = (0..20).map(|k| qha::tf::GridPoint::new(k % 5, (3 * k) % 7)).collect();
    let data = gen_local_components_at(&positions, &g, 0.3, &mut rng).unwrap();
    // Undo the dataset normalization: every raw signal had unit norm.
    let s = c((positions.len() as f64).sqrt(), 0.0);
    for (f, &z) in data.signals().iter().zip(&positions) {
        let f = f.scaled(s);
        let atom = tf_shift(&g, z).unwrap();
        let coeff = f.inner(&atom).unwrap();
        let noise = f.add(&atom.scaled(-coeff)).unwrap();
        assert!(noise.inner(&atom).unwrap().norm() < 1e-12);
        assert!((coeff.norm_sqr() + noise.norm_sqr() - 1.0).abs() < 1e-10);
        assert!((coeff.norm_sqr() - 0.7).abs() < 1e-10);
    }
    assert_eq!(grid.dim(), 64);
}

#[test]
fn single_atom_weight_gives_window_multiples() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let only_origin = |t: f64, xi: f64| if t == 0.0 && xi == 0.0 { 1.0 } else { 0.0 };
    let data = gen_random_tf_weighted(4, 64, only_origin, &mut rng).unwrap();
    let g = gaussian_window(64).unwrap();
    for f in data.signals() {
        let overlap = f.inner(&g).unwrap().norm();
        assert!((overlap - f.norm()).abs() < 1e-12);
    }
}

#[test]
fn weighted_set_concentrates_where_the_weight_is_large() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let d = 128;
    let data = gen_random_tf_weighted(200, d, default_tf_weight, &mut rng).unwrap();
    let tc = qha::operators::total_correlation(&data_operator(&data).unwrap(), 1e-10).unwrap();
    let grid = PhaseGrid::new(d).unwrap();
    assert!((qha::tf::grid_integrate(&tc) - 1.0).abs() < 1e-8);
    // The total correlation peaks at the origin and is even.
    assert_eq!(tc.argmax(), qha::tf::GridPoint::ORIGIN);
    assert!(tc.max_abs_diff(&tc.reflect()).unwrap() < 1e-12);
    assert!(grid.points().all(|z| tc.get(z) >= -1e-12));
}

#[test]
fn single_point_rectangle_and_single_atom() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let g = gaussian_window(32).unwrap();
    let data = gen_gaussian_combos(5, 32, (0.0, 0.0), 3, &mut rng).unwrap();
    for f in data.signals() {
        assert!((f.inner(&g).unwrap().norm() - f.norm()).abs() < 1e-12);
    }
    let single = gen_gaussian_combos(5, 32, (2.1875, 0.3125), 1, &mut rng).unwrap();
    let grid = PhaseGrid::new(32).unwrap();
    for f in single.signals() {
        let u = f.normalized().unwrap();
        let hit = grid.points().any(|z| (tf_shift(&g, z).unwrap().inner(&u).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(hit);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    assert!(gen_chirps(0, 280, &mut rng, DEFAULT_CHIRP_RATE).is_err());
    assert!(gen_chirps(2, 280, &mut rng, (5.0, 1.0)).is_err());
    assert!(gen_local_components(3, 64, 1.0, 0.5, &mut rng).is_err());
    assert!(gen_gaussian_combos(3, 64, (-1.0, 1.0), 2, &mut rng).is_err());
    assert!(gen_gaussian_combos(3, 64, (1.0, 1.0), 0, &mut rng).is_err());
    let g = gaussian_window(8).unwrap();
    let _ = HermitianOperator::rank_one(&g);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_sets_are_normalized(seed in any::<u64>(), n in 1usize..8, noise in 0.0f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = [
            gen_chirps(n, 64, &mut rng, DEFAULT_CHIRP_RATE).unwrap(),
            gen_random_tf_weighted(n, 32, default_tf_weight, &mut rng).unwrap(),
            gen_gaussian_combos(n, 32, (2.1875, 0.3125), 3, &mut rng).unwrap(),
            gen_local_components(n, 32, noise, 0.6, &mut rng).unwrap().data,
        ];
        for set in &sets {
            prop_assert!((set.energy() - 1.0).abs() < 1e-12);
            prop_assert!(set.signals().iter().all(|s| s.dim() == set.dim()));
        }
    }
}
