mod common;

use common::*;
use proptest::prelude::*;
use qha::tf::{
    gaussian_window, grid_convolve, grid_integrate, hermite, hermite_basis, spectrogram, stft, tf_shift, GridPoint,
    PhaseGrid, Signal,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn shift_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [5, 8, 13] {
        let f = random_signal(d, &mut rng);
        for m in 0..d {
            for n in 0..d {
                let z = GridPoint::new(m, n);
                let fast = tf_shift(&f, z).unwrap();
                assert!(max_abs(fast.values(), shift_direct(&f, z).values()) < 1e-13);
            }
        }
    }
}

#[test]
fn stft_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [2, 7, 16] {
        let f = random_signal(d, &mut rng);
        let g = random_signal(d, &mut rng);
        let fast = stft(&f, &g).unwrap();
        assert!(max_abs(fast.values(), &stft_direct(&f, &g)) < 1e-11);
    }
}

#[test]
fn moyal_at_d16() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let f = random_signal(16, &mut rng);
        let g = random_signal(16, &mut rng);
        let direct: f64 = stft_direct(&f, &g).iter().map(|v| v.norm_sqr()).sum::<f64>() / 16.0;
        let expected = f.norm_sqr() * g.norm_sqr();
        assert!((direct - expected).abs() <= 1e-10 * expected);
        let fast = grid_integrate(&spectrogram(&f, &g).unwrap());
        assert!((fast - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn spectrogram_of_chirp_is_stft_modulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let data = qha::datasets::gen_chirps(1, 280, &mut rng, qha::datasets::DEFAULT_CHIRP_RATE).unwrap();
    let f = &data.signals()[0];
    let g = gaussian_window(280).unwrap();
    let spec = spectrogram(f, &g).unwrap();
    let v = stft(f, &g).unwrap();
    let diff = spec.values().iter().zip(v.values()).map(|(a, b)| (a - b.norm_sqr()).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-14);
    assert!((grid_integrate(&spec) - 1.0).abs() < 1e-10);
}

#[test]
fn grid_convolution_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = random_grid_fn(9, &mut rng);
    let g = random_grid_fn(9, &mut rng);
    let fast = grid_convolve(&f, &g).unwrap();
    assert!(fast.max_abs_diff(&grid_convolve_direct(&f, &g)).unwrap() < 1e-12);
}

#[test]
fn hermite_family_is_orthonormal_at_paper_scale() {
    let basis = hermite_basis(128, 16).unwrap();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let ip = a.inner(b).unwrap();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((ip.re - expected).abs() < 1e-12 && ip.im.abs() < 1e-12);
        }
    }
    assert!(hermite(128, 0).unwrap().inner(&hermite(128, 1).unwrap()).unwrap().norm() < 1e-12);
}

#[test]
fn hermite_functions_have_alternating_parity() {
    // h_n(-x) = (-1)^n h_n(x) about the sample center d/2.
    let d = 64;
    for (n, h) in hermite_basis(d, 6).unwrap().iter().enumerate() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let v = h.values();
        for j in 1..d {
            assert!((v[d - j].re - sign * v[j].re).abs() < 1e-10, "order {n}, sample {j}");
        }
    }
}

fn complex_vec(d: usize) -> impl Strategy<Value = Signal> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| Signal::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

fn signal_and_point() -> impl Strategy<Value = (Signal, Signal, GridPoint, GridPoint)> {
    (2usize..20).prop_flat_map(|d| (complex_vec(d), complex_vec(d), 0..d, 0..d, 0..d, 0..d))
        .prop_map(|(f, g, a, b, p, q)| (f, g, GridPoint::new(a, b), GridPoint::new(p, q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_is_unitary((f, _g, z, _w) in signal_and_point()) {
        let s = tf_shift(&f, z).unwrap();
        prop_assert!((s.norm() - f.norm()).abs() <= 1e-12 * f.norm());
    }

    #[test]
    fn moyal_identity((f, g, _z, _w) in signal_and_point()) {
        let expected = f.norm_sqr() * g.norm_sqr();
        let got = grid_integrate(&spectrogram(&f, &g).unwrap());
        prop_assert!((got - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn stft_covariance((f, g, z, _w) in signal_and_point()) {
        let grid = PhaseGrid::new(f.dim()).unwrap();
        let moved = spectrogram(&tf_shift(&f, z).unwrap(), &g).unwrap();
        let base = spectrogram(&f, &g).unwrap();
        let shifted = base.translate(z);
        prop_assert!(moved.max_abs_diff(&shifted).unwrap() <= 1e-10 * (1.0 + base.max()));
        prop_assert_eq!(grid.dim(), f.dim());
    }

    #[test]
    fn shifts_compose_up_to_phase((f, g, z, w) in signal_and_point()) {
        let grid = PhaseGrid::new(f.dim()).unwrap();
        let twice = tf_shift(&tf_shift(&f, z).unwrap(), w).unwrap();
        let once = tf_shift(&f, grid.add(z, w)).unwrap();
        let ratio = once.inner(&twice).unwrap() / f.norm_sqr();
        prop_assert!((ratio.norm() - 1.0).abs() < 1e-10);
        let a = spectrogram(&twice, &g).unwrap();
        let b = spectrogram(&once, &g).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-10 * (1.0 + a.max()));
    }
}
