use std::f64::consts::PI;

use gabor_core::linalg::random_hermitian;
use gabor_core::tfcore::wigner;
use gabor_core::weyl::{operator_norm, radial_derivative, spectral_edges, spectral_edges_lanczos, weyl_quantize};
use gabor_core::{
    make_window, Complex64, GridSpec, OperatorMatrix, PhaseSpaceFunction, PhaseSpaceGrid, WindowKind, WindowSpec,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn projector_error(l: usize) -> f64 {
    let grid = GridSpec::centered(l, 1.0 / 32.0).unwrap();
    let g = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid).unwrap();
    let ps = PhaseSpaceGrid::symbol_grid(&grid).unwrap();
    let t = weyl_quantize(&wigner(&g, &g, &ps).unwrap(), &grid).unwrap();
    let v = nalgebra::DVector::from_column_slice(g.samples());
    let oracle = OperatorMatrix::new(&v * v.adjoint() * c(grid.dt()), grid.dt()).unwrap();
    operator_norm(&t.sub(&oracle).unwrap())
}

#[test]
fn constant_symbol_is_identity() {
    let grid = GridSpec::centered(256, 1.0 / 16.0).unwrap();
    let ps = PhaseSpaceGrid::symbol_grid(&grid).unwrap();
    let t = weyl_quantize(&PhaseSpaceFunction::from_fn(ps, |_| c(1.0)), &grid).unwrap();
    let id = OperatorMatrix::identity(grid.len(), grid.dt());
    assert!(operator_norm(&t.sub(&id).unwrap()) <= 1e-6);
}

#[test]
fn wigner_symbol_is_the_gaussian_projector() {
    let grid = GridSpec::centered(512, 1.0 / 32.0).unwrap();
    let g = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid).unwrap();
    let ps = PhaseSpaceGrid::symbol_grid(&grid).unwrap();
    let t = weyl_quantize(&wigner(&g, &g, &ps).unwrap(), &grid).unwrap();
    let mut eig: Vec<f64> = t.entries().clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    assert!((eig[0] - 1.0).abs() <= 1e-3);
    assert!(eig[1].abs() <= 1e-3);
    assert!(projector_error(512) <= 1e-3);
}

#[test]
fn quantization_error_does_not_grow_under_refinement() {
    // The discrete Wigner transform and the quantization are exact inverses,
    // so both errors sit at roundoff; refinement must at least halve the
    // error or keep it at that floor.
    let coarse = projector_error(512);
    let fine = projector_error(1024);
    assert!(fine <= (coarse / 2.0).max(1e-10), "{coarse:e} -> {fine:e}");
}

#[test]
fn position_symbol_is_multiplication_by_t() {
    let grid = GridSpec::centered(512, 1.0 / 32.0).unwrap();
    let ps = PhaseSpaceGrid::symbol_grid(&grid).unwrap();
    let cutoff = |x: f64| {
        let a = x.abs();
        if a <= 5.0 {
            1.0
        } else if a >= 7.0 {
            0.0
        } else {
            (0.25 * PI * (a - 5.0)).cos().powi(2)
        }
    };
    let sigma = PhaseSpaceFunction::from_fn(ps, |z| c(z.x * cutoff(z.x)));
    let t = weyl_quantize(&sigma, &grid).unwrap();
    let times: Vec<f64> = grid.times().collect();
    let mut worst: f64 = 0.0;
    for (a, ta) in times.iter().enumerate() {
        if ta.abs() > 4.0 {
            continue;
        }
        for (b, _) in times.iter().enumerate() {
            let expected = if a == b { *ta } else { 0.0 };
            worst = worst.max((t.entries()[(a, b)] - c(expected)).norm());
        }
    }
    assert!(worst <= 1e-4, "{worst}");
}

#[test]
fn real_symbols_quantize_to_hermitian_matrices() {
    let grid = GridSpec::centered(256, 1.0 / 16.0).unwrap();
    let ps = PhaseSpaceGrid::symbol_grid(&grid).unwrap();
    let sigma = PhaseSpaceFunction::from_fn(ps, |z| c((-(z.x - 1.0).powi(2) - 0.5 * z.omega * z.omega).exp() * (1.0 + z.x * z.omega)));
    let t = weyl_quantize(&sigma, &grid).unwrap();
    assert!(t.hermitian_defect() <= 1e-8 * t.max_entry());
    assert!(t.is_hermitian());
}

#[test]
fn misaligned_symbol_grid_is_rejected() {
    let grid = GridSpec::centered(256, 1.0 / 16.0).unwrap();
    let sigma = PhaseSpaceFunction::zeros(PhaseSpaceGrid::default());
    assert!(weyl_quantize(&sigma, &grid).is_err());
}

#[test]
fn edges_of_simple_operators() {
    let d = OperatorMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(2.0), c(3.0)])), 1.0).unwrap();
    let e = spectral_edges(&d).unwrap();
    assert_eq!((e.sigma_minus, e.sigma_plus), (1.0, 3.0));

    let grid = GridSpec::centered(256, 1.0 / 16.0).unwrap();
    let g = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid).unwrap();
    let v = nalgebra::DVector::from_column_slice(g.samples());
    let p = OperatorMatrix::new(&v * v.adjoint() * c(grid.dt()), grid.dt()).unwrap();
    let e = spectral_edges(&p).unwrap();
    assert!(e.sigma_minus.abs() <= 1e-6 && (e.sigma_plus - 1.0).abs() <= 1e-6);
}

#[test]
fn lanczos_agrees_with_dense_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [50usize, 300] {
        let a = OperatorMatrix::new(random_hermitian(n, &mut rng), 1.0).unwrap();
        let dense = spectral_edges(&a).unwrap();
        let lanczos = spectral_edges_lanczos(&a).unwrap();
        let scale = dense.sigma_plus.abs().max(dense.sigma_minus.abs());
        assert!((dense.sigma_minus - lanczos.sigma_minus).abs() <= 1e-8 * scale);
        assert!((dense.sigma_plus - lanczos.sigma_plus).abs() <= 1e-8 * scale);
    }
}

#[test]
fn non_hermitian_input_is_rejected() {
    let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(1.0)]);
    assert!(spectral_edges(&OperatorMatrix::new(m, 1.0).unwrap()).is_err());
}

#[test]
fn operator_norm_of_trivial_operators() {
    assert!((operator_norm(&OperatorMatrix::identity(40, 0.1)) - 1.0).abs() < 1e-12);
    let zero = OperatorMatrix::new(DMatrix::zeros(40, 40), 0.1).unwrap();
    assert_eq!(operator_norm(&zero), 0.0);
}

#[test]
fn operator_norm_matches_singular_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_hermitian(60, &mut rng);
    let b = random_hermitian(60, &mut rng);
    let m = &a * &b;
    let oracle = m.clone().singular_values().max();
    let got = operator_norm(&OperatorMatrix::new(m, 1.0).unwrap());
    assert!((got - oracle).abs() <= 1e-8 * oracle);
}

#[test]
fn radial_derivative_of_constant_vanishes() {
    let ps = PhaseSpaceGrid::square(64, 4.0).unwrap();
    let d = radial_derivative(&PhaseSpaceFunction::from_fn(ps, |_| c(3.0)));
    assert!(d.max_abs() <= 1e-12);
}

#[test]
fn radial_derivative_of_gaussian() {
    let ps = PhaseSpaceGrid::default();
    let f = PhaseSpaceFunction::from_fn(ps, |z| c((-PI * (z.x * z.x + z.omega * z.omega)).exp()));
    let d = radial_derivative(&f);
    let mut worst: f64 = 0.0;
    for m in 0..ps.nx() {
        for k in 0..ps.nw() {
            let z = ps.point(m, k);
            let r2 = z.x * z.x + z.omega * z.omega;
            worst = worst.max((d.get(m, k) - c(-2.0 * PI * r2 * (-PI * r2).exp())).norm());
        }
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn radial_derivative_of_wigner_matches_finite_differences() {
    let grid = GridSpec::default();
    let g = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid).unwrap();
    let ps = PhaseSpaceGrid::default();
    let d = radial_derivative(&wigner(&g, &g, &ps).unwrap());
    // central difference of t ↦ W(φ)(t·z) at t = 1 with half step
    let w = |x: f64, o: f64| 2.0 * (-2.0 * PI * (x * x + o * o)).exp();
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for m in (0..ps.nx()).step_by(3) {
        for k in (0..ps.nw()).step_by(3) {
            let z = ps.point(m, k);
            let fd = (w((1.0 + h / 2.0) * z.x, (1.0 + h / 2.0) * z.omega) - w((1.0 - h / 2.0) * z.x, (1.0 - h / 2.0) * z.omega)) / h;
            worst = worst.max((d.get(m, k).re - fd).abs());
        }
    }
    assert!(worst <= 1e-5, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extreme_eigenvalues_are_one_lipschitz(seed in any::<u64>(), scale in 1e-3f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a1 = random_hermitian(64, &mut rng);
        let a2 = &a1 + random_hermitian(64, &mut rng) * c(scale);
        let e1 = spectral_edges(&OperatorMatrix::new(a1.clone(), 1.0).unwrap()).unwrap();
        let e2 = spectral_edges(&OperatorMatrix::new(a2.clone(), 1.0).unwrap()).unwrap();
        let diff = operator_norm(&OperatorMatrix::new(a1 - a2, 1.0).unwrap());
        let slack = 1e-10 * (1.0 + diff);
        prop_assert!((e1.sigma_plus - e2.sigma_plus).abs() <= diff + slack);
        prop_assert!((e1.sigma_minus - e2.sigma_minus).abs() <= diff + slack);
    }
}
