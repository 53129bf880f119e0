use gabor_core::deform::{
    bound_check, bound_check_with_exponent, delta_of_alpha, gamma, holder_fit, saturation_alphas,
    saturation_experiment, sweep, Side, SweepConfig, SweepMethod, SweepResult, SweepRow,
};
use gabor_core::gabor::BoundsMethod;
use gabor_core::zak::zak_lattice_bounds;
use gabor_core::{make_window, AtomSet, Error, GridSpec, PhaseSpaceGrid, Window, WindowKind, WindowSpec};

fn synthetic(profile: impl Fn(f64) -> f64) -> SweepResult {
    let alphas = [0.8, 0.85, 0.9, 0.95, 0.98, 0.99, 1.0, 1.01, 1.02, 1.05, 1.1, 1.2];
    let rows = alphas
        .iter()
        .map(|&a| SweepRow {
            alpha: a,
            alpha_used: a,
            lower: profile(a),
            upper: 2.0,
            method: BoundsMethod::Dense,
            samples: 0,
        })
        .collect();
    SweepResult { rows, rel: 1.0, s_class: 2.0 }
}

fn near_one_alphas() -> Vec<f64> {
    let mut alphas = vec![1.0];
    for e in [0.005, 0.01, 0.02, 0.04, 0.08, 0.16] {
        alphas.push(1.0 - e);
        alphas.push(1.0 + e);
    }
    alphas.sort_by(f64::total_cmp);
    alphas
}

fn gaussian_config(alphas: Vec<f64>) -> SweepConfig {
    SweepConfig {
        window: WindowSpec::Gaussian,
        atoms: AtomSet::periodic_lattice(1.0, 16).unwrap(),
        alphas,
        method: SweepMethod::Dense,
        s_class: 2.0,
        zak_resolution: 32,
    }
}

#[test]
fn gamma_law_values() {
    assert!((gamma(0.5).unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(gamma(1.0).unwrap(), 0.5);
    assert_eq!(gamma(2.0).unwrap(), 1.0);
    assert_eq!(gamma(3.0).unwrap(), 1.0);
    assert!(gamma(0.0).is_err());
    assert!(gamma(-1.0).is_err());
}

#[test]
fn holder_fit_recovers_exact_power_laws() {
    for e in [1.0, 0.5] {
        let result = synthetic(|a| (1.0 - a).abs().powf(e));
        let fit = holder_fit(&result, Side::A).unwrap();
        assert!((fit.exponent - e).abs() <= 1e-6, "{fit:?}");
        assert!((fit.constant - 1.0).abs() <= 1e-6);
        assert!(fit.r2 > 0.999_999);
    }
}

#[test]
fn holder_fit_needs_enough_rows() {
    let flat = synthetic(|_| 1.0);
    assert!(matches!(holder_fit(&flat, Side::A), Err(Error::DegenerateFit(_))));
}

#[test]
fn vanishing_increments_pass_the_bound_check() {
    let flat = synthetic(|_| 1.0);
    let report = bound_check_with_exponent(&flat, 1.0, 1.0, 1.0).unwrap();
    assert!(report.pass);
}

#[test]
fn missing_reference_row_is_an_error() {
    let mut result = synthetic(|a| (1.0 - a).abs());
    result.rows.retain(|r| r.alpha != 1.0);
    assert!(bound_check_with_exponent(&result, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn sweep_config_validation() {
    let mut cfg = gaussian_config(vec![0.9, 1.0]);
    assert!(cfg.validate().is_ok());
    cfg.alphas = vec![0.9, 0.95];
    assert!(cfg.validate().is_err());
    cfg.alphas = vec![0.7, 1.0];
    assert!(cfg.validate().is_err());
    cfg.alphas = vec![1.0, 0.9];
    assert!(cfg.validate().is_err());
    cfg.alphas = vec![];
    assert!(cfg.validate().is_err());
    let mut zak = gaussian_config(vec![0.9, 1.0]);
    zak.method = SweepMethod::ZakSnap;
    zak.atoms = AtomSet::jittered_grid(1.0, 4, 0.3, 1);
    assert!(zak.validate().is_err());
}

#[test]
fn gaussian_integer_lattice_sweep() {
    let alphas: Vec<f64> = (0..7).map(|i| 0.85 + 0.02 * i as f64).chain([1.0]).collect();
    let result = sweep(&gaussian_config(alphas)).unwrap();
    let left: Vec<&SweepRow> = result.rows.iter().filter(|r| r.alpha < 1.0).collect();
    assert!(left.iter().all(|r| r.lower > 0.0 && r.lower <= r.upper));
    assert!(left.windows(2).all(|w| w[1].lower < w[0].lower));
    let one = result.reference().unwrap();
    assert!(one.lower <= 1e-3 * one.upper);
    let fit = holder_fit(&result, Side::A).unwrap();
    assert!((fit.exponent - 1.0).abs() <= 0.15, "{fit:?}");
}

#[test]
fn dense_sweep_agrees_with_the_lattice_oracle() {
    // box of side 20: α²·400 is an integer at 4/5 and 9/10, so no snapping
    let cfg = SweepConfig { atoms: AtomSet::periodic_lattice(1.0, 20).unwrap(), ..gaussian_config(vec![0.8, 0.9, 1.0]) };
    let result = sweep(&cfg).unwrap();
    let window = Window::gaussian();
    for (row, (num, den)) in result.rows.iter().zip([(4, 5), (9, 10)]) {
        assert_eq!(row.alpha_used, row.alpha);
        let oracle = zak_lattice_bounds(&window, num, den, 16).unwrap();
        assert!((row.lower / oracle.lower - 1.0).abs() <= 0.01, "{row:?} {oracle:?}");
        assert!((row.upper / oracle.upper - 1.0).abs() <= 0.01);
    }
    // the same sweep through the snapped lattice oracle
    let zak = sweep(&SweepConfig { method: SweepMethod::ZakSnap, zak_resolution: 16, ..cfg }).unwrap();
    for (d, z) in result.rows.iter().zip(&zak.rows) {
        assert_eq!(z.method, BoundsMethod::Zak);
        if z.alpha < 1.0 {
            assert!((d.lower / z.lower - 1.0).abs() <= 0.01);
        }
    }
}

#[test]
fn gaussian_bound_check_and_negative_control() {
    let cfg = gaussian_config(near_one_alphas());
    let result = sweep(&cfg).unwrap();
    let grid = GridSpec::default();
    let g = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid).unwrap();
    let ps = PhaseSpaceGrid::default();
    let report = bound_check(&result, 2.0, &g, &cfg.atoms, &ps).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.sides.iter().all(|s| s.spread <= 5.0));
    let wrong = bound_check_with_exponent(&result, 2.0 * gamma(2.0).unwrap(), report.rel, report.window_norm_sq).unwrap();
    assert!(!wrong.pass, "{wrong:?}");
}

#[test]
fn saturation_at_two_resolutions() {
    let report = saturation_experiment(&[16, 32], &saturation_alphas()).unwrap();
    assert!(report.pass, "{report:?}");
    let finest = report.levels.last().unwrap();
    assert!(finest.left_slope < 0.0);
    assert!(finest.max_ratio_right <= 1e-3);
    assert!(report.exponent_stability <= 0.05);
}

#[test]
fn delta_and_alpha_are_comparable_on_the_sweep_range() {
    let mut alphas = saturation_alphas();
    alphas.extend(near_one_alphas());
    for s in [0.5, 1.0, 2.0] {
        let worst = alphas
            .iter()
            .filter(|a| **a != 1.0)
            .map(|&a| delta_of_alpha(a).abs().powf(s / 2.0) / (1.0 - a).abs().powf(s / 2.0))
            .fold(0.0, f64::max);
        assert!(worst <= 3.0, "s={s}: {worst}");
    }
    assert_eq!(delta_of_alpha(1.0), 0.0);
    assert!((delta_of_alpha(0.5) - 3.0).abs() < 1e-15);
}
