use std::f64::consts::{FRAC_PI_4, PI};

use zeno_chain::runner::output::csv_line;
use zeno_chain::runner::scenario::{convergence_scan, execute, run_scenario, sweep, ATOMIC_TOL};
use zeno_chain::runner::{ResultRow, ScenarioSpec, SweepVariable};

fn spec(text: &str) -> ScenarioSpec {
    ScenarioSpec::from_config_str(text).unwrap()
}

fn rows(spec: &ScenarioSpec) -> Vec<ResultRow> {
    execute(spec).unwrap().into_iter().map(|e| e.row).collect()
}

fn transfers(spec: &ScenarioSpec, variable: SweepVariable, grid: &[f64]) -> Vec<f64> {
    sweep(spec, variable, grid).unwrap().iter().map(|e| e.row.transfer).collect()
}

#[test]
fn standard_rows_freeze_with_n() {
    let r = rows(&spec("scenario = standard\nkappa1 = 1\nkappa2 = 1\nt = 1\nn_list = 10, 100, 1000\n"));
    assert_eq!(r.len(), 3);
    for w in r.windows(2) {
        assert!(w[1].transfer < w[0].transfer);
        assert!(w[1].success > w[0].success);
    }
}

#[test]
fn dephasing_limit_is_one_and_error_falls() {
    let s = spec("scenario = dephasing\nkappa = 1\ntheta_pi = 0.25\nt = 1\nphi_pi = 1\nn_list = 100, 1000, 10000\n");
    let scan = convergence_scan(&s).unwrap();
    assert!(scan.rows.iter().all(|e| e.row.p_limit == 1.0));
    assert!(scan.rows.windows(2).all(|w| w[1].row.abs_error < w[0].row.abs_error));
    let loss = scan.loss_slope.unwrap();
    assert!((-1.2..=-0.8).contains(&loss), "{loss}");
}

#[test]
fn single_n_scan_has_no_fit() {
    let scan = convergence_scan(&spec("scenario = standard\nkappa1 = 1\nkappa2 = 1\nt = 1\nn = 50\n")).unwrap();
    assert_eq!(scan.rows.len(), 1);
    assert!(scan.error_slope.is_none() && scan.loss_slope.is_none());
}

#[test]
fn scan_rejects_unsorted_n_list() {
    assert!(convergence_scan(&spec("scenario = standard\nkappa1 = 1\nkappa2 = 1\nt = 1\nn_list = 100, 10\n")).is_err());
}

#[test]
fn atomic_rows_have_no_violations() {
    let s = spec(
        "scenario = atomic_equivalence\nkappa1 = 0.6\nkappa2 = 1.3\ndelta = 4\nt = 2\nphi = 1.2\nn_list = 1, 50, 400\n",
    );
    for e in run_scenario(&s).unwrap() {
        assert!(e.violations.is_empty(), "{:?}", e.violations);
        assert!(e.row.abs_error < ATOMIC_TOL);
    }
}

#[test]
fn phi_sweep_follows_one_minus_cos() {
    let s = spec("scenario = dephasing\nkappa = 1\ntheta_pi = 0.25\nt = 1\nphi = 0\nn = 10000\n");
    let p = transfers(&s, SweepVariable::Phi, &[0.0, PI / 2.0, PI, 1.5 * PI, 2.0 * PI]);
    for (got, want) in p.iter().zip([0.0, 0.5, 1.0, 0.5, 0.0]) {
        assert!((got - want).abs() < 1e-3, "{p:?}");
    }
}

#[test]
fn delta_sweep_peaks_at_crossing() {
    let s = spec("scenario = detuning\nkappa = 1\ntheta_pi = 0.25\ndelta = 100\nt_pi = 100\nn = 100\n");
    let p = transfers(&s, SweepVariable::Delta, &[60.0, 80.0, 100.0, 120.0, 140.0]);
    let peak = p.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(peak, p[2], "{p:?}");
    assert!(peak > 0.999);
}

#[test]
fn theta_sweep_peaks_at_equal_couplings() {
    let s = spec("scenario = dephasing\nkappa = 1\ntheta = 0.3\nt = 1\nphi_pi = 1\nn = 2000\n");
    let grid = [0.2, 0.5, FRAC_PI_4, 1.0, 1.3];
    let p = transfers(&s, SweepVariable::Theta, &grid);
    let peak = p.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(peak, p[2], "{p:?}");
}

#[test]
fn sweep_from_config_keeps_input_order() {
    let s = spec("scenario = combined\nkappa1 = 1\nkappa2 = 2\ndelta = 50\nt = 20\nphi = 0\nn = 200\nsweep = phi\ngrid = 3, 1, 2\n");
    let phis: Vec<f64> = rows(&s).iter().map(|r| r.phi).collect();
    assert_eq!(phis, [3.0, 1.0, 2.0]);
}

#[test]
fn unknown_sweep_variable_is_rejected() {
    assert!("kappa".parse::<SweepVariable>().is_err());
    assert!(ScenarioSpec::from_config_str(
        "scenario = standard\nkappa1 = 1\nkappa2 = 1\nt = 1\nn = 5\nsweep = kappa\ngrid = 1\n"
    )
    .is_err());
}

#[test]
fn emitted_columns_are_consistent() {
    let configs = [
        "scenario = number_state\nkappa1 = 1\nkappa2 = 2\nt = 1.5\nphi = 2\nn_list = 10, 100\nphotons = 3\n",
        "scenario = coherent_state\nkappa1 = 1\nkappa2 = 1\nt = 1\nphi_pi = 1\nn = 100\nalpha = 1.2\n",
        "scenario = random_phase\nkappa1 = 1\nkappa2 = 1\nt = 1\nn = 50\ntrials = 200\nseed = 9\n",
        "scenario = combined\nkappa1 = 1\nkappa2 = 1\ndelta = 30\nt = 10\nphi = 1\nn = 100\n",
    ];
    for text in configs {
        for e in execute(&spec(text)).unwrap() {
            let r = e.row;
            assert!(e.violations.is_empty(), "{:?}", e.violations);
            assert_eq!(r.abs_error.to_bits(), (r.transfer - r.p_limit).abs().to_bits());
            assert!((0.0..=1.0 + 1e-9).contains(&r.success) && (0.0..=1.0 + 1e-9).contains(&r.transfer));
        }
    }
}

#[test]
fn monte_carlo_rows_are_reproducible() {
    let s = spec("scenario = random_phase\nkappa1 = 1\nkappa2 = 1\nt = 1\nn = 100\ntrials = 300\nseed = 77\n");
    let lines = |r: Vec<ResultRow>| r.iter().map(csv_line).collect::<Vec<_>>();
    assert_eq!(lines(rows(&s)), lines(rows(&s)));
    assert_eq!(rows(&s)[0].seed, Some(77));
}
