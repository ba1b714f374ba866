//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p zeno-chain --test acceptance`; exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zeno_chain::analytic::{
    chi_partials, chi_total, coherent_state_stats, number_state_stats, probabilities, random_phase_average,
    step_factor, zeta_pair, PhaseSchedule,
};
use zeno_chain::fock::{max_abs, FockBasis};
use zeno_chain::model::{annihilation_operator, chain_hamiltonian, ChainParams, A1_MODE, A2_MODE, B_MODE};
use zeno_chain::runner::scenario::loglog_slope;
use zeno_chain::simulate::{
    kraus_set, monte_carlo_random_phases, run_atomic, run_postselected, sector_kraus_set, unitary_step,
    EvolutionConfig, InitialState, Trajectory,
};
use zeno_chain::{CMatrix, C64};

fn report(id: u32, title: &str, passed: bool, detail: String) {
    println!("criterion {id:>2} {} {title}: {detail}", if passed { "PASS" } else { "FAIL" });
    if !passed {
        panic!("criterion {id} failed");
    }
}

fn one_photon(params: ChainParams, t: f64, n: usize, phases: PhaseSchedule) -> Trajectory {
    run_postselected(&EvolutionConfig::new(params, t, n, phases, InitialState::OnePhoton)).unwrap()
}

/// Couplings with `hypot = kappa` and angle `theta`.
fn chain(kappa: f64, theta: f64, delta: f64) -> ChainParams {
    ChainParams::from_angle(kappa, theta, delta)
}

fn dephasing_limit(theta: f64, phi: f64) -> f64 {
    2.0 * (theta.cos() * theta.sin()).powi(2) * (1.0 - phi.cos())
}

fn c01_standard_zeno_freeze() {
    let params = chain(1.0, FRAC_PI_4, 0.0);
    let t = FRAC_PI_2;
    let runs: Vec<(usize, f64, f64)> = [100usize, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let last = *one_photon(params, t, n, PhaseSchedule::zero(n)).last();
            (n, last.success, last.transfer)
        })
        .collect();
    let (_, big_p, small_p) = runs[2];
    let slope = loglog_slope(&runs.iter().map(|r| (r.0, 1.0 - r.1)).collect::<Vec<_>>()).unwrap();
    report(
        1,
        "standard Zeno freeze",
        big_p > 0.999 && small_p < 1e-3 && (-1.2..=-0.8).contains(&slope),
        format!("P={big_p:.6} (>0.999), p={small_p:.3e} (<1e-3), slope={slope:.4} in [-1.2,-0.8]"),
    );
}

fn c02_complete_transfer_via_dephasing() {
    let n = 10_000;
    let last = *one_photon(chain(1.0, FRAC_PI_4, 0.0), 1.0, n, PhaseSchedule::evenly(PI, n)).last();
    let (dp, dpp) = ((last.transfer - 1.0).abs(), (last.success - 1.0).abs());
    report(
        2,
        "complete transfer via dephasing (kappa t = 1)",
        dp < 1e-3 && dpp < 1e-9,
        format!("|p-1|={dp:.3e} (<1e-3), |P-1|={dpp:.3e} (<1e-9)"),
    );
}

fn c03_dephasing_limit_formula() {
    let n = 10_000;
    let mut worst = 0.0f64;
    for phi in [FRAC_PI_3, FRAC_PI_2, PI, 1.5 * PI] {
        for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let p = one_photon(chain(1.0, theta, 0.0), 1.0, n, PhaseSchedule::evenly(phi, n)).last().transfer;
            worst = worst.max((p - dephasing_limit(theta, phi)).abs());
        }
    }
    report(3, "dephasing limit formula", worst < 1e-3, format!("max |p-limit|={worst:.3e} (<1e-3) over 12 points"));
}

fn strong_detuning(ratio: f64, n: usize) -> (f64, f64) {
    let kappa = 1.0;
    let delta = ratio * kappa;
    let t = PI * delta / (kappa * kappa);
    let last = *one_photon(chain(kappa, FRAC_PI_4, delta), t, n, PhaseSchedule::zero(n)).last();
    (last.transfer, last.success)
}

fn c04_strong_detuning_transfer() {
    let n = 10_000;
    let (p100, s100) = strong_detuning(100.0, n);
    let (p300, s300) = strong_detuning(300.0, n);
    let err = |p: f64, s: f64| (p - 1.0).abs().max((s - 1.0).abs());
    let (e100, e300) = (err(p100, s100), err(p300, s300));
    report(
        4,
        "strong-detuning transfer",
        (p100 - 1.0).abs() < 5e-3 && (s100 - 1.0).abs() < 5e-3 && e300 < e100,
        format!(
            "Delta=100k: |p-1|={:.3e}, |P-1|={:.3e} (<5e-3); Delta=300k: |p-1|={:.3e}, |P-1|={:.3e} (shrinks: {})",
            (p100 - 1.0).abs(),
            (s100 - 1.0).abs(),
            (p300 - 1.0).abs(),
            (s300 - 1.0).abs(),
            e300 < e100
        ),
    );
}

fn c05_combined_formula() {
    let (kappa, delta, n, theta) = (1.0, 100.0, 10_000, FRAC_PI_4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let shift = rng.gen_range(0.0..2.0 * PI);
        let t = shift * delta / (kappa * kappa);
        let p = one_photon(chain(kappa, theta, delta), t, n, PhaseSchedule::evenly(phi, n)).last().transfer;
        worst = worst.max((p - dephasing_limit(theta, shift - phi)).abs());
    }
    report(5, "combined formula", worst < 1e-2, format!("max |p-limit|={worst:.3e} (<1e-2) over 20 draws"));
}

fn c06_random_phase_average() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (k1, k2, seed) in [(1.0, 1.0, 61u64), (3.0, 4.0, 62)] {
        let params = ChainParams::new(k1, k2, 0.0);
        let t = 1.0 / params.derived().unwrap().kappa;
        let cfg = EvolutionConfig::new(params, t, 200, PhaseSchedule::random(seed), InitialState::OnePhoton);
        let mc = monte_carlo_random_phases(&cfg, 4000).unwrap();
        let target = random_phase_average(k1, k2).unwrap();
        let z = (mc.mean_p - target).abs() / mc.std_error;
        ok &= z < 3.0;
        lines.push(format!("k=({k1},{k2}): mean p={:.4}, target {target:.4}, {z:.2} SE (<3)", mc.mean_p));
    }
    report(6, "random-phase average", ok, lines.join("; "));
}

fn c07_analytic_numeric_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let params = ChainParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-20.0..20.0));
        let d = params.derived().unwrap();
        let n = rng.gen_range(1..=200);
        let t = rng.gen_range(0.0..10.0);
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        let mut cfg =
            EvolutionConfig::new(params, t, n, PhaseSchedule::Deterministic(phases.clone()), InitialState::OnePhoton);
        cfg.keep_states = true;
        let states = run_postselected(&cfg).unwrap().states.unwrap();
        let chis = chi_partials(d.kappa, params.delta, t / n as f64, &phases).unwrap();
        for (s, chi) in states.iter().zip(chis) {
            let z = zeta_pair(chi, d.theta);
            worst = worst.max((s.amplitude(&[1, 0]) - z.zeta1).norm());
            worst = worst.max((s.amplitude(&[0, 1]) - z.zeta2).norm());
        }
    }
    report(7, "exact analytic-numeric equivalence", worst < 1e-9, format!("max amplitude gap {worst:.3e} (<1e-9)"));
}

fn c08_kraus_completeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let full = FockBasis::bounded(3, 2).unwrap();
    let reduced = Arc::new(FockBasis::bounded(2, 2).unwrap());
    for _ in 0..30 {
        let params = ChainParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-10.0..10.0));
        let dt = rng.gen_range(0.0..3.0);
        let direct = kraus_set(&chain_hamiltonian(&params, &full).unwrap(), &full, dt, 2).unwrap();
        let sectors = sector_kraus_set(&params, dt, &reduced, 2).unwrap();
        for ks in [direct, sectors] {
            let id = CMatrix::identity(ks.basis.len(), ks.basis.len());
            worst = worst.max(max_abs(&(ks.completeness() - id)));
        }
    }
    report(8, "Kraus completeness", worst < 1e-10, format!("max |sum K^dag K - I|={worst:.3e} (<1e-10)"));
}

fn c09_number_state_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for photons in [2u32, 3] {
        for _ in 0..5 {
            let params = ChainParams::new(rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(-5.0..5.0));
            let d = params.derived().unwrap();
            let (t, n) = (rng.gen_range(0.1..3.0), rng.gen_range(1..=200));
            let phases = PhaseSchedule::evenly(rng.gen_range(0.0..2.0 * PI), n);
            let cfg = EvolutionConfig::new(params, t, n, phases.clone(), InitialState::Number(photons));
            let fin = run_postselected(&cfg).unwrap().final_state;
            let z = zeta_pair(chi_total(d.kappa, params.delta, t, n, &phases).unwrap(), d.theta);
            let s = number_state_stats(photons, &z).unwrap();
            let (mean, var) = fin.mode_moments(1).unwrap();
            worst = worst.max((fin.norm_sqr() - s.success).abs());
            worst = worst.max((mean - s.mean_n2).abs()).max((var - s.var_n2).abs());
        }
    }
    report(9, "number-state scaling", worst < 1e-8, format!("max deviation {worst:.3e} (<1e-8) for N=2,3"));
}

fn c10_coherent_state_behavior() {
    let alpha = C64::from_polar(1.0, 0.4);
    let params = ChainParams::new(1.0, 0.7, 0.5);
    let d = params.derived().unwrap();
    let (t, n) = (1.3, 60);
    let phases = PhaseSchedule::evenly(2.0, n);
    let mut cfg = EvolutionConfig::new(params, t, n, phases.clone(), InitialState::Coherent(alpha));
    cfg.cutoffs = Some([12, 12]);
    let fin = run_postselected(&cfg).unwrap().final_state;
    let z = zeta_pair(chi_total(d.kappa, params.delta, t, n, &phases).unwrap(), d.theta);
    let stats = coherent_state_stats(alpha, &z);

    let purity = fin.reduced_purity(&[0]).unwrap().min(fin.reduced_purity(&[1]).unwrap());
    let (m1, _) = fin.mode_moments(0).unwrap();
    let (m2, v2) = fin.mode_moments(1).unwrap();
    let total_expected = alpha.norm_sqr() * probabilities(&z).unwrap().success;
    let gaps = [(m2 - stats.mean_n2).abs(), (v2 - stats.mean_n2).abs(), (m1 + m2 - total_expected).abs()];
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    report(
        10,
        "coherent-state behavior",
        purity > 1.0 - 1e-6 && worst < 1e-6 && total_expected < alpha.norm_sqr(),
        format!(
            "min purity={purity:.9} (>1-1e-6), max stat gap={worst:.3e} (<1e-6), total mean {:.6} vs |alpha|^2=1",
            m1 + m2
        ),
    );
}

fn c11_three_level_equivalence() {
    let cases = [
        ("standard", chain(1.0, FRAC_PI_4, 0.0), FRAC_PI_2, 0.0, 10_000usize),
        ("dephasing", chain(1.0, FRAC_PI_4, 0.0), 1.0, PI, 10_000),
        ("detuning", chain(1.0, FRAC_PI_4, 100.0), 100.0 * PI, 0.0, 10_000),
        ("combined", chain(1.0, FRAC_PI_3, 100.0), 150.0, 1.0, 10_000),
    ];
    let mut worst = 0.0f64;
    let mut per = Vec::new();
    for (name, params, t, phi, n) in cases {
        let phases = PhaseSchedule::evenly(phi, n);
        let mut cfg = EvolutionConfig::new(params, t, n, phases.clone(), InitialState::OnePhoton);
        cfg.keep_states = true;
        let states = run_postselected(&cfg).unwrap().states.unwrap();
        let atom = run_atomic(&params, t / n as f64, &phases.materialize(n).unwrap()).unwrap();
        let gap = states
            .iter()
            .zip(&atom)
            .map(|(s, a)| (s.amplitude(&[1, 0]) - a[0]).norm().max((s.amplitude(&[0, 1]) - a[1]).norm()))
            .fold(0.0, f64::max);
        per.push(format!("{name} {gap:.1e}"));
        worst = worst.max(gap);
    }
    report(11, "three-level equivalence", worst < 1e-12, format!("{} (<1e-12)", per.join(", ")));
}

fn c12_heisenberg_step_identity() {
    let full = FockBasis::bounded(3, 3).unwrap();
    let (a1, a2, b) = (
        annihilation_operator(&full, A1_MODE),
        annihilation_operator(&full, A2_MODE),
        annihilation_operator(&full, B_MODE),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let params = ChainParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-10.0..10.0));
        let d = params.derived().unwrap();
        let dt = rng.gen_range(0.0..2.0);
        let a = &a1 * C64::from(d.theta.cos()) + &a2 * C64::from(d.theta.sin());
        let u = unitary_step(&chain_hamiltonian(&params, &full).unwrap(), dt).unwrap();
        let sf = step_factor(d.kappa, params.delta, dt, 0.0).unwrap();
        let lhs = &u * &a * u.adjoint();
        let rhs = (&a * sf.mu.conj() + &b * sf.nu.conj()) * C64::from_polar(1.0, -params.delta * dt / 2.0);
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    report(12, "Heisenberg step identity", worst < 1e-10, format!("max matrix gap {worst:.3e} (<1e-10), 50 draws"));
}

fn c13_entanglement_generation() {
    let n = 1_000;
    let params = chain(1.0, FRAC_PI_4, 0.0);
    let traj = one_photon(params, 1.0, n, PhaseSchedule::evenly(PI, n));
    let balanced =
        traj.records.iter().min_by(|x, y| (x.transfer - 0.5).abs().total_cmp(&(y.transfer - 0.5).abs())).unwrap();

    let mut cfg = EvolutionConfig::new(
        params,
        1.0,
        200,
        PhaseSchedule::evenly(PI, 200),
        InitialState::Coherent(C64::new(1.0, 0.0)),
    );
    cfg.cutoffs = Some([12, 12]);
    let coherent_max = run_postselected(&cfg).unwrap().records.iter().map(|r| r.entropy).fold(0.0, f64::max);
    report(
        13,
        "entanglement generation",
        balanced.entropy > 0.1 && coherent_max < 1e-6,
        format!(
            "one photon at step {} (p={:.4}): S={:.4} nats (>0.1); coherent max S={coherent_max:.3e} (<1e-6)",
            balanced.step, balanced.transfer, balanced.entropy
        ),
    );
}

fn main() {
    let criteria: [fn(); 13] = [
        c01_standard_zeno_freeze,
        c02_complete_transfer_via_dephasing,
        c03_dephasing_limit_formula,
        c04_strong_detuning_transfer,
        c05_combined_formula,
        c06_random_phase_average,
        c07_analytic_numeric_equivalence,
        c08_kraus_completeness,
        c09_number_state_scaling,
        c10_coherent_state_behavior,
        c11_three_level_equivalence,
        c12_heisenberg_step_identity,
        c13_entanglement_generation,
    ];
    // FAIL lines are printed by `report`; keep the default hook for anything unexpected.
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info.payload().downcast_ref::<String>().map(String::as_str).unwrap_or("");
        if !msg.starts_with("criterion ") {
            default_hook(info);
        }
    }));
    let failed = criteria.iter().filter(|c| std::panic::catch_unwind(c).is_err()).count();
    println!("\nacceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
