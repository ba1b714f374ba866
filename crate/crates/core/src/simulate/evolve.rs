use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::propagate::{sector_kraus_set, Dephaser};
use super::{EvolutionConfig, StepRecord, Trajectory};
use crate::analytic::PhaseSchedule;
use crate::fock::{DensityOperator, FockBasis, StateVector};
use crate::{CMatrix, Error, Result};

/// Precomputed step operators for one configuration, reusable across phase
/// schedules (Monte Carlo trials share one).
#[derive(Debug, Clone)]
pub struct Evolver {
    basis: Arc<FockBasis>,
    durations: Vec<f64>,
    /// Kraus sets keyed by the bit pattern of the step duration.
    kraus: HashMap<u64, Arc<Vec<CMatrix>>>,
    dephaser: Dephaser,
    photon_scale: f64,
    keep_states: bool,
}

impl Evolver {
    fn build(config: &EvolutionConfig, basis: Arc<FockBasis>, b_cutoff: u32) -> Result<Self> {
        config.validate()?;
        let durations = config.step_durations();
        let mut kraus = HashMap::new();
        for &dt in &durations {
            if let std::collections::hash_map::Entry::Vacant(e) = kraus.entry(dt.to_bits()) {
                e.insert(Arc::new(sector_kraus_set(&config.params, dt, &basis, b_cutoff)?.operators));
            }
        }
        Ok(Self {
            dephaser: Dephaser::new(config.theta(), &basis)?,
            basis,
            durations,
            kraus,
            photon_scale: config.photon_scale(),
            keep_states: config.keep_states,
        })
    }

    /// Evolver for the post-selected branch (only `K_0` is needed).
    pub fn postselected(config: &EvolutionConfig) -> Result<Self> {
        let basis = config.postselected_initial()?.basis().clone();
        Self::build(config, basis, 0)
    }

    fn kraus_at(&self, step: usize) -> &[CMatrix] {
        &self.kraus[&self.durations[step].to_bits()]
    }

    fn record(&self, step: usize, state: &StateVector) -> Result<StepRecord> {
        let success = state.norm_sqr();
        let (transfer, entropy) = if success > 0.0 {
            let (mean_n2, _) = state.mode_moments(1)?;
            let transfer = if self.photon_scale > 0.0 { mean_n2 / self.photon_scale } else { 0.0 };
            (transfer, state.entanglement_entropy(&[0])?)
        } else {
            (0.0, 0.0)
        };
        Ok(StepRecord { step, success, transfer, entropy })
    }

    /// Post-selected run from `initial` with the given per-step phases.
    pub fn run(&self, initial: &StateVector, phases: &[f64]) -> Result<Trajectory> {
        if phases.len() != self.durations.len() {
            return Err(Error::ScheduleLength { expected: self.durations.len(), got: phases.len() });
        }
        if initial.basis() != &self.basis {
            return Err(Error::InvalidArgument("initial state is on a different basis".into()));
        }
        let mut amplitudes = initial.amplitudes().clone();
        let mut records = Vec::with_capacity(phases.len());
        let mut states = self.keep_states.then(|| Vec::with_capacity(phases.len()));
        let mut state = initial.clone();
        for (j, &phi) in phases.iter().enumerate() {
            amplitudes = &self.kraus_at(j)[0] * amplitudes;
            amplitudes = self.dephaser.apply(&amplitudes, phi);
            state = StateVector::new(self.basis.clone(), amplitudes.clone())?;
            records.push(self.record(j + 1, &state)?);
            if let Some(s) = states.as_mut() {
                s.push(state.clone());
            }
        }
        Ok(Trajectory { records, final_state: state, states })
    }
}

/// Alternate `<0|_B U |0>_B` and the bright-mode phase for `j = 1..=n`.
pub fn run_postselected(config: &EvolutionConfig) -> Result<Trajectory> {
    let evolver = Evolver::postselected(config)?;
    let phases = config.phases.materialize(config.steps)?;
    evolver.run(&config.postselected_initial()?, &phases)
}

/// Unconditioned evolution `rho -> sum_n K_n rho K_n^dagger`, followed by the
/// bright-mode phase. Returns `rho_0, rho_1, ..., rho_n`.
pub fn run_nonreferring(config: &EvolutionConfig) -> Result<Vec<DensityOperator>> {
    let initial = config.channel_initial()?;
    let basis = initial.basis().clone();
    let top = basis.totals().last().copied().unwrap_or(0);
    let evolver = Evolver::build(config, basis.clone(), config.b_cutoff.unwrap_or(top))?;
    let phases = config.phases.materialize(config.steps)?;

    let mut rho = DensityOperator::from_pure(&initial).matrix().clone();
    let mut out = Vec::with_capacity(config.steps + 1);
    out.push(DensityOperator::new(basis.clone(), rho.clone())?);
    for (j, &phi) in phases.iter().enumerate() {
        rho = evolver
            .kraus_at(j)
            .iter()
            .fold(CMatrix::zeros(basis.len(), basis.len()), |acc, k| acc + k * &rho * k.adjoint());
        if phi != 0.0 {
            let d = evolver.dephaser.matrix(phi);
            rho = &d * rho * d.adjoint();
        }
        out.push(DensityOperator::new(basis.clone(), rho.clone())?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: usize,
    /// Sample mean of the final transferred fraction.
    pub mean_p: f64,
    /// Standard error of `mean_p`.
    pub std_error: f64,
    /// Sample mean of the final success probability.
    pub mean_success: f64,
}

/// Repeat the post-selected run with fresh uniform phases per trial. Trial
/// `i` draws from stream `i` of the configured seed, so results do not
/// depend on scheduling.
pub fn monte_carlo_random_phases(config: &EvolutionConfig, trials: usize) -> Result<MonteCarloSummary> {
    let PhaseSchedule::UniformRandom { seed, .. } = config.phases else {
        return Err(Error::InvalidArgument("Monte Carlo needs a uniform random phase schedule".into()));
    };
    if trials < 2 {
        return Err(Error::InvalidArgument("at least two trials are needed".into()));
    }
    let evolver = Evolver::postselected(config)?;
    let initial = config.postselected_initial()?;
    let finals: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let phases = PhaseSchedule::UniformRandom { seed, stream: trial }.materialize(config.steps)?;
            let last = *evolver.run(&initial, &phases)?.last();
            Ok((last.transfer, last.success))
        })
        .collect::<Result<_>>()?;

    let n = trials as f64;
    let mean_p = finals.iter().map(|f| f.0).sum::<f64>() / n;
    let mean_success = finals.iter().map(|f| f.1).sum::<f64>() / n;
    let var = finals.iter().map(|f| (f.0 - mean_p).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloSummary { trials, mean_p, std_error: (var / n).sqrt(), mean_success })
}
