//! Brute-force propagation of the chain with repeated vacuum checks on `B`.
//!
//! States live on the `(A1, A2)` space and are kept unnormalized: after `j`
//! post-selected steps the squared norm is the probability that every check
//! found `B` empty.

mod atomic;
mod evolve;
mod propagate;

use std::sync::Arc;

pub use atomic::run_atomic;
pub use evolve::{monte_carlo_random_phases, run_nonreferring, run_postselected, Evolver, MonteCarloSummary};
pub use propagate::{
    apply_dephasing, kraus_set, sector_kraus_set, unitary_step, vacuum_projected_step, Dephaser, KrausSet,
    ModeOperator, HERMITIAN_TOL,
};

use crate::analytic::PhaseSchedule;
use crate::fock::{FockBasis, StateVector};
use crate::model::ChainParams;
use crate::{Error, Result, C64};

/// What is injected into `A1` at `t = 0` (`A2` and `B` start empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    OnePhoton,
    Number(u32),
    Coherent(C64),
}

/// Default per-mode truncation for a coherent input.
pub fn default_coherent_cutoff(alpha: C64) -> u32 {
    let a = alpha.norm();
    (a * a + 6.0 * a + 4.0).ceil().max(12.0) as u32
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub params: ChainParams,
    pub total_time: f64,
    pub steps: usize,
    pub phases: PhaseSchedule,
    pub initial: InitialState,
    /// Per-mode cutoffs `(A1, A2)`; only used for coherent inputs.
    pub cutoffs: Option<[u32; 2]>,
    /// Explicit step durations (length `steps`), overriding `total_time / steps`.
    pub durations: Option<Vec<f64>>,
    /// Highest `B` occupation tracked by the non-referring channel. Defaults
    /// to the largest excitation present, which makes the channel exact.
    pub b_cutoff: Option<u32>,
    /// Keep every intermediate post-selected state in the trajectory.
    pub keep_states: bool,
}

impl EvolutionConfig {
    pub fn new(
        params: ChainParams,
        total_time: f64,
        steps: usize,
        phases: PhaseSchedule,
        initial: InitialState,
    ) -> Self {
        Self {
            params,
            total_time,
            steps,
            phases,
            initial,
            cutoffs: None,
            durations: None,
            b_cutoff: None,
            keep_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid total time {}", self.total_time)));
        }
        if !(self.params.kappa1.is_finite() && self.params.kappa2.is_finite() && self.params.delta.is_finite()) {
            return Err(Error::InvalidArgument("chain parameters must be finite".into()));
        }
        if let Some(d) = &self.durations {
            if d.len() != self.steps {
                return Err(Error::InvalidArgument(format!("{} step durations for {} steps", d.len(), self.steps)));
            }
            if let Some(&bad) = d.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::NegativeTimeStep(bad));
            }
        }
        if let PhaseSchedule::Deterministic(p) = &self.phases {
            if p.len() != self.steps {
                return Err(Error::ScheduleLength { expected: self.steps, got: p.len() });
            }
        }
        match self.initial {
            InitialState::Number(0) => Err(Error::InvalidArgument("number state needs N >= 1".into())),
            InitialState::Coherent(a) if !a.is_finite() => {
                Err(Error::InvalidArgument("coherent amplitude must be finite".into()))
            }
            InitialState::Coherent(_) if matches!(self.cutoffs, Some([0, _]) | Some([_, 0])) => {
                Err(Error::InvalidArgument("coherent input needs cutoffs >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Durations of all steps.
    pub fn step_durations(&self) -> Vec<f64> {
        self.durations.clone().unwrap_or_else(|| vec![self.total_time / self.steps as f64; self.steps])
    }

    /// Bright-mode angle; zero when both couplings vanish (nothing is coupled
    /// then and the angle only orients the phase shifts).
    pub fn theta(&self) -> f64 {
        self.params.derived().map_or(0.0, |d| d.theta)
    }

    /// Photon scale used for the transferred fraction: `N` for number
    /// inputs, `|alpha|^2` for coherent ones.
    pub fn photon_scale(&self) -> f64 {
        match self.initial {
            InitialState::OnePhoton => 1.0,
            InitialState::Number(n) => n as f64,
            InitialState::Coherent(a) => a.norm_sqr(),
        }
    }

    fn coherent_cutoffs(&self, alpha: C64) -> [u32; 2] {
        self.cutoffs.unwrap_or_else(|| {
            let c = default_coherent_cutoff(alpha);
            [c, c]
        })
    }

    /// Initial state on the basis used for post-selected runs.
    pub fn postselected_initial(&self) -> Result<StateVector> {
        match self.initial {
            InitialState::OnePhoton => StateVector::fock(Arc::new(FockBasis::sector(2, 1)?), &[1, 0]),
            InitialState::Number(n) => StateVector::fock(Arc::new(FockBasis::sector(2, n)?), &[n, 0]),
            InitialState::Coherent(alpha) => self.coherent_initial(alpha),
        }
    }

    /// Initial state on a basis closed under photon loss into `B`.
    pub fn channel_initial(&self) -> Result<StateVector> {
        match self.initial {
            InitialState::OnePhoton => StateVector::fock(Arc::new(FockBasis::bounded(2, 1)?), &[1, 0]),
            InitialState::Number(n) => StateVector::fock(Arc::new(FockBasis::bounded(2, n)?), &[n, 0]),
            InitialState::Coherent(alpha) => self.coherent_initial(alpha),
        }
    }

    fn coherent_initial(&self, alpha: C64) -> Result<StateVector> {
        let cut = self.coherent_cutoffs(alpha);
        let amps = crate::fock::coherent_amplitudes(alpha, cut[0]);
        let basis = Arc::new(FockBasis::truncated(&cut)?);
        Ok(StateVector::from_fn(basis, |o| if o[1] == 0 { amps[o[0] as usize] } else { C64::new(0.0, 0.0) }))
    }
}

/// Observables after one post-selected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Cumulative success probability (squared norm).
    pub success: f64,
    /// Transferred fraction: weight on `|0,1>` for one photon, `<n2>/N` or
    /// `<n2>/|alpha|^2` for number and coherent inputs (normalized state).
    pub transfer: f64,
    /// Entanglement entropy across `A1 | A2` in nats.
    pub entropy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub final_state: StateVector,
    /// States after steps `1..=n` when `keep_states` is set.
    pub states: Option<Vec<StateVector>>,
}

impl Trajectory {
    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trajectory has at least one step")
    }
}
