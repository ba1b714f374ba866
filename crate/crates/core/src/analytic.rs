//! Closed-form results for the post-selected chain.
//!
//! Everything observable in the post-selected branch reduces to the complex
//! factor `chi` accumulated over the steps: the evolution restricted to
//! `(A1, A2)` is `chi^{a^dag a}` on the bright mode. Functions here come in
//! two flavours, kept apart by name:
//!
//! * exact, finite-`n` expressions ([`step_factor`], [`chi_total`],
//!   [`chi_partials`], [`zeta_pair`], [`probabilities`], ...);
//! * asymptotic limits for infinitely frequent monitoring
//!   ([`limit_transfer_prob`], [`random_phase_average`],
//!   [`effective_beam_splitter_phase`]).

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result, C64};

/// One free-evolution step followed by a vacuum check on `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFactor {
    /// `sqrt(kappa^2 + delta^2/4)`.
    pub gamma: f64,
    pub mu: C64,
    pub nu: C64,
    /// `e^{i phi_j} e^{i delta dt/2} mu`.
    pub chi_step: C64,
}

pub fn step_factor(kappa: f64, delta: f64, dt: f64, phi_j: f64) -> Result<StepFactor> {
    if dt < 0.0 {
        return Err(Error::NegativeTimeStep(dt));
    }
    let gamma = (kappa * kappa + delta * delta / 4.0).sqrt();
    let (mu, nu) = if gamma == 0.0 {
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    } else {
        let (s, c) = (gamma * dt).sin_cos();
        (C64::new(c, -delta / (2.0 * gamma) * s), C64::new(0.0, -kappa / gamma * s))
    };
    let chi_step = C64::from_polar(1.0, phi_j + delta * dt / 2.0) * mu;
    Ok(StepFactor { gamma, mu, nu, chi_step })
}

/// Measurement-induced phase shifts `phi_j` on the bright mode.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSchedule {
    /// Explicit per-step phases (radians).
    Deterministic(Vec<f64>),
    /// Independent uniform phases on `[0, 2 pi)` from a ChaCha8 stream.
    /// The same `(seed, stream)` always yields the same sequence.
    UniformRandom { seed: u64, stream: u64 },
}

impl PhaseSchedule {
    pub fn zero(n: usize) -> Self {
        Self::Deterministic(vec![0.0; n])
    }

    /// `total` split evenly over `n` steps.
    pub fn evenly(total: f64, n: usize) -> Self {
        Self::Deterministic(vec![total / n as f64; n])
    }

    pub fn random(seed: u64) -> Self {
        Self::UniformRandom { seed, stream: 0 }
    }

    /// Per-step phases for `n` steps.
    pub fn materialize(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Self::Deterministic(v) if v.len() != n => Err(Error::ScheduleLength { expected: n, got: v.len() }),
            Self::Deterministic(v) => Ok(v.clone()),
            Self::UniformRandom { seed, stream } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(*stream);
                Ok((0..n).map(|_| rng.gen_range(0.0..TAU)).collect())
            }
        }
    }
}

fn accumulate(kappa: f64, delta: f64, dt: f64, phi_sum: f64, steps: usize) -> Result<C64> {
    let sf = step_factor(kappa, delta, dt, 0.0)?;
    // mu^j in polar form keeps the error flat in j
    let mu_j = C64::from_polar(sf.mu.norm().powi(steps as i32), sf.mu.arg() * steps as f64);
    Ok(C64::from_polar(1.0, phi_sum + delta * dt * steps as f64 / 2.0) * mu_j)
}

/// Exact `chi = e^{i phi} e^{i delta t/2} mu^n` with `dt = t/n`.
pub fn chi_total(kappa: f64, delta: f64, t: f64, n: usize, phases: &PhaseSchedule) -> Result<C64> {
    if n == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative total time {t}")));
    }
    let phi: f64 = phases.materialize(n)?.iter().sum();
    accumulate(kappa, delta, t / n as f64, phi, n)
}

/// Accumulated `chi` after each of the steps `1..=phases.len()`.
pub fn chi_partials(kappa: f64, delta: f64, dt: f64, phases: &[f64]) -> Result<Vec<C64>> {
    let mut phi = 0.0;
    phases
        .iter()
        .enumerate()
        .map(|(j, p)| {
            phi += p;
            accumulate(kappa, delta, dt, phi, j + 1)
        })
        .collect()
}

/// Post-selected amplitudes of the photon in `A1` and `A2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPair {
    pub zeta1: C64,
    pub zeta2: C64,
}

impl ZetaPair {
    pub fn new(zeta1: C64, zeta2: C64) -> Self {
        Self { zeta1, zeta2 }
    }
}

pub fn zeta_pair(chi: C64, theta: f64) -> ZetaPair {
    let (s, c) = theta.sin_cos();
    ZetaPair { zeta1: chi * c * c + s * s, zeta2: (chi - 1.0) * c * s }
}

/// Success probability `P` and conditional transfer probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferProbabilities {
    pub success: f64,
    pub transfer: f64,
}

pub fn probabilities(z: &ZetaPair) -> Result<TransferProbabilities> {
    let w2 = z.zeta2.norm_sqr();
    let success = z.zeta1.norm_sqr() + w2;
    if success == 0.0 {
        return Err(Error::ZeroSuccess);
    }
    Ok(TransferProbabilities { success, transfer: w2 / success })
}

/// Detuning regime for [`limit_transfer_prob`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning {
    /// `delta = 0`.
    Resonant,
    /// Finite detuning, meant for `|delta| >> kappa`. The approximation
    /// error is of order `(kappa/delta)^2`; it is reasonable for
    /// `|delta| >= 20 kappa` but is not enforced.
    Strong(f64),
}

impl Detuning {
    pub fn from_delta(delta: f64) -> Self {
        if delta == 0.0 {
            Self::Resonant
        } else {
            Self::Strong(delta)
        }
    }
}

/// Limiting conditional transfer probability
/// `2 cos^2(theta) sin^2(theta) (1 - cos(phi_eff))`, with
/// `phi_eff = phi` on resonance and `kappa^2 t / delta - phi` otherwise.
pub fn limit_transfer_prob(theta: f64, phi: f64, kappa: f64, t: f64, detuning: Detuning) -> f64 {
    let phi_eff = match detuning {
        Detuning::Resonant => phi,
        Detuning::Strong(delta) => kappa * kappa * t / delta - phi,
    };
    if phi_eff == 0.0 {
        return 0.0;
    }
    let (s, c) = theta.sin_cos();
    2.0 * c * c * s * s * (1.0 - phi_eff.cos())
}

/// Transfer probability averaged over fully random phases.
pub fn random_phase_average(kappa1: f64, kappa2: f64) -> Result<f64> {
    let k2 = kappa1 * kappa1 + kappa2 * kappa2;
    if k2 == 0.0 {
        return Err(Error::NoCoupling);
    }
    Ok(2.0 * kappa1 * kappa1 * kappa2 * kappa2 / (k2 * k2))
}

/// Photon statistics of the transferred light.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub success: f64,
    pub mean_n2: f64,
    pub var_n2: f64,
}

/// `|N>|0>` input: `P = w^N`, `<n2> = N |zeta2|^2 / w`,
/// `Var(n2) = <n1><n2>/N` with `w = |zeta1|^2 + |zeta2|^2`.
pub fn number_state_stats(n_photons: u32, z: &ZetaPair) -> Result<PhotonStats> {
    if n_photons == 0 {
        return Err(Error::InvalidArgument("photon number must be at least 1".into()));
    }
    let (w1, w2) = (z.zeta1.norm_sqr(), z.zeta2.norm_sqr());
    let w = w1 + w2;
    if w == 0.0 {
        return Err(Error::ZeroSuccess);
    }
    let n = n_photons as f64;
    let mean_n2 = n * w2 / w;
    let mean_n1 = n * w1 / w;
    Ok(PhotonStats { success: w.powi(n_photons as i32), mean_n2, var_n2: mean_n1 * mean_n2 / n })
}

/// Coherent `|alpha>|0>` input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStats {
    pub success: f64,
    pub mean_n2: f64,
    pub var_n2: f64,
    /// Coherent amplitudes `(alpha zeta1, alpha zeta2)` of the output product state.
    pub amplitudes: (C64, C64),
}

pub fn coherent_state_stats(alpha: C64, z: &ZetaPair) -> CoherentStats {
    let a2 = alpha.norm_sqr();
    let w = z.zeta1.norm_sqr() + z.zeta2.norm_sqr();
    let mean_n2 = a2 * z.zeta2.norm_sqr();
    CoherentStats {
        success: (-a2 * (1.0 - w)).exp(),
        mean_n2,
        var_n2: mean_n2,
        amplitudes: (alpha * z.zeta1, alpha * z.zeta2),
    }
}

/// Phase `phi - kappa^2 t / delta` of the limiting bright-mode unitary.
pub fn effective_beam_splitter_phase(phi: f64, kappa: f64, t: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(phi - kappa * kappa * t / delta)
}
