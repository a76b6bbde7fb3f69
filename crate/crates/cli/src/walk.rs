//! Final walk states with or without dephasing, and what the runners read
//! off them.

use coinwalk_core::analysis::{
    position_distribution, project_coin, project_coin_pure, trace_out_coin, trace_out_coin_pure, CoinOutcome,
    PositionDensity, PositionDistribution,
};
use coinwalk_core::evolution::evolve_pure;
use coinwalk_core::noise::{evolve_noisy, monte_carlo_average, NoiseMode, NoiseSpec, RngStream};
use coinwalk_core::{InitialState, JointDensityMatrix, JointPureState, Result, C64};

use crate::config::{NoiseConfig, Postselect};

/// Dephasing that actually changes the state; `None` for noiseless runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActiveNoise {
    pub spec: NoiseSpec,
    pub realizations: usize,
    pub seed: u64,
}

impl ActiveNoise {
    /// `None` when the config is absent, switched off, or has `δ = 1`.
    pub fn from_config(cfg: Option<&NoiseConfig>) -> Option<Self> {
        let cfg = cfg?;
        let spec = cfg.spec().ok()?;
        if spec.mode() == NoiseMode::Off || spec.delta() == 1.0 {
            return None;
        }
        Some(Self { spec, realizations: cfg.realizations, seed: cfg.seed })
    }
}

#[derive(Clone, Debug)]
pub enum WalkState {
    Pure(JointPureState),
    Mixed(JointDensityMatrix),
}

/// A finished walk plus, for trajectory noise, each realization's `P(n)`.
#[derive(Clone, Debug)]
pub struct Evolved {
    pub state: WalkState,
    pub realizations: Vec<Vec<f64>>,
}

pub fn evolve(initial: &InitialState, theta: f64, steps: usize, noise: Option<ActiveNoise>) -> Result<Evolved> {
    let psi0 = initial.build(steps)?;
    let Some(noise) = noise else {
        return Ok(Evolved { state: WalkState::Pure(evolve_pure(&psi0, theta, steps)?), realizations: vec![] });
    };
    let rho0 = JointDensityMatrix::from_pure(&psi0);
    match noise.spec.mode() {
        NoiseMode::Trajectory => {
            let mc = monte_carlo_average(&rho0, theta, steps, &noise.spec, noise.realizations, noise.seed)?;
            Ok(Evolved { state: WalkState::Mixed(mc.mean), realizations: mc.distributions })
        }
        _ => {
            let rho = evolve_noisy(&rho0, theta, steps, &noise.spec, RngStream::new(noise.seed, 0))?;
            Ok(Evolved { state: WalkState::Mixed(rho), realizations: vec![] })
        }
    }
}

impl WalkState {
    pub fn traced(&self) -> PositionDensity {
        match self {
            WalkState::Pure(psi) => trace_out_coin_pure(psi),
            WalkState::Mixed(rho) => trace_out_coin(rho),
        }
    }

    pub fn distribution(&self) -> Result<PositionDistribution> {
        match self {
            WalkState::Pure(psi) => Ok(PositionDistribution::from_pure(psi)),
            WalkState::Mixed(rho) => position_distribution(&trace_out_coin(rho)),
        }
    }

    /// Conditional walker state after projecting the coin, with its probability.
    pub fn conditional(&self, outcome: CoinOutcome) -> Result<Conditioned> {
        match self {
            WalkState::Pure(psi) => {
                let c = project_coin_pure(psi, outcome)?;
                Ok(Conditioned { density: c.density(), probability: c.probability, amplitudes: Some(c.amplitudes) })
            }
            WalkState::Mixed(rho) => {
                let c = project_coin(rho, outcome)?;
                Ok(Conditioned { density: c.state, probability: c.probability, amplitudes: None })
            }
        }
    }

    /// The walker state selected by `postselect`; the traced state for `none`.
    pub fn analysed(&self, postselect: Postselect) -> Result<Conditioned> {
        match postselect.outcome() {
            Some(o) => self.conditional(o),
            None => Ok(Conditioned { density: self.traced(), probability: 1.0, amplitudes: None }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Conditioned {
    pub density: PositionDensity,
    pub probability: f64,
    /// Wavefunction when the conditional state is pure.
    pub amplitudes: Option<Vec<C64>>,
}

impl Conditioned {
    pub fn distribution(&self) -> Result<PositionDistribution> {
        match &self.amplitudes {
            Some(a) => PositionDistribution::new(self.density.lattice(), a.iter().map(|x| x.norm_sqr()).collect()),
            None => position_distribution(&self.density),
        }
    }
}

impl Postselect {
    pub fn outcome(self) -> Option<CoinOutcome> {
        match self {
            Postselect::None => None,
            Postselect::J0 => Some(CoinOutcome::Phi),
            Postselect::J1 => Some(CoinOutcome::PhiPerp),
        }
    }
}

/// Sites ordered by decreasing probability, ties by increasing site.
pub fn ranked_sites(dist: &PositionDistribution) -> Vec<(i64, f64)> {
    let mut v: Vec<(i64, f64)> = dist.iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Whether `±steps` hold the two largest probabilities.
pub fn ends_are_maxima(dist: &PositionDistribution, steps: usize) -> bool {
    let n = steps as i64;
    let ends = dist.at(n).min(dist.at(-n));
    dist.iter().filter(|(m, _)| m.abs() != n).all(|(_, p)| p < ends)
}

/// Excess kurtosis of `P(n)`.
pub fn excess_kurtosis(dist: &PositionDistribution) -> f64 {
    let mean = dist.mean();
    let (m2, m4) = dist.iter().fold((0.0, 0.0), |(a, b), (n, p)| {
        let d = n as f64 - mean;
        (a + p * d * d, b + p * d.powi(4))
    });
    m4 / (m2 * m2) - 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use coinwalk_core::LatticeSpec;

    #[test]
    fn inactive_noise_is_dropped() {
        assert!(ActiveNoise::from_config(None).is_none());
        let off = NoiseConfig { delta: Some(0.2), mode: NoiseMode::Off, ..NoiseConfig::default() };
        assert!(ActiveNoise::from_config(Some(&off)).is_none());
        let unit = NoiseConfig { amplitude: Some(0.0), ..NoiseConfig::default() };
        assert!(ActiveNoise::from_config(Some(&unit)).is_none());
        let on = NoiseConfig { delta: Some(0.5), realizations: 3, seed: 4, ..NoiseConfig::default() };
        let a = ActiveNoise::from_config(Some(&on)).unwrap();
        assert_eq!((a.realizations, a.seed, a.spec.delta()), (3, 4, 0.5));
    }

    #[test]
    fn pure_and_exact_mean_agree_without_dephasing_effect() {
        let init = InitialState::default();
        let pure = evolve(&init, 0.3, 6, None).unwrap();
        let spec = NoiseSpec::new(1.0, NoiseMode::ExactMean).unwrap();
        let mixed = evolve(&init, 0.3, 6, Some(ActiveNoise { spec, realizations: 1, seed: 0 })).unwrap();
        let (a, b) = (pure.state.distribution().unwrap(), mixed.state.distribution().unwrap());
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            assert!((x - y).abs() < 1e-14);
        }
        let c = pure.state.conditional(CoinOutcome::Phi).unwrap();
        let d = mixed.state.conditional(CoinOutcome::Phi).unwrap();
        assert!((c.probability - d.probability).abs() < 1e-14);
        assert!(c.amplitudes.is_some() && d.amplitudes.is_none());
    }

    #[test]
    fn trajectory_keeps_per_realization_table() {
        let spec = NoiseSpec::new(0.0, NoiseMode::Trajectory).unwrap();
        let e = evolve(&InitialState::default(), 0.5, 4, Some(ActiveNoise { spec, realizations: 5, seed: 1 })).unwrap();
        assert_eq!(e.realizations.len(), 5);
    }

    #[test]
    fn ranking_and_kurtosis() {
        let lattice = LatticeSpec::new(2).unwrap();
        let d = PositionDistribution::new(lattice, vec![0.4, 0.0, 0.2, 0.0, 0.4]).unwrap();
        assert_eq!(ranked_sites(&d)[..2], [(-2, 0.4), (2, 0.4)]);
        assert!(ends_are_maxima(&d, 2));
        assert!(!ends_are_maxima(&d, 1));
        // two-point ±2 with a central mass: m2 = 3.2, m4 = 12.8
        assert!((excess_kurtosis(&d) - (12.8 / (3.2 * 3.2) - 3.0)).abs() < 1e-12);
    }
}
