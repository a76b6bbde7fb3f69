//! Position dephasing and noisy evolution.
//!
//! After every step the state goes through
//! `ρ → β ρ + (1-β) Σ_k |k⟩⟨k| ⊗ ⟨k|ρ|k⟩`, i.e. every element between two
//! different sites is multiplied by `β` while site-diagonal elements, coin
//! coherences included, are untouched. In trajectory mode `β` is drawn
//! uniformly from `[δ, 1]` at every step.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::evolution::{apply_step_density, evolve_density, CoinOperator};
use crate::lattice::{JointDensityMatrix, LatticeSpec, PositionWavefunction, C64};
use crate::reduce::tree_reduce;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// A fresh `β_t ~ U[δ, 1]` every step.
    Trajectory,
    /// Constant `β = (1 + δ)/2`, the trajectory average.
    ExactMean,
    /// No channel at all.
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    delta: f64,
    mode: NoiseMode,
}

impl NoiseSpec {
    pub fn new(delta: f64, mode: NoiseMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(WalkError::invalid("delta", format!("must lie in [0, 1], got {delta}")));
        }
        Ok(Self { delta, mode })
    }

    pub fn off() -> Self {
        Self { delta: 1.0, mode: NoiseMode::Off }
    }

    /// Noise with amplitude `f = 1 - δ`.
    pub fn with_amplitude(amplitude: f64, mode: NoiseMode) -> Result<Self> {
        Self::new(1.0 - amplitude, mode)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn amplitude(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn mean_beta(&self) -> f64 {
        (1.0 + self.delta) / 2.0
    }
}

/// Identifies one reproducible random stream.
///
/// Backed by ChaCha8 seeded from `master_seed` with the stream selector set to
/// `stream_index`; the same pair yields the same draws on every platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Draws `β` uniformly from `[δ, 1]`.
pub fn sample_beta<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    spec.delta + (1.0 - spec.delta) * u
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(WalkError::invalid("beta", format!("must lie in [0, 1], got {beta}")))
    }
}

fn dephase_in_place(rho: &mut JointDensityMatrix, beta: f64) {
    if beta == 1.0 {
        return;
    }
    for block in rho.blocks_mut().iter_mut().flatten() {
        for (i, mut row) in block.rows_mut().into_iter().enumerate() {
            let keep = row[i];
            row.mapv_inplace(|x| x * beta);
            row[i] = keep;
        }
    }
}

/// Applies the dephasing channel with retention probability `beta`.
pub fn dephasing_channel(rho: &JointDensityMatrix, beta: f64) -> Result<JointDensityMatrix> {
    check_beta(beta)?;
    let mut out = rho.clone();
    dephase_in_place(&mut out, beta);
    Ok(out)
}

/// Step-then-dephase for every `β` in `betas`; one step per entry.
pub fn evolve_with_schedule<I>(rho0: &JointDensityMatrix, theta: f64, betas: I) -> Result<JointDensityMatrix>
where
    I: IntoIterator<Item = f64>,
{
    let coin = CoinOperator::new(theta)?;
    let mut rho = rho0.clone();
    for beta in betas {
        check_beta(beta)?;
        rho = apply_step_density(&rho, &coin)?;
        dephase_in_place(&mut rho, beta);
    }
    Ok(rho)
}

/// `steps` noisy steps with `β_t` chosen according to `spec.mode()`.
pub fn evolve_noisy(
    rho0: &JointDensityMatrix,
    theta: f64,
    steps: usize,
    spec: &NoiseSpec,
    stream: RngStream,
) -> Result<JointDensityMatrix> {
    match spec.mode {
        NoiseMode::Off => evolve_density(rho0, theta, steps),
        NoiseMode::ExactMean => evolve_with_schedule(rho0, theta, std::iter::repeat_n(spec.mean_beta(), steps)),
        NoiseMode::Trajectory => {
            let mut rng = stream.rng();
            let betas: Vec<f64> = (0..steps).map(|_| sample_beta(spec, &mut rng)).collect();
            evolve_with_schedule(rho0, theta, betas)
        }
    }
}

/// Exact `θ = 0`, `β ≡ 0` state after `t` steps from `|ψ₀⟩ ⊗ |φ⟩`:
/// `½[ψ̂ moved +t ⊗ |0⟩⟨0| + ψ̂ moved -t ⊗ |1⟩⟨1|]` with `ψ̂ = Σ |ψ₀(k)|² |k⟩⟨k|`.
///
/// Simulation agrees exactly for `t ≥ 2`. At `t = 1` a coin coherence
/// survives on any site midway between two support sites two apart, because
/// the channel leaves site-diagonal coin blocks alone; the first shift after
/// that moves it off the diagonal where the next channel removes it.
pub fn closed_form_full_noise(position: &PositionWavefunction, t: usize) -> JointDensityMatrix {
    let lattice = LatticeSpec::for_walk(t, position.support_radius());
    let mut rho = JointDensityMatrix::zeros(lattice);
    let t = t as i64;
    for (site, a) in position.iter() {
        let w = C64::new(a.norm_sqr() / 2.0, 0.0);
        if let Some(i) = lattice.index(site + t) {
            rho.blocks_mut()[0][0][[i, i]] += w;
        }
        if let Some(i) = lattice.index(site - t) {
            rho.blocks_mut()[1][1][[i, i]] += w;
        }
    }
    rho
}

/// Mean state over Monte-Carlo realizations plus each realization's `P(n)`.
#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub mean: JointDensityMatrix,
    /// `distributions[r][i]` is `P` at storage index `i` for realization `r`.
    pub distributions: Vec<Vec<f64>>,
}

fn site_probabilities(rho: &JointDensityMatrix) -> Vec<f64> {
    let b0: &Array2<C64> = rho.block(0, 0);
    let b1: &Array2<C64> = rho.block(1, 1);
    b0.diag().iter().zip(b1.diag().iter()).map(|(a, b)| a.re + b.re).collect()
}

/// Averages `realizations` independent noisy runs; run `r` uses stream
/// `(master_seed, r)`. The sum is a fixed pairwise tree, so the result does not
/// depend on the number of worker threads.
pub fn monte_carlo_average(
    rho0: &JointDensityMatrix,
    theta: f64,
    steps: usize,
    spec: &NoiseSpec,
    realizations: usize,
    master_seed: u64,
) -> Result<MonteCarloResult> {
    if realizations == 0 {
        return Err(WalkError::invalid("realizations", "must be at least 1"));
    }
    let leaf = |r: usize| -> Result<(JointDensityMatrix, Vec<Vec<f64>>)> {
        let rho = evolve_noisy(rho0, theta, steps, spec, RngStream::new(master_seed, r as u64))?;
        let p = site_probabilities(&rho);
        Ok((rho, vec![p]))
    };
    let combine = |(mut a, mut pa): (JointDensityMatrix, Vec<Vec<f64>>),
                   (b, pb): (JointDensityMatrix, Vec<Vec<f64>>)| {
        a.add_assign(&b);
        pa.extend(pb);
        (a, pa)
    };
    let (mut mean, distributions) = tree_reduce(realizations, &leaf, &combine).expect("realizations > 0")?;
    mean.scale(1.0 / realizations as f64);
    Ok(MonteCarloResult { mean, distributions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_pure;
    use crate::lattice::{CoinState, JointPureState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn beta_degenerate_interval() {
        let spec = NoiseSpec::new(1.0, NoiseMode::Trajectory).unwrap();
        let mut rng = RngStream::new(7, 0).rng();
        assert!((0..100).all(|_| sample_beta(&spec, &mut rng) == 1.0));
    }

    #[test]
    fn beta_uniform_mean() {
        // U[0,1] mean has standard error 1/sqrt(12·10⁵) ≈ 9.1e-4; 3σ band.
        let spec = NoiseSpec::new(0.0, NoiseMode::Trajectory).unwrap();
        let mut rng = RngStream::new(2024, 3).rng();
        let n = 100_000;
        let mean = (0..n).map(|_| sample_beta(&spec, &mut rng)).sum::<f64>() / n as f64;
        assert!((0.497..=0.503).contains(&mean), "mean {mean}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let spec = NoiseSpec::new(0.2, NoiseMode::Trajectory).unwrap();
        let draw = |s: RngStream| {
            let mut rng = s.rng();
            (0..32).map(|_| sample_beta(&spec, &mut rng).to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(draw(RngStream::new(11, 4)), draw(RngStream::new(11, 4)));
        assert_ne!(draw(RngStream::new(11, 4)), draw(RngStream::new(11, 5)));
        assert_ne!(draw(RngStream::new(11, 4)), draw(RngStream::new(12, 4)));
    }

    #[test]
    fn delta_validation() {
        assert!(NoiseSpec::new(-0.1, NoiseMode::Trajectory).is_err());
        assert!(NoiseSpec::new(1.1, NoiseMode::Trajectory).is_err());
        assert_abs_diff_eq!(NoiseSpec::with_amplitude(0.05, NoiseMode::Off).unwrap().delta(), 0.95, epsilon = 1e-15);
    }

    fn two_site_superposition() -> JointDensityMatrix {
        let psi = JointPureState::custom(0, vec![c(1.0, 0.0), c(0.0, 1.0)], CoinState::phi(), 2).unwrap();
        JointDensityMatrix::from_pure(&psi)
    }

    #[test]
    fn channel_limits() {
        let rho = two_site_superposition();
        assert_eq!(dephasing_channel(&rho, 1.0).unwrap(), rho);
        let zeroed = dephasing_channel(&rho, 0.0).unwrap();
        for c_ in 0..2 {
            for d in 0..2 {
                assert_eq!(zeroed.element(0, c_, 1, d), C64::default());
                assert_eq!(zeroed.element(0, c_, 0, d), rho.element(0, c_, 0, d));
                assert_eq!(zeroed.element(1, c_, 1, d), rho.element(1, c_, 1, d));
            }
        }
        assert!(dephasing_channel(&rho, 1.5).is_err());
        assert!(dephasing_channel(&rho, -0.5).is_err());
    }

    #[test]
    fn channel_idempotent_at_zero() {
        let rho = evolve_density(&JointDensityMatrix::from_pure(&JointPureState::localized(6)), 0.4, 6).unwrap();
        let once = dephasing_channel(&rho, 0.0).unwrap();
        assert_eq!(dephasing_channel(&once, 0.0).unwrap(), once);
    }

    #[test]
    fn half_dephasing_against_dense_oracle() {
        let rho = two_site_superposition();
        let out = dephasing_channel(&rho, 0.5).unwrap();
        // oracle: β ρ + (1-β) Σ_k P_k ρ P_k on the dense matrix
        let dense = rho.to_dense();
        let n = dense.nrows();
        let mut diag_part = Array2::<C64>::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                if a / 2 == b / 2 {
                    diag_part[[a, b]] = dense[[a, b]];
                }
            }
        }
        let expected = dense.mapv(|x| x * 0.5) + diag_part.mapv(|x| x * 0.5);
        let diff = (&out.to_dense() - &expected).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-15);
        let oracle_purity: f64 = expected.iter().map(|x| x.norm_sqr()).sum();
        assert_abs_diff_eq!(out.purity(), oracle_purity, epsilon = 1e-14);
        // two sites, equal weight, position coherence 1/2 in magnitude: purity 1 → 1/2 + 2·(1/4)·(1/4)·... = 0.625
        assert_abs_diff_eq!(oracle_purity, 0.625, epsilon = 1e-14);
        assert_abs_diff_eq!(out.element(0, 0, 1, 0).norm(), rho.element(0, 0, 1, 0).norm() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn off_mode_is_bitwise_noiseless() {
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(12));
        let a = evolve_noisy(&rho0, 0.3, 12, &NoiseSpec::off(), RngStream::new(1, 0)).unwrap();
        let b = evolve_density(&rho0, 0.3, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_noise_z_walk_matches_closed_form() {
        let pos = PositionWavefunction::new(-1, vec![c(0.5, 0.2), c(-0.3, 0.4), c(0.1, 0.0), c(0.2, -0.6)]).unwrap();
        for t in 2..=12 {
            let psi = JointPureState::product(&pos, CoinState::phi(), LatticeSpec::for_walk(t, pos.support_radius()))
                .unwrap();
            let sim =
                evolve_with_schedule(&JointDensityMatrix::from_pure(&psi), 0.0, std::iter::repeat_n(0.0, t)).unwrap();
            assert!(sim.max_abs_diff(&closed_form_full_noise(&pos, t)) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn full_noise_single_step_keeps_midpoint_coin_coherence() {
        let pos = PositionWavefunction::new(0, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let psi = JointPureState::product(&pos, CoinState::phi(), LatticeSpec::for_walk(1, 2)).unwrap();
        let sim = evolve_with_schedule(&JointDensityMatrix::from_pure(&psi), 0.0, [0.0]).unwrap();
        assert!(sim.element(1, 0, 1, 1).norm() > 0.1);
        // adjacent support has no such midpoint
        let pos = PositionWavefunction::new(0, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let psi = JointPureState::product(&pos, CoinState::phi(), LatticeSpec::for_walk(1, 1)).unwrap();
        let sim = evolve_with_schedule(&JointDensityMatrix::from_pure(&psi), 0.0, [0.0]).unwrap();
        assert!(sim.max_abs_diff(&closed_form_full_noise(&pos, 1)) < 1e-15);
    }

    #[test]
    fn full_noise_closed_form_bookkeeping() {
        let rho = closed_form_full_noise(&PositionWavefunction::origin(), 5);
        assert_eq!(rho.element(5, 0, 5, 0), c(0.5, 0.0));
        assert_eq!(rho.element(-5, 1, -5, 1), c(0.5, 0.0));
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);

        let pos =
            PositionWavefunction::new(0, vec![c((1.0f64 / 3.0).sqrt(), 0.0), c((2.0f64 / 3.0).sqrt(), 0.0)]).unwrap();
        let rho = closed_form_full_noise(&pos, 2);
        assert_abs_diff_eq!(rho.element(2, 0, 2, 0).re, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(3, 0, 3, 0).re, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(-2, 1, -2, 1).re, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(-1, 1, -1, 1).re, 1.0 / 3.0, epsilon = 1e-15);
        for b in rho.blocks().iter().flatten() {
            for ((i, j), x) in b.indexed_iter() {
                if i != j {
                    assert_eq!(*x, C64::default());
                }
            }
        }
    }

    #[test]
    fn trace_and_hermiticity_under_noise() {
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(30));
        let spec = NoiseSpec::new(0.0, NoiseMode::Trajectory).unwrap();
        let rho = evolve_noisy(&rho0, FRAC_PI_4, 30, &spec, RngStream::new(5, 0)).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        assert!(rho.hermiticity_defect() < 1e-14);
        assert!(site_probabilities(&rho).iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn single_realization_average_is_the_run() {
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(10));
        let spec = NoiseSpec::new(0.3, NoiseMode::Trajectory).unwrap();
        let mc = monte_carlo_average(&rho0, 0.5, 10, &spec, 1, 99).unwrap();
        let single = evolve_noisy(&rho0, 0.5, 10, &spec, RngStream::new(99, 0)).unwrap();
        assert_eq!(mc.mean, single);
        assert_eq!(mc.distributions.len(), 1);
        assert!(monte_carlo_average(&rho0, 0.5, 10, &spec, 0, 99).is_err());
    }

    #[test]
    fn monte_carlo_independent_of_thread_count() {
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(8));
        let spec = NoiseSpec::new(0.1, NoiseMode::Trajectory).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo_average(&rho0, PI / 7.0, 8, &spec, 37, 123).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.distributions, b.distributions);
    }

    #[test]
    fn exact_mean_uses_midpoint_beta() {
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(5));
        let spec = NoiseSpec::new(0.4, NoiseMode::ExactMean).unwrap();
        let a = evolve_noisy(&rho0, 0.2, 5, &spec, RngStream::new(0, 0)).unwrap();
        let b = evolve_with_schedule(&rho0, 0.2, [0.7; 5]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_theta_localisation_survives_full_noise() {
        let steps = 40;
        let rho0 = JointDensityMatrix::from_pure(&JointPureState::localized(steps));
        let spec = NoiseSpec::new(0.0, NoiseMode::Trajectory).unwrap();
        let mc = monte_carlo_average(&rho0, PI / 20.0, steps, &spec, 20, 3).unwrap();
        let p = site_probabilities(&mc.mean);
        let l = mc.mean.lattice();
        let end = p[l.index(steps as i64).unwrap()];
        assert!(l.sites().filter(|n| n.unsigned_abs() as usize != steps).all(|n| p[l.index(n).unwrap()] < end));
        // sanity: noiseless pure run shares the end-site maxima
        let pure = evolve_pure(&JointPureState::localized(steps), PI / 20.0, steps).unwrap();
        assert!(pure.position_weights()[l.index(steps as i64).unwrap()] > 0.1);
    }
}
