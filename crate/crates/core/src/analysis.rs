//! Measurement-side quantities: coin trace-out, site distributions, variance,
//! walker/coin entanglement, coin post-selection and target fidelities.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::error::{Result, WalkError};
use crate::evolution::evolve_pure;
use crate::lattice::{CoinState, JointDensityMatrix, JointPureState, LatticeSpec, C64};

/// Diagonal entries below this are treated as corruption rather than rounding.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-12;

/// Smallest post-selection probability that is still conditioned on.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-12;

/// Density matrix of the walker alone.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDensity {
    lattice: LatticeSpec,
    matrix: Array2<C64>,
}

impl PositionDensity {
    pub fn new(lattice: LatticeSpec, matrix: Array2<C64>) -> Result<Self> {
        let s = lattice.site_count();
        if matrix.dim() != (s, s) {
            return Err(WalkError::invalid("matrix", format!("expected {s}x{s}")));
        }
        Ok(Self { lattice, matrix })
    }

    /// `|χ⟩⟨χ|` for amplitudes given in storage order.
    pub fn from_amplitudes(lattice: LatticeSpec, amps: &[C64]) -> Result<Self> {
        let s = lattice.site_count();
        if amps.len() != s {
            return Err(WalkError::invalid("amplitudes", format!("expected {s} entries")));
        }
        Ok(Self { lattice, matrix: Array2::from_shape_fn((s, s), |(i, j)| amps[i] * amps[j].conj()) })
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn element(&self, n: i64, m: i64) -> C64 {
        match (self.lattice.index(n), self.lattice.index(m)) {
            (Some(i), Some(j)) => self.matrix[[i, j]],
            _ => C64::default(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|x| x.re).sum()
    }

    /// Frobenius norms of the diagonal and off-diagonal parts.
    pub fn coherence_split(&self) -> (f64, f64) {
        let mut diag = 0.0;
        let mut off = 0.0;
        for ((i, j), x) in self.matrix.indexed_iter() {
            if i == j {
                diag += x.norm_sqr();
            } else {
                off += x.norm_sqr();
            }
        }
        (diag.sqrt(), off.sqrt())
    }
}

/// `ρ_p = ⟨0|ρ|0⟩_c + ⟨1|ρ|1⟩_c`.
pub fn trace_out_coin(rho: &JointDensityMatrix) -> PositionDensity {
    PositionDensity { lattice: rho.lattice(), matrix: rho.block(0, 0) + rho.block(1, 1) }
}

/// Coin trace-out of a pure state, without forming the joint density matrix.
pub fn trace_out_coin_pure(psi: &JointPureState) -> PositionDensity {
    let a = psi.amplitudes();
    let s = a.nrows();
    let matrix = Array2::from_shape_fn((s, s), |(i, j)| a[[i, 0]] * a[[j, 0]].conj() + a[[i, 1]] * a[[j, 1]].conj());
    PositionDensity { lattice: psi.lattice(), matrix }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    lattice: LatticeSpec,
    p: Vec<f64>,
}

impl PositionDistribution {
    /// Wraps site probabilities given in storage order.
    pub fn new(lattice: LatticeSpec, p: Vec<f64>) -> Result<Self> {
        if p.len() != lattice.site_count() {
            return Err(WalkError::invalid("p", format!("expected {} entries", lattice.site_count())));
        }
        if let Some((i, &v)) = p.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(WalkError::NegativeProbability { site: lattice.site(i), value: v });
        }
        Ok(Self { lattice, p })
    }

    pub fn from_pure(psi: &JointPureState) -> Self {
        Self { lattice: psi.lattice(), p: psi.position_weights() }
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn at(&self, site: i64) -> f64 {
        self.lattice.index(site).map(|i| self.p[i]).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.p.iter().enumerate().map(|(i, &p)| (self.lattice.site(i), p))
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Diagonal of `ρ_p`; tiny negative rounding is clipped to zero.
pub fn position_distribution(rho_p: &PositionDensity) -> Result<PositionDistribution> {
    let p = rho_p
        .matrix
        .diag()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if x.re < -NEGATIVE_PROBABILITY_TOL {
                Err(WalkError::NegativeProbability { site: rho_p.lattice.site(i), value: x.re })
            } else {
                Ok(x.re.max(0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PositionDistribution { lattice: rho_p.lattice, p })
}

/// `Σ n² P(n) - (Σ n P(n))²`.
pub fn variance(dist: &PositionDistribution) -> f64 {
    let mean = dist.mean();
    let second: f64 = dist.iter().map(|(n, p)| (n * n) as f64 * p).sum();
    second - mean * mean
}

/// Reduced coin matrix `Tr_p |ψ⟩⟨ψ|`.
pub fn reduced_coin_matrix(psi: &JointPureState) -> [[C64; 2]; 2] {
    let mut r = [[C64::default(); 2]; 2];
    for row in psi.amplitudes().rows() {
        for c in 0..2 {
            for d in 0..2 {
                r[c][d] += row[c] * row[d].conj();
            }
        }
    }
    r
}

/// Von Neumann entropy (nats) of the reduced coin state.
pub fn coin_entropy(psi: &JointPureState) -> f64 {
    let r = reduced_coin_matrix(psi);
    let tr = r[0][0].re + r[1][1].re;
    let gap = ((r[0][0].re - r[1][1].re).powi(2) + 4.0 * r[0][1].norm_sqr()).sqrt();
    [(tr + gap) / 2.0, (tr - gap) / 2.0].into_iter().filter(|&l| l > 0.0).map(|l| -l * l.ln()).sum()
}

/// Coin measurement outcome in the `{|φ⟩, |φ⊥⟩}` basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoinOutcome {
    /// `j = 0`, projection onto `(|0⟩ + i|1⟩)/√2`.
    Phi,
    /// `j = 1`, projection onto `(i|0⟩ + |1⟩)/√2`.
    PhiPerp,
}

impl CoinOutcome {
    pub fn index(self) -> usize {
        match self {
            CoinOutcome::Phi => 0,
            CoinOutcome::PhiPerp => 1,
        }
    }

    pub fn state(self) -> CoinState {
        match self {
            CoinOutcome::Phi => CoinState::phi(),
            CoinOutcome::PhiPerp => CoinState::phi_perp(),
        }
    }
}

/// Normalised conditional walker state and the probability of its outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditional {
    pub state: PositionDensity,
    pub probability: f64,
}

/// Projects the coin onto `outcome` and returns the walker state it leaves.
pub fn project_coin(rho: &JointDensityMatrix, outcome: CoinOutcome) -> Result<Conditional> {
    let v = outcome.state().amplitudes();
    let s = rho.lattice().site_count();
    let mut m = Array2::<C64>::zeros((s, s));
    for c in 0..2 {
        for d in 0..2 {
            let w = v[c].conj() * v[d];
            m.scaled_add(w, rho.block(c, d));
        }
    }
    let probability: f64 = m.diag().iter().map(|x| x.re).sum();
    if !(probability >= MIN_POSTSELECTION_PROBABILITY) {
        return Err(WalkError::DegeneratePostselection { probability });
    }
    m.mapv_inplace(|x| x / probability);
    Ok(Conditional { state: PositionDensity { lattice: rho.lattice(), matrix: m }, probability })
}

/// Conditional walker wavefunction after projecting a pure state's coin.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalPure {
    pub lattice: LatticeSpec,
    /// Normalised amplitudes in storage order.
    pub amplitudes: Vec<C64>,
    pub probability: f64,
}

impl ConditionalPure {
    pub fn density(&self) -> PositionDensity {
        PositionDensity::from_amplitudes(self.lattice, &self.amplitudes).expect("sizes agree")
    }

    pub fn distribution(&self) -> PositionDistribution {
        PositionDistribution { lattice: self.lattice, p: self.amplitudes.iter().map(|a| a.norm_sqr()).collect() }
    }
}

pub fn project_coin_pure(psi: &JointPureState, outcome: CoinOutcome) -> Result<ConditionalPure> {
    let v = outcome.state().amplitudes();
    let raw: Vec<C64> = psi.amplitudes().rows().into_iter().map(|r| v[0].conj() * r[0] + v[1].conj() * r[1]).collect();
    let probability: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
    if !(probability >= MIN_POSTSELECTION_PROBABILITY) {
        return Err(WalkError::DegeneratePostselection { probability });
    }
    let norm = probability.sqrt();
    Ok(ConditionalPure { lattice: psi.lattice(), amplitudes: raw.into_iter().map(|a| a / norm).collect(), probability })
}

/// Relative sign between the two branches of a two-lobe target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// `(-1)^k`.
    pub fn parity(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TargetKind {
    /// `(|+l⟩ + s|-l⟩)/√2`.
    EndSuperposition { l: usize, sign: Sign },
    /// The exact `θ = 0` conditional state `(|-N⟩ + (-1)^(N+j)|N⟩)/√2`.
    Tau { steps: usize, outcome: CoinOutcome },
    /// Two Gaussian lobes of width `sigma` centred at `±separation/2`.
    GaussianCat { separation: usize, sigma: f64, sign: Sign },
}

/// Pure target walker state, stored sparsely as `(site, amplitude)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetState {
    kind: TargetKind,
    amps: Vec<(i64, C64)>,
}

impl TargetState {
    pub fn end_superposition(l: usize, sign: Sign) -> Result<Self> {
        if l == 0 {
            return Err(WalkError::invalid("l", "end superposition needs l ≥ 1"));
        }
        let l_ = l as i64;
        Ok(Self {
            kind: TargetKind::EndSuperposition { l, sign },
            amps: vec![(-l_, C64::new(sign.value() * FRAC_1_SQRT_2, 0.0)), (l_, C64::new(FRAC_1_SQRT_2, 0.0))],
        })
    }

    pub fn tau(steps: usize, outcome: CoinOutcome) -> Result<Self> {
        if steps == 0 {
            return Err(WalkError::invalid("steps", "tau target needs at least one step"));
        }
        let sign = Sign::parity(steps + outcome.index());
        let n = steps as i64;
        Ok(Self {
            kind: TargetKind::Tau { steps, outcome },
            amps: vec![(-n, C64::new(FRAC_1_SQRT_2, 0.0)), (n, C64::new(sign.value() * FRAC_1_SQRT_2, 0.0))],
        })
    }

    /// Two equally weighted, individually normalised Gaussians
    /// `∝ exp(-(n ∓ separation/2)²/4σ²)` evaluated on every site of `lattice`.
    pub fn gaussian_cat(lattice: LatticeSpec, separation: usize, sigma: f64, sign: Sign) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(WalkError::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        let centre = separation as f64 / 2.0;
        let lobe = |c: f64| -> Vec<f64> {
            let raw: Vec<f64> =
                lattice.sites().map(|n| (-(n as f64 - c).powi(2) / (4.0 * sigma * sigma)).exp()).collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            raw.into_iter().map(|x| x / norm).collect()
        };
        let right = lobe(centre);
        let left = lobe(-centre);
        let combined: Vec<f64> = right.iter().zip(&left).map(|(r, l)| r + sign.value() * l).collect();
        let norm = combined.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(WalkError::invalid("separation", "lobes cancel exactly"));
        }
        let amps = lattice
            .sites()
            .zip(combined)
            .filter(|(_, a)| *a != 0.0)
            .map(|(n, a)| (n, C64::new(a / norm, 0.0)))
            .collect();
        Ok(Self { kind: TargetKind::GaussianCat { separation, sigma, sign }, amps })
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn amplitudes(&self) -> &[(i64, C64)] {
        &self.amps
    }

    pub fn amplitude(&self, site: i64) -> C64 {
        self.amps.iter().find(|(n, _)| *n == site).map(|(_, a)| *a).unwrap_or_default()
    }
}

/// `⟨T|ρ_p|T⟩`; sites of the target outside the lattice contribute nothing.
pub fn fidelity(rho_p: &PositionDensity, target: &TargetState) -> f64 {
    let mut acc = C64::default();
    for &(n, tn) in &target.amps {
        let Some(i) = rho_p.lattice.index(n) else { continue };
        for &(m, tm) in &target.amps {
            if let Some(j) = rho_p.lattice.index(m) {
                acc += tn.conj() * rho_p.matrix[[i, j]] * tm;
            }
        }
    }
    acc.re
}

/// `⟨χ|ρ_p|χ⟩` for a normalised wavefunction given in `ρ_p`'s storage order.
pub fn state_fidelity(rho_p: &PositionDensity, chi: &[C64]) -> Result<f64> {
    if chi.len() != rho_p.lattice.site_count() {
        return Err(WalkError::invalid(
            "chi",
            format!("expected {} amplitudes, got {}", rho_p.lattice.site_count(), chi.len()),
        ));
    }
    let mut acc = C64::default();
    for (i, a) in chi.iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0) {
        let row: C64 = rho_p.matrix.row(i).iter().zip(chi).map(|(r, b)| r * b).sum();
        acc += a.conj() * row;
    }
    Ok(acc.re)
}

/// `|⟨T|χ⟩|²` for a conditional wavefunction.
pub fn pure_fidelity(state: &ConditionalPure, target: &TargetState) -> f64 {
    let overlap: C64 =
        target.amps.iter().filter_map(|&(n, t)| state.lattice.index(n).map(|i| t.conj() * state.amplitudes[i])).sum();
    overlap.norm_sqr()
}

/// Best end-superposition fidelity and where it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestEnd {
    pub fidelity: f64,
    pub k: usize,
    pub sign: Sign,
}

/// Maximum of `⟨T|ρ_p|T⟩` over `T = (|-N+k⟩ + s|N-k⟩)/√2`, `s = ±1`,
/// `k = 0..=k_max` (skipping `N - k < 1`). Ties keep the smaller `k`, then `+`.
pub fn best_end_fidelity(rho_p: &PositionDensity, steps: usize, k_max: usize) -> BestEnd {
    let mut best = BestEnd { fidelity: f64::NEG_INFINITY, k: 0, sign: Sign::Plus };
    for k in 0..=k_max.min(steps.saturating_sub(1)) {
        for sign in Sign::both() {
            let target = TargetState::end_superposition(steps - k, sign).expect("l ≥ 1");
            let f = fidelity(rho_p, &target);
            if f > best.fidelity {
                best = BestEnd { fidelity: f, k, sign };
            }
        }
    }
    if best.fidelity == f64::NEG_INFINITY {
        best.fidelity = 0.0;
    }
    best
}

/// Bracketing and tolerance settings for [`critical_theta_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalThetaSearch {
    pub lower: f64,
    pub upper: f64,
    pub scan_points: usize,
    pub tolerance: f64,
}

impl Default for CriticalThetaSearch {
    fn default() -> Self {
        Self { lower: 1e-4, upper: FRAC_PI_4, scan_points: 200, tolerance: 1e-5 }
    }
}

/// `P(±N) - r·P(±(N-2))` for the walk from the origin, averaged over both ends.
pub fn end_site_excess(steps: usize, ratio: f64, theta: f64) -> Result<f64> {
    let psi = evolve_pure(&JointPureState::localized(steps), theta, steps)?;
    let dist = PositionDistribution::from_pure(&psi);
    let n = steps as i64;
    let end = (dist.at(n) + dist.at(-n)) / 2.0;
    let inner = (dist.at(n - 2) + dist.at(2 - n)) / 2.0;
    Ok(end - ratio * inner)
}

/// Smallest θ at which the end-site probability falls to `ratio` times the
/// probability two sites in.
pub fn critical_theta(steps: usize, ratio: f64) -> Result<f64> {
    critical_theta_with(steps, ratio, CriticalThetaSearch::default())
}

pub fn critical_theta_with(steps: usize, ratio: f64, search: CriticalThetaSearch) -> Result<f64> {
    if steps < 2 {
        return Err(WalkError::invalid("steps", "need at least two steps to compare N with N-2"));
    }
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(WalkError::invalid("ratio", format!("must exceed 1, got {ratio}")));
    }
    if search.scan_points < 2 || !(search.lower < search.upper) || !(search.tolerance > 0.0) {
        return Err(WalkError::invalid("search", "need lower < upper, ≥ 2 scan points and positive tolerance"));
    }
    let g = |theta: f64| end_site_excess(steps, ratio, theta);
    let dx = (search.upper - search.lower) / (search.scan_points - 1) as f64;
    let mut lo = search.lower;
    let mut g_lo = g(lo)?;
    let mut bracket = None;
    for i in 1..search.scan_points {
        let hi = search.lower + i as f64 * dx;
        let g_hi = g(hi)?;
        if g_lo > 0.0 && g_hi <= 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        g_lo = g_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(WalkError::NoBracket { steps, ratio })?;
    while hi - lo > search.tolerance {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
