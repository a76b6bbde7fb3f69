//! Lattice indexing and the joint walker/coin state representations.
//!
//! Sites run over `n = -L ..= L`; storage index is `n + L`. The coin basis is
//! `{|0⟩, |1⟩}` with `|0⟩` moving the walker right and `|1⟩` moving it left.
//!
//! Lattices are sized as `L = steps + r₀` where `r₀` is the radius of the
//! initial support, so a walk of the planned length never touches the edge.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WalkError};

pub type C64 = Complex64;

/// Default truncation threshold for Gaussian amplitudes.
pub const DEFAULT_GAUSSIAN_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    half_width: usize,
}

impl LatticeSpec {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(WalkError::invalid("half_width", "must be at least 1"));
        }
        Ok(Self { half_width })
    }

    /// Smallest lattice on which `steps` shifts of a state supported within
    /// `support_radius` of the origin stay clear of the boundary.
    pub fn for_walk(steps: usize, support_radius: usize) -> Self {
        Self { half_width: (steps + support_radius).max(1) }
    }

    pub fn half_width(self) -> usize {
        self.half_width
    }

    pub fn site_count(self) -> usize {
        2 * self.half_width + 1
    }

    pub fn contains(self, site: i64) -> bool {
        site.unsigned_abs() as usize <= self.half_width
    }

    pub fn index(self, site: i64) -> Option<usize> {
        self.contains(site).then(|| (site + self.half_width as i64) as usize)
    }

    pub fn site(self, index: usize) -> i64 {
        index as i64 - self.half_width as i64
    }

    pub fn sites(self) -> impl Iterator<Item = i64> {
        let l = self.half_width as i64;
        -l..=l
    }
}

/// Normalised coin state `a₀|0⟩ + a₁|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinState {
    amps: [C64; 2],
}

impl CoinState {
    /// Normalises the pair; rejects the zero vector.
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(WalkError::invalid("coin", "amplitudes must be finite and not both zero"));
        }
        Ok(Self { amps: [a0 / norm, a1 / norm] })
    }

    pub fn zero() -> Self {
        Self { amps: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    pub fn one() -> Self {
        Self { amps: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] }
    }

    /// `(|0⟩ + i|1⟩)/√2`, the initial coin state of every walk in this crate.
    pub fn phi() -> Self {
        Self { amps: [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)] }
    }

    /// `(i|0⟩ + |1⟩)/√2`, orthogonal to [`CoinState::phi`].
    pub fn phi_perp() -> Self {
        Self { amps: [C64::new(0.0, FRAC_1_SQRT_2), C64::new(FRAC_1_SQRT_2, 0.0)] }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amps
    }
}

/// A normalised position wavefunction with finite support, stored as a
/// contiguous run of amplitudes starting at `first_site`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionWavefunction {
    first_site: i64,
    amps: Vec<C64>,
}

impl PositionWavefunction {
    pub fn new(first_site: i64, amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(WalkError::invalid("amplitudes", "list is empty"));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(WalkError::invalid("amplitudes", "all amplitudes are zero or non-finite"));
        }
        Ok(Self { first_site, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn origin() -> Self {
        Self { first_site: 0, amps: vec![C64::new(1.0, 0.0)] }
    }

    /// Truncated Gaussian `∝ exp(-n²/4σ²)` keeping sites whose unnormalised
    /// amplitude is at least `cutoff`.
    pub fn gaussian(sigma: f64, cutoff: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(WalkError::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        if !(cutoff > 0.0 && cutoff <= 1e-6) {
            return Err(WalkError::invalid("cutoff", format!("must lie in (0, 1e-6], got {cutoff}")));
        }
        let profile = |n: i64| (-((n * n) as f64) / (4.0 * sigma * sigma)).exp();
        let mut radius = (2.0 * sigma * (1.0 / cutoff).ln().sqrt()).floor() as i64;
        while profile(radius + 1) >= cutoff {
            radius += 1;
        }
        while radius > 0 && profile(radius) < cutoff {
            radius -= 1;
        }
        let amps = (-radius..=radius).map(|n| C64::new(profile(n), 0.0)).collect();
        Self::new(-radius, amps)
    }

    pub fn first_site(&self) -> i64 {
        self.first_site
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, site: i64) -> C64 {
        usize::try_from(site - self.first_site).ok().and_then(|i| self.amps.get(i).copied()).unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.amps.iter().enumerate().map(move |(i, a)| (self.first_site + i as i64, *a))
    }

    /// Largest `|n|` carrying a nonzero amplitude.
    pub fn support_radius(&self) -> usize {
        self.iter().filter(|(_, a)| *a != C64::default()).map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Number of sites between the outermost nonzero amplitudes, inclusive.
    pub fn support_size(&self) -> usize {
        let nonzero: Vec<i64> = self.iter().filter(|(_, a)| *a != C64::default()).map(|(n, _)| n).collect();
        match (nonzero.first(), nonzero.last()) {
            (Some(a), Some(b)) => (b - a + 1) as usize,
            _ => 0,
        }
    }
}

/// Pure joint state, amplitudes indexed by `(site index, coin bit)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPureState {
    lattice: LatticeSpec,
    amps: Array2<C64>,
}

impl JointPureState {
    /// `|ψ⟩_p ⊗ |c⟩_c` on the given lattice.
    pub fn product(position: &PositionWavefunction, coin: CoinState, lattice: LatticeSpec) -> Result<Self> {
        let mut amps = Array2::zeros((lattice.site_count(), 2));
        for (site, a) in position.iter() {
            match lattice.index(site) {
                Some(i) => {
                    amps[[i, 0]] = a * coin.amps[0];
                    amps[[i, 1]] = a * coin.amps[1];
                }
                None if a == C64::default() => {}
                None => return Err(WalkError::DoesNotFit { half_width: lattice.half_width() }),
            }
        }
        Ok(Self { lattice, amps })
    }

    /// `|0⟩_p ⊗ (|0⟩ + i|1⟩)/√2` on a lattice sized for `steps`.
    pub fn localized(steps: usize) -> Self {
        Self::product(&PositionWavefunction::origin(), CoinState::phi(), LatticeSpec::for_walk(steps, 0))
            .expect("origin always fits")
    }

    /// Gaussian walker `∝ Σ exp(-n²/4σ²)|n⟩` with coin `|φ⟩`, sized for `steps`.
    pub fn gaussian(sigma: f64, cutoff: f64, steps: usize) -> Result<Self> {
        let position = PositionWavefunction::gaussian(sigma, cutoff)?;
        let lattice = LatticeSpec::for_walk(steps, position.support_radius());
        Self::product(&position, CoinState::phi(), lattice)
    }

    /// Product state from an arbitrary amplitude list placed from `first_site`.
    pub fn custom(first_site: i64, position_amps: Vec<C64>, coin: CoinState, steps: usize) -> Result<Self> {
        let position = PositionWavefunction::new(first_site, position_amps)?;
        let lattice = LatticeSpec::for_walk(steps, position.support_radius());
        Self::product(&position, coin, lattice)
    }

    /// Wraps a `(site_count, 2)` amplitude table, normalising it.
    pub fn from_amplitudes(lattice: LatticeSpec, amps: Array2<C64>) -> Result<Self> {
        if amps.dim() != (lattice.site_count(), 2) {
            return Err(WalkError::invalid("amplitudes", format!("expected shape ({}, 2)", lattice.site_count())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(WalkError::invalid("amplitudes", "state is zero or non-finite"));
        }
        Ok(Self { lattice, amps: amps.mapv(|a| a / norm) })
    }

    pub(crate) fn from_raw(lattice: LatticeSpec, amps: Array2<C64>) -> Self {
        debug_assert_eq!(amps.dim(), (lattice.site_count(), 2));
        Self { lattice, amps }
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amps
    }

    pub fn amplitude(&self, site: i64, coin: usize) -> C64 {
        self.lattice.index(site).map(|i| self.amps[[i, coin]]).unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Σ_c |ψ(n, c)|²` for every site, in storage order.
    pub fn position_weights(&self) -> Vec<f64> {
        self.amps.rows().into_iter().map(|r| r[0].norm_sqr() + r[1].norm_sqr()).collect()
    }

    /// Copies the state onto another lattice; fails if support would be cut.
    pub fn embed(&self, lattice: LatticeSpec) -> Result<Self> {
        let mut amps = Array2::zeros((lattice.site_count(), 2));
        for (i, row) in self.amps.rows().into_iter().enumerate() {
            let site = self.lattice.site(i);
            match lattice.index(site) {
                Some(j) => {
                    amps[[j, 0]] = row[0];
                    amps[[j, 1]] = row[1];
                }
                None if row[0] == C64::default() && row[1] == C64::default() => {}
                None => return Err(WalkError::DoesNotFit { half_width: lattice.half_width() }),
            }
        }
        Ok(Self { lattice, amps })
    }

    /// Largest elementwise amplitude difference, over the union of both lattices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let l = self.lattice.half_width().max(other.lattice.half_width()) as i64;
        (-l..=l)
            .flat_map(|n| (0..2).map(move |c| (n, c)))
            .map(|(n, c)| (self.amplitude(n, c) - other.amplitude(n, c)).norm())
            .fold(0.0, f64::max)
    }
}

/// Joint density matrix stored as four coin-indexed position blocks:
/// `blocks[c][d][(n, m)] = ⟨n, c| ρ |m, d⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDensityMatrix {
    lattice: LatticeSpec,
    blocks: [[Array2<C64>; 2]; 2],
}

impl JointDensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &JointPureState) -> Self {
        let amps = psi.amplitudes();
        let block = |c: usize, d: usize| {
            let col = amps.column(c);
            let row = amps.column(d);
            Array2::from_shape_fn((col.len(), row.len()), |(n, m)| col[n] * row[m].conj())
        };
        Self { lattice: psi.lattice(), blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]] }
    }

    pub fn from_blocks(lattice: LatticeSpec, blocks: [[Array2<C64>; 2]; 2]) -> Result<Self> {
        let s = lattice.site_count();
        if blocks.iter().flatten().any(|b| b.dim() != (s, s)) {
            return Err(WalkError::invalid("blocks", format!("every block must be {s}x{s}")));
        }
        Ok(Self { lattice, blocks })
    }

    pub(crate) fn from_raw(lattice: LatticeSpec, blocks: [[Array2<C64>; 2]; 2]) -> Self {
        Self { lattice, blocks }
    }

    pub fn zeros(lattice: LatticeSpec) -> Self {
        let s = lattice.site_count();
        let z = || Array2::zeros((s, s));
        Self { lattice, blocks: [[z(), z()], [z(), z()]] }
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    pub fn block(&self, c: usize, d: usize) -> &Array2<C64> {
        &self.blocks[c][d]
    }

    pub fn blocks(&self) -> &[[Array2<C64>; 2]; 2] {
        &self.blocks
    }

    pub(crate) fn blocks_mut(&mut self) -> &mut [[Array2<C64>; 2]; 2] {
        &mut self.blocks
    }

    /// `⟨n, c| ρ |m, d⟩`, zero off-lattice.
    pub fn element(&self, n: i64, c: usize, m: i64, d: usize) -> C64 {
        match (self.lattice.index(n), self.lattice.index(m)) {
            (Some(i), Some(j)) => self.blocks[c][d][[i, j]],
            _ => C64::default(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.blocks[0][0].diag().sum() + self.blocks[1][1].diag().sum()
    }

    /// `Tr ρ²`, using Hermiticity: `Σ |ρ_ij|²`.
    pub fn purity(&self) -> f64 {
        self.blocks.iter().flatten().flat_map(|b| b.iter()).map(|x| x.norm_sqr()).sum()
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|` over the whole matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..2 {
            for d in 0..2 {
                let a = &self.blocks[c][d];
                let b = &self.blocks[d][c];
                for ((i, j), x) in a.indexed_iter() {
                    worst = worst.max((x - b[[j, i]].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let l = self.lattice.half_width().max(other.lattice.half_width()) as i64;
        let mut worst = 0.0f64;
        for c in 0..2 {
            for d in 0..2 {
                for n in -l..=l {
                    for m in -l..=l {
                        worst = worst.max((self.element(n, c, m, d) - other.element(n, c, m, d)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Dense `(2S) × (2S)` matrix with joint index `2·site_index + coin`.
    pub fn to_dense(&self) -> Array2<C64> {
        let s = self.lattice.site_count();
        Array2::from_shape_fn((2 * s, 2 * s), |(a, b)| self.blocks[a % 2][b % 2][[a / 2, b / 2]])
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for b in self.blocks.iter_mut().flatten() {
            b.mapv_inplace(|x| x * factor);
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().flatten().zip(other.blocks.iter().flatten()) {
            *a += b;
        }
    }
}

/// Initial-state descriptor as it appears in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// Walker at the origin, coin `|φ⟩`.
    Origin {},
    /// Truncated Gaussian of width `sigma`, coin `|φ⟩`.
    Gaussian {
        sigma: f64,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
    },
    /// Arbitrary position amplitudes as `[re, im]` pairs starting at `first_site`.
    Custom {
        amplitudes: Vec<[f64; 2]>,
        #[serde(default)]
        first_site: i64,
        #[serde(default = "default_coin")]
        coin: [[f64; 2]; 2],
    },
}

fn default_cutoff() -> f64 {
    DEFAULT_GAUSSIAN_CUTOFF
}

fn default_coin() -> [[f64; 2]; 2] {
    [[FRAC_1_SQRT_2, 0.0], [0.0, FRAC_1_SQRT_2]]
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Origin {}
    }
}

impl InitialState {
    pub fn position(&self) -> Result<PositionWavefunction> {
        match self {
            InitialState::Origin {} => Ok(PositionWavefunction::origin()),
            InitialState::Gaussian { sigma, cutoff } => PositionWavefunction::gaussian(*sigma, *cutoff),
            InitialState::Custom { amplitudes, first_site, .. } => {
                PositionWavefunction::new(*first_site, amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect())
            }
        }
    }

    pub fn coin(&self) -> Result<CoinState> {
        match self {
            InitialState::Custom { coin: [[r0, i0], [r1, i1]], .. } => {
                CoinState::new(C64::new(*r0, *i0), C64::new(*r1, *i1))
            }
            _ => Ok(CoinState::phi()),
        }
    }

    /// Builds the joint state on a lattice sized for `steps`.
    pub fn build(&self, steps: usize) -> Result<JointPureState> {
        let position = self.position()?;
        let lattice = LatticeSpec::for_walk(steps, position.support_radius());
        JointPureState::product(&position, self.coin()?, lattice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn localized_matches_factorized_state() {
        let psi = JointPureState::localized(5);
        assert_eq!(psi.lattice().half_width(), 5);
        assert_abs_diff_eq!(psi.amplitude(0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitude(0, 1).im, FRAC_1_SQRT_2, epsilon = 1e-15);
        let others: f64 = psi
            .lattice()
            .sites()
            .filter(|&n| n != 0)
            .map(|n| psi.amplitude(n, 0).norm() + psi.amplitude(n, 1).norm())
            .sum();
        assert_eq!(others, 0.0);
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_step_lattice_still_has_one_site_margin() {
        assert_eq!(JointPureState::localized(0).lattice().half_width(), 1);
    }

    #[test]
    fn degenerate_gaussian_is_localized() {
        let g = JointPureState::gaussian(1e-6, DEFAULT_GAUSSIAN_CUTOFF, 4).unwrap();
        let o = JointPureState::localized(4);
        assert!(g.max_abs_diff(&o) < 1e-9);
    }

    #[test]
    fn gaussian_is_reflection_symmetric() {
        let g = PositionWavefunction::gaussian(10.0, DEFAULT_GAUSSIAN_CUTOFF).unwrap();
        for n in 0..=g.support_radius() as i64 {
            assert_eq!(g.amplitude(n), g.amplitude(-n));
        }
        assert_eq!(g.first_site(), -(g.support_radius() as i64));
    }

    #[test]
    fn gaussian_support_respects_cutoff() {
        let sigma = 2.0;
        let g = PositionWavefunction::gaussian(sigma, 1e-12).unwrap();
        let r = g.support_radius() as f64;
        assert!((-(r * r) / (4.0 * sigma * sigma)).exp() >= 1e-12);
        assert!((-((r + 1.0) * (r + 1.0)) / (4.0 * sigma * sigma)).exp() < 1e-12);
    }

    #[test]
    fn gaussian_position_variance_is_sigma_squared() {
        let g = PositionWavefunction::gaussian(2.0, 1e-12).unwrap();
        let variance: f64 = g.iter().map(|(n, a)| (n * n) as f64 * a.norm_sqr()).sum();
        let (mut num, mut den) = (0.0, 0.0);
        for n in -40i64..=40 {
            let w = (-((n * n) as f64) / 8.0).exp();
            num += (n * n) as f64 * w;
            den += w;
        }
        assert_abs_diff_eq!(variance, num / den, epsilon = 1e-10);
        assert_abs_diff_eq!(variance, 4.0, epsilon = 1e-10);
    }

    #[test]
    fn gaussian_rejects_bad_width() {
        assert!(PositionWavefunction::gaussian(0.0, 1e-12).is_err());
        assert!(PositionWavefunction::gaussian(-1.0, 1e-12).is_err());
        assert!(PositionWavefunction::gaussian(1.0, 1e-3).is_err());
    }

    #[test]
    fn custom_state_normalises() {
        let psi = JointPureState::custom(0, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)], CoinState::zero(), 3).unwrap();
        assert_abs_diff_eq!(psi.amplitude(0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(psi.amplitude(1, 0), C64::default());
        assert_abs_diff_eq!(psi.amplitude(2, 0).im, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(psi.lattice().half_width(), 5);

        let single = JointPureState::custom(0, vec![c(1.0, 0.0)], CoinState::zero(), 1).unwrap();
        assert_eq!(single.amplitude(0, 0), c(1.0, 0.0));
        assert_eq!(single.amplitude(0, 1), C64::default());
    }

    #[test]
    fn custom_rejects_zero_list() {
        assert!(JointPureState::custom(0, vec![C64::default(); 3], CoinState::phi(), 2).is_err());
        assert!(JointPureState::custom(0, vec![], CoinState::phi(), 2).is_err());
    }

    #[test]
    fn outer_product_blocks() {
        let rho = JointDensityMatrix::from_pure(&JointPureState::localized(2));
        assert_abs_diff_eq!(rho.element(0, 0, 0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(0, 0, 0, 1).im, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(0, 1, 0, 0).im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(0, 1, 1, 1).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.element(0, 1, 0, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        assert!(rho.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn embed_rejects_truncation() {
        let psi = JointPureState::custom(3, vec![c(1.0, 0.0)], CoinState::zero(), 0).unwrap();
        assert!(psi.embed(LatticeSpec::new(2).unwrap()).is_err());
        let wider = psi.embed(LatticeSpec::new(8).unwrap()).unwrap();
        assert_eq!(wider.max_abs_diff(&psi), 0.0);
    }

    #[test]
    fn descriptor_json_round_trip() {
        let json = r#"{"kind":"gaussian","sigma":2.0}"#;
        let d: InitialState = serde_json::from_str(json).unwrap();
        assert_eq!(d, InitialState::Gaussian { sigma: 2.0, cutoff: DEFAULT_GAUSSIAN_CUTOFF });
        let back: InitialState = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);

        let custom: InitialState =
            serde_json::from_str(r#"{"kind":"custom","amplitudes":[[1,0],[1,0]],"first_site":0}"#).unwrap();
        let psi = custom.build(4).unwrap();
        assert_abs_diff_eq!(psi.amplitude(1, 1).im, 0.5, epsilon = 1e-15);

        assert!(serde_json::from_str::<InitialState>(r#"{"kind":"origin","extra":1}"#).is_err());
        assert!(serde_json::from_str::<InitialState>(r#"{"kind":"square"}"#).is_err());
    }
}
