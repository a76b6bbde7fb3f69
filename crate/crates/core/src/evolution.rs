//! Coin toss, conditional shift and the walk step.
//!
//! One step is `Ŝ (𝟙 ⊗ Ĉ(θ))`: the coin acts first, then coin `|0⟩` moves the
//! walker `n → n+1` and coin `|1⟩` moves it `n → n-1`. Density matrices are
//! stepped block by block, which costs `O(L²)` instead of a dense conjugation.

use ndarray::Array2;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WalkError};
use crate::lattice::{JointDensityMatrix, JointPureState, LatticeSpec, PositionWavefunction, C64};

/// Site displacement applied to each coin basis state by the shift.
pub const SHIFT: [isize; 2] = [1, -1];

/// `Ĉ(θ) = cos θ Z + sin θ X = [[cos θ, sin θ], [sin θ, -cos θ]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinOperator {
    theta: f64,
    matrix: [[f64; 2]; 2],
}

impl CoinOperator {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(WalkError::invalid("theta", "must be finite"));
        }
        let (s, c) = theta.sin_cos();
        Ok(Self { theta, matrix: [[c, s], [s, -c]] })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.matrix
    }

    /// Applies the coin to a single coin vector.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.matrix;
        [v[0] * m[0][0] + v[1] * m[0][1], v[0] * m[1][0] + v[1] * m[1][1]]
    }
}

/// Convenience constructor mirroring the operator's usual name.
pub fn coin_operator(theta: f64) -> Result<CoinOperator> {
    CoinOperator::new(theta)
}

fn edge_violation_pure(psi: &JointPureState) -> Option<i64> {
    let amps = psi.amplitudes();
    let last = amps.nrows() - 1;
    [0, last]
        .into_iter()
        .find(|&i| amps[[i, 0]] != C64::default() || amps[[i, 1]] != C64::default())
        .map(|i| psi.lattice().site(i))
}

/// One walk step on a pure state.
pub fn apply_step_pure(psi: &JointPureState, coin: &CoinOperator) -> Result<JointPureState> {
    if let Some(site) = edge_violation_pure(psi) {
        return Err(WalkError::Boundary { site });
    }
    let amps = psi.amplitudes();
    let s = amps.nrows();
    let mut out = Array2::<C64>::zeros((s, 2));
    for i in 1..s - 1 {
        let [a0, a1] = coin.apply([amps[[i, 0]], amps[[i, 1]]]);
        out[[i + 1, 0]] = a0;
        out[[i - 1, 1]] = a1;
    }
    Ok(JointPureState::from_raw(psi.lattice(), out))
}

fn edge_violation_density(rho: &JointDensityMatrix) -> Option<i64> {
    let s = rho.lattice().site_count();
    let last = s - 1;
    for block in rho.blocks().iter().flatten() {
        for k in 0..s {
            for (i, j) in [(0, k), (last, k), (k, 0), (k, last)] {
                if block[[i, j]] != C64::default() {
                    let edge = if i == 0 || i == last { i } else { j };
                    return Some(rho.lattice().site(edge));
                }
            }
        }
    }
    None
}

/// Smallest index range holding every nonzero row and column of all blocks.
fn occupied_range(rho: &JointDensityMatrix) -> Option<(usize, usize)> {
    let s = rho.lattice().site_count();
    let zero = C64::default();
    let (mut lo, mut hi) = (usize::MAX, 0);
    for b in rho.blocks().iter().flatten() {
        let data = b.as_slice().expect("blocks are kept in standard layout");
        for (i, row) in data.chunks_exact(s).enumerate() {
            if let Some(first) = row.iter().position(|x| *x != zero) {
                let last = row.iter().rposition(|x| *x != zero).expect("row has a nonzero");
                lo = lo.min(first).min(i);
                hi = hi.max(last).max(i);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// One walk step on a density matrix: `ρ → Ŝ(𝟙⊗Ĉ) ρ (𝟙⊗Ĉ)†Ŝ†`.
pub fn apply_step_density(rho: &JointDensityMatrix, coin: &CoinOperator) -> Result<JointDensityMatrix> {
    if let Some(site) = edge_violation_density(rho) {
        return Err(WalkError::Boundary { site });
    }
    let s = rho.lattice().site_count();
    let m = coin.matrix();
    let src: Vec<&[C64]> =
        rho.blocks().iter().flatten().map(|b| b.as_slice().expect("blocks are kept in standard layout")).collect();
    let mut out: [[Array2<C64>; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| Array2::zeros((s, s))));
    let Some((lo, hi)) = occupied_range(rho) else {
        return Ok(JointDensityMatrix::from_raw(rho.lattice(), out));
    };
    for a in 0..2 {
        for b in 0..2 {
            // Coin is real, so (𝟙⊗C)ρ(𝟙⊗C)† mixes blocks with weights C[a][c]·C[b][d].
            let w = [m[a][0] * m[b][0], m[a][0] * m[b][1], m[a][1] * m[b][0], m[a][1] * m[b][1]];
            let dst = out[a][b].as_slice_mut().expect("fresh array");
            let (da, db) = (SHIFT[a], SHIFT[b]);
            let width = hi - lo + 1;
            let col = (lo as isize + db) as usize;
            for i in lo..=hi {
                let from = i * s + lo;
                let to = (i as isize + da) as usize * s + col;
                let rows = [
                    &src[0][from..from + width],
                    &src[1][from..from + width],
                    &src[2][from..from + width],
                    &src[3][from..from + width],
                ];
                for (j, d) in dst[to..to + width].iter_mut().enumerate() {
                    *d = rows[0][j] * w[0] + rows[1][j] * w[1] + rows[2][j] * w[2] + rows[3][j] * w[3];
                }
            }
        }
    }
    Ok(JointDensityMatrix::from_raw(rho.lattice(), out))
}

pub fn evolve_pure(psi0: &JointPureState, theta: f64, steps: usize) -> Result<JointPureState> {
    let coin = CoinOperator::new(theta)?;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = apply_step_pure(&psi, &coin)?;
    }
    Ok(psi)
}

pub fn evolve_density(rho0: &JointDensityMatrix, theta: f64, steps: usize) -> Result<JointDensityMatrix> {
    let coin = CoinOperator::new(theta)?;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = apply_step_density(&rho, &coin)?;
    }
    Ok(rho)
}

/// Exact state after `t` steps of the `θ = 0` walk from `|ψ₀⟩ ⊗ |φ⟩`:
/// `(1/√2)[|ψ₀ moved +t⟩|0⟩ + i(-1)^t |ψ₀ moved -t⟩|1⟩]`.
///
/// The coin `|0⟩` branch travels right, matching [`SHIFT`].
pub fn closed_form_z_walk(position: &PositionWavefunction, t: usize) -> JointPureState {
    let lattice = LatticeSpec::for_walk(t, position.support_radius());
    let mut amps = Array2::<C64>::zeros((lattice.site_count(), 2));
    let sign = if t.is_multiple_of(2) { 1.0 } else { -1.0 };
    let phase = C64::new(0.0, sign * FRAC_1_SQRT_2);
    let t = t as i64;
    for (site, a) in position.iter() {
        if let Some(i) = lattice.index(site + t) {
            amps[[i, 0]] = a * FRAC_1_SQRT_2;
        }
        if let Some(i) = lattice.index(site - t) {
            amps[[i, 1]] = a * phase;
        }
    }
    JointPureState::from_raw(lattice, amps)
}
