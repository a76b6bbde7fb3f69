//! Beam-splitter mesh realisation of the walk.
//!
//! Modes are labelled `(site, direction)`; direction plays the coin. Each
//! layer is a row of two-port splitters whose transfer matrix is the coin
//! matrix `[[cos θ, sin θ], [sin θ, -cos θ]]`, followed by propagation
//! (direction 0 moves right, direction 1 left), an optional uniform amplitude
//! attenuation and a per-mode phase. A final row of π/4 splitters, preceded by
//! a `-π/2` phase on direction 1, sends `⟨φ|` of each site's pair of beams to
//! output port 0, which is the port that is detected.
//!
//! This sign convention is the one under which the noiseless mesh reproduces
//! the abstract walk amplitude for amplitude.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use crate::analysis::{PositionDensity, MIN_POSTSELECTION_PROBABILITY};
use crate::error::{Result, WalkError};
use crate::evolution::{CoinOperator, SHIFT};
use crate::lattice::{CoinState, JointPureState, LatticeSpec, C64};
use crate::noise::RngStream;
use crate::reduce::tree_reduce;

/// How the coin state `|φ⟩` is produced at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Preparation {
    /// Inject `|0⟩_p ⊗ |φ⟩_c` directly.
    Exact,
    /// Light enters direction 0, meets a splitter of parameter `splitter_theta`
    /// and direction 1 picks up `phase`. `(π/4, π/2)` gives `|φ⟩` exactly.
    Explicit { splitter_theta: f64, phase: f64 },
}

impl Preparation {
    pub fn ideal_explicit() -> Self {
        Preparation::Explicit { splitter_theta: FRAC_PI_4, phase: FRAC_PI_2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterNode {
    pub theta: f64,
    pub layer: usize,
    pub site: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpticalMesh {
    depth: usize,
    theta: f64,
    lattice: LatticeSpec,
    preparation: Preparation,
    attenuation: f64,
    layers: Vec<Vec<BeamSplitterNode>>,
}

/// Sites reachable from the origin after `t` shifts.
fn reachable_sites(t: usize) -> impl Iterator<Item = i64> {
    let t = t as i64;
    (-t..=t).step_by(2)
}

/// Mesh of `depth` walk layers with splitters of parameter `theta`.
pub fn build_mesh(depth: usize, theta: f64) -> Result<OpticalMesh> {
    if depth == 0 {
        return Err(WalkError::invalid("depth", "mesh needs at least one layer"));
    }
    CoinOperator::new(theta)?;
    let layers = (0..depth)
        .map(|layer| reachable_sites(layer).map(|site| BeamSplitterNode { theta, layer, site }).collect())
        .collect();
    Ok(OpticalMesh {
        depth,
        theta,
        lattice: LatticeSpec::for_walk(depth, 0),
        preparation: Preparation::Exact,
        attenuation: 1.0,
        layers,
    })
}

impl OpticalMesh {
    pub fn with_preparation(mut self, preparation: Preparation) -> Self {
        self.preparation = preparation;
        self
    }

    /// Uniform amplitude transmission per layer, in `(0, 1]`.
    pub fn with_attenuation(mut self, attenuation: f64) -> Result<Self> {
        if !(attenuation > 0.0 && attenuation <= 1.0) {
            return Err(WalkError::invalid("attenuation", format!("must lie in (0, 1], got {attenuation}")));
        }
        self.attenuation = attenuation;
        Ok(self)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    pub fn layers(&self) -> &[Vec<BeamSplitterNode>] {
        &self.layers
    }

    pub fn mode_count(&self) -> usize {
        2 * self.lattice.site_count()
    }

    /// Sites carrying a detection splitter.
    pub fn projection_sites(&self) -> Vec<i64> {
        reachable_sites(self.depth).collect()
    }

    /// Mode amplitudes right after the preparation stage.
    pub fn prepared_input(&self) -> MeshOutput {
        let s = self.lattice.site_count();
        let mut amps = Array2::<C64>::zeros((s, 2));
        let origin = self.lattice.index(0).expect("origin on lattice");
        let [a0, a1] = match self.preparation {
            Preparation::Exact => CoinState::phi().amplitudes(),
            Preparation::Explicit { splitter_theta, phase } => {
                let split = CoinOperator::new(splitter_theta)
                    .expect("validated on construction")
                    .apply([C64::new(1.0, 0.0), C64::default()]);
                [split[0], split[1] * C64::from_polar(1.0, phase)]
            }
        };
        amps[[origin, 0]] = a0;
        amps[[origin, 1]] = a1;
        let power = a0.norm_sqr() + a1.norm_sqr();
        MeshOutput { lattice: self.lattice, amplitudes: amps, layer_powers: vec![power] }
    }

    /// JSON description of the mesh and, optionally, a phase mask.
    pub fn to_document(&self, mask: Option<&PhaseMask>) -> MeshDocument {
        MeshDocument {
            depth: self.depth,
            theta: self.theta,
            preparation: self.preparation,
            attenuation: self.attenuation,
            layers: self
                .layers
                .iter()
                .enumerate()
                .map(|(layer, nodes)| LayerDocument {
                    layer,
                    nodes: nodes.clone(),
                    phases: mask.map(|m| {
                        m.phases[layer]
                            .iter()
                            .enumerate()
                            .filter(|(_, &p)| p != 0.0)
                            .map(|(k, &p)| ModePhase { site: self.lattice.site(k / 2), direction: k % 2, phase: p })
                            .collect()
                    }),
                })
                .collect(),
            projection: ProjectionDocument {
                theta: FRAC_PI_4,
                direction_one_phase: -FRAC_PI_2,
                detected_port: 0,
                sites: self.projection_sites(),
            },
            phase_rate: mask.map(|m| m.rate),
        }
    }
}

/// Per-mode phases `φ[layer][mode]`, `mode = 2·site_index + direction`,
/// applied after each layer's propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMask {
    rate: f64,
    phases: Vec<Vec<f64>>,
}

impl PhaseMask {
    pub fn zeros(mesh: &OpticalMesh) -> Self {
        Self { rate: 0.0, phases: vec![vec![0.0; mesh.mode_count()]; mesh.depth] }
    }

    /// Explicit phases; the reported rate is the fraction of nonzero entries.
    pub fn from_phases(mesh: &OpticalMesh, phases: Vec<Vec<f64>>) -> Result<Self> {
        if phases.len() != mesh.depth || phases.iter().any(|l| l.len() != mesh.mode_count()) {
            return Err(WalkError::invalid(
                "phases",
                format!("expected {} layers of {} modes", mesh.depth, mesh.mode_count()),
            ));
        }
        let total = (mesh.depth * mesh.mode_count()) as f64;
        let rate = phases.iter().flatten().filter(|&&p| p != 0.0).count() as f64 / total;
        Ok(Self { rate, phases })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn phase(&self, layer: usize, site_index: usize, direction: usize) -> f64 {
        self.phases[layer][2 * site_index + direction]
    }

    pub fn phases(&self) -> &[Vec<f64>] {
        &self.phases
    }
}

/// Each phase is independently `0` with probability `1 - rate`, otherwise
/// uniform on `(0, 2π]`.
pub fn sample_phase_mask<R: Rng + ?Sized>(mesh: &OpticalMesh, rate: f64, rng: &mut R) -> Result<PhaseMask> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(WalkError::invalid("rate", format!("must lie in [0, 1], got {rate}")));
    }
    let phases = (0..mesh.depth)
        .map(|_| {
            (0..mesh.mode_count())
                .map(|_| if rng.random::<f64>() < rate { TAU * (1.0 - rng.random::<f64>()) } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(PhaseMask { rate, phases })
}

/// Mode amplitudes at the mesh output, before the detection row.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshOutput {
    lattice: LatticeSpec,
    amplitudes: Array2<C64>,
    layer_powers: Vec<f64>,
}

impl MeshOutput {
    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    /// `(site_index, direction)` amplitudes.
    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, site: i64, direction: usize) -> C64 {
        self.lattice.index(site).map(|i| self.amplitudes[[i, direction]]).unwrap_or_default()
    }

    pub fn mode_powers(&self) -> Array2<f64> {
        self.amplitudes.mapv(|a| a.norm_sqr())
    }

    /// Power summed over both directions at each site, storage order.
    pub fn site_powers(&self) -> Vec<f64> {
        self.amplitudes.rows().into_iter().map(|r| r[0].norm_sqr() + r[1].norm_sqr()).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total power after the preparation stage and after every layer.
    pub fn layer_powers(&self) -> &[f64] {
        &self.layer_powers
    }

    /// Output modes read as a normalised joint walker/coin state.
    pub fn to_state(&self) -> Result<JointPureState> {
        JointPureState::from_amplitudes(self.lattice, self.amplitudes.clone())
    }

    /// Walker density matrix with direction traced out, normalised to unit trace.
    pub fn position_density(&self) -> PositionDensity {
        let a = &self.amplitudes;
        let s = a.nrows();
        let total = self.total_power();
        let m = Array2::from_shape_fn((s, s), |(i, j)| {
            (a[[i, 0]] * a[[j, 0]].conj() + a[[i, 1]] * a[[j, 1]].conj()) / total
        });
        PositionDensity::new(self.lattice, m).expect("square by construction")
    }
}

/// Pushes the prepared light through every layer of the mesh.
pub fn propagate(mesh: &OpticalMesh, mask: &PhaseMask) -> Result<MeshOutput> {
    if mask.phases.len() != mesh.depth || mask.phases.iter().any(|l| l.len() != mesh.mode_count()) {
        return Err(WalkError::invalid("mask", "phase mask does not match the mesh"));
    }
    let mut out = mesh.prepared_input();
    let s = mesh.lattice.site_count();
    for (layer, nodes) in mesh.layers.iter().enumerate() {
        let mut next = Array2::<C64>::zeros((s, 2));
        for node in nodes {
            let i = mesh.lattice.index(node.site).expect("node on lattice");
            let split = CoinOperator::new(node.theta)?.apply([out.amplitudes[[i, 0]], out.amplitudes[[i, 1]]]);
            for (dir, value) in split.into_iter().enumerate() {
                let j = (i as isize + SHIFT[dir]) as usize;
                next[[j, dir]] = value;
            }
        }
        for ((i, dir), x) in next.indexed_iter_mut() {
            let phi = mask.phases[layer][2 * i + dir];
            *x *= mesh.attenuation;
            if phi != 0.0 {
                *x *= C64::from_polar(1.0, phi);
            }
        }
        out.amplitudes = next;
        out.layer_powers.push(out.total_power());
    }
    Ok(out)
}

/// Detected port amplitudes after the projection row.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub lattice: LatticeSpec,
    /// Normalised conditional walker amplitudes, storage order.
    pub amplitudes: Vec<C64>,
    /// Detected power relative to the power reaching the detection row.
    pub probability: f64,
}

/// Runs the detection row: `-π/2` on direction 1, π/4 splitter, read port 0.
pub fn project_detection(output: &MeshOutput) -> Result<Detection> {
    let splitter = CoinOperator::new(FRAC_PI_4)?;
    let shift = C64::from_polar(1.0, -FRAC_PI_2);
    let ports: Vec<C64> =
        output.amplitudes.rows().into_iter().map(|r| splitter.apply([r[0], r[1] * shift])[0]).collect();
    let detected: f64 = ports.iter().map(|a| a.norm_sqr()).sum();
    let incoming = output.total_power();
    let probability = if incoming > 0.0 { detected / incoming } else { 0.0 };
    if !(probability >= MIN_POSTSELECTION_PROBABILITY) {
        return Err(WalkError::DegeneratePostselection { probability });
    }
    let norm = detected.sqrt();
    Ok(Detection { lattice: output.lattice, amplitudes: ports.into_iter().map(|a| a / norm).collect(), probability })
}

/// Mean walker density matrix over `masks` random phase masks of rate `rate`;
/// mask `r` is drawn from stream `(seed, r)`.
pub fn average_position_density(mesh: &OpticalMesh, rate: f64, masks: usize, seed: u64) -> Result<PositionDensity> {
    if masks == 0 {
        return Err(WalkError::invalid("masks", "must be at least 1"));
    }
    let leaf = |r: usize| -> Result<Array2<C64>> {
        let mask = sample_phase_mask(mesh, rate, &mut RngStream::new(seed, r as u64).rng())?;
        Ok(propagate(mesh, &mask)?.position_density().matrix().clone())
    };
    let sum = tree_reduce(masks, &leaf, &|a, b| a + b).expect("masks > 0")?;
    PositionDensity::new(mesh.lattice, sum.mapv(|x| x / masks as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub depth: usize,
    pub theta: f64,
    pub preparation: Preparation,
    pub attenuation: f64,
    pub layers: Vec<LayerDocument>,
    pub projection: ProjectionDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDocument {
    pub layer: usize,
    pub nodes: Vec<BeamSplitterNode>,
    /// Nonzero phases applied after this layer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<ModePhase>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModePhase {
    pub site: i64,
    pub direction: usize,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDocument {
    pub theta: f64,
    pub direction_one_phase: f64,
    pub detected_port: usize,
    pub sites: Vec<i64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{
        best_end_fidelity, project_coin_pure, pure_fidelity, CoinOutcome, ConditionalPure, PositionDistribution,
    };
    use crate::evolution::evolve_pure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn noiseless(depth: usize, theta: f64) -> MeshOutput {
        let mesh = build_mesh(depth, theta).unwrap();
        propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap()
    }

    #[test]
    fn zero_depth_is_rejected() {
        assert!(build_mesh(0, 0.1).is_err());
    }

    #[test]
    fn one_hadamard_layer() {
        let out = noiseless(1, FRAC_PI_4);
        assert_abs_diff_eq!(out.mode_powers()[[out.lattice().index(1).unwrap(), 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.mode_powers()[[out.lattice().index(-1).unwrap(), 1]], 0.5, epsilon = 1e-15);
        let walk = evolve_pure(&JointPureState::localized(1), FRAC_PI_4, 1).unwrap();
        assert!(out.to_state().unwrap().max_abs_diff(&walk) < 1e-15);
    }

    #[test]
    fn noiseless_mesh_is_the_walk() {
        let out = noiseless(10, PI / 20.0);
        let walk = evolve_pure(&JointPureState::localized(10), PI / 20.0, 10).unwrap();
        let p = PositionDistribution::from_pure(&walk);
        let worst = out.site_powers().iter().zip(p.probabilities()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn explicit_preparation_matches_exact() {
        let mesh = build_mesh(6, 0.3).unwrap();
        let exact = propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap();
        let mesh = mesh.with_preparation(Preparation::ideal_explicit());
        let explicit = propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap();
        assert!(exact.to_state().unwrap().max_abs_diff(&explicit.to_state().unwrap()) < 1e-15);
        // a mis-set preparation splitter changes the outcome
        let bad = build_mesh(6, 0.3)
            .unwrap()
            .with_preparation(Preparation::Explicit { splitter_theta: 0.7, phase: FRAC_PI_2 });
        let off = propagate(&bad, &PhaseMask::zeros(&bad)).unwrap();
        assert!(exact.to_state().unwrap().max_abs_diff(&off.to_state().unwrap()) > 1e-3);
    }

    #[test]
    fn power_is_conserved_layer_by_layer() {
        let mesh = build_mesh(15, 0.4).unwrap();
        let mask = sample_phase_mask(&mesh, 0.7, &mut RngStream::new(1, 0).rng()).unwrap();
        let out = propagate(&mesh, &mask).unwrap();
        assert_eq!(out.layer_powers().len(), 16);
        for w in out.layer_powers() {
            assert_abs_diff_eq!(*w, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn attenuation_scales_power_but_not_conditionals() {
        let mesh = build_mesh(8, 0.2).unwrap();
        let clean = propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap();
        let lossy_mesh = mesh.clone().with_attenuation(0.9).unwrap();
        let lossy = propagate(&lossy_mesh, &PhaseMask::zeros(&lossy_mesh)).unwrap();
        assert_abs_diff_eq!(lossy.total_power(), 0.9f64.powi(16), epsilon = 1e-12);
        let a = project_detection(&clean).unwrap();
        let b = project_detection(&lossy).unwrap();
        assert_abs_diff_eq!(a.probability, b.probability, epsilon = 1e-12);
        let d = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-12);
        assert!(mesh.with_attenuation(0.0).is_err());
    }

    #[test]
    fn layer_global_phase_leaves_powers() {
        let mesh = build_mesh(7, 0.5).unwrap();
        let base = propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap();
        let mut phases = vec![vec![0.0; mesh.mode_count()]; 7];
        phases[3] = vec![1.234; mesh.mode_count()];
        let shifted = propagate(&mesh, &PhaseMask::from_phases(&mesh, phases).unwrap()).unwrap();
        for (a, b) in base.site_powers().iter().zip(shifted.site_powers()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn detection_matches_coin_postselection() {
        for theta in [0.0, PI / 40.0, 0.6] {
            let out = noiseless(12, theta);
            let det = project_detection(&out).unwrap();
            let walk = evolve_pure(&JointPureState::localized(12), theta, 12).unwrap();
            let cond = project_coin_pure(&walk, CoinOutcome::Phi).unwrap();
            assert_abs_diff_eq!(det.probability, cond.probability, epsilon = 1e-12);
            let as_cond = ConditionalPure {
                lattice: det.lattice,
                amplitudes: det.amplitudes.clone(),
                probability: det.probability,
            };
            let overlap: C64 = as_cond.amplitudes.iter().zip(&cond.amplitudes).map(|(a, b)| a.conj() * b).sum();
            assert_abs_diff_eq!(overlap.norm_sqr(), 1.0, epsilon = 1e-12);
            let best = best_end_fidelity(&as_cond.density(), 12, 3);
            let best_walk = best_end_fidelity(&cond.density(), 12, 3);
            assert_abs_diff_eq!(best.fidelity, best_walk.fidelity, epsilon = 1e-12);
        }
    }

    #[test]
    fn z_mesh_detection_is_the_end_superposition() {
        let det = project_detection(&noiseless(9, 0.0)).unwrap();
        assert_abs_diff_eq!(det.probability, 0.5, epsilon = 1e-12);
        let cond = ConditionalPure { lattice: det.lattice, amplitudes: det.amplitudes, probability: det.probability };
        let tau = crate::analysis::TargetState::tau(9, CoinOutcome::Phi).unwrap();
        assert_abs_diff_eq!(pure_fidelity(&cond, &tau), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn preparation_alone_is_always_detected() {
        let mesh = build_mesh(3, 0.2).unwrap();
        let det = project_detection(&mesh.prepared_input()).unwrap();
        assert_abs_diff_eq!(det.probability, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mask_sampling() {
        let mesh = build_mesh(5, 0.1).unwrap();
        let zero = sample_phase_mask(&mesh, 0.0, &mut RngStream::new(3, 0).rng()).unwrap();
        assert!(zero.phases().iter().flatten().all(|&p| p == 0.0));
        let full = sample_phase_mask(&mesh, 1.0, &mut RngStream::new(3, 0).rng()).unwrap();
        assert!(full.phases().iter().flatten().all(|&p| p > 0.0 && p <= TAU));
        let again = sample_phase_mask(&mesh, 1.0, &mut RngStream::new(3, 0).rng()).unwrap();
        assert_eq!(full, again);
        assert!(sample_phase_mask(&mesh, 1.5, &mut RngStream::new(3, 0).rng()).is_err());
    }

    #[test]
    fn uniform_phases_have_small_circular_mean() {
        // |mean e^{iφ}| has standard deviation ~ 1/sqrt(10⁵) ≈ 3.2e-3 per component
        let mesh = build_mesh(1, 0.1).unwrap();
        let mut rng = RngStream::new(17, 0).rng();
        let n = 100_000;
        let mut acc = C64::default();
        for _ in 0..n {
            let m = sample_phase_mask(&mesh, 1.0, &mut rng).unwrap();
            acc += C64::from_polar(1.0, m.phases()[0][0]);
        }
        assert!((acc / n as f64).norm() <= 0.02);
    }

    #[test]
    fn mesh_parity() {
        let out = noiseless(8, 0.35);
        for (i, p) in out.site_powers().iter().enumerate() {
            if out.lattice().site(i).rem_euclid(2) == 1 {
                assert_eq!(*p, 0.0);
            }
        }
    }

    #[test]
    fn random_phases_dephase_on_average() {
        let mesh = build_mesh(10, PI / 20.0).unwrap();
        let single =
            propagate(&mesh, &sample_phase_mask(&mesh, 1.0, &mut RngStream::new(5, 0).rng()).unwrap()).unwrap();
        let clean = propagate(&mesh, &PhaseMask::zeros(&mesh)).unwrap();
        let differs = single.site_powers().iter().zip(clean.site_powers()).any(|(a, b)| (a - b).abs() > 1e-6);
        assert!(differs);
        let avg = average_position_density(&mesh, 1.0, 2000, 42).unwrap();
        let (diag, off) = avg.coherence_split();
        assert!(off < 0.05 * diag, "off {off} diag {diag}");
    }

    #[test]
    fn document_lists_nodes_and_phases() {
        let mesh = build_mesh(3, 0.25).unwrap();
        let mask = sample_phase_mask(&mesh, 1.0, &mut RngStream::new(9, 0).rng()).unwrap();
        let doc = mesh.to_document(Some(&mask));
        assert_eq!(doc.layers.len(), 3);
        assert_eq!(doc.layers[2].nodes.len(), 3);
        assert_eq!(doc.projection.sites, vec![-3, -1, 1, 3]);
        let json = serde_json::to_string(&doc).unwrap();
        let back: MeshDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
