//! Experiment configuration as read from JSON.
//!
//! Unknown keys are rejected everywhere. Angles may be given as numbers
//! (radians) or as short expressions such as `"pi/20"` or `"2pi/5"`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use coinwalk_core::noise::{NoiseMode, NoiseSpec};
use coinwalk_core::InitialState;
use serde::{de, Deserialize, Deserializer, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), reason: reason.into() }
}

/// An angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub fn pi_over(d: f64) -> Self {
        Angle(PI / d)
    }

    pub fn parse(s: &str) -> Option<f64> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        let s = s.replace('π', "pi");
        if let Ok(v) = s.parse::<f64>() {
            return Some(v);
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d.parse::<f64>().ok()?)),
            None => (s.as_str(), None),
        };
        let coef = num.strip_suffix("pi")?.trim_end_matches('*');
        let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
        Some(coef * PI / den.unwrap_or(1.0))
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or an expression like \"pi/20\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                Angle::parse(v).map(Angle).ok_or_else(|| E::custom(format!("cannot parse angle {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Distribution,
    FidelitySweep,
    NoiseSweep,
    GaussianCat,
    CriticalTheta,
    OpticsVerify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Postselect {
    #[default]
    None,
    J0,
    J1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub theta: Angle,
    pub steps: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self { theta: Angle::pi_over(20.0), steps: 100 }
    }
}

fn default_realizations() -> usize {
    100
}

fn default_mode() -> NoiseMode {
    NoiseMode::Trajectory
}

/// Dephasing settings. Give either `delta` (lower end of the `β` range) or
/// `amplitude` (`f = 1 - δ`), not both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default = "default_mode")]
    pub mode: NoiseMode,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { delta: None, amplitude: None, mode: default_mode(), realizations: default_realizations(), seed: 0 }
    }
}

impl NoiseConfig {
    pub fn delta(&self) -> f64 {
        match (self.delta, self.amplitude) {
            (Some(d), _) => d,
            (None, Some(f)) => 1.0 - f,
            (None, None) => 1.0,
        }
    }

    pub fn spec(&self) -> Result<NoiseSpec, ConfigError> {
        NoiseSpec::new(self.delta(), self.mode).map_err(|e| invalid("noise.delta", e.to_string()))
    }

    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.delta.is_some() && self.amplitude.is_some() {
            return Err(invalid(path, "give either delta or amplitude, not both"));
        }
        if let Some(d) = self.delta {
            unit_interval(&format!("{path}.delta"), d)?;
        }
        if let Some(f) = self.amplitude {
            unit_interval(&format!("{path}.amplitude"), f)?;
        }
        if self.realizations == 0 {
            return Err(invalid(format!("{path}.realizations"), "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Svg]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// `points` evenly spaced angles from `start` to `stop`, both included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleGrid {
    pub start: Angle,
    pub stop: Angle,
    pub points: usize,
}

impl AngleGrid {
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.start.0, self.stop.0);
        match self.points {
            0 => vec![],
            1 => vec![a],
            n => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
        }
    }

    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        theta_range(&format!("{path}.start"), self.start.0)?;
        theta_range(&format!("{path}.stop"), self.stop.0)?;
        if self.points == 0 {
            return Err(invalid(format!("{path}.points"), "must be at least 1"));
        }
        Ok(())
    }
}

/// `start, start + step, …` up to and including `stop`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRange {
    pub start: usize,
    pub stop: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

impl StepRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }

    fn validate(&self, path: &str, min: usize) -> Result<(), ConfigError> {
        if self.step == 0 {
            return Err(invalid(format!("{path}.step"), "must be at least 1"));
        }
        if self.start < min {
            return Err(invalid(format!("{path}.start"), format!("must be at least {min}")));
        }
        if self.stop < self.start {
            return Err(invalid(format!("{path}.stop"), "must not be below start"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    #[default]
    Theta,
    Steps,
}

/// Fidelity against `(|-N+k⟩ ± |N-k⟩)/√2` along θ (Fig. 2 style, one curve
/// per entry of `steps`) or along N at the walk's θ (Fig. 4 style, one curve
/// per k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelitySweepConfig {
    pub axis: SweepAxis,
    pub thetas: AngleGrid,
    /// Curves for the θ axis; empty means `walk.steps` only.
    pub steps: Vec<usize>,
    /// Grid for the N axis.
    pub step_range: StepRange,
    pub k_max: usize,
}

impl Default for FidelitySweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Theta,
            thetas: AngleGrid { start: Angle(0.0), stop: Angle(PI / 4.0), points: 201 },
            steps: vec![],
            step_range: StepRange { start: 1, stop: 100, step: 1 },
            k_max: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSweepConfig {
    pub thetas: Vec<Angle>,
    /// Noise amplitudes `f`; each run draws `β_t ~ U[1 - f, 1]`.
    pub amplitudes: Vec<f64>,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        Self {
            thetas: vec![Angle(2.0 * PI / 5.0), Angle::pi_over(4.0), Angle::pi_over(20.0)],
            amplitudes: vec![0.05, 0.5, 1.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatPanel {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatSnapshot {
    pub sigma: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatSweep {
    pub sigma: f64,
    pub steps: StepRange,
    /// Further coin angles reported next to `walk.theta`.
    #[serde(default)]
    pub extra_thetas: Vec<Angle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatNoise {
    pub sigma: f64,
    pub steps: usize,
    pub delta: f64,
    /// Other `(sigma, steps)` settings reported for comparison.
    #[serde(default)]
    pub also: Vec<CatSnapshot>,
}

/// Gaussian initial state experiments, one sub-report per panel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussianCatConfig {
    pub panels: Vec<CatPanel>,
    pub snapshot: CatSnapshot,
    pub sweep: CatSweep,
    pub noise: CatNoise,
}

impl Default for GaussianCatConfig {
    fn default() -> Self {
        Self {
            panels: vec![CatPanel::A, CatPanel::B, CatPanel::C],
            snapshot: CatSnapshot { sigma: 10.0, steps: 50 },
            sweep: CatSweep {
                sigma: 2.0,
                steps: StepRange { start: 1, stop: 100, step: 1 },
                extra_thetas: vec![Angle::pi_over(40.0)],
            },
            noise: CatNoise {
                sigma: 10.0,
                steps: 50,
                delta: 0.9,
                also: vec![CatSnapshot { sigma: 2.0, steps: 50 }, CatSnapshot { sigma: 10.0, steps: 30 }],
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalThetaConfig {
    pub ratios: Vec<f64>,
    pub steps: StepRange,
}

impl Default for CriticalThetaConfig {
    fn default() -> Self {
        Self { ratios: vec![2.0, 3.0, 4.0], steps: StepRange { start: 20, stop: 100, step: 1 } }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsConfig {
    /// Mesh depths checked against the abstract walk.
    pub depths: Vec<usize>,
    pub thetas: Vec<Angle>,
    /// Phase-noise rate `p` for the averaged-mask statistic.
    pub phase_rate: f64,
    pub masks: usize,
    pub explicit_preparation: bool,
    pub attenuation: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            depths: vec![1, 2, 5, 10, 20],
            thetas: vec![Angle::pi_over(4.0), Angle::pi_over(20.0), Angle::pi_over(40.0)],
            phase_rate: 1.0,
            masks: 2000,
            explicit_preparation: false,
            attenuation: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub walk: WalkConfig,
    #[serde(default)]
    pub initial: InitialState,
    /// Absent means a noiseless, pure-state run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub postselect: Postselect,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub fidelity_sweep: FidelitySweepConfig,
    #[serde(default)]
    pub noise_sweep: NoiseSweepConfig,
    #[serde(default)]
    pub gaussian_cat: GaussianCatConfig,
    #[serde(default)]
    pub critical_theta: CriticalThetaConfig,
    #[serde(default)]
    pub optics: OpticsConfig,
}

fn theta_range(path: &str, theta: f64) -> Result<(), ConfigError> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(invalid(path, format!("θ must lie in [0, π/2], got {theta}")));
    }
    Ok(())
}

fn unit_interval(path: &str, v: f64) -> Result<(), ConfigError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(path, format!("must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(path, format!("must be positive, got {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            walk: WalkConfig::default(),
            initial: InitialState::default(),
            noise: None,
            postselect: Postselect::None,
            output: OutputConfig::default(),
            fidelity_sweep: FidelitySweepConfig::default(),
            noise_sweep: NoiseSweepConfig::default(),
            gaussian_cat: GaussianCatConfig::default(),
            critical_theta: CriticalThetaConfig::default(),
            optics: OpticsConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    /// Checks every numeric field before anything is computed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        theta_range("walk.theta", self.walk.theta.0)?;
        match &self.initial {
            InitialState::Gaussian { sigma, cutoff } => {
                positive("initial.sigma", *sigma)?;
                if !(*cutoff > 0.0 && *cutoff <= 1e-6) {
                    return Err(invalid("initial.cutoff", format!("must lie in (0, 1e-6], got {cutoff}")));
                }
            }
            InitialState::Custom { amplitudes, .. } if amplitudes.is_empty() => {
                return Err(invalid("initial.amplitudes", "must not be empty"));
            }
            _ => {}
        }
        self.initial.build(0).map_err(|e| invalid("initial", e.to_string()))?;
        if let Some(n) = &self.noise {
            n.validate("noise")?;
        }

        let fs = &self.fidelity_sweep;
        fs.thetas.validate("fidelity_sweep.thetas")?;
        fs.step_range.validate("fidelity_sweep.step_range", 1)?;
        if let Some(i) = fs.steps.iter().position(|&n| n == 0) {
            return Err(invalid(format!("fidelity_sweep.steps[{i}]"), "must be at least 1"));
        }

        let ns = &self.noise_sweep;
        for (i, t) in ns.thetas.iter().enumerate() {
            theta_range(&format!("noise_sweep.thetas[{i}]"), t.0)?;
        }
        for (i, f) in ns.amplitudes.iter().enumerate() {
            unit_interval(&format!("noise_sweep.amplitudes[{i}]"), *f)?;
        }

        let gc = &self.gaussian_cat;
        positive("gaussian_cat.snapshot.sigma", gc.snapshot.sigma)?;
        positive("gaussian_cat.sweep.sigma", gc.sweep.sigma)?;
        gc.sweep.steps.validate("gaussian_cat.sweep.steps", 1)?;
        for (i, t) in gc.sweep.extra_thetas.iter().enumerate() {
            theta_range(&format!("gaussian_cat.sweep.extra_thetas[{i}]"), t.0)?;
        }
        positive("gaussian_cat.noise.sigma", gc.noise.sigma)?;
        unit_interval("gaussian_cat.noise.delta", gc.noise.delta)?;
        for (i, s) in gc.noise.also.iter().enumerate() {
            positive(&format!("gaussian_cat.noise.also[{i}].sigma"), s.sigma)?;
        }

        let ct = &self.critical_theta;
        ct.steps.validate("critical_theta.steps", 2)?;
        for (i, r) in ct.ratios.iter().enumerate() {
            if !(*r > 1.0 && r.is_finite()) {
                return Err(invalid(format!("critical_theta.ratios[{i}]"), format!("must exceed 1, got {r}")));
            }
        }

        let op = &self.optics;
        if let Some(i) = op.depths.iter().position(|&d| d == 0) {
            return Err(invalid(format!("optics.depths[{i}]"), "must be at least 1"));
        }
        for (i, t) in op.thetas.iter().enumerate() {
            theta_range(&format!("optics.thetas[{i}]"), t.0)?;
        }
        unit_interval("optics.phase_rate", op.phase_rate)?;
        if !(op.attenuation > 0.0 && op.attenuation <= 1.0) {
            return Err(invalid("optics.attenuation", format!("must lie in (0, 1], got {}", op.attenuation)));
        }
        if op.masks == 0 {
            return Err(invalid("optics.masks", "must be at least 1"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "list at least one format"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_expressions() {
        assert_eq!(Angle::parse("pi/20"), Some(PI / 20.0));
        assert_eq!(Angle::parse("2pi/5"), Some(2.0 * PI / 5.0));
        assert_eq!(Angle::parse("2*pi/5"), Some(2.0 * PI / 5.0));
        assert_eq!(Angle::parse(" π / 4 "), Some(PI / 4.0));
        assert_eq!(Angle::parse("0.25"), Some(0.25));
        assert_eq!(Angle::parse("pie"), None);
        assert_eq!(Angle::parse("pi/x"), None);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg =
            ExperimentConfig::from_json(r#"{"experiment":"distribution","walk":{"theta":"pi/4","steps":10}}"#).unwrap();
        assert_eq!(cfg.walk.steps, 10);
        assert_eq!(cfg.initial, InitialState::Origin {});
        assert!(cfg.noise.is_none());
        assert_eq!(cfg.output.directory, PathBuf::from("out"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"experiment":"distribution","colour":1}"#,
            r#"{"experiment":"distribution","walk":{"theta":0.1,"steps":3,"x":0}}"#,
            r#"{"experiment":"distribution","noise":{"delta":0.5,"sigma":1}}"#,
            r#"{"experiment":"distribution","initial":{"kind":"origin","sigma":1}}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(ConfigError::Parse(_))), "{text}");
        }
    }

    fn path_of(text: &str) -> String {
        match ExperimentConfig::from_json(text) {
            Err(ConfigError::Invalid { path, .. }) => path,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_field() {
        assert_eq!(path_of(r#"{"experiment":"distribution","walk":{"theta":2.0,"steps":3}}"#), "walk.theta");
        assert_eq!(path_of(r#"{"experiment":"distribution","walk":{"theta":-0.1,"steps":3}}"#), "walk.theta");
        assert_eq!(path_of(r#"{"experiment":"noise-sweep","noise":{"delta":1.5}}"#), "noise.delta");
        assert_eq!(path_of(r#"{"experiment":"noise-sweep","noise":{"delta":0.5,"amplitude":0.5}}"#), "noise");
        assert_eq!(
            path_of(r#"{"experiment":"noise-sweep","noise_sweep":{"amplitudes":[0.5,-1]}}"#),
            "noise_sweep.amplitudes[1]"
        );
        assert_eq!(
            path_of(r#"{"experiment":"gaussian-cat","initial":{"kind":"gaussian","sigma":0}}"#),
            "initial.sigma"
        );
        assert_eq!(
            path_of(r#"{"experiment":"critical-theta","critical_theta":{"ratios":[0.5]}}"#),
            "critical_theta.ratios[0]"
        );
        assert_eq!(path_of(r#"{"experiment":"optics-verify","optics":{"thetas":["pi"]}}"#), "optics.thetas[0]");
    }

    #[test]
    fn noise_amplitude_maps_to_delta() {
        let n = NoiseConfig { amplitude: Some(0.3), ..NoiseConfig::default() };
        assert!((n.delta() - 0.7).abs() < 1e-15);
        assert_eq!(NoiseConfig::default().delta(), 1.0);
    }

    #[test]
    fn grids() {
        let g = AngleGrid { start: Angle(0.0), stop: Angle(1.0), points: 5 };
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(StepRange { start: 2, stop: 9, step: 3 }.values(), vec![2, 5, 8]);
    }

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::new(ExperimentKind::GaussianCat);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
