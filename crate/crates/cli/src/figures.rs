//! Ready-made configs for every figure panel.

use crate::config::{Angle, CatPanel, ExperimentConfig, ExperimentKind, NoiseConfig, Postselect, StepRange, SweepAxis};
use coinwalk_core::noise::NoiseMode;

pub const FIGURE_IDS: [&str; 17] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a",
    "fig5b", "fig5c", "fig6", "fig5",
];

fn distribution(pi_over: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Distribution);
    c.walk.theta = Angle::pi_over(pi_over);
    c.walk.steps = 100;
    c
}

fn steps_sweep(pi_over: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::FidelitySweep);
    c.walk.theta = Angle::pi_over(pi_over);
    c.fidelity_sweep.axis = SweepAxis::Steps;
    c.fidelity_sweep.k_max = 2;
    c.fidelity_sweep.step_range = StepRange { start: 1, stop: 100, step: 1 };
    c
}

fn cat(panels: Vec<CatPanel>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::GaussianCat);
    c.walk.theta = Angle::pi_over(20.0);
    c.postselect = Postselect::J0;
    c.gaussian_cat.panels = panels;
    c.noise = Some(NoiseConfig { mode: NoiseMode::Trajectory, realizations: 100, ..NoiseConfig::default() });
    c
}

/// Config reproducing figure panel `id`; both panels of a pair share one run
/// where a single sweep yields both.
pub fn figure_config(id: &str) -> Option<ExperimentConfig> {
    let cfg = match id {
        "fig1a" => distribution(4.0),
        "fig1b" => distribution(8.0),
        "fig1c" => distribution(10.0),
        "fig1d" => distribution(20.0),
        "fig1e" => ExperimentConfig::new(ExperimentKind::CriticalTheta),
        "fig2a" | "fig2b" => {
            let mut c = ExperimentConfig::new(ExperimentKind::FidelitySweep);
            c.fidelity_sweep.steps = vec![10, 30, 50, 100];
            c
        }
        "fig3" => {
            let mut c = ExperimentConfig::new(ExperimentKind::NoiseSweep);
            c.walk.steps = 100;
            c.noise = Some(NoiseConfig::default());
            c
        }
        "fig4a" | "fig4c" => steps_sweep(40.0),
        "fig4b" | "fig4d" => steps_sweep(100.0),
        "fig5a" => cat(vec![CatPanel::A]),
        "fig5b" => cat(vec![CatPanel::B]),
        "fig5c" => cat(vec![CatPanel::C]),
        "fig5" => cat(vec![CatPanel::A, CatPanel::B, CatPanel::C]),
        "fig6" => ExperimentConfig::new(ExperimentKind::OpticsVerify),
        _ => return None,
    };
    Some(cfg)
}
