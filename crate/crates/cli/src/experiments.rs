//! One runner per experiment kind. Each returns the files it wants written
//! and a JSON summary; nothing touches the filesystem here.

use std::f64::consts::PI;

use coinwalk_core::analysis::{
    best_end_fidelity, coin_entropy, critical_theta, fidelity, state_fidelity, variance, BestEnd, CoinOutcome,
    PositionDensity, PositionDistribution, Sign, TargetState,
};
use coinwalk_core::evolution::evolve_pure;
use coinwalk_core::noise::{NoiseMode, NoiseSpec, RngStream};
use coinwalk_core::optics::{
    average_position_density, build_mesh, project_detection, propagate, sample_phase_mask, OpticalMesh, PhaseMask,
    Preparation,
};
use coinwalk_core::{InitialState, JointPureState, WalkError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    CatPanel, CatSnapshot, ConfigError, ExperimentConfig, ExperimentKind, Format, NoiseConfig, Postselect, SweepAxis,
};
use crate::output::{Artifacts, Cell, Table};
use crate::svg::{Chart, Series, Style};
use crate::walk::{ends_are_maxima, evolve, excess_kurtosis, ranked_sites, ActiveNoise, WalkState};

type Curve = Vec<(f64, f64)>;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug)]
pub struct RunOutput {
    pub artifacts: Artifacts,
    pub summary: Value,
}

pub fn run(cfg: &ExperimentConfig) -> RunResult<RunOutput> {
    cfg.validate()?;
    let mut out = Outputs::new(cfg);
    let summary = match cfg.experiment {
        ExperimentKind::Distribution => run_distribution(cfg, &mut out)?,
        ExperimentKind::FidelitySweep => run_fidelity_sweep(cfg, &mut out)?,
        ExperimentKind::NoiseSweep => run_noise_sweep(cfg, &mut out)?,
        ExperimentKind::GaussianCat => run_gaussian_cat(cfg, &mut out)?,
        ExperimentKind::CriticalTheta => run_critical_theta(cfg, &mut out)?,
        ExperimentKind::OpticsVerify => run_optics_verify(cfg, &mut out)?,
    };
    out.json("summary.json", &summary);
    Ok(RunOutput { artifacts: out.artifacts, summary })
}

/// Artifact sink that drops formats the config did not ask for.
struct Outputs {
    artifacts: Artifacts,
    csv: bool,
    json: bool,
    svg: bool,
}

impl Outputs {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            artifacts: Artifacts::default(),
            csv: cfg.output.wants(Format::Csv),
            json: cfg.output.wants(Format::Json),
            svg: cfg.output.wants(Format::Svg),
        }
    }

    fn csv(&mut self, path: &str, table: &Table) {
        if self.csv {
            self.artifacts.add(path, table.to_csv());
        }
    }

    fn svg(&mut self, path: &str, chart: &Chart) {
        if self.svg {
            self.artifacts.add(path, chart.render());
        }
    }

    fn json<T: Serialize>(&mut self, path: &str, value: &T) {
        if self.json {
            self.artifacts.add_json(path, value);
        }
    }
}

fn distribution_table(dist: &PositionDistribution) -> Table {
    let mut t = Table::new(["n", "p"]);
    for (n, p) in dist.iter() {
        t.push(vec![n.into(), p.into()]);
    }
    t
}

fn distribution_points(dist: &PositionDistribution) -> Vec<(f64, f64)> {
    dist.iter().map(|(n, p)| (n as f64, p)).collect()
}

fn top(dist: &PositionDistribution, k: usize) -> Vec<Value> {
    ranked_sites(dist).into_iter().take(k).map(|(n, p)| json!({ "site": n, "p": p })).collect()
}

fn sign_cell(s: Sign) -> Cell {
    Cell::Int(s.value() as i64)
}

fn noise_json(noise: Option<ActiveNoise>) -> Value {
    match noise {
        None => Value::Null,
        Some(n) => json!({
            "delta": n.spec.delta(),
            "mode": n.spec.mode(),
            "realizations": n.realizations,
            "seed": n.seed,
        }),
    }
}

/// `P(n)` after `walk.steps` steps, traced or post-selected.
fn run_distribution(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let (theta, steps) = (cfg.walk.theta.0, cfg.walk.steps);
    let noise = ActiveNoise::from_config(cfg.noise.as_ref());
    let evolved = evolve(&cfg.initial, theta, steps, noise)?;
    let analysed = evolved.state.analysed(cfg.postselect)?;
    let dist = analysed.distribution()?;

    out.csv("distribution.csv", &distribution_table(&dist));
    out.svg(
        "distribution.svg",
        &Chart::new(format!("P(n), θ = {}, N = {steps}", pi_fraction(theta)), "n", "P(n)", Style::Bars)
            .with(Series::new("P(n)", distribution_points(&dist))),
    );
    let entropy = match &evolved.state {
        WalkState::Pure(psi) => Some(coin_entropy(psi)),
        WalkState::Mixed(_) => None,
    };
    Ok(json!({
        "experiment": "distribution",
        "theta": theta,
        "steps": steps,
        "postselect": cfg.postselect,
        "noise": noise_json(noise),
        "postselection_probability": analysed.probability,
        "total": dist.total(),
        "mean": dist.mean(),
        "variance": variance(&dist),
        "coin_entropy": entropy,
        "end_sites_are_maxima": ends_are_maxima(&dist, steps),
        "top_sites": top(&dist, 4),
    }))
}

/// Best end-superposition fidelity for the traced state and both branches.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub steps: usize,
    pub theta: f64,
    pub traced: BestEnd,
    pub branches: [Option<(BestEnd, f64)>; 2],
}

fn sweep_point(
    initial: &InitialState,
    theta: f64,
    steps: usize,
    k_max: usize,
    noise: Option<ActiveNoise>,
) -> RunResult<SweepPoint> {
    let state = evolve(initial, theta, steps, noise)?.state;
    let traced = best_end_fidelity(&state.traced(), steps, k_max);
    let branch = |o: CoinOutcome| match state.conditional(o) {
        Ok(c) => Ok(Some((best_end_fidelity(&c.density, steps, k_max), c.probability))),
        Err(WalkError::DegeneratePostselection { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(SweepPoint { steps, theta, traced, branches: [branch(CoinOutcome::Phi)?, branch(CoinOutcome::PhiPerp)?] })
}

/// θ sweep at fixed N, one point per grid angle.
pub fn theta_sweep(
    initial: &InitialState,
    steps: usize,
    thetas: &[f64],
    k_max: usize,
    noise: Option<ActiveNoise>,
) -> RunResult<Vec<SweepPoint>> {
    thetas.par_iter().map(|&t| sweep_point(initial, t, steps, k_max, noise)).collect()
}

/// Indices where the traced argmax `k` changes, and whether it ever drops.
pub fn ripple_stats(points: &[SweepPoint]) -> (usize, bool) {
    let ks: Vec<usize> = points.iter().map(|p| p.traced.k).collect();
    let increments = ks.windows(2).filter(|w| w[1] > w[0]).count();
    let monotone = ks.windows(2).all(|w| w[1] >= w[0]);
    (increments, monotone)
}

fn best_sign(rho: &PositionDensity, l: usize) -> (f64, Sign) {
    Sign::both()
        .into_iter()
        .map(|s| (fidelity(rho, &TargetState::end_superposition(l, s).expect("l ≥ 1")), s))
        .fold((f64::NEG_INFINITY, Sign::Plus), |a, b| if b.0 > a.0 { b } else { a })
}

fn run_fidelity_sweep(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let fs = &cfg.fidelity_sweep;
    let noise = ActiveNoise::from_config(cfg.noise.as_ref());
    match fs.axis {
        SweepAxis::Theta => {
            let thetas = fs.thetas.values();
            let curves = if fs.steps.is_empty() { vec![cfg.walk.steps] } else { fs.steps.clone() };
            let mut table = Table::new([
                "steps",
                "theta",
                "traced_fidelity",
                "traced_k",
                "traced_sign",
                "j0_fidelity",
                "j0_k",
                "j0_sign",
                "j0_probability",
                "j1_fidelity",
                "j1_k",
                "j1_sign",
                "j1_probability",
            ]);
            let mut traced_chart = Chart::new("Traced state", "θ", "max fidelity", Style::Line);
            let mut cond_chart = Chart::new("Conditional state (j = 0)", "θ", "max fidelity", Style::Line);
            let mut per_curve = Vec::new();
            for &steps in &curves {
                let points = theta_sweep(&cfg.initial, steps, &thetas, fs.k_max, noise)?;
                for p in &points {
                    let mut row: Vec<Cell> = vec![
                        p.steps.into(),
                        p.theta.into(),
                        p.traced.fidelity.into(),
                        p.traced.k.into(),
                        sign_cell(p.traced.sign),
                    ];
                    for b in &p.branches {
                        match b {
                            Some((best, prob)) => {
                                row.extend([best.fidelity.into(), best.k.into(), sign_cell(best.sign), (*prob).into()])
                            }
                            None => row.extend([f64::NAN.into(), "".into(), "".into(), 0.0.into()]),
                        }
                    }
                    table.push(row);
                }
                let (increments, monotone) = ripple_stats(&points);
                let dominated =
                    points.iter().filter(|p| p.branches[0].is_none_or(|(b, _)| b.fidelity < p.traced.fidelity)).count();
                traced_chart = traced_chart.with(Series::new(
                    format!("N = {steps}"),
                    points.iter().map(|p| (p.theta, p.traced.fidelity)).collect(),
                ));
                cond_chart = cond_chart.with(Series::new(
                    format!("N = {steps}"),
                    points.iter().map(|p| (p.theta, p.branches[0].map_or(f64::NAN, |(b, _)| b.fidelity))).collect(),
                ));
                per_curve.push(json!({
                    "steps": steps,
                    "argmax_k_increments": increments,
                    "argmax_k_non_decreasing": monotone,
                    "points_where_conditional_below_traced": dominated,
                }));
            }
            out.csv("fidelity_sweep.csv", &table);
            out.svg("fidelity_traced.svg", &traced_chart);
            out.svg("fidelity_conditional.svg", &cond_chart);
            Ok(json!({
                "experiment": "fidelity-sweep",
                "axis": "theta",
                "k_max": fs.k_max,
                "noise": noise_json(noise),
                "curves": per_curve,
            }))
        }
        SweepAxis::Steps => {
            let theta = cfg.walk.theta.0;
            let steps = fs.step_range.values();
            let rows: Vec<Vec<Vec<Cell>>> = steps
                .par_iter()
                .map(|&n| -> RunResult<Vec<Vec<Cell>>> {
                    let state = evolve(&cfg.initial, theta, n, noise)?.state;
                    let traced = state.traced();
                    let conds: Vec<Option<PositionDensity>> = [CoinOutcome::Phi, CoinOutcome::PhiPerp]
                        .into_iter()
                        .map(|o| state.conditional(o).ok().map(|c| c.density))
                        .collect();
                    let mut rows = Vec::new();
                    for k in (0..=fs.k_max).filter(|&k| k < n) {
                        let (tf, ts) = best_sign(&traced, n - k);
                        let mut row: Vec<Cell> = vec![n.into(), k.into(), tf.into(), sign_cell(ts)];
                        for c in &conds {
                            match c {
                                Some(rho) => {
                                    let (f, s) = best_sign(rho, n - k);
                                    row.extend([f.into(), sign_cell(s)]);
                                }
                                None => row.extend([f64::NAN.into(), "".into()]),
                            }
                        }
                        rows.push(row);
                    }
                    Ok(rows)
                })
                .collect::<RunResult<_>>()?;
            let mut table = Table::new([
                "steps",
                "k",
                "traced_fidelity",
                "traced_sign",
                "j0_fidelity",
                "j0_sign",
                "j1_fidelity",
                "j1_sign",
            ]);
            let mut traced_chart =
                Chart::new(format!("Traced state, θ = {}", pi_fraction(theta)), "N", "fidelity", Style::Line);
            let mut cond_chart = Chart::new(
                format!("Conditional state (j = 0), θ = {}", pi_fraction(theta)),
                "N",
                "fidelity",
                Style::Line,
            );
            let mut series: Vec<(Curve, Curve)> = vec![Default::default(); fs.k_max + 1];
            for row in rows.into_iter().flatten() {
                if let (Cell::Int(n), Cell::Int(k), Cell::Real(tf), Cell::Real(cf)) =
                    (&row[0], &row[1], &row[2], &row[4])
                {
                    series[*k as usize].0.push((*n as f64, *tf));
                    series[*k as usize].1.push((*n as f64, *cf));
                }
                table.push(row);
            }
            for (k, (t, c)) in series.into_iter().enumerate() {
                traced_chart = traced_chart.with(Series::new(format!("k = {k}"), t));
                cond_chart = cond_chart.with(Series::new(format!("k = {k}"), c));
            }
            out.csv("fidelity_vs_steps.csv", &table);
            out.svg("fidelity_vs_steps_traced.svg", &traced_chart);
            out.svg("fidelity_vs_steps_conditional.svg", &cond_chart);
            Ok(json!({
                "experiment": "fidelity-sweep",
                "axis": "steps",
                "theta": theta,
                "k_max": fs.k_max,
                "noise": noise_json(noise),
                "rows": table.len(),
            }))
        }
    }
}

fn sweep_noise(cfg: &ExperimentConfig) -> NoiseConfig {
    cfg.noise.clone().unwrap_or_default()
}

/// Averaged `P(n)` on a θ × noise-amplitude grid.
fn run_noise_sweep(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let steps = cfg.walk.steps;
    let base = sweep_noise(cfg);
    let mut cells = Vec::new();
    for (i, theta) in cfg.noise_sweep.thetas.iter().enumerate() {
        let mut chart = Chart::new(format!("θ = {}, N = {steps}", pi_fraction(theta.0)), "n", "P(n)", Style::Line);
        for (j, &f) in cfg.noise_sweep.amplitudes.iter().enumerate() {
            let ncfg = NoiseConfig { delta: Some(1.0 - f), amplitude: None, ..base.clone() };
            let noise = ActiveNoise::from_config(Some(&ncfg));
            let evolved = evolve(&cfg.initial, theta.0, steps, noise)?;
            let dist = evolved.state.analysed(cfg.postselect)?.distribution()?;
            let stem = format!("noise_sweep/theta{i}_f{j}");
            out.csv(&format!("{stem}.csv"), &distribution_table(&dist));
            if !evolved.realizations.is_empty() {
                let m = evolved.realizations.len() as f64;
                let mut spread = Table::new(["n", "p_min", "p_max", "p_std"]);
                for (k, (n, mean)) in dist.iter().enumerate() {
                    let col = evolved.realizations.iter().map(|r| r[k]);
                    let lo = col.clone().fold(f64::INFINITY, f64::min);
                    let hi = col.clone().fold(f64::NEG_INFINITY, f64::max);
                    let var = col.map(|p| (p - mean) * (p - mean)).sum::<f64>() / m;
                    spread.push(vec![n.into(), lo.into(), hi.into(), var.sqrt().into()]);
                }
                out.csv(&format!("{stem}_spread.csv"), &spread);
            }
            chart = chart.with(Series::new(format!("f = {f}"), distribution_points(&dist)));
            let n = steps as i64;
            cells.push(json!({
                "theta": theta.0,
                "amplitude": f,
                "file": format!("{stem}.csv"),
                "noise": noise_json(noise),
                "p_end_plus": dist.at(n),
                "p_end_minus": dist.at(-n),
                "end_sites_are_maxima": ends_are_maxima(&dist, steps),
                "variance": variance(&dist),
                "excess_kurtosis": excess_kurtosis(&dist),
                "top_sites": top(&dist, 4),
            }));
        }
        out.svg(&format!("noise_sweep/theta{i}.svg"), &chart);
    }
    Ok(
        json!({ "experiment": "noise-sweep", "steps": steps, "realizations": base.realizations, "seed": base.seed, "cells": cells }),
    )
}

/// Gaussian cat target `(G(+N) ± G(-N))` with lobes centred on `±steps`;
/// returns the better sign.
pub fn cat_fidelity(rho: &PositionDensity, steps: usize, sigma: f64) -> RunResult<(f64, Sign)> {
    let mut best = (f64::NEG_INFINITY, Sign::Plus);
    for s in Sign::both() {
        let target = TargetState::gaussian_cat(rho.lattice(), 2 * steps, sigma, s)?;
        let f = fidelity(rho, &target);
        if f > best.0 {
            best = (f, s);
        }
    }
    Ok(best)
}

/// Postselected cat fidelity after `steps` steps from a Gaussian of width `sigma`.
pub fn cat_point(theta: f64, steps: usize, sigma: f64, postselect: Postselect) -> RunResult<(f64, Sign, f64)> {
    let init = InitialState::Gaussian { sigma, cutoff: coinwalk_core::lattice::DEFAULT_GAUSSIAN_CUTOFF };
    let state = evolve(&init, theta, steps, None)?.state;
    let c = state.analysed(postselect)?;
    let (f, s) = cat_fidelity(&c.density, steps, sigma)?;
    Ok((f, s, c.probability))
}

/// Fidelity between the noiseless and the dephased analysed state.
#[derive(Clone, Debug, Serialize)]
pub struct NoiseComparison {
    pub sigma: f64,
    pub steps: usize,
    pub delta: f64,
    pub realizations: usize,
    pub seed: u64,
    /// `⟨χ|ρ|χ⟩` with `ρ` the Monte-Carlo mean.
    pub fidelity: f64,
    /// Same with `ρ` from constant `β = (1 + δ)/2`.
    pub exact_mean_fidelity: f64,
    pub root_fidelity: f64,
    #[serde(skip)]
    pub clean: Vec<f64>,
    #[serde(skip)]
    pub noisy: Vec<f64>,
    #[serde(skip)]
    pub sites: Vec<i64>,
}

pub fn noise_comparison(
    theta: f64,
    setting: &CatSnapshot,
    delta: f64,
    noise: &NoiseConfig,
    postselect: Postselect,
) -> RunResult<NoiseComparison> {
    let init = InitialState::Gaussian { sigma: setting.sigma, cutoff: coinwalk_core::lattice::DEFAULT_GAUSSIAN_CUTOFF };
    let steps = setting.steps;
    let clean = evolve(&init, theta, steps, None)?.state.analysed(postselect)?;
    let Some(chi) = clean.amplitudes.clone() else {
        return Err(ConfigError::Invalid {
            path: "postselect".into(),
            reason: "the noise comparison needs a pure reference state; use j0 or j1".into(),
        }
        .into());
    };
    let mode = if noise.mode == NoiseMode::Off { NoiseMode::Trajectory } else { noise.mode };
    let active = ActiveNoise { spec: NoiseSpec::new(delta, mode)?, realizations: noise.realizations, seed: noise.seed };
    let noisy = evolve(&init, theta, steps, Some(active))?.state.analysed(postselect)?;
    let f = state_fidelity(&noisy.density, &chi)?;
    let exact = ActiveNoise { spec: NoiseSpec::new(delta, NoiseMode::ExactMean)?, ..active };
    let exact_state = evolve(&init, theta, steps, Some(exact))?.state.analysed(postselect)?;
    let fe = state_fidelity(&exact_state.density, &chi)?;
    let lattice = clean.density.lattice();
    Ok(NoiseComparison {
        sigma: setting.sigma,
        steps,
        delta,
        realizations: noise.realizations,
        seed: noise.seed,
        fidelity: f,
        exact_mean_fidelity: fe,
        root_fidelity: f.max(0.0).sqrt(),
        clean: clean.distribution()?.probabilities().to_vec(),
        noisy: noisy.distribution()?.probabilities().to_vec(),
        sites: lattice.sites().collect(),
    })
}

fn lobe_stats(dist: &PositionDistribution, positive: bool) -> Value {
    let side: Vec<(f64, f64)> =
        dist.iter().filter(|(n, _)| if positive { *n > 0 } else { *n < 0 }).map(|(n, p)| (n as f64, p)).collect();
    let w: f64 = side.iter().map(|(_, p)| p).sum();
    if w == 0.0 {
        return json!({ "weight": 0.0 });
    }
    let mean = side.iter().map(|(n, p)| n * p).sum::<f64>() / w;
    let var = side.iter().map(|(n, p)| (n - mean).powi(2) * p).sum::<f64>() / w;
    json!({ "weight": w, "mean": mean, "std": var.sqrt() })
}

fn run_gaussian_cat(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let gc = &cfg.gaussian_cat;
    let theta = cfg.walk.theta.0;
    let mut summary = serde_json::Map::new();
    summary.insert("experiment".into(), json!("gaussian-cat"));
    summary.insert("theta".into(), json!(theta));
    summary.insert("postselect".into(), json!(cfg.postselect));

    if gc.panels.contains(&CatPanel::A) {
        let init = InitialState::Gaussian {
            sigma: gc.snapshot.sigma,
            cutoff: coinwalk_core::lattice::DEFAULT_GAUSSIAN_CUTOFF,
        };
        let state = evolve(&init, theta, gc.snapshot.steps, None)?.state;
        let dist = state.distribution()?;
        let mut t = Table::new(["n", "p"]);
        for (n, p) in dist.iter() {
            t.push(vec![n.into(), p.into()]);
        }
        out.csv("cat_a_distribution.csv", &t);
        out.svg(
            "cat_a_distribution.svg",
            &Chart::new(
                format!("Gaussian start Σ = {}, N = {}", gc.snapshot.sigma, gc.snapshot.steps),
                "n",
                "P(n)",
                Style::Line,
            )
            .with(Series::new("P(n)", distribution_points(&dist))),
        );
        let plus = lobe_stats(&dist, true);
        let minus = lobe_stats(&dist, false);
        let separation = plus["mean"].as_f64().unwrap_or(0.0) - minus["mean"].as_f64().unwrap_or(0.0);
        summary.insert(
            "panel_a".into(),
            json!({ "sigma": gc.snapshot.sigma, "steps": gc.snapshot.steps, "right_lobe": plus, "left_lobe": minus, "lobe_separation": separation }),
        );
    }

    if gc.panels.contains(&CatPanel::B) {
        let steps = gc.sweep.steps.values();
        let thetas: Vec<f64> = std::iter::once(theta).chain(gc.sweep.extra_thetas.iter().map(|a| a.0)).collect();
        let mut t = Table::new(["theta", "steps", "fidelity", "sign", "probability"]);
        let mut chart =
            Chart::new(format!("Gaussian cat fidelity, Σ = {}", gc.sweep.sigma), "N", "fidelity", Style::Line);
        let mut curves = Vec::new();
        for &th in &thetas {
            let points: Vec<(f64, Sign, f64)> = steps
                .par_iter()
                .map(|&n| cat_point(th, n, gc.sweep.sigma, cfg.postselect))
                .collect::<RunResult<_>>()?;
            for (&n, &(f, s, p)) in steps.iter().zip(&points) {
                t.push(vec![th.into(), n.into(), f.into(), sign_cell(s), p.into()]);
            }
            chart = chart.with(Series::new(
                format!("θ = {}", pi_fraction(th)),
                steps.iter().zip(&points).map(|(&n, &(f, _, _))| (n as f64, f)).collect(),
            ));
            let min80 =
                steps.iter().zip(&points).filter(|(&n, _)| n <= 80).map(|(_, p)| p.0).fold(f64::INFINITY, f64::min);
            curves.push(json!({ "theta": th, "min_fidelity_up_to_80": min80 }));
        }
        out.csv("cat_b_fidelity.csv", &t);
        out.svg("cat_b_fidelity.svg", &chart);
        summary.insert("panel_b".into(), json!({ "sigma": gc.sweep.sigma, "curves": curves }));
    }

    if gc.panels.contains(&CatPanel::C) {
        let noise = sweep_noise(cfg);
        let main = noise_comparison(
            theta,
            &CatSnapshot { sigma: gc.noise.sigma, steps: gc.noise.steps },
            gc.noise.delta,
            &noise,
            cfg.postselect,
        )?;
        let mut t = Table::new(["n", "p_noiseless", "p_noisy"]);
        for ((n, a), b) in main.sites.iter().zip(&main.clean).zip(&main.noisy) {
            t.push(vec![(*n).into(), (*a).into(), (*b).into()]);
        }
        out.csv("cat_c_distributions.csv", &t);
        out.svg(
            "cat_c_distributions.svg",
            &Chart::new("Noiseless vs dephased conditional P(n)", "n", "P(n)", Style::Line)
                .with(Series::new(
                    "noiseless",
                    main.sites.iter().zip(&main.clean).map(|(&n, &p)| (n as f64, p)).collect(),
                ))
                .with(Series::new(
                    format!("δ = {}", gc.noise.delta),
                    main.sites.iter().zip(&main.noisy).map(|(&n, &p)| (n as f64, p)).collect(),
                )),
        );
        let others: Vec<NoiseComparison> = gc
            .noise
            .also
            .iter()
            .map(|s| noise_comparison(theta, s, gc.noise.delta, &noise, cfg.postselect))
            .collect::<RunResult<_>>()?;
        summary.insert("panel_c".into(), json!({ "main": main, "other_settings": others }));
    }
    Ok(Value::Object(summary))
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub ratio: f64,
    pub steps: usize,
    pub theta: Option<f64>,
    pub warning: Option<String>,
}

pub fn critical_curves(ratios: &[f64], steps: &[usize]) -> Vec<CriticalPoint> {
    let grid: Vec<(f64, usize)> = ratios.iter().flat_map(|&r| steps.iter().map(move |&n| (r, n))).collect();
    grid.par_iter()
        .map(|&(ratio, n)| match critical_theta(n, ratio) {
            Ok(t) => CriticalPoint { ratio, steps: n, theta: Some(t), warning: None },
            Err(e) => CriticalPoint { ratio, steps: n, theta: None, warning: Some(e.to_string()) },
        })
        .collect()
}

fn run_critical_theta(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let ct = &cfg.critical_theta;
    let steps = ct.steps.values();
    let points = critical_curves(&ct.ratios, &steps);
    let mut t = Table::new(["ratio", "steps", "theta", "status"]);
    let mut chart = Chart::new("Critical θ", "N", "θ*", Style::Line);
    let mut curves = Vec::new();
    for &r in &ct.ratios {
        let curve: Vec<&CriticalPoint> = points.iter().filter(|p| p.ratio == r).collect();
        for p in &curve {
            match (p.theta, &p.warning) {
                (Some(th), _) => t.push(vec![r.into(), p.steps.into(), th.into(), "ok".into()]),
                (None, w) => t.push(vec![
                    r.into(),
                    p.steps.into(),
                    f64::NAN.into(),
                    format!("warning: {}", w.as_deref().unwrap_or("")).into(),
                ]),
            }
        }
        let vals: Vec<f64> = curve.iter().filter_map(|p| p.theta).collect();
        let decreasing = vals.len() == curve.len() && vals.windows(2).all(|w| w[1] < w[0]);
        chart = chart.with(Series::new(
            format!("r = {r}"),
            curve.iter().filter_map(|p| p.theta.map(|th| (p.steps as f64, th))).collect(),
        ));
        curves.push(json!({ "ratio": r, "strictly_decreasing": decreasing, "warnings": curve.len() - vals.len() }));
    }
    out.csv("critical_theta.csv", &t);
    out.svg("critical_theta.svg", &chart);
    Ok(json!({ "experiment": "critical-theta", "curves": curves }))
}

/// Noiseless mesh against the abstract walk at one depth and angle.
#[derive(Clone, Debug, Serialize)]
pub struct OpticsCheck {
    pub depth: usize,
    pub theta: f64,
    pub max_power_deviation: f64,
    pub detection_fidelity: f64,
    pub detection_probability: f64,
    pub walk_probability: f64,
    pub clean_coherence_ratio: f64,
    /// Off-diagonal to diagonal Frobenius ratio after averaging random masks.
    pub masked_coherence_ratio: Option<f64>,
}

fn coherence_ratio(rho: &PositionDensity) -> f64 {
    let (diag, off) = rho.coherence_split();
    off / diag
}

pub fn optics_check(mesh: &OpticalMesh, rate: f64, masks: usize, seed: u64) -> RunResult<OpticsCheck> {
    let depth = mesh.depth();
    let theta = mesh.theta();
    let out = propagate(mesh, &PhaseMask::zeros(mesh))?;
    let total = out.total_power();
    let psi = evolve_pure(&JointPureState::localized(depth), theta, depth)?;
    let walk = psi.position_weights();
    let max_dp = out.site_powers().iter().zip(&walk).map(|(a, b)| (a / total - b).abs()).fold(0.0, f64::max);
    let det = project_detection(&out)?;
    let cond = coinwalk_core::analysis::project_coin_pure(&psi, CoinOutcome::Phi)?;
    let overlap: coinwalk_core::C64 = det.amplitudes.iter().zip(&cond.amplitudes).map(|(a, b)| a.conj() * b).sum();
    let masked = match masks {
        0 => None,
        m => Some(coherence_ratio(&average_position_density(mesh, rate, m, seed)?)),
    };
    Ok(OpticsCheck {
        depth,
        theta,
        max_power_deviation: max_dp,
        detection_fidelity: overlap.norm_sqr(),
        detection_probability: det.probability,
        walk_probability: cond.probability,
        clean_coherence_ratio: coherence_ratio(&out.position_density()),
        masked_coherence_ratio: masked,
    })
}

fn run_optics_verify(cfg: &ExperimentConfig, out: &mut Outputs) -> RunResult<Value> {
    let op = &cfg.optics;
    let seed = cfg.noise.as_ref().map_or(0, |n| n.seed);
    let meshes: Vec<OpticalMesh> = op
        .depths
        .iter()
        .flat_map(|&d| op.thetas.iter().map(move |t| (d, t.0)))
        .map(|(d, t)| {
            let mut m = build_mesh(d, t)?.with_attenuation(op.attenuation)?;
            if op.explicit_preparation {
                m = m.with_preparation(Preparation::ideal_explicit());
            }
            Ok(m)
        })
        .collect::<Result<_, WalkError>>()?;
    let checks: Vec<OpticsCheck> =
        meshes.par_iter().map(|m| optics_check(m, op.phase_rate, op.masks, seed)).collect::<RunResult<_>>()?;
    let mut t = Table::new([
        "depth",
        "theta",
        "max_power_deviation",
        "detection_fidelity",
        "detection_probability",
        "walk_probability",
        "clean_coherence_ratio",
        "masked_coherence_ratio",
    ]);
    for c in &checks {
        t.push(vec![
            c.depth.into(),
            c.theta.into(),
            c.max_power_deviation.into(),
            c.detection_fidelity.into(),
            c.detection_probability.into(),
            c.walk_probability.into(),
            c.clean_coherence_ratio.into(),
            c.masked_coherence_ratio.unwrap_or(f64::NAN).into(),
        ]);
    }
    out.csv("optics_verify.csv", &t);
    if let Some(mesh) = meshes.last() {
        let mask = sample_phase_mask(mesh, op.phase_rate, &mut RngStream::new(seed, 0).rng())?;
        out.json("mesh.json", &mesh.to_document(Some(&mask)));
    }
    let worst_dp = checks.iter().map(|c| c.max_power_deviation).fold(0.0, f64::max);
    let worst_f = checks.iter().map(|c| c.detection_fidelity).fold(1.0, f64::min);
    Ok(json!({
        "experiment": "optics-verify",
        "phase_rate": op.phase_rate,
        "masks": op.masks,
        "max_power_deviation": worst_dp,
        "min_detection_fidelity": worst_f,
        "checks": checks,
    }))
}

/// Angle written as a multiple of π, for labels.
pub fn pi_fraction(theta: f64) -> String {
    for d in 1..=200u32 {
        let n = theta / PI * d as f64;
        if (n - n.round()).abs() < 1e-9 {
            let n = n.round() as i64;
            return match (n, d) {
                (0, _) => "0".into(),
                (1, 1) => "π".into(),
                (1, d) => format!("π/{d}"),
                (n, 1) => format!("{n}π"),
                (n, d) => format!("{n}π/{d}"),
            };
        }
    }
    format!("{theta:.6}")
}
