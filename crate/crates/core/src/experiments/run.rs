use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::*;
use super::identities::identity_checks;
use crate::capacity::{
    capacity_lp, richardson_extrapolate, s_thin_verdict, wiener_partial_sums, DiscretizedCompact, LatticeSpec,
    WienerParams,
};
use crate::error::{Error, Result};
use crate::functionals::{
    bound_chain, cheese_function, dq_convergence_experiment, function_panel, ray_experiment,
    surrogate_derivation_measure, unit_probes, GoodSet,
};
use crate::geometry::{area_density_profile, Point, Point2, Sampler, SwissCheese};
use crate::measures::{DiscreteMeasure, ProductMeasure};
use crate::potentials::{classify_exceptional_set, riesz_potential, PotentialKind, PotentialSource, PotentialSpec};

#[derive(Clone, Debug, Serialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// What a run did: config hash, toolkit version, stage timings and outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub stages: Vec<StageTime>,
    pub outputs: Vec<OutputFile>,
    pub out_dir: PathBuf,
    /// Scenario-level summary, also written to `summary.json`.
    #[serde(skip)]
    pub summary: Value,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Recorder {
    dir: PathBuf,
    stages: Vec<StageTime>,
    outputs: Vec<OutputFile>,
}

impl Recorder {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let v = f()?;
        self.stages.push(StageTime {
            stage: name.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        Ok(v)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.push(OutputFile {
            name: name.into(),
            bytes: bytes.len() as u64,
            sha256: hex(&Sha256::digest(bytes)),
        });
        Ok(())
    }

    fn csv(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn check(ok: bool, field: &str, rule: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, rule))
    }
}

/// SHA-256 of the config as canonical JSON.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let v = serde_json::to_vec(&json!({"seed": cfg.seed(), "params": cfg.params}))?;
    Ok(hex(&Sha256::digest(&v)))
}

/// Validate, execute and write the scenario's artifacts into the output
/// directory (default `out/<scenario>`).
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    validate(cfg)?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| Path::new("out").join(cfg.scenario().name()));
    fs::create_dir_all(&dir)?;
    let mut rec = Recorder {
        dir: dir.clone(),
        stages: Vec::new(),
        outputs: Vec::new(),
    };
    let seed = cfg.seed();
    let body = match &cfg.params {
        ScenarioConfig::CheeseBuild(c) => cheese_build(&mut rec, c, seed)?,
        ScenarioConfig::CapacityBall(c) => capacity_ball(&mut rec, c)?,
        ScenarioConfig::Wiener(c) => wiener(&mut rec, c)?,
        ScenarioConfig::ExceptionalSet(c) => exceptional_set(&mut rec, c, seed)?,
        ScenarioConfig::DqTheorem(c) => dq_theorem(&mut rec, c, seed)?,
        ScenarioConfig::PipelineIdentity(c) => pipeline_identity(&mut rec, c, seed)?,
    };
    let summary = json!({
        "scenario": cfg.scenario().name(),
        "config": {"seed": seed, "params": cfg.params},
        "results": body,
    });
    rec.json("summary.json", &summary)?;
    let manifest = RunManifest {
        scenario: cfg.scenario().name().into(),
        config_hash: config_hash(cfg)?,
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        stages: rec.stages,
        outputs: rec.outputs,
        out_dir: dir.clone(),
        summary,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(manifest)
}

/// Parameter checks that need no computation.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    match &cfg.params {
        ScenarioConfig::CheeseBuild(c) => {
            c.cheese.params(cfg.seed())?;
            check(c.density_n_min >= 1 && c.density_n_min <= c.density_n_max, "density_n_min", "1 ≤ density_n_min ≤ density_n_max")?;
            check(c.density_n_max <= 40, "density_n_max", "density_n_max ≤ 40")?;
            check(c.grid_per_radius >= 1, "grid_per_radius", "grid resolution ≥ 1")?;
        }
        ScenarioConfig::CapacityBall(c) => {
            check((1..=3).contains(&c.d), "d", "d ∈ {1, 2, 3}")?;
            check(c.s > 0.0 && c.s < c.d as f64, "s", "0 < s < d")?;
            check(c.radius > 0.0 && c.radius.is_finite(), "radius", "radius > 0")?;
            check(c.center.len() == c.d, "center", "one coordinate per dimension")?;
            check(!c.levels.is_empty(), "levels", "at least one refinement level")?;
            check(c.levels.windows(2).all(|w| w[0] < w[1]), "levels", "strictly increasing levels")?;
            let cap = [0, 8, 5, 3][c.d];
            check(c.levels.iter().all(|&l| l <= cap), "levels", "levels small enough for a dense LP (≤ 8, 5, 3 for d = 1, 2, 3)")?;
            check(c.lattice_per_axis >= 2, "lattice_per_axis", "lattice_per_axis ≥ 2")?;
            check(c.lattice_reach > 0.0, "lattice_reach", "lattice_reach > 0")?;
        }
        ScenarioConfig::Wiener(c) => {
            check(c.set == "exceptional" || c.set == "ball", "set", "one of exceptional, ball")?;
            check(c.s > 0.0 && c.s < 2.0, "s", "0 < s < d")?;
            check(c.epsilon > 0.0, "epsilon", "threshold ε > 0")?;
            check(c.ball_radius > 0.0, "ball_radius", "ball_radius > 0")?;
            check(c.atoms.iter().all(|a| a[2] >= 0.0), "atoms", "positive measure: masses ≥ 0")?;
            check(c.n_min >= 1 && c.n_min <= c.n_max, "n_min", "1 ≤ n_min ≤ n_max")?;
            check(c.n_max <= 30, "n_max", "n_max ≤ 30")?;
            check(c.level <= 4, "level", "level ≤ 4")?;
        }
        ScenarioConfig::ExceptionalSet(c) => {
            let kind = c.kind()?;
            PotentialSpec::new(kind, Point(c.base), c.threshold.unwrap_or(1.0)).validate()?;
            check(c.n_min <= c.n_max && c.n_max <= 40, "n_max", "n_min ≤ n_max ≤ 40")?;
            check(c.sampler == "grid" || c.sampler == "monte-carlo", "sampler", "one of grid, monte-carlo")?;
            check(c.grid_per_radius >= 1, "grid_per_radius", "grid resolution ≥ 1")?;
            check(c.samples >= 1, "samples", "sample count ≥ 1")?;
            if kind.is_product() {
                check(!c.product_atoms.is_empty(), "product_atoms", "at least one product atom")?;
            } else {
                check(!c.atoms.is_empty(), "atoms", "at least one atom")?;
            }
        }
        ScenarioConfig::DqTheorem(c) => {
            c.cheese.params(cfg.seed())?;
            check(c.coefficient_exponent >= 2.0, "coefficient_exponent", "coefficient decay k^{-p} needs p ≥ 2")?;
            check(c.epsilon_relative > 0.0, "epsilon_relative", "ε > 0")?;
            check(c.shell_min >= 1 && c.shell_min <= c.shell_max, "shell_min", "1 ≤ shell_min ≤ shell_max")?;
            check(c.shell_max <= 40, "shell_max", "shell_max ≤ 40")?;
            check(c.grid_per_radius >= 1, "grid_per_radius", "grid resolution ≥ 1")?;
            check(c.delta > 0.0, "delta", "δ > 0")?;
            check(c.m.is_none_or(|m| m > 0.0), "m", "M > 0")?;
            check(c.ray_m_ref >= 1 && c.ray_m_ref <= c.ray_m_max, "ray_m_ref", "1 ≤ ray_m_ref ≤ ray_m_max")?;
            check(c.ray_m_max <= 40, "ray_m_max", "ray_m_max ≤ 40")?;
            check(c.panel_size >= 1, "panel_size", "panel_size ≥ 1")?;
        }
        ScenarioConfig::PipelineIdentity(c) => {
            check(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "0<α<1")?;
            check(c.triples >= 1, "triples", "triples ≥ 1")?;
            check(c.atoms >= 1, "atoms", "atoms ≥ 1")?;
        }
    }
    Ok(())
}

fn cheese_build(rec: &mut Recorder, c: &CheeseBuildConfig, seed: u64) -> Result<Value> {
    let params = c.cheese.params(seed)?;
    let cheese = rec.stage("generate", || SwissCheese::generate(&params))?;
    let profile = rec.stage("density", || {
        area_density_profile(
            |p| cheese.in_u(p),
            cheese.base,
            c.density_n_min..=c.density_n_max,
            Sampler::Grid { per_radius: c.grid_per_radius },
        )
    })?;
    rec.write("cheese.json", cheese.to_json()?.as_bytes())?;
    rec.csv("annuli.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["n", "budget", "used", "max_radius", "balls", "within_budget"])?;
        for a in &cheese.annuli {
            w.write_record([
                a.n.to_string(),
                format!("{:e}", a.budget),
                format!("{:e}", a.used),
                format!("{:e}", a.max_radius),
                a.balls.len().to_string(),
                (a.used <= a.budget).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    rec.csv("density.csv", |buf| profile.write_csv(buf))?;
    let (phi, clearance) = cheese.clear_ray_direction();
    Ok(json!({
        "balls": cheese.removed.len(),
        "tail_bound": cheese.tail_bound,
        "all_within_budget": cheese.annuli.iter().all(|a| a.used <= a.budget),
        "clear_ray": {"direction": phi, "relative_clearance": clearance},
        "density_of_u": profile,
    }))
}

fn capacity_ball(rec: &mut Recorder, c: &CapacityBallConfig) -> Result<Value> {
    fn levels<const D: usize>(rec: &mut Recorder, c: &CapacityBallConfig) -> Result<Vec<(u32, f64, crate::capacity::CapacityEstimate, f64)>> {
        let center = Point::<D>(std::array::from_fn(|i| c.center[i]));
        let lattice = LatticeSpec {
            per_axis: c.lattice_per_axis,
            reach: c.lattice_reach,
        };
        let mut out = Vec::new();
        for &level in &c.levels {
            let t = Instant::now();
            let est = rec.stage(&format!("level-{level}"), || {
                let k = DiscretizedCompact::ball(center, c.radius, level, lattice);
                capacity_lp(&k, c.s)
            })?;
            out.push((level, est.cell, est, t.elapsed().as_secs_f64()));
        }
        Ok(out)
    }
    let rows = match c.d {
        1 => levels::<1>(rec, c)?,
        2 => levels::<2>(rec, c)?,
        _ => levels::<3>(rec, c)?,
    };
    let bound = c.radius.powf(c.s);
    rec.csv("capacity.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["level", "cell", "support_points", "constraint_points", "estimate", "ratio_to_r_s", "pivots", "audit_max_potential"])?;
        for (level, cell, e, _) in &rows {
            w.write_record([
                level.to_string(),
                format!("{cell:e}"),
                e.diagnostics.support_points.to_string(),
                e.diagnostics.constraint_points.to_string(),
                format!("{}", e.value),
                format!("{}", e.value / bound),
                e.diagnostics.pivots.to_string(),
                format!("{}", e.diagnostics.audit_max_potential),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let values: Vec<f64> = rows.iter().map(|r| r.2.value).collect();
    let extrapolated = (values.len() >= 3).then(|| {
        let n = values.len();
        richardson_extrapolate([values[n - 3], values[n - 2], values[n - 1]])
    });
    Ok(json!({
        "upper_bound_r_s": bound,
        "estimates": rows.iter().map(|(level, cell, e, secs)| json!({
            "level": level, "cell": cell, "value": e.value, "seconds": secs,
            "support_points": e.diagnostics.support_points, "audit_violations": e.diagnostics.audit_violations,
        })).collect::<Vec<_>>(),
        "monotone": values.windows(2).all(|w| w[1] >= w[0] - 1e-9),
        "within_upper_bound": values.iter().all(|v| *v <= bound * 1.05),
        "extrapolated": extrapolated,
        "bias": rows.first().map(|r| r.2.bias),
    }))
}

fn plane_measure(rows: &[[f64; 3]]) -> DiscreteMeasure<2> {
    DiscreteMeasure::new(rows.iter().map(|r| (Point2::new(r[0], r[1]), Complex64::new(r[2], 0.0))).collect())
}

fn wiener(rec: &mut Recorder, c: &WienerConfig) -> Result<Value> {
    let b = Point(c.base);
    let mu = plane_measure(&c.atoms);
    let params = WienerParams {
        level: c.level,
        ..Default::default()
    };
    let report = rec.stage("series", || {
        if c.set == "ball" {
            wiener_partial_sums(|p: &Point2| p.dist(&b) <= c.ball_radius, b, c.s, c.n_min..=c.n_max, &params)
        } else {
            wiener_partial_sums(
                |p: &Point2| p.dist(&b).powf(c.s) * riesz_potential(&mu, c.s, p) >= c.epsilon,
                b,
                c.s,
                c.n_min..=c.n_max,
                &params,
            )
        }
    })?;
    rec.csv("wiener.csv", |buf| report.write_csv(buf))?;
    let no_mass_at_b = mu.atoms.iter().all(|(p, m)| *p != b || m.norm() == 0.0);
    Ok(json!({
        "hypothesis_no_mass_at_b": no_mass_at_b,
        "verdict": report.verdict,
        "thinness": s_thin_verdict(&report).to_string(),
        "tail_ratio": report.tail_ratio,
        "max_term": report.max_term,
        "terms": report.entries,
    }))
}

fn exceptional_set(rec: &mut Recorder, c: &ExceptionalSetConfig, seed: u64) -> Result<Value> {
    let kind = c.kind()?;
    let source = if kind.is_product() {
        PotentialSource::Product(ProductMeasure::from(crate::measures::MeasureRows(c.product_atoms.clone())))
    } else {
        PotentialSource::Plane(plane_measure(&c.atoms))
    };
    let threshold = c.threshold.unwrap_or_else(|| match (kind, &source) {
        (PotentialKind::Refined { s, t, u }, PotentialSource::Product(m)) if u >= 1f64.min(s).min(t) => 6.0 * m.total_variation(),
        _ => 1.0,
    });
    let spec = PotentialSpec::new(kind, Point(c.base), threshold);
    let sampler = if c.sampler == "grid" {
        Sampler::Grid { per_radius: c.grid_per_radius }
    } else {
        Sampler::MonteCarlo { samples: c.samples, seed }
    };
    let report = rec.stage("classify", || classify_exceptional_set(&spec, &source, c.n_min..=c.n_max, sampler))?;
    rec.csv("points.csv", |buf| report.write_csv(buf))?;
    rec.csv("density.csv", |buf| report.profile.write_csv(buf))?;
    Ok(serde_json::to_value(&report)?)
}

fn dq_theorem(rec: &mut Recorder, c: &DqTheoremConfig, seed: u64) -> Result<Value> {
    let params = c.cheese.params(seed)?;
    let cheese = rec.stage("cheese", || SwissCheese::generate(&params))?;
    let (t1, good) = rec.stage("good-set", || {
        let t1 = surrogate_derivation_measure(&cheese)?;
        let good = GoodSet::new(&t1.mu, cheese.alpha, cheese.base, Some(c.delta), c.m)?;
        Ok((t1, good))
    })?;
    let cf = cheese_function(&cheese, c.coefficient_exponent, None)?;
    let b = cheese.base.to_complex();
    let d = cf.derivation(b)?;
    let eps = c.epsilon_relative * d.value.norm();
    let sampler = Sampler::Grid { per_radius: c.grid_per_radius };
    let report = rec.stage("deviations", || {
        dq_convergence_experiment(&cf.f, d, cheese.base, |a| good.contains(&cheese, a), c.shell_min..=c.shell_max, sampler, eps)
    })?;
    let chain = rec.stage("bound-chain", || {
        let probes = unit_probes(&cheese, 4, seed)?;
        bound_chain(&t1, &good, &cheese, &probes, c.shell_min..=c.shell_max, Sampler::Grid { per_radius: 8 })
    })?;
    let ray = rec.stage("ray", || {
        let panel = function_panel(&cheese, c.panel_size, seed)?;
        ray_experiment(&cheese, &panel, c.ray_m_max, c.ray_m_ref)
    })?;
    rec.csv("deviations.csv", |buf| report.write_csv(buf))?;
    rec.csv("density.csv", |buf| report.good_profile.write_csv(buf))?;
    rec.csv("ray.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["function", "m", "a_re", "a_im", "dq_re", "dq_im"])?;
        for f in &ray.functions {
            for (i, (q, p)) in f.quotients.iter().zip(&ray.points).enumerate() {
                w.write_record([
                    f.label.clone(),
                    (i + 1).to_string(),
                    format!("{}", p[0]),
                    format!("{}", p[1]),
                    format!("{}", q.re),
                    format!("{}", q.im),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(json!({
        "derivation": d.value,
        "tail_bound": d.tail_bound,
        "tail_relative": d.tail_bound / d.value.norm(),
        "epsilon": eps,
        "good_set": good,
        "measure_norm": t1.mu.total_variation(),
        "shells": report.shells,
        "decay_factor": report.decay_factor,
        "good_density": report.good_profile,
        "bound_chain": chain,
        "ray": ray,
    }))
}

fn pipeline_identity(rec: &mut Recorder, c: &PipelineIdentityConfig, seed: u64) -> Result<Value> {
    let b = Complex64::new(c.base[0], c.base[1]);
    let checks = rec.stage("identities", || identity_checks(c.triples, c.atoms, c.alpha, b, seed))?;
    rec.csv("pipeline.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record([
            "index", "a_re", "a_im", "t_hat_re", "t_hat_im", "r_mass_defect", "d_def_re", "d_def_im", "d_closed_re",
            "d_closed_im", "d_point_value_re", "d_point_value_im", "pipeline_rel", "swap_rel", "avoid_rel", "product_rel",
        ])?;
        for k in &checks {
            let r = &k.report;
            w.write_record([
                k.index.to_string(),
                format!("{}", r.a.re),
                format!("{}", r.a.im),
                format!("{}", r.t_hat.re),
                format!("{}", r.t_hat.im),
                format!("{:e}", k.mass_defect),
                format!("{}", r.d_definition.re),
                format!("{}", r.d_definition.im),
                format!("{}", r.d_closed_form.re),
                format!("{}", r.d_closed_form.im),
                format!("{}", r.d_with_point_value.re),
                format!("{}", r.d_with_point_value.im),
                format!("{:e}", k.pipeline),
                format!("{:e}", k.swap),
                format!("{:e}", k.avoid_slice),
                format!("{:e}", k.product),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let max = |f: fn(&super::identities::IdentityCheck) -> f64| checks.iter().map(f).fold(0.0, f64::max);
    Ok(json!({
        "triples": checks.len(),
        "max_swap": max(|k| k.swap),
        "max_avoid_slice": max(|k| k.avoid_slice),
        "max_product": max(|k| k.product),
        "max_pipeline": max(|k| k.pipeline),
        "max_mass_defect": max(|k| k.mass_defect),
        "max_point_value_gap": checks.iter().map(|k| (k.report.d_with_point_value - k.report.d_definition).norm()).fold(0.0, f64::max),
    }))
}
