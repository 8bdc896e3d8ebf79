//! Batch driver: parse a verification config, run the requested checks over a
//! sample grid, and emit a residual report.
//!
//! The config format is flat `section.key = value` text; expression values
//! are double-quoted, scalars are bare constant expressions.  Tasks run in a
//! fixed registry order regardless of their order in the file, and all random
//! sampling is seeded, so a given config and seed produce a bitwise-identical
//! JSON report.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::clifford::{covering_map, Mat2, Signature, SpinElement};
use crate::expr::{self, Expr};
use crate::geometry::{
    appendix_identity_check, geometry_at, ricci_identity_check, spin_covariance_check,
    FrameField, GeomError, SpinorJet,
};
use crate::jets::C;
use crate::killing::{
    integrability_check, killing_tensor_residual, killing_vector_residual, KillingData,
    KillingError,
};
use crate::separation::{
    d5_dirac_form_check, hj_momenta_identities, minkowski_exponential, minkowski_form_residual,
    minkowski_z_form, exponential_spinor, separate_solve, separated_dirac_residual,
    LiouvilleMetric, SepError, SeparatedSolution,
};
use crate::symop::{commutator_residual, DiracOperator, SymmetryOperator};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("task `{task}`: {message}")]
    Task { task: &'static str, message: String },
    #[error("task `{task}`: singular configuration: {message}")]
    Singular { task: &'static str, message: String },
}

impl CliError {
    /// 2 for config/expression problems, 3 for runtime singularities.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Task { .. } => 2,
            CliError::Singular { .. } => 3,
        }
    }
}

/// Classify an internal error: evaluation-domain and degeneracy problems are
/// singularities (exit 3); everything else is a config-level failure (exit 2).
fn classify(task: &'static str, message: String, singular: bool) -> CliError {
    if singular {
        CliError::Singular { task, message }
    } else {
        CliError::Task { task, message }
    }
}

fn geom_err(task: &'static str, e: GeomError) -> CliError {
    let singular = matches!(
        e,
        GeomError::DegenerateFrame { .. } | GeomError::ComplexFrame { .. }
    ) || matches!(&e, GeomError::Eval(_));
    classify(task, e.to_string(), singular)
}

fn killing_err(task: &'static str, e: KillingError) -> CliError {
    match e {
        KillingError::NotClosed(..) => classify(task, e.to_string(), true),
        KillingError::Geom(g) => geom_err(task, g),
        other => classify(task, other.to_string(), true),
    }
}

fn sep_err(task: &'static str, e: SepError) -> CliError {
    match e {
        SepError::LambdaZero | SepError::Parse(_) => classify(task, e.to_string(), false),
        SepError::Geom(g) => geom_err(task, g),
        other => classify(task, other.to_string(), true),
    }
}

#[derive(Debug, Clone)]
pub enum GeometryCfg {
    Frame {
        e: [[Expr; 2]; 2],
        allow_complex: bool,
    },
    Liouville {
        a: Expr,
        b: Expr,
    },
}

#[derive(Debug, Clone)]
pub enum GSpec {
    Synthesize,
    Given(Expr),
}

#[derive(Debug, Clone)]
pub struct KillingCfg {
    pub e_tensor: [[Expr; 2]; 2],
    pub alpha: [Expr; 2],
    pub zeta: [Expr; 2],
    pub a_const: C,
    pub g: GSpec,
    pub g_steps: usize,
}

#[derive(Debug, Clone)]
pub struct SeparateCfg {
    pub lambda: C,
    pub kappa: C,
    pub c1: C,
    pub c2: C,
    pub y_start: f64,
    pub y_end: f64,
    pub h: f64,
}

/// The registered task names, in contractual report order.
pub const TASK_ORDER: [&str; 13] = [
    "gamma-check",
    "ricci-identities",
    "appendix-identities",
    "spin-covariance",
    "killing-vector",
    "killing-tensor",
    "integrability",
    "commutator-first",
    "commutator-second",
    "d5-form",
    "separate-solve",
    "minkowski-complex",
    "hj-identities",
];

#[derive(Debug, Clone)]
pub struct VerificationConfig {
    pub signature: Signature,
    pub mass: C,
    pub seed: u64,
    pub spinors_per_point: usize,
    pub geometry: GeometryCfg,
    pub killing: Option<KillingCfg>,
    pub region: (f64, f64, f64, f64),
    pub grid: (usize, usize),
    /// (registry index, tolerance), sorted by registry index.
    pub tasks: Vec<(usize, f64)>,
    pub separate: Option<SeparateCfg>,
}

fn const_value(src: &str) -> Result<C, String> {
    let e = expr::parse(src).map_err(|e| e.to_string())?;
    e.eval_const().map_err(|e| e.to_string())
}

fn strip_quotes(v: &str) -> &str {
    let v = v.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

struct RawConfig {
    entries: Vec<(String, String, String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig, CliError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let body = body.trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| CliError::Config {
                line,
                message: format!("expected `section.key = value`, got `{body}`"),
            })?;
            let key = key.trim();
            let (section, name) = key.split_once('.').ok_or_else(|| CliError::Config {
                line,
                message: format!("key `{key}` is missing its section prefix"),
            })?;
            entries.push((
                section.trim().to_string(),
                name.trim().to_string(),
                value.trim().to_string(),
                line,
            ));
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, section: &str, name: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(s, n, _, _)| s == section && n == name)
            .map(|(_, _, v, l)| (v.as_str(), *l))
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.iter().any(|(s, _, _, _)| s == section)
    }

    fn expr(&self, section: &str, name: &str, default: &str) -> Result<Expr, CliError> {
        match self.get(section, name) {
            None => expr::parse(default).map_err(|e| CliError::Config {
                line: 0,
                message: e.to_string(),
            }),
            Some((v, line)) => expr::parse(strip_quotes(v)).map_err(|e| CliError::Config {
                line,
                message: format!("{name}: {e}"),
            }),
        }
    }

    fn number(&self, section: &str, name: &str, default: C) -> Result<C, CliError> {
        match self.get(section, name) {
            None => Ok(default),
            Some((v, line)) => {
                const_value(strip_quotes(v)).map_err(|e| CliError::Config {
                    line,
                    message: format!("{name}: {e}"),
                })
            }
        }
    }

    fn real(&self, section: &str, name: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.number(section, name, C::new(default, 0.0))?.re)
    }
}

impl VerificationConfig {
    pub fn parse(text: &str) -> Result<VerificationConfig, CliError> {
        let raw = RawConfig::parse(text)?;

        let signature = match raw.get("main", "signature") {
            Some(("euclidean", _)) => Signature::Euclidean,
            Some(("lorentzian", _)) => Signature::Lorentzian,
            Some((other, line)) => {
                return Err(CliError::Config {
                    line,
                    message: format!("unknown signature `{other}`"),
                })
            }
            None => {
                return Err(CliError::Config {
                    line: 0,
                    message: "main.signature is required".into(),
                })
            }
        };
        let mass = raw.number("main", "mass", C::new(0.0, 0.0))?;
        let seed = raw.real("main", "seed", 0.0)? as u64;
        let spinors_per_point = raw.real("main", "spinors", 3.0)? as usize;

        let geometry = if raw.get("geometry", "liouville_a").is_some()
            || raw.get("geometry", "liouville_b").is_some()
        {
            GeometryCfg::Liouville {
                a: raw.expr("geometry", "liouville_a", "0")?,
                b: raw.expr("geometry", "liouville_b", "1")?,
            }
        } else {
            let allow_complex = matches!(raw.get("geometry", "complex"), Some(("true", _)));
            GeometryCfg::Frame {
                e: [
                    [
                        raw.expr("geometry", "e11", "1")?,
                        raw.expr("geometry", "e12", "0")?,
                    ],
                    [
                        raw.expr("geometry", "e21", "0")?,
                        raw.expr("geometry", "e22", "1")?,
                    ],
                ],
                allow_complex,
            }
        };

        let killing = if raw.has_section("killing") {
            let g = match raw.get("killing", "g") {
                None | Some(("synthesize", _)) => GSpec::Synthesize,
                Some((v, line)) => GSpec::Given(expr::parse(strip_quotes(v)).map_err(|e| {
                    CliError::Config {
                        line,
                        message: format!("g: {e}"),
                    }
                })?),
            };
            let e12 = raw.expr("killing", "e12", "0")?;
            Some(KillingCfg {
                e_tensor: [
                    [raw.expr("killing", "e11", "0")?, e12.clone()],
                    [e12, raw.expr("killing", "e22", "0")?],
                ],
                alpha: [
                    raw.expr("killing", "alpha1", "0")?,
                    raw.expr("killing", "alpha2", "0")?,
                ],
                zeta: [
                    raw.expr("killing", "zeta1", "0")?,
                    raw.expr("killing", "zeta2", "0")?,
                ],
                a_const: raw.number("killing", "a_const", C::new(0.0, 0.0))?,
                g,
                g_steps: raw.real("killing", "g_steps", 60.0)? as usize,
            })
        } else {
            None
        };

        let region = (
            raw.real("region", "x_min", -0.4)?,
            raw.real("region", "y_min", -0.4)?,
            raw.real("region", "x_max", 0.4)?,
            raw.real("region", "y_max", 0.4)?,
        );
        if !(region.0 < region.2 && region.1 < region.3) {
            return Err(CliError::Config {
                line: 0,
                message: "region is degenerate".into(),
            });
        }
        let grid = (
            (raw.real("grid", "nx", 4.0)? as usize).max(2),
            (raw.real("grid", "ny", 4.0)? as usize).max(2),
        );

        let mut tasks = Vec::new();
        for (section, name, value, line) in &raw.entries {
            if section != "task" {
                continue;
            }
            let idx = TASK_ORDER
                .iter()
                .position(|t| t == name)
                .ok_or_else(|| CliError::Config {
                    line: *line,
                    message: format!("unknown task `{name}`"),
                })?;
            let tol = const_value(strip_quotes(value))
                .map_err(|e| CliError::Config {
                    line: *line,
                    message: format!("tolerance for `{name}`: {e}"),
                })?
                .re;
            tasks.push((idx, tol));
        }
        tasks.sort_by_key(|&(idx, _)| idx);
        if tasks.is_empty() {
            return Err(CliError::Config {
                line: 0,
                message: "no tasks requested".into(),
            });
        }

        let separate = if raw.has_section("separate") {
            Some(SeparateCfg {
                lambda: raw.number("separate", "lambda", C::new(1.0, 0.0))?,
                kappa: raw.number("separate", "kappa", C::new(0.0, 1.0))?,
                c1: raw.number("separate", "c1", C::new(1.0, 0.0))?,
                c2: raw.number("separate", "c2", C::new(1.0, 0.0))?,
                y_start: raw.real("separate", "y_start", 0.0)?,
                y_end: raw.real("separate", "y_end", 1.0)?,
                h: raw.real("separate", "h", 0.02)?,
            })
        } else {
            None
        };

        Ok(VerificationConfig {
            signature,
            mass,
            seed,
            spinors_per_point,
            geometry,
            killing,
            region,
            grid,
            tasks,
            separate,
        })
    }

    /// The working frame: the configured frame, or the diagonal Liouville
    /// frame (in which the Killing tensor is diag(B, −ηA)).
    pub fn frame(&self) -> Result<FrameField, CliError> {
        match &self.geometry {
            GeometryCfg::Frame { e, allow_complex } => {
                let s: Vec<String> = e.iter().flatten().map(|x| x.to_string()).collect();
                FrameField::parse(
                    self.signature,
                    [[s[0].as_str(), s[1].as_str()], [s[2].as_str(), s[3].as_str()]],
                    *allow_complex,
                )
                .map_err(|e| CliError::Config {
                    line: 0,
                    message: e.to_string(),
                })
            }
            GeometryCfg::Liouville { .. } => {
                let m = self.liouville().expect("liouville geometry present");
                m.diagonal_frame().map_err(|e| sep_err("geometry", e))
            }
        }
    }

    pub fn liouville(&self) -> Option<LiouvilleMetric> {
        match &self.geometry {
            GeometryCfg::Liouville { a, b } => Some(LiouvilleMetric {
                signature: self.signature,
                a_expr: a.clone(),
                b_expr: b.clone(),
            }),
            GeometryCfg::Frame { .. } => None,
        }
    }

    fn grid_points(&self) -> Vec<(f64, f64)> {
        let (x0, y0, x1, y1) = self.region;
        let (nx, ny) = self.grid;
        let mut pts = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                pts.push((
                    x0 + (x1 - x0) * i as f64 / (nx - 1) as f64,
                    y0 + (y1 - y0) * j as f64 / (ny - 1) as f64,
                ));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub name: &'static str,
    pub residual: f64,
    pub location: [f64; 2],
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub tasks: Vec<TaskReport>,
    pub overall_pass: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.overall_pass {
            0
        } else {
            1
        }
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:>12} {:>22} {:>10}  {}",
            "task", "residual", "max at", "tolerance", "status"
        );
        for t in &self.tasks {
            let _ = writeln!(
                out,
                "{:<20} {:>12.3e} ({:>9.4}, {:>8.4}) {:>10.1e}  {}{}",
                t.name,
                t.residual,
                t.location[0],
                t.location[1],
                t.tolerance,
                if t.pass { "pass" } else { "FAIL" },
                match t.refine_ratio {
                    Some(r) => format!("  (refine ratio {r:.2})"),
                    None => String::new(),
                }
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.overall_pass { "pass" } else { "FAIL" }
        );
        out
    }

    pub fn render_json_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let _ = writeln!(out, "{}", serde_json::to_string(t).expect("serialize"));
        }
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&serde_json::json!({
                "overall_pass": self.overall_pass,
                "seed": self.seed,
            }))
            .expect("serialize")
        );
        out
    }
}

fn random_spinor(rng: &mut ChaCha8Rng, order: usize) -> SpinorJet {
    let mut s = SpinorJet::zero(order);
    for comp in 0..2 {
        for i in 0..=order {
            for j in 0..=(order - i) {
                s.c[comp].set(
                    i,
                    j,
                    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
    }
    s
}

fn random_spin_element(sig: Signature, rng: &mut ChaCha8Rng) -> SpinElement {
    SpinElement::from_angle(sig, rng.gen_range(-1.0..1.0))
}

struct TaskOutcome {
    residual: f64,
    location: [f64; 2],
    refine_ratio: Option<f64>,
}

fn task_rng(seed: u64, task_idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(task_idx as u64))
}

fn require_killing<'a>(
    cfg: &'a VerificationConfig,
    task: &'static str,
) -> Result<&'a KillingCfg, CliError> {
    cfg.killing.as_ref().ok_or(CliError::Task {
        task,
        message: "killing section is required".into(),
    })
}

fn killing_data(kc: &KillingCfg) -> KillingData {
    KillingData {
        e_tensor: kc.e_tensor.clone(),
        alpha: kc.alpha.clone(),
        zeta: kc.zeta.clone(),
        a_const: kc.a_const,
        g_scalar: match &kc.g {
            GSpec::Synthesize => None,
            GSpec::Given(e) => Some(e.clone()),
        },
    }
}

fn run_task(
    cfg: &VerificationConfig,
    task_idx: usize,
    grid_refine: usize,
) -> Result<TaskOutcome, CliError> {
    let name = TASK_ORDER[task_idx];
    let mut rng = task_rng(cfg.seed, task_idx);
    let sig = cfg.signature;
    let points = cfg.grid_points();
    let cp = |x: f64, y: f64| (C::new(x, 0.0), C::new(y, 0.0));
    let mut worst = 0.0f64;
    let mut loc = [points[0].0, points[0].1];
    let mut track = |r: f64, x: f64, y: f64| {
        if r > worst {
            worst = r;
            loc = [x, y];
        }
    };

    match name {
        "gamma-check" => {
            let gammas = crate::clifford::GammaSet::new(sig);
            // Dirac condition
            for a in 0..2 {
                for b in 0..2 {
                    let anti = gammas
                        .gamma_up(a)
                        .mul(&gammas.gamma_up(b))
                        .add(&gammas.gamma_up(b).mul(&gammas.gamma_up(a)));
                    let expect = Mat2::identity().scale(C::new(2.0 * sig.eta_up(a, b), 0.0));
                    track(anti.max_diff(&expect), 0.0, 0.0);
                }
            }
            // covering map lands in SO(η) and is a homomorphism
            let eta = Mat2([
                [C::new(1.0, 0.0), C::new(0.0, 0.0)],
                [C::new(0.0, 0.0), C::new(sig.eta(), 0.0)],
            ]);
            for _ in 0..100 {
                let s1 = random_spin_element(sig, &mut rng);
                let s2 = random_spin_element(sig, &mut rng);
                let l1 = covering_map(sig, &s1);
                let l2 = covering_map(sig, &s2);
                let lt_eta_l = l1.transpose().mul(&eta).mul(&l1);
                track(lt_eta_l.max_diff(&eta), 0.0, 0.0);
                let composed = covering_map(sig, &s1.compose(sig, &s2));
                track(composed.max_diff(&l1.mul(&l2)), 0.0, 0.0);
            }
        }
        "ricci-identities" | "appendix-identities" => {
            let frame = cfg.frame()?;
            for &(x, y) in &points {
                let geo = geometry_at(&frame, cp(x, y), 5).map_err(|e| geom_err(name, e))?;
                for _ in 0..cfg.spinors_per_point {
                    let psi = random_spinor(&mut rng, 5);
                    let (r1, r2) = if name == "ricci-identities" {
                        ricci_identity_check(&psi, &geo)
                    } else {
                        appendix_identity_check(&psi, &geo)
                    }
                    .map_err(|e| classify(name, e.to_string(), true))?;
                    track(r1.max(r2), x, y);
                }
            }
        }
        "spin-covariance" => {
            let frame = cfg.frame()?;
            let (a_expr, b_expr) = match sig {
                Signature::Euclidean => ("cos(x*y)", "sin(x*y)"),
                Signature::Lorentzian => ("cosh(x + y^2)", "sinh(x + y^2)"),
            };
            let a_expr = expr::parse(a_expr).expect("fixture parses");
            let b_expr = expr::parse(b_expr).expect("fixture parses");
            for &(x, y) in &points {
                for _ in 0..cfg.spinors_per_point {
                    let psi = random_spinor(&mut rng, 4);
                    let r = spin_covariance_check(&frame, &psi, &a_expr, &b_expr, cp(x, y), 4)
                        .map_err(|e| geom_err(name, e))?;
                    track(r, x, y);
                }
            }
        }
        "killing-vector" => {
            let frame = cfg.frame()?;
            let kc = require_killing(cfg, name)?;
            for &(x, y) in &points {
                let geo = geometry_at(&frame, cp(x, y), 4).map_err(|e| geom_err(name, e))?;
                for v in [&kc.alpha, &kc.zeta] {
                    let r = killing_vector_residual(v, &geo, cp(x, y))
                        .map_err(|e| killing_err(name, e))?;
                    for row in &r {
                        for c in row {
                            track(c.norm(), x, y);
                        }
                    }
                }
            }
        }
        "killing-tensor" => {
            let frame = cfg.frame()?;
            let kc = require_killing(cfg, name)?;
            for &(x, y) in &points {
                let geo = geometry_at(&frame, cp(x, y), 4).map_err(|e| geom_err(name, e))?;
                let r = killing_tensor_residual(&kc.e_tensor, &geo, cp(x, y))
                    .map_err(|e| killing_err(name, e))?;
                track(r, x, y);
            }
        }
        "integrability" => {
            let frame = cfg.frame()?;
            let kc = require_killing(cfg, name)?;
            let run = |n: usize| {
                integrability_check(&kc.e_tensor, &frame, cfg.region, n, f64::INFINITY)
                    .map(|r| r.closedness_residual)
            };
            let base = run(cfg.grid.0.max(cfg.grid.1)).map_err(|e| killing_err(name, e))?;
            track(base, cfg.region.0, cfg.region.1);
            let mut refine = None;
            if grid_refine > 1 {
                let fine =
                    run(cfg.grid.0.max(cfg.grid.1) * grid_refine).map_err(|e| killing_err(name, e))?;
                refine = Some(if fine > 0.0 { base / fine } else { 1.0 });
            }
            return Ok(TaskOutcome {
                residual: worst,
                location: loc,
                refine_ratio: refine,
            });
        }
        "commutator-first" => {
            let frame = cfg.frame()?;
            let kc = require_killing(cfg, name)?;
            let g_const = match &kc.g {
                GSpec::Given(e) => e.eval_const().unwrap_or(C::new(0.0, 0.0)),
                GSpec::Synthesize => C::new(0.0, 0.0),
            };
            let op = SymmetryOperator::first_order(
                kc.zeta.clone(),
                kc.a_const,
                g_const,
                frame.clone(),
            );
            let dirac = DiracOperator::new(frame, cfg.mass);
            for &(x, y) in &points {
                for _ in 0..cfg.spinors_per_point {
                    let psi = random_spinor(&mut rng, 4);
                    let r = commutator_residual(&op, &dirac, &psi, cp(x, y))
                        .map_err(|e| classify(name, e.to_string(), true))?;
                    track(r, x, y);
                }
            }
        }
        "commutator-second" => {
            let frame = cfg.frame()?;
            let kc = require_killing(cfg, name)?;
            let op = SymmetryOperator::second_order(
                killing_data(kc),
                frame.clone(),
                (cfg.region.0, cfg.region.1),
                kc.g_steps,
            );
            let dirac = DiracOperator::new(frame, cfg.mass);
            for &(x, y) in &points {
                for _ in 0..cfg.spinors_per_point {
                    let psi = random_spinor(&mut rng, 4);
                    let r = commutator_residual(&op, &dirac, &psi, cp(x, y))
                        .map_err(|e| classify(name, e.to_string(), true))?;
                    track(r, x, y);
                }
            }
        }
        "d5-form" => {
            let m = cfg.liouville().ok_or(CliError::Task {
                task: name,
                message: "d5-form requires a liouville geometry".into(),
            })?;
            let spinors: Vec<SpinorJet> = (0..cfg.spinors_per_point.max(1))
                .map(|_| random_spinor(&mut rng, 3))
                .collect();
            let r = d5_dirac_form_check(&m, &points, &spinors).map_err(|e| sep_err(name, e))?;
            track(r, points[0].0, points[0].1);
        }
        "separate-solve" => {
            let m = cfg.liouville().ok_or(CliError::Task {
                task: name,
                message: "separate-solve requires a liouville geometry".into(),
            })?;
            let sc = cfg.separate.as_ref().ok_or(CliError::Task {
                task: name,
                message: "separate section is required".into(),
            })?;
            let xs = [cfg.region.0, 0.5 * (cfg.region.0 + cfg.region.2)];
            let run = |h: f64| -> Result<f64, CliError> {
                let sol = separate_solve(
                    &m,
                    sc.lambda,
                    sc.kappa,
                    sc.c1,
                    sc.c2,
                    (sc.y_start, sc.y_end),
                    h,
                )
                .map_err(|e| sep_err(name, e))?;
                separated_dirac_residual(&m, &sol, &xs).map_err(|e| sep_err(name, e))
            };
            let base = run(sc.h)?;
            track(base, xs[0], sc.y_start);
            let mut refine = None;
            if grid_refine > 1 {
                let fine = run(sc.h / grid_refine as f64)?;
                refine = Some(if fine > 0.0 { base / fine } else { 1.0 });
            }
            return Ok(TaskOutcome {
                residual: worst,
                location: loc,
                refine_ratio: refine,
            });
        }
        "minkowski-complex" => {
            let spinors: Vec<SpinorJet> = (0..8).map(|_| random_spinor(&mut rng, 3)).collect();
            let point = (C::new(0.2, 0.0), C::new(-0.1, 0.0));
            let r = minkowski_form_residual(&spinors, point).map_err(|e| sep_err(name, e))?;
            track(r, 0.2, -0.1);
            for _ in 0..10 {
                let p = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let q = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let (lambda, c1, c2) = minkowski_exponential(p, q);
                if lambda.norm() < 1e-3 {
                    continue;
                }
                let psi = exponential_spinor(p, q, c1, c2, point, 3);
                let d = minkowski_z_form(&psi)
                    .map_err(|e| classify(name, e.to_string(), true))?
                    .sub_trunc(&psi.scale(lambda));
                track(d.max_abs() / psi.max_abs().max(1e-300), 0.2, -0.1);
            }
        }
        "hj-identities" => {
            for _ in 0..1000 {
                let px = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let py = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let (rh, rl) = hj_momenta_identities(px, py);
                track(rh.max(rl), 0.0, 0.0);
            }
        }
        _ => unreachable!("task registry mismatch"),
    }

    Ok(TaskOutcome {
        residual: worst,
        location: loc,
        refine_ratio: None,
    })
}

/// Run the configured tasks and assemble the report.
pub fn run_verify(cfg: &VerificationConfig, grid_refine: usize) -> Result<Report, CliError> {
    let mut tasks = Vec::new();
    for &(idx, tol) in &cfg.tasks {
        let outcome = run_task(cfg, idx, grid_refine)?;
        tasks.push(TaskReport {
            name: TASK_ORDER[idx],
            residual: outcome.residual,
            location: outcome.location,
            tolerance: tol,
            pass: outcome.residual <= tol,
            refine_ratio: outcome.refine_ratio,
        });
    }
    let overall_pass = tasks.iter().all(|t| t.pass);
    Ok(Report {
        seed: cfg.seed,
        tasks,
        overall_pass,
    })
}

/// Run the separation solver described by the config.
pub fn run_separate(cfg: &VerificationConfig) -> Result<SeparatedSolution, CliError> {
    let task = "separate-solve";
    let m = cfg.liouville().ok_or(CliError::Task {
        task,
        message: "separate requires a liouville geometry".into(),
    })?;
    let sc = cfg.separate.as_ref().ok_or(CliError::Task {
        task,
        message: "separate section is required".into(),
    })?;
    m.check_region(cfg.region, cfg.grid.0.max(cfg.grid.1))
        .map_err(|e| sep_err(task, e))?;
    separate_solve(
        &m,
        sc.lambda,
        sc.kappa,
        sc.c1,
        sc.c2,
        (sc.y_start, sc.y_end),
        sc.h,
    )
    .map_err(|e| sep_err(task, e))
}
