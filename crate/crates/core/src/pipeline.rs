//! End-to-end run from a bubble configuration to the covering bounds.
//!
//! Stages run in a fixed order and stop at the first failure. Every stage that completes
//! leaves one JSON artifact; the output is a pure function of the input and the seed.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::artifacts::{decomposition_json, fiber_point_json};
use crate::bounds::{choose_lambda, intro_m_lambda, intro_n, theorem42_params, thm316_count, GeometryConstants};
use crate::bubbles::{associate_tree, verify_association, BubbleFile, TreeAssociation};
use crate::curve_families::{decorate, dimension_report, in_compact_subset, CompactnessParams, ThickThinDecomposition};
use crate::sampling::{random_fiber_point, random_standard_config};

pub const STAGES: [&str; 7] = [
    "associate_tree",
    "verify_association",
    "theorem42_params",
    "in_compact_subset",
    "decomposition",
    "decorate",
    "bounds",
];

/// Fiber points classified in the decomposition stage.
pub const DECOMPOSITION_SAMPLES: usize = 32;
/// Smallest ratio ρ/|z| of a child circle that decoration can resolve.
pub const RESOLUTION: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("malformed input: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub seed: u64,
    pub consts: GeometryConstants,
    pub ell: u64,
    /// Energy bound A; `None` uses |T|·λ².
    pub energy: Option<f64>,
    pub delta: f64,
    pub nu_k: u64,
    /// Sets γ = 0 on the first interior edge after association.
    pub corrupt_gamma: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            seed: 0,
            consts: GeometryConstants::default(),
            ell: 0,
            energy: None,
            delta: 0.5,
            nu_k: 1,
            corrupt_gamma: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub verdict: Verdict,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl PipelineReport {
    /// All seven stages ran and passed.
    pub fn passed(&self) -> bool {
        self.stages.len() == STAGES.len() && self.stages.iter().all(|s| s.verdict == Verdict::Pass)
    }

    pub fn failed_stage(&self) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.verdict == Verdict::Fail)
    }
}

/// A named JSON document, already rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub report: PipelineReport,
    pub artifacts: Vec<Artifact>,
}

impl PipelineRun {
    pub fn report_json(&self) -> String {
        render(&serde_json::to_value(&self.report).expect("report serializes"))
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

struct Recorder {
    report: PipelineReport,
    artifacts: Vec<Artifact>,
}

impl Recorder {
    fn pass(&mut self, stage: &str, value: Value) {
        let name = format!("{stage}.json");
        self.artifacts.push(Artifact { name: name.clone(), contents: render(&value) });
        self.report.stages.push(StageRecord { name: stage.into(), verdict: Verdict::Pass, artifacts: vec![name], diagnostic: None });
    }

    /// Records a failed stage, keeping its artifact when there is one.
    fn fail(mut self, stage: &str, value: Option<Value>, diagnostic: String) -> PipelineRun {
        let mut artifacts = Vec::new();
        if let Some(v) = value {
            let name = format!("{stage}.json");
            self.artifacts.push(Artifact { name: name.clone(), contents: render(&v) });
            artifacts.push(name);
        }
        self.report.stages.push(StageRecord {
            name: stage.into(),
            verdict: Verdict::Fail,
            artifacts,
            diagnostic: Some(format!("{stage}: {diagnostic}")),
        });
        self.finish()
    }

    fn finish(self) -> PipelineRun {
        PipelineRun { report: self.report, artifacts: self.artifacts }
    }
}

/// Random standard configuration of `n` points with ε = 1/8.
pub fn random_bubble_file(seed: u64, n: usize) -> Result<BubbleFile, PipelineError> {
    let eps = 0.125;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random_standard_config(&mut rng, n, eps).map_err(|e| PipelineError::Malformed(e.to_string()))?;
    Ok(BubbleFile::new(&cfg, eps))
}

pub fn run_pipeline(input: &BubbleFile, opts: &PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let cfg = input.config().map_err(|e| PipelineError::Malformed(e.to_string()))?;
    opts.consts.validate().map_err(|e| PipelineError::Malformed(e.to_string()))?;
    let eps = input.eps;
    let mut rec = Recorder { report: PipelineReport { seed: opts.seed, stages: Vec::new() }, artifacts: Vec::new() };

    let mut assoc: TreeAssociation<f64> = match associate_tree(&cfg, eps) {
        Ok(a) => a,
        Err(e) => return Ok(rec.fail(STAGES[0], None, e.to_string())),
    };
    if opts.corrupt_gamma {
        let e = assoc.tree().full_edges().into_iter().next();
        let e = e.ok_or_else(|| PipelineError::Malformed("no interior edge to corrupt".into()))?;
        assoc.point.set_gamma(e, Complex::new(0.0, 0.0)).map_err(|e| PipelineError::Malformed(e.to_string()))?;
    }
    rec.pass(STAGES[0], serde_json::to_value(&assoc).expect("association serializes"));

    let verification = verify_association(&cfg, &assoc, eps);
    let value = serde_json::to_value(&verification).expect("report serializes");
    if !verification.passed() {
        let mut failed = Vec::new();
        for (label, check) in [("(i)", &verification.compact), ("(ii)", &verification.bubbles), ("(iii)", &verification.gamma)] {
            if !check.pass {
                failed.push(format!("{label} {}", check.detail.first().map_or("", String::as_str)));
            }
        }
        return Ok(rec.fail(STAGES[1], Some(value), failed.join("; ")));
    }
    rec.pass(STAGES[1], value);

    let p = &assoc.point;
    let t = p.tree();
    let lambda = match choose_lambda(eps, &opts.consts) {
        Ok(l) => l,
        Err(e) => return Ok(rec.fail(STAGES[2], None, e.to_string())),
    };
    let params = match theorem42_params(t, eps, lambda.lambda, &opts.consts) {
        Ok(x) => x,
        Err(e) => return Ok(rec.fail(STAGES[2], None, e.to_string())),
    };
    rec.pass(STAGES[2], json!({ "eps": eps, "lambda": lambda, "params": params }));

    let c = match CompactnessParams::new(params.theta, params.tau, params.alpha.clone()) {
        Ok(c) => c,
        Err(e) => return Ok(rec.fail(STAGES[3], None, e.to_string())),
    };
    match in_compact_subset(p, &c) {
        Ok(r) if r.member => rec.pass(STAGES[3], serde_json::to_value(&r).expect("report serializes")),
        Ok(r) => {
            let first = format!("{:?}", r.first().expect("violation"));
            return Ok(rec.fail(STAGES[3], Some(serde_json::to_value(&r).expect("report serializes")), first));
        }
        Err(e) => return Ok(rec.fail(STAGES[3], None, e.to_string())),
    }

    let d = match ThickThinDecomposition::new(p, &c) {
        Ok(d) => d,
        Err(e) => return Ok(rec.fail(STAGES[4], None, e.to_string())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut uncovered = None;
    for i in 0..DECOMPOSITION_SAMPLES {
        let regions = random_fiber_point(&mut rng, p).and_then(|q| d.classify(&q));
        match regions {
            Ok(r) if !r.is_empty() && r.len() <= 2 => {
                for region in r {
                    *counts.entry(region.to_string()).or_default() += 1;
                }
            }
            Ok(r) => {
                uncovered.get_or_insert(format!("sample {i} lies in {} regions", r.len()));
            }
            Err(e) => {
                uncovered.get_or_insert(format!("sample {i}: {e}"));
            }
        }
    }
    let mut value = decomposition_json(&d);
    value["samples"] = json!({ "count": DECOMPOSITION_SAMPLES, "regions": counts });
    if let Some(msg) = uncovered {
        return Ok(rec.fail(STAGES[4], Some(value), msg));
    }
    rec.pass(STAGES[4], value);

    let mu = t.degree_sum();
    let m = 3 * mu;
    for (v, e) in t.incident_pairs() {
        if t.negative(e) != Some(v) {
            continue;
        }
        let k = p.coord(e).expect("child edge");
        if k.rho.norm() < RESOLUTION * k.z.norm() {
            let msg = format!("circle ({v},{e}) has radius {:e} at distance {:e}, below floating point resolution", k.rho.norm(), k.z.norm());
            return Ok(rec.fail(STAGES[5], None, msg));
        }
    }
    match decorate(p, &c, &[], m) {
        Ok(points) => {
            let pts: Vec<Value> = points.iter().map(fiber_point_json).collect();
            rec.pass(STAGES[5], json!({ "m": m, "points": pts }));
        }
        Err(e) => return Ok(rec.fail(STAGES[5], None, e.to_string())),
    }

    let energy = opts.energy.unwrap_or(cfg.len() as f64 * lambda.lambda * lambda.lambda);
    let bounds = (|| {
        let size = intro_m_lambda(opts.ell, energy, lambda.lambda, opts.consts.c_abs)?;
        let n = intro_n(opts.delta, &opts.consts, opts.nu_k, size.log_lambda, size.m, opts.ell)?;
        let cover = thm316_count(opts.delta, mu, params.lambda_max(), &opts.consts, opts.nu_k)?;
        Ok::<_, crate::bounds::BoundsError>(json!({
            "A": energy,
            "ell": opts.ell,
            "delta": opts.delta,
            "nu_k": opts.nu_k,
            "m": size.m,
            "logLambda": size.log_lambda,
            "N": n.to_json(),
            "dimension": dimension_report(t),
            "cover": {
                "mu": mu,
                "Lambda": params.lambda_max(),
                "count": cover.count.to_json(),
                "base_net": cover.base_net.to_json(),
                "fiber_net": cover.fiber_net.to_json(),
                "pieces": cover.pieces,
            },
        }))
    })();
    match bounds {
        Ok(v) => rec.pass(STAGES[6], v),
        Err(e) => return Ok(rec.fail(STAGES[6], None, e.to_string())),
    }
    Ok(rec.finish())
}
