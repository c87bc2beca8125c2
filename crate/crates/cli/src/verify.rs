use std::collections::BTreeMap;
use std::time::Instant;

use chern_core::chern::{
    ascent_check, bottchern_check, cocycle_check, descent_check, positivity_check, structural_check, Check,
    ChernError, Residual, ResidualReport, ABSOLUTE_TOLERANCE,
};
use chern_core::cholesky::Metric;
use chern_core::sample::{random_gauge, random_metric};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{CheckKind, VerifyConfig};
use crate::report::{CheckRecord, Report};

/// Items reported alongside a check without entering its verdict.
const INFORMATIONAL: &[&str] = &["bc2(g*hg) - bc2(h) = c_ab/2"];

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a.wrapping_add(b.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SHA-256 over the metric's shape and every jet coefficient.
pub fn metric_digest(m: &Metric) -> String {
    let mut h = Sha256::new();
    for v in [m.rank() as u64, m.n() as u64, m.order() as u64] {
        h.update(v.to_le_bytes());
    }
    for jet in m.matrix().entries() {
        h.update((jet.len() as u64).to_le_bytes());
        for (idx, c) in jet.terms() {
            for i in 0..m.n() {
                h.update([idx.alpha(i) as u8, idx.beta(i) as u8]);
            }
            h.update(c.re.to_le_bytes());
            h.update(c.im.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn threshold(r: &Residual, tol: f64) -> f64 {
    if r.is_relative() {
        tol
    } else {
        ABSOLUTE_TOLERANCE
    }
}

/// The item closest to (or furthest past) its threshold.
fn binding<'a>(checks: impl Iterator<Item = &'a Check>, tol: f64) -> Option<&'a Check> {
    checks
        .filter(|c| !INFORMATIONAL.contains(&c.name.as_str()))
        .max_by(|a, b| {
            let ra = a.residual.value() / threshold(&a.residual, tol);
            let rb = b.residual.value() / threshold(&b.residual, tol);
            ra.total_cmp(&rb)
        })
}

fn run(kind: CheckKind, metric: &Metric, gauge_seed: u64) -> Result<ResidualReport, ChernError> {
    let single = |name: &str, r: Residual| {
        let mut rep = ResidualReport::new();
        rep.push(name, r);
        rep
    };
    Ok(match kind {
        CheckKind::DescentK2 => descent_check(metric, 2)?,
        CheckKind::DescentK3 => descent_check(metric, 3)?,
        CheckKind::DescentK4 => descent_check(metric, 4)?,
        CheckKind::AscentK2 => ascent_check(metric, 2)?,
        CheckKind::AscentK3 => ascent_check(metric, 3)?,
        CheckKind::Bc1 => single("dbar del log det h = ch_1", bottchern_check(metric, 1)?),
        CheckKind::Bc2 => single("dbar del (2 bc2) = 2 ch_2", bottchern_check(metric, 2)?),
        CheckKind::Bc3 => single("dbar del (6 bc3) = 6 ch_3", bottchern_check(metric, 3)?),
        CheckKind::Positivity => {
            let min = positivity_check(metric)?;
            // a violation is the amount by which the smallest eigenvalue dips below zero
            single("min eigenvalue of sqrt(-1) omega_11 >= 0", Residual { abs: (-min).max(0.0), scale: 1.0 })
        }
        CheckKind::Cocycle => {
            let g = random_gauge(gauge_seed, metric.rank(), metric.n(), metric.order(), false);
            cocycle_check(metric, &g)?
        }
        CheckKind::Structural => structural_check(metric)?,
    })
}

/// Runs one check on one seeded sample.
pub fn run_sample(kind: CheckKind, config: &VerifyConfig, sample: usize) -> CheckRecord {
    let plan = config.plan(kind);
    let tol = config.tolerance(kind);
    let (r, n) = plan.shape(sample);
    let metric_seed = mix(config.seed, sample as u64);
    let start = Instant::now();
    let metric = random_metric(metric_seed, r, n, plan.order);

    let mut params = BTreeMap::new();
    params.insert("sample".to_string(), json!(sample));
    params.insert("rank".to_string(), json!(r));
    params.insert("dim".to_string(), json!(n));
    params.insert("order".to_string(), json!(plan.order));
    params.insert("metric_seed".to_string(), json!(metric_seed));
    params.insert("input_digest".to_string(), json!(metric_digest(&metric)));
    params.insert("configured_tolerance".to_string(), json!(format!("{tol:e}")));

    let (residual, threshold_used) = match run(kind, &metric, mix(metric_seed, 0xC0C7)) {
        Ok(rep) => {
            let failing: Vec<Value> = rep
                .checks
                .iter()
                .filter(|c| !INFORMATIONAL.contains(&c.name.as_str()) && !c.residual.passes(tol))
                .map(|c| json!(c.name))
                .collect();
            params.insert("items".to_string(), json!(rep.len()));
            params.insert("failing".to_string(), Value::Array(failing));
            for c in rep.checks.iter().filter(|c| INFORMATIONAL.contains(&c.name.as_str())) {
                params.insert(format!("info: {}", c.name), json!(format!("{:.16e}", c.residual.value())));
            }
            match binding(rep.checks.iter(), tol) {
                Some(c) => {
                    params.insert("worst".to_string(), json!(c.name));
                    params.insert("mode".to_string(), json!(if c.residual.is_relative() { "relative" } else { "absolute" }));
                    (c.residual.value(), threshold(&c.residual, tol))
                }
                None => (0.0, tol),
            }
        }
        Err(e) => {
            params.insert("error".to_string(), json!(e.to_string()));
            (f64::NAN, tol)
        }
    };
    let millis = start.elapsed().as_millis() as u64;
    CheckRecord::new(kind.name(), params, residual, threshold_used, millis)
}

/// Runs every selected check over its samples. Records come back in
/// configuration order whatever order the work finishes in.
pub fn cmd_verify(config: &VerifyConfig) -> Result<(i32, Report), String> {
    config.validate()?;
    let jobs: Vec<(CheckKind, usize)> = config
        .checks
        .iter()
        .flat_map(|&k| (0..config.plan(k).sample_count(config.samples)).map(move |s| (k, s)))
        .collect();
    let records: Vec<CheckRecord> = jobs.par_iter().map(|&(k, s)| run_sample(k, config, s)).collect();
    let report = Report::new(config.seed, records);
    Ok((if report.all_passed() { 0 } else { 1 }, report))
}

/// Thread pool honoring `CHERN_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CHERN_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| format!("CHERN_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            return Err("CHERN_THREADS must be at least 1".into());
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}
