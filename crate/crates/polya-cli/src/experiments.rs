//! Experiment runners. Each returns a [`Report`] whose rows depend only on
//! the configuration and its seed.

use std::time::Instant;

use anyhow::{anyhow, bail};
use polya_core::domains::{CompactSet, Shape};
use polya_core::functionals::{coeffs_from_measure, polya_sequence};
use polya_core::indexcomb::counts;
use polya_core::measures::{bernstein_markov_ratio, ln_factorial, z_s_gram, z_s_montecarlo, Measure};
use polya_core::rng::derive_seed;
use polya_core::vandermonde::{fekete_search, transfinite_diameter_estimate};
use rayon::prelude::*;

use crate::config::{Direction, ExperimentConfig, ExperimentKind};
use crate::report::{Report, ReportRow, Rows, Timing};

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match cfg.experiment {
        ExperimentKind::Tdiam => run_tdiam(cfg),
        ExperimentKind::Fekete => run_fekete(cfg),
        ExperimentKind::Hankel => run_hankel(cfg),
        ExperimentKind::PolyaCheck => run_polya_check(cfg),
        ExperimentKind::Sharpness => run_sharpness(cfg),
        ExperimentKind::Stability => run_stability(cfg),
        ExperimentKind::BmRatio => run_bm_ratio(cfg),
        ExperimentKind::ZsCheck => run_zs_check(cfg),
    }?;
    report.timings.push(Timing { stage: "total".into(), seconds: start.elapsed().as_secs_f64() });
    Ok(report)
}

fn rows(cfg: &ExperimentConfig) -> Rows<'_> {
    Rows { experiment: &cfg.id, seed: cfg.seed }
}

fn m_s(n: usize, s: u32) -> anyhow::Result<usize> {
    Ok(usize::try_from(counts(n, s)?.m)?)
}

/// Estimate of `d_s(K)` and how it was obtained.
#[derive(Clone, Debug)]
pub struct DsEstimate {
    pub s: u32,
    pub d_s: f64,
    pub source: &'static str,
}

/// Fekete search for `s ≤ fekete_s_max`, else `Z_s(K, μ)^{1/(2 l_s)}`.
fn d_s_estimate(cfg: &ExperimentConfig, k: &CompactSet, mu: Option<&Measure>, s: u32) -> anyhow::Result<DsEstimate> {
    if s <= cfg.fekete_s_max {
        let est = transfinite_diameter_estimate(k, s, &cfg.search.strategy(), derive_seed(cfg.seed, s as u64))?;
        return Ok(DsEstimate { s, d_s: est.d_s, source: "fekete" });
    }
    let mu = mu.ok_or_else(|| anyhow!("degree {s} exceeds fekete_s_max = {} and no measure is configured", cfg.fekete_s_max))?;
    let log_z = z_s_gram(k, mu, s, cfg.precision.precision())?.log_abs;
    let l = counts(k.dim(), s)?.l as f64;
    Ok(DsEstimate { s, d_s: (log_z / (2.0 * l)).exp(), source: "moment" })
}

fn d_s_estimates(cfg: &ExperimentConfig, k: &CompactSet, mu: Option<&Measure>, degrees: &[u32]) -> anyhow::Result<Vec<DsEstimate>> {
    degrees.par_iter().map(|&s| d_s_estimate(cfg, k, mu, s)).collect()
}

pub fn run_tdiam(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let b = rows(cfg);
    let strategy = cfg.search.strategy();
    let degrees = cfg.degrees.list();
    let ests = degrees
        .par_iter()
        .map(|&s| transfinite_diameter_estimate(&k, s, &strategy, derive_seed(cfg.seed, s as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::default();
    for e in ests {
        report.rows.push(b.row("fekete", Some(e.s), None, None, "d_s", e.d_s));
        report.rows.push(b.row("fekete", Some(e.s), None, None, "log_v", e.log_v));
        report.rows.push(b.row("fekete", Some(e.s), None, None, "m_s", e.m_s as f64));
        report.rows.push(b.row("fekete", Some(e.s), None, None, "l_s", e.l_s as f64));
    }
    Ok(report)
}

pub fn run_fekete(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let b = rows(cfg);
    let strategy = cfg.search.strategy();
    let mut report = Report::default();
    for s in cfg.degrees.list() {
        let i = m_s(k.dim(), s)?;
        let res = fekete_search(&k, i, &strategy, derive_seed(cfg.seed, s as u64))?;
        report.rows.push(b.row("search", Some(s), Some(i), None, "log_abs", res.log_abs));
        report.rows.push(b.row("search", Some(s), Some(i), None, "best_restart", res.trace.best_restart as f64));
        for t in &res.trace.restarts {
            report.rows.push(b.row("restart", Some(s), Some(t.restart), None, "initial_log_abs", t.initial_log_abs));
            report.rows.push(b.row("restart", Some(s), Some(t.restart), None, "final_log_abs", t.final_log_abs));
            report.rows.push(b.row("restart", Some(s), Some(t.restart), None, "passes", t.pass_gains.len() as f64));
        }
        for (beta, p) in res.configuration.points().iter().enumerate() {
            for (nu, z) in p.iter().enumerate() {
                report.rows.push(b.row("point", Some(s), Some(beta + 1), Some(nu as u32 + 1), "re", z.re));
                report.rows.push(b.row("point", Some(s), Some(beta + 1), Some(nu as u32 + 1), "im", z.im));
            }
        }
    }
    Ok(report)
}

fn i_max(cfg: &ExperimentConfig, n: usize) -> anyhow::Result<usize> {
    match cfg.i_max {
        Some(i) if i >= 1 => Ok(i),
        Some(_) => bail!("i_max must be at least 1"),
        None => m_s(n, cfg.degrees.top()),
    }
}

pub fn run_hankel(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let a = cfg.coefficients()?;
    let b = rows(cfg);
    let seq = polya_sequence(&a, i_max(cfg, k.dim())?, cfg.precision.precision())?;
    let mut report = Report::default();
    for r in &seq.rows {
        report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "log_abs_h", r.log_abs));
        if let Some(d) = r.d {
            report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "d_i", d));
        }
        report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "running_max", r.running_max));
    }
    for r in seq.diagonal() {
        if let Some(d) = r.d {
            report.rows.push(b.row("diagonal", Some(r.s), Some(r.i), None, "d_i", d));
        }
    }
    report.rows.push(b.row("summary", None, None, None, "exact", seq.exact as u8 as f64));
    Ok(report)
}

/// Checks `D_i ≤ d_{s(i)} + slack` for every `i ≤ i_max`, where `d_{s(i)}`
/// is the estimate at the degree of the `i`-th multi-index.
pub fn run_polya_check(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let mu = cfg.measure()?;
    let a = cfg.coefficients()?;
    let b = rows(cfg);
    let mut report = Report::default();

    let t = Instant::now();
    let seq = polya_sequence(&a, i_max(cfg, k.dim())?, cfg.precision.precision())?;
    report.timings.push(Timing { stage: "hankel".into(), seconds: t.elapsed().as_secs_f64() });

    let top = seq.rows.last().map_or(0, |r| r.s).max(cfg.degrees.top());
    let degrees: Vec<u32> = (1..=top).collect();
    let t = Instant::now();
    let ests = d_s_estimates(cfg, &k, mu.as_ref(), &degrees)?;
    report.timings.push(Timing { stage: "d_s".into(), seconds: t.elapsed().as_secs_f64() });
    for e in &ests {
        report.rows.push(b.row(e.source, Some(e.s), None, None, "d_s", e.d_s));
    }

    let slack = cfg.tolerances.slack;
    let mut max_excess = f64::NEG_INFINITY;
    for r in &seq.rows {
        report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "log_abs_h", r.log_abs));
        let Some(d) = r.d else { continue };
        let bound = ests[r.s as usize - 1].d_s;
        report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "d_i", d));
        report.rows.push(b.row("hankel", Some(r.s), Some(r.i), None, "excess", d - bound));
        max_excess = max_excess.max(d - bound);
        if d > bound + slack {
            report.flag(format!("D_{} = {d:.6} exceeds d_{} estimate {bound:.6} + slack {slack}", r.i, r.s));
        }
    }
    report.rows.push(b.row("summary", None, None, None, "max_d", seq.max_d()));
    report.rows.push(b.row("summary", None, None, None, "max_excess", max_excess));
    report.rows.push(b.row("summary", None, None, None, "slack", slack));
    Ok(report)
}

/// Compares `log Z_s` from the Gram matrix with `log(m_s!·|H_{m_s}|)` and
/// tracks `|D_{m_s} - d_s|`.
pub fn run_sharpness(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    if !k.is_real() {
        return Err(polya_core::Error::NotReal(
            "sharpness needs a compact subset of ℝⁿ: only there do the Gram and Hankel matrices of μ coincide".into(),
        )
        .into());
    }
    let mu = cfg.measure()?.ok_or_else(|| anyhow!("sharpness needs a measure"))?;
    let n = k.dim();
    let degrees = cfg.degrees.list();
    if degrees.contains(&0) {
        bail!("sharpness degrees must be at least 1");
    }
    let b = rows(cfg);
    let precision = cfg.precision.precision();
    let mut report = Report::default();

    let t = Instant::now();
    let a = coeffs_from_measure(mu.clone());
    let seq = polya_sequence(&a, m_s(n, cfg.degrees.top())?, precision)?;
    report.timings.push(Timing { stage: "hankel".into(), seconds: t.elapsed().as_secs_f64() });

    let t = Instant::now();
    let gram: Vec<f64> = degrees
        .par_iter()
        .map(|&s| z_s_gram(&k, &mu, s, precision).map(|z| z.log_abs))
        .collect::<Result<_, _>>()?;
    report.timings.push(Timing { stage: "gram".into(), seconds: t.elapsed().as_secs_f64() });

    let t = Instant::now();
    let fekete_degrees: Vec<u32> = degrees.iter().copied().filter(|&s| s <= cfg.fekete_s_max).collect();
    let fekete = d_s_estimates(cfg, &k, Some(&mu), &fekete_degrees)?;
    report.timings.push(Timing { stage: "d_s".into(), seconds: t.elapsed().as_secs_f64() });

    let tol = cfg.tolerances.identity;
    for (q, &s) in degrees.iter().enumerate() {
        let c = counts(n, s)?;
        let row = &seq.rows[c.m as usize - 1];
        let log_hankel = ln_factorial(c.m) + row.log_abs;
        let log_gram = gram[q];
        let diff = if log_gram == log_hankel { 0.0 } else { (log_gram - log_hankel).abs() };
        let d = row.d.unwrap_or(0.0);
        let (d_s, source) = match fekete.iter().find(|e| e.s == s) {
            Some(e) => (e.d_s, e.source),
            None => ((log_gram / (2.0 * c.l as f64)).exp(), "moment"),
        };
        report.rows.push(b.row("identity", Some(s), Some(c.m as usize), None, "log_z_gram", log_gram));
        report.rows.push(b.row("identity", Some(s), Some(c.m as usize), None, "log_z_hankel", log_hankel));
        report.rows.push(b.row("identity", Some(s), Some(c.m as usize), None, "abs_diff", diff));
        report.rows.push(b.row("convergence", Some(s), Some(c.m as usize), None, "d_ms", d));
        report.rows.push(b.row(source, Some(s), None, None, "d_s", d_s));
        report.rows.push(b.row("convergence", Some(s), Some(c.m as usize), None, "gap", (d - d_s).abs()));
        if diff > tol {
            report.flag(format!("s = {s}: Gram and Hankel routes to log Z_s differ by {diff:e} > {tol:e}"));
        }
    }
    report.rows.push(b.row("summary", None, None, None, "exact", seq.exact as u8 as f64));
    Ok(report)
}

/// `c` with `member = c·base` up to translation, for interval, disk and
/// circle sets and products of them.
fn homothety_ratio(base: &CompactSet, member: &CompactSet) -> Option<f64> {
    match (base.shape(), member.shape()) {
        (Shape::Interval { a, b }, Shape::Interval { a: a2, b: b2 }) => Some((b2 - a2) / (b - a)),
        (Shape::Disk { radius: r, .. }, Shape::Disk { radius: r2, .. })
        | (Shape::Circle { radius: r, .. }, Shape::Circle { radius: r2, .. }) => Some(r2 / r),
        (Shape::Product { factors: f }, Shape::Product { factors: g }) if f.len() == g.len() => {
            let ratios: Option<Vec<f64>> = f.iter().zip(g).map(|(x, y)| homothety_ratio(x, y)).collect();
            let ratios = ratios?;
            let first = ratios[0];
            ratios.iter().all(|r| (r - first).abs() <= 1e-15 * first).then_some(first)
        }
        _ => None,
    }
}

/// `d_s(K_j)` along a nested family at each configured degree, with the
/// scaling-law prediction and an extrapolated limit row.
pub fn run_stability(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let spec = cfg.family.as_ref().ok_or_else(|| anyhow!("stability needs a family"))?;
    let family = spec.build(k.clone());
    let js: Vec<u32> = (spec.j_min..=spec.j_max).collect();
    let members = js.iter().map(|&j| family.member(j)).collect::<Result<Vec<_>, _>>()?;
    let b = rows(cfg);
    let tol = cfg.tolerances.stability;
    let mut report = Report::default();
    for s in cfg.degrees.list() {
        if s == 0 {
            bail!("stability degrees must be at least 1");
        }
        let base = d_s_estimate(cfg, &k, None, s)?.d_s;
        report.rows.push(b.row("base", Some(s), None, None, "d_s", base));
        let column: Vec<f64> = members
            .par_iter()
            .map(|m| d_s_estimate(cfg, m, None, s).map(|e| e.d_s))
            .collect::<anyhow::Result<_>>()?;
        for ((&j, m), &d) in js.iter().zip(&members).zip(&column) {
            report.rows.push(b.row("member", Some(s), None, Some(j), "d_s", d));
            if let Some(c) = homothety_ratio(&k, m) {
                let expected = base * c;
                report.rows.push(b.row("member", Some(s), None, Some(j), "expected", expected));
                if (d - expected).abs() > tol {
                    report.flag(format!("s = {s}, j = {j}: d_s = {d:.6} but the scaling law predicts {expected:.6}"));
                }
            }
        }
        for (w, pair) in column.windows(2).enumerate() {
            let (j, next) = (js[w], js[w + 1]);
            let ok = match spec.direction {
                Direction::Outer => pair[1] < pair[0],
                Direction::Inner => pair[1] > pair[0],
                Direction::Constant => (pair[1] - pair[0]).abs() <= 1e-12 * pair[0].abs().max(1.0),
            };
            if !ok {
                report.flag(format!("s = {s}: d_s(K_{next}) = {:.9} breaks the trend after d_s(K_{j}) = {:.9}", pair[1], pair[0]));
            }
        }
        // d_s(K_j) = d_s(K) + c/j + O(1/j²): Richardson extrapolation from j and j/2.
        let last = *js.last().unwrap();
        if let Some(h) = js.iter().position(|&j| 2 * j == last) {
            let limit = 2.0 * column[column.len() - 1] - column[h];
            report.rows.push(b.row("limit", Some(s), None, None, "d_s", limit));
            report.rows.push(b.row("limit", Some(s), None, None, "abs_diff", (limit - base).abs()));
            if (limit - base).abs() > tol {
                report.flag(format!("s = {s}: extrapolated limit {limit:.6} differs from the base value {base:.6}"));
            }
        }
    }
    Ok(report)
}

fn default_grid_per_axis(k: &CompactSet) -> usize {
    let d = k.param_dim().max(1) as f64;
    4096f64.powf(1.0 / d).ceil() as usize
}

pub fn run_bm_ratio(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let mu = cfg.measure()?.ok_or_else(|| anyhow!("bm-ratio needs a measure"))?;
    let grid = k.grid(cfg.grid_per_axis.unwrap_or_else(|| default_grid_per_axis(&k)));
    let b = rows(cfg);
    let mut report = Report::default();
    for s in cfg.degrees.list() {
        let ratio = bernstein_markov_ratio(&k, &mu, s, &grid)?;
        report.rows.push(b.row("bm", Some(s), None, None, "ratio", ratio));
        if s > 0 {
            report.rows.push(b.row("bm", Some(s), None, None, "ratio_root", ratio.powf(1.0 / s as f64)));
        }
    }
    report.rows.push(b.row("summary", None, None, None, "grid_points", grid.len() as f64));
    Ok(report)
}

pub fn run_zs_check(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let k = cfg.compact_set()?;
    let mu = cfg.measure()?.ok_or_else(|| anyhow!("zs-check needs a measure"))?;
    let b = rows(cfg);
    let sigmas = cfg.tolerances.sigmas;
    let mut report = Report::default();
    let mut cells: Vec<ReportRow> = Vec::new();
    for s in cfg.degrees.list() {
        let gram = z_s_gram(&k, &mu, s, cfg.precision.precision())?;
        let mc = z_s_montecarlo(&k, &mu, s, cfg.samples, derive_seed(cfg.seed, s as u64))?;
        let z = gram.value().re;
        let err = (mc.estimate - z).abs();
        let score = if mc.std_error > 0.0 { err / mc.std_error } else if err == 0.0 { 0.0 } else { f64::INFINITY };
        cells.push(b.row("zs", Some(s), None, None, "log_z_gram", gram.log_abs));
        cells.push(b.row("zs", Some(s), None, None, "z_gram", z));
        cells.push(b.row("zs", Some(s), None, None, "z_mc", mc.estimate));
        cells.push(b.row("zs", Some(s), None, None, "std_error", mc.std_error));
        cells.push(b.row("zs", Some(s), None, None, "z_score", score));
        if score > sigmas {
            report.flag(format!("s = {s}: Monte Carlo {:.6e} ± {:.2e} disagrees with Gram {z:.6e}", mc.estimate, mc.std_error));
        }
    }
    report.rows = cells;
    Ok(report)
}
