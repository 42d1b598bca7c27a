//! Vandermondians, Fekete configurations and transfinite-diameter estimates.
//!
//! `V(ζ₁,…,ζ_i) = det(e_α(ζ_β))` with rows indexed by the first `i`
//! monomials of the graded enumeration and columns by points. All magnitudes
//! stay in the log domain.
//!
//! Replacing every monomial `z^k` by a product `∏ P_{k_ν}(z_ν)` of monic
//! one-variable polynomials changes the evaluation matrix by a unit
//! triangular factor (in the graded order every lower-order term comes
//! earlier), so the determinant is unchanged. [`Basis::adapted`] uses
//! shifted and scaled monic Chebyshev polynomials for real coordinates and
//! shifted powers for complex ones; this keeps the factorization well
//! conditioned at degrees where the raw monomial matrix is not.

use rayon::prelude::*;

use crate::domains::{CompactSet, CoordFrame};
use crate::error::{check_dim, Error, Result};
use crate::indexcomb::{counts, GradedEnumeration, MultiIndex};
use crate::linalg::{CMatrix, LogDet, Lu};
use crate::rng::{derive_seed, halton, rng_from_seed, Rng};
use crate::{Point, C64};

use rand::Rng as _;

/// One-variable monic polynomial family for a coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
enum CoordPoly {
    Power { center: C64 },
    Chebyshev { center: f64, half_width: f64 },
}

impl CoordPoly {
    fn values(&self, z: C64, max_degree: usize, out: &mut Vec<C64>) {
        out.clear();
        out.push(C64::new(1.0, 0.0));
        match *self {
            CoordPoly::Power { center } => {
                let w = z - center;
                for d in 1..=max_degree {
                    let prev = out[d - 1];
                    out.push(prev * w);
                }
            }
            CoordPoly::Chebyshev { center, half_width } => {
                let w = z - center;
                let h2 = half_width * half_width;
                for d in 1..=max_degree {
                    let next = match d {
                        1 => w,
                        2 => w * out[1] - h2 * 0.5,
                        _ => w * out[d - 1] - out[d - 2] * (h2 * 0.25),
                    };
                    out.push(next);
                }
            }
        }
    }
}

/// Polynomial basis used to evaluate Vandermonde matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    coords: Vec<CoordPoly>,
}

impl Basis {
    /// Plain monomials `z^k`.
    pub fn monomial(n: usize) -> Self {
        Self { coords: vec![CoordPoly::Power { center: C64::new(0.0, 0.0) }; n] }
    }

    /// Monic product basis fitted to the coordinate frames of `K`.
    pub fn adapted(k: &CompactSet) -> Self {
        Self::from_frames(&k.coordinate_frames())
    }

    pub fn from_frames(frames: &[CoordFrame]) -> Self {
        let coords = frames
            .iter()
            .map(|f| match *f {
                CoordFrame::Real { center, half_width } => CoordPoly::Chebyshev { center, half_width },
                CoordFrame::Complex { center, .. } => CoordPoly::Power { center },
            })
            .collect();
        Self { coords }
    }

    /// Basis fitted to a configuration's own coordinate ranges.
    pub fn fitted_to(points: &[Point]) -> Self {
        match CompactSet::finite(points.to_vec()) {
            Ok(k) => Self::adapted(&k),
            Err(_) => Self::monomial(points.first().map_or(1, |p| p.len())),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn evaluator<'a>(&'a self, indices: &'a [MultiIndex]) -> BasisEvaluator<'a> {
        let max_degree = indices.iter().map(|k| k.degree() as usize).max().unwrap_or(0);
        BasisEvaluator { basis: self, indices, max_degree, scratch: Vec::new() }
    }
}

/// Evaluates `(e_α(z))_α` for a fixed index list.
pub struct BasisEvaluator<'a> {
    basis: &'a Basis,
    indices: &'a [MultiIndex],
    max_degree: usize,
    scratch: Vec<Vec<C64>>,
}

impl BasisEvaluator<'_> {
    pub fn eval_into(&mut self, z: &[C64], out: &mut Vec<C64>) {
        debug_assert_eq!(z.len(), self.basis.dim());
        self.scratch.resize_with(z.len(), Vec::new);
        for (nu, (poly, &zv)) in self.basis.coords.iter().zip(z).enumerate() {
            poly.values(zv, self.max_degree, &mut self.scratch[nu]);
        }
        out.clear();
        out.extend(self.indices.iter().map(|k| {
            k.entries()
                .iter()
                .enumerate()
                .fold(C64::new(1.0, 0.0), |acc, (nu, &e)| acc * self.scratch[nu][e as usize])
        }));
    }

    pub fn eval(&mut self, z: &[C64]) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.indices.len());
        self.eval_into(z, &mut out);
        out
    }
}

/// An ordered point tuple `(ζ₁,…,ζ_i) ∈ K^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    dim: usize,
    points: Vec<Point>,
}

impl Configuration {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        for p in &points {
            check_dim(dim, p.len())?;
        }
        Ok(Self { dim, points })
    }

    /// One-dimensional configuration from real abscissae.
    pub fn from_reals(xs: &[f64]) -> Self {
        Self { dim: 1, points: xs.iter().map(|&x| vec![C64::new(x, 0.0)]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { dim: self.dim, points: self.points.iter().map(|p| p.iter().map(|z| z * c).collect()).collect() }
    }

    fn has_repeated_point(&self) -> bool {
        (0..self.points.len()).any(|a| (a + 1..self.points.len()).any(|b| self.points[a] == self.points[b]))
    }
}

/// The `i×i` matrix `(e_α(ζ_β))`, rows = basis functions, columns = points.
pub fn vandermonde_matrix(points: &[Point], indices: &[MultiIndex], basis: &Basis) -> CMatrix {
    let i = indices.len();
    let mut ev = basis.evaluator(indices);
    let mut cols = Vec::with_capacity(points.len());
    for p in points {
        cols.push(ev.eval(p));
    }
    CMatrix::from_fn(i, points.len(), |r, c| cols[c][r])
}

/// `log|V|` and phase in the monomial basis, rows = first `i` indices of the
/// graded enumeration. Repeated points give an exact `-∞`.
pub fn vdm_logdet(cfg: &Configuration) -> Result<LogDet> {
    vdm_logdet_with(cfg, &Basis::monomial(cfg.dim()))
}

/// As [`vdm_logdet`] in the given basis; any monic product basis yields the
/// same determinant.
pub fn vdm_logdet_with(cfg: &Configuration, basis: &Basis) -> Result<LogDet> {
    check_dim(cfg.dim(), basis.dim())?;
    if cfg.is_empty() {
        return Ok(LogDet::ONE);
    }
    if cfg.has_repeated_point() {
        return Ok(LogDet::ZERO);
    }
    let indices = crate::indexcomb::enumerate(cfg.dim(), cfg.len());
    Ok(vandermonde_matrix(cfg.points(), &indices, basis).logdet())
}

/// [`vdm_logdet`] evaluated in a basis fitted to the configuration itself.
pub fn vdm_logdet_stable(cfg: &Configuration) -> Result<LogDet> {
    vdm_logdet_with(cfg, &Basis::fitted_to(cfg.points()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchStrategy {
    /// Greedy Leja initialization; otherwise the start is the first `i`
    /// distinct pool points.
    pub greedy_leja: bool,
    /// Cyclic single-point exchange passes after initialization.
    pub exchange: bool,
    pub restarts: usize,
    pub pool_size: usize,
    pub max_passes: usize,
    /// A pass improving `log|V|` by less than this ends the restart.
    pub tol: f64,
    /// Continuous local refinement of each exchanged point.
    pub refine: bool,
}

impl Default for SearchStrategy {
    fn default() -> Self {
        Self { greedy_leja: true, exchange: true, restarts: 8, pool_size: 512, max_passes: 200, tol: 1e-10, refine: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    pub initial_log_abs: f64,
    /// Increase of `log|V|` achieved by each exchange pass (all `≥ 0`).
    pub pass_gains: Vec<f64>,
    pub final_log_abs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchTrace {
    pub restarts: Vec<RestartTrace>,
    pub best_restart: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeketeResult {
    pub configuration: Configuration,
    /// `log|V|` of the returned configuration; a lower bound for `log V_i`.
    pub log_abs: f64,
    pub trace: SearchTrace,
}

/// Searches for a configuration in `K^i` with large `|V|`.
///
/// Each restart owns the seed `derive_seed(seed, r)`, so the best value is
/// non-decreasing in `strategy.restarts` and independent of the worker count.
pub fn fekete_search(k: &CompactSet, i: usize, strategy: &SearchStrategy, seed: u64) -> Result<FeketeResult> {
    if i == 0 {
        return Err(Error::InvalidArgument("configuration size must be at least 1".into()));
    }
    let n = k.dim();
    let indices = crate::indexcomb::enumerate(n, i);
    let basis = Basis::adapted(k);
    let restarts = strategy.restarts.max(1);
    let runs: Vec<(Vec<Point>, RestartTrace)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let rs = derive_seed(seed, r as u64);
            let mut run = Restart::new(k, &indices, &basis, strategy, rs);
            let (points, mut trace) = run.run();
            trace.restart = r;
            (points, trace)
        })
        .collect();
    let mut best = 0;
    for (r, (_, t)) in runs.iter().enumerate() {
        if t.final_log_abs > runs[best].1.final_log_abs {
            best = r;
        }
    }
    let (points, _) = runs[best].clone();
    let configuration = Configuration::new(n, points)?;
    let log_abs = vdm_logdet_with(&configuration, &basis)?.log_abs;
    Ok(FeketeResult {
        configuration,
        log_abs,
        trace: SearchTrace { restarts: runs.into_iter().map(|(_, t)| t).collect(), best_restart: best },
    })
}

struct Restart<'a> {
    k: &'a CompactSet,
    indices: &'a [MultiIndex],
    basis: &'a Basis,
    strategy: &'a SearchStrategy,
    seed: u64,
    rng: Rng,
}

impl<'a> Restart<'a> {
    fn new(k: &'a CompactSet, indices: &'a [MultiIndex], basis: &'a Basis, strategy: &'a SearchStrategy, seed: u64) -> Self {
        Self { k, indices, basis, strategy, seed, rng: rng_from_seed(seed) }
    }

    fn pool(&mut self) -> Vec<Point> {
        if let Some(atoms) = self.k.atoms() {
            return atoms.to_vec();
        }
        let size = self.strategy.pool_size.max(2);
        let ld = size / 2;
        let ud = self.k.unit_dim();
        let offset: Vec<f64> = (0..ud).map(|_| self.rng.random::<f64>()).collect();
        let mut pool: Vec<Point> = (0..ld).map(|j| self.k.pool_point(&halton(j as u64, ud, &offset))).collect();
        pool.extend((ld..size).map(|_| self.k.sample_with(&mut self.rng)));
        pool
    }

    fn run(&mut self) -> (Vec<Point>, RestartTrace) {
        let i = self.indices.len();
        let pool = self.pool();
        let mut points = if self.strategy.greedy_leja {
            self.greedy(&pool)
        } else {
            let mut distinct: Vec<Point> = Vec::with_capacity(i);
            for p in &pool {
                if distinct.len() == i {
                    break;
                }
                if !distinct.contains(p) {
                    distinct.push(p.clone());
                }
            }
            distinct
        };
        while points.len() < i {
            // Not enough distinct candidates: the determinant vanishes.
            points.push(pool[0].clone());
        }
        let mut current = self.logdet(&points);
        let initial = current;
        let mut gains = Vec::new();
        if self.strategy.exchange && current.is_finite() {
            for _ in 0..self.strategy.max_passes {
                let pool = self.pool();
                let trial = self.exchange_pass(&points, &pool);
                let value = self.logdet(&trial);
                let gain = value - current;
                if gain > 0.0 {
                    points = trial;
                    current = value;
                    gains.push(gain);
                } else {
                    gains.push(0.0);
                }
                if !(gain >= self.strategy.tol) {
                    break;
                }
            }
        }
        let trace = RestartTrace {
            restart: 0,
            seed: self.seed,
            initial_log_abs: initial,
            pass_gains: gains,
            final_log_abs: current,
        };
        (points, trace)
    }

    fn logdet(&self, points: &[Point]) -> f64 {
        vandermonde_matrix(points, self.indices, self.basis).logdet().log_abs
    }

    /// Adds, one at a time, the pool point maximizing `|V|` given the points
    /// chosen so far.
    fn greedy(&self, pool: &[Point]) -> Vec<Point> {
        let i = self.indices.len();
        let mut ev = self.basis.evaluator(self.indices);
        let table: Vec<Vec<C64>> = pool.iter().map(|p| ev.eval(p)).collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(i);
        for j in 0..i {
            let lu = (j > 0).then(|| {
                Lu::factor(CMatrix::from_fn(j, j, |r, c| table[chosen[c]][r]))
            });
            let mut best = (usize::MAX, 0.0);
            for (c, col) in table.iter().enumerate() {
                let schur = match &lu {
                    None => col[0],
                    Some(lu) => {
                        let u = lu.solve(&col[..j]);
                        let mut s = col[j];
                        for (b, &ub) in u.iter().enumerate() {
                            s -= table[chosen[b]][j] * ub;
                        }
                        s
                    }
                };
                let mag = schur.norm();
                if mag > best.1 {
                    best = (c, mag);
                }
            }
            if best.0 == usize::MAX {
                break;
            }
            chosen.push(best.0);
        }
        chosen.into_iter().map(|c| pool[c].clone()).collect()
    }

    /// One cyclic pass: each point is replaced by the maximizer of its
    /// Lagrange polynomial `|ℓ_β|` over the pool (optionally refined), when
    /// that improves `|V|`.
    fn exchange_pass(&self, start: &[Point], pool: &[Point]) -> Vec<Point> {
        let i = self.indices.len();
        let mut points = start.to_vec();
        let mut ev = self.basis.evaluator(self.indices);
        let mut cols: Vec<Vec<C64>> = points.iter().map(|p| ev.eval(p)).collect();
        let pool_cols: Vec<Vec<C64>> = pool.iter().map(|p| ev.eval(p)).collect();
        let mut unit = vec![C64::new(0.0, 0.0); i];
        let mut buf = Vec::with_capacity(i);
        for beta in 0..i {
            let lu = Lu::factor(CMatrix::from_fn(i, i, |r, c| cols[c][r]));
            if lu.is_singular() {
                return start.to_vec();
            }
            unit.iter_mut().for_each(|u| *u = C64::new(0.0, 0.0));
            unit[beta] = C64::new(1.0, 0.0);
            // Row β of V⁻¹: ℓ_β(ζ) = w · e(ζ).
            let w = lu.solve_transpose(&unit);
            let lagrange = |col: &[C64]| -> f64 { w.iter().zip(col).map(|(a, b)| a * b).sum::<C64>().norm() };
            let mut best_point = points[beta].clone();
            let mut best_val = lagrange(&cols[beta]);
            for (p, col) in pool.iter().zip(&pool_cols) {
                let v = lagrange(col);
                if v > best_val {
                    best_val = v;
                    best_point = p.clone();
                }
            }
            if self.strategy.refine && self.k.is_continuous() {
                let (p, v) = self.refine(&best_point, best_val, |z, ev, buf| {
                    ev.eval_into(z, buf);
                    lagrange(buf)
                }, &mut ev, &mut buf);
                best_point = p;
                best_val = v;
            }
            if best_val > 1.0 + 1e-13 {
                cols[beta] = ev.eval(&best_point);
                points[beta] = best_point;
            }
        }
        points
    }

    /// Compass search in the parametrization of `K`, maximizing `objective`.
    fn refine<F>(&self, start: &Point, start_val: f64, objective: F, ev: &mut BasisEvaluator<'_>, buf: &mut Vec<C64>) -> (Point, f64)
    where
        F: Fn(&[C64], &mut BasisEvaluator<'_>, &mut Vec<C64>) -> f64,
    {
        let scales = self.k.param_scales();
        let mut params = self.k.params_of(start);
        let mut best_point = start.clone();
        let mut best_val = start_val;
        let mut step: Vec<f64> = scales.iter().map(|s| 4.0 * s / self.strategy.pool_size.max(16) as f64).collect();
        for _ in 0..400 {
            let mut moved = false;
            for d in 0..params.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = params.clone();
                    trial[d] += sign * step[d];
                    let z = self.k.point_from_params(&trial);
                    let v = objective(&z, ev, buf);
                    if v > best_val {
                        best_val = v;
                        best_point = z.clone();
                        params = self.k.params_of(&z);
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                step.iter_mut().for_each(|s| *s *= 0.5);
                if step.iter().zip(&scales).all(|(s, sc)| *s < 1e-13 * sc) {
                    break;
                }
            }
        }
        (best_point, best_val)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransfiniteEstimate {
    pub s: u32,
    pub m_s: u64,
    pub l_s: u64,
    pub log_v: f64,
    /// `exp(log V_{m_s} / l_s)`; a lower estimate of the true `d_s(K)`.
    pub d_s: f64,
    pub fekete: FeketeResult,
}

/// `d_s(K) = V_{m_s}^{1/l_s}` from the best configuration found.
pub fn transfinite_diameter_estimate(k: &CompactSet, s: u32, strategy: &SearchStrategy, seed: u64) -> Result<TransfiniteEstimate> {
    if s == 0 {
        return Err(Error::InvalidArgument("degree s must be at least 1".into()));
    }
    let c = counts(k.dim(), s)?;
    let i = usize::try_from(c.m).map_err(|_| Error::Overflow("m_s".into()))?;
    let fekete = fekete_search(k, i, strategy, seed)?;
    let log_v = fekete.log_abs;
    Ok(TransfiniteEstimate { s, m_s: c.m, l_s: c.l, log_v, d_s: (log_v / c.l as f64).exp(), fekete })
}

/// `|V(cfg)|^{1/l_s}` for a configuration of exactly `m_s` points.
pub fn normalized_vandermonde(cfg: &Configuration, s: u32) -> Result<f64> {
    let c = counts(cfg.dim(), s)?;
    if cfg.len() as u64 != c.m {
        return Err(Error::InvalidArgument(format!("configuration has {} points, m_s = {}", cfg.len(), c.m)));
    }
    let ld = vdm_logdet_stable(cfg)?;
    Ok((ld.log_abs / c.l as f64).exp())
}

/// The enumeration the Vandermonde rows are drawn from.
pub fn rows_for(cfg: &Configuration) -> Result<GradedEnumeration> {
    GradedEnumeration::with_count(cfg.dim(), cfg.len().max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_by_expansion;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn small_vandermondians() {
        let v = vdm_logdet(&Configuration::from_reals(&[0.0, 1.0])).unwrap();
        assert!(v.log_abs.abs() < 1e-15);
        let v = vdm_logdet(&Configuration::from_reals(&[0.2, 0.7])).unwrap();
        assert!((v.log_abs.exp() - 0.5).abs() < 1e-14);
        let cfg = Configuration::new(2, vec![vec![r(0.0), r(0.0)], vec![r(0.0), r(1.0)], vec![r(1.0), r(0.0)]]).unwrap();
        // Rows 1, z₂, z₁: [[1,1,1],[0,1,0],[0,0,1]].
        let m = CMatrix::from_fn(3, 3, |a, b| r([[1.0, 1.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]][a][b]));
        assert!((det_by_expansion(&m).norm() - 1.0).abs() < 1e-15);
        assert!(vdm_logdet(&cfg).unwrap().log_abs.abs() < 1e-14);
    }

    #[test]
    fn repeated_points_are_exactly_singular() {
        let v = vdm_logdet(&Configuration::from_reals(&[0.3, 0.1, 0.3])).unwrap();
        assert!(v.is_zero());
        assert_eq!(v.phase, r(0.0));
    }

    #[test]
    fn adapted_basis_matches_monomials() {
        let k = CompactSet::real_box(&[(-1.0, 3.0), (0.0, 1.0)]).unwrap();
        let pts = k.sample(10, 4);
        let cfg = Configuration::new(2, pts).unwrap();
        let a = vdm_logdet(&cfg).unwrap();
        let b = vdm_logdet_with(&cfg, &Basis::adapted(&k)).unwrap();
        let c = vdm_logdet_stable(&cfg).unwrap();
        assert!((a.log_abs - b.log_abs).abs() < 1e-10);
        assert!((a.log_abs - c.log_abs).abs() < 1e-10);
        assert!((a.phase - b.phase).norm() < 1e-9);
    }

    #[test]
    fn single_point_set_is_degenerate() {
        let k = CompactSet::finite(vec![vec![r(0.5)]]).unwrap();
        let res = fekete_search(&k, 2, &SearchStrategy::default(), 1).unwrap();
        assert_eq!(res.log_abs, f64::NEG_INFINITY);
        let one = fekete_search(&k, 1, &SearchStrategy::default(), 1).unwrap();
        assert_eq!(one.log_abs, 0.0);
    }

    #[test]
    fn interval_three_points() {
        let k = CompactSet::interval(-1.0, 1.0).unwrap();
        let res = fekete_search(&k, 3, &SearchStrategy::default(), 7).unwrap();
        assert!((res.log_abs - 2f64.ln()).abs() < 1e-9, "{}", res.log_abs);
        let mut xs: Vec<f64> = res.configuration.points().iter().map(|p| p[0].re).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((xs[0] + 1.0).abs() < 1e-6 && xs[1].abs() < 1e-4 && (xs[2] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exchange_never_decreases() {
        let k = CompactSet::disk(C64::new(0.0, 0.0), 1.0).unwrap();
        let res = fekete_search(&k, 6, &SearchStrategy { restarts: 3, ..Default::default() }, 3).unwrap();
        for t in &res.trace.restarts {
            assert!(t.pass_gains.iter().all(|g| *g >= 0.0));
            assert!(t.final_log_abs >= t.initial_log_abs);
        }
        let re = vdm_logdet_with(&res.configuration, &Basis::adapted(&k)).unwrap();
        assert!((re.log_abs - res.log_abs).abs() < 1e-10);
    }

    #[test]
    fn restarts_prefix_monotonicity() {
        let k = CompactSet::real_box(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let base = SearchStrategy { pool_size: 128, max_passes: 5, ..Default::default() };
        let mut prev = f64::NEG_INFINITY;
        for restarts in 1..=4 {
            let res = fekete_search(&k, 6, &SearchStrategy { restarts, ..base.clone() }, 21).unwrap();
            assert!(res.log_abs >= prev - 1e-12);
            prev = res.log_abs;
        }
    }

    #[test]
    fn transfinite_needs_positive_degree() {
        let k = CompactSet::unit_circle();
        assert!(transfinite_diameter_estimate(&k, 0, &SearchStrategy::default(), 0).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariance(seed in 0u64..1000, swap in 0usize..5) {
            let k = CompactSet::product(vec![CompactSet::interval(-1.0, 1.0).unwrap(), CompactSet::unit_circle()]).unwrap();
            let pts = k.sample(6, seed);
            let a = vdm_logdet(&Configuration::new(2, pts.clone()).unwrap()).unwrap();
            let mut q = pts;
            q.swap(swap, swap + 1);
            let b = vdm_logdet(&Configuration::new(2, q).unwrap()).unwrap();
            prop_assert!((a.log_abs - b.log_abs).abs() < 1e-10);
            prop_assert!((a.phase + b.phase).norm() < 1e-8);
        }

        #[test]
        fn scaling_law(seed in 0u64..1000, c in 0.3f64..3.0, i in 1usize..11) {
            let k = CompactSet::real_box(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
            let cfg = Configuration::new(2, k.sample(i, seed)).unwrap();
            let idx = crate::indexcomb::enumerate(2, i);
            let total: u32 = idx.iter().map(|k| k.degree()).sum();
            let a = vdm_logdet_stable(&cfg).unwrap().log_abs;
            let b = vdm_logdet_stable(&cfg.scaled(c)).unwrap().log_abs;
            prop_assert!((b - a - total as f64 * c.ln()).abs() < 1e-10);
        }
    }
}
