//! Positive measures on model compact sets: moments, Gram matrices,
//! `Z_s(K, μ)` by the Gram determinant and by Monte Carlo, and the
//! Bernstein–Markov ratio.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng as _;
use rayon::prelude::*;

use crate::domains::CompactSet;
use crate::error::{check_dim, Error, Result};
use crate::exact::{self, rational_from_f64, RationalMatrix};
use crate::indexcomb::{counts, enumerate, MultiIndex};
use crate::linalg::{cholesky, forward_substitute, CMatrix, LogDet};
use crate::quadrature::{gauss_chebyshev, gauss_legendre, points_for_degree};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::vandermonde::{vandermonde_matrix, Basis};
use crate::{Point, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    /// Equilibrium measure `dx / (π √((x-a)(b-x)))` of `[a, b]`.
    Arcsine { a: f64, b: f64 },
    /// Normalized arc length on a circle.
    UniformCircle { center: C64, radius: f64 },
    /// Normalized Lebesgue measure on an interval.
    LebesgueInterval { a: f64, b: f64 },
    /// Normalized area measure on a closed disk.
    LebesgueDisk { center: C64, radius: f64 },
    /// Product of one-dimensional measures.
    Product { factors: Vec<Measure> },
    /// `Σ w_r δ_{atom_r}`.
    Discrete { atoms: Vec<Point>, weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    kind: MeasureKind,
    carrier: CompactSet,
    /// Multiplies the base measure (probability for the continuous kinds).
    scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMode {
    /// `G_{αβ} = ∫ e_α · conj(e_β) dμ`.
    Hermitian,
    /// `G_{αβ} = ∫ e_α · e_β dμ = a_{k(α)+k(β)}`.
    Bilinear,
}

/// Nodes and weights of a rule exact for the polynomials at hand.
#[derive(Clone, Debug)]
struct CoordRule {
    nodes: Vec<C64>,
    weights: Vec<f64>,
}

impl Measure {
    fn continuous(kind: MeasureKind, carrier: CompactSet) -> Self {
        Self { kind, carrier, scale: 1.0 }
    }

    pub fn arcsine(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("arcsine measure needs a < b, got [{a}, {b}]")));
        }
        Ok(Self::continuous(MeasureKind::Arcsine { a, b }, CompactSet::interval(a, b)?))
    }

    pub fn uniform_circle(center: C64, radius: f64) -> Result<Self> {
        Ok(Self::continuous(MeasureKind::UniformCircle { center, radius }, CompactSet::circle(center, radius)?))
    }

    pub fn lebesgue_interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("Lebesgue measure needs a < b, got [{a}, {b}]")));
        }
        Ok(Self::continuous(MeasureKind::LebesgueInterval { a, b }, CompactSet::interval(a, b)?))
    }

    pub fn lebesgue_disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self::continuous(MeasureKind::LebesgueDisk { center, radius }, CompactSet::disk(center, radius)?))
    }

    pub fn lebesgue_box(bounds: &[(f64, f64)]) -> Result<Self> {
        Self::product(bounds.iter().map(|&(a, b)| Self::lebesgue_interval(a, b)).collect::<Result<_>>()?)
    }

    /// Product of one-dimensional measures.
    pub fn product(factors: Vec<Measure>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product measure needs at least one factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.dim() != 1) {
            return Err(Error::Unsupported(format!("product factors must be one-dimensional, got dimension {}", f.dim())));
        }
        let carrier = CompactSet::product(factors.iter().map(|f| f.carrier.clone()).collect())?;
        Ok(Self::continuous(MeasureKind::Product { factors }, carrier))
    }

    pub fn discrete(atoms: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidArgument(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("weights must be positive, got {w}")));
        }
        let carrier = CompactSet::finite(atoms.clone())?;
        Ok(Self { kind: MeasureKind::Discrete { atoms, weights }, carrier, scale: 1.0 })
    }

    pub fn point_mass(at: Point) -> Result<Self> {
        Self::discrete(vec![at], vec![1.0])
    }

    /// `t·μ` for `t > 0`.
    pub fn with_mass_factor(mut self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass factor must be positive, got {t}")));
        }
        self.scale *= t;
        Ok(self)
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn carrier(&self) -> &CompactSet {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn mass_factor(&self) -> f64 {
        self.scale
    }

    pub fn total_mass(&self) -> f64 {
        self.scale
            * match &self.kind {
                MeasureKind::Discrete { weights, .. } => weights.iter().sum(),
                MeasureKind::Product { factors } => factors.iter().map(|f| f.total_mass()).product(),
                _ => 1.0,
            }
    }

    /// Real measure on a real carrier.
    pub fn is_real(&self) -> bool {
        self.carrier.is_real()
    }

    /// Upper bound on the rank of any moment matrix of the measure.
    pub fn rank_bound(&self) -> Option<usize> {
        match &self.kind {
            MeasureKind::Discrete { atoms, .. } => {
                let mut distinct: Vec<&Point> = Vec::new();
                for a in atoms {
                    if !distinct.contains(&a) {
                        distinct.push(a);
                    }
                }
                Some(distinct.len())
            }
            MeasureKind::Product { factors } => {
                factors.iter().map(|f| f.rank_bound()).try_fold(1usize, |acc, r| r.map(|r| acc.saturating_mul(r)))
            }
            _ => None,
        }
    }

    /// `∫ ζ^k dμ`.
    pub fn moment(&self, k: &MultiIndex) -> Result<C64> {
        check_dim(self.dim(), k.dim())?;
        let e = k.entries();
        let v = match &self.kind {
            MeasureKind::Arcsine { .. } | MeasureKind::LebesgueInterval { .. } => {
                let rule = self.coord_rule(e[0]);
                rule.nodes.iter().zip(&rule.weights).map(|(x, w)| x.powu(e[0]) * w).sum()
            }
            MeasureKind::UniformCircle { center, .. } | MeasureKind::LebesgueDisk { center, .. } => center.powu(e[0]),
            MeasureKind::Product { factors } => {
                let mut acc = C64::new(1.0, 0.0);
                for (f, &ek) in factors.iter().zip(e) {
                    acc *= f.moment(&MultiIndex::new(vec![ek]))?;
                }
                acc
            }
            MeasureKind::Discrete { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .map(|(p, w)| p.iter().zip(e).fold(C64::new(*w, 0.0), |acc, (z, &ek)| acc * z.powu(ek)))
                .sum(),
        };
        Ok(v * self.scale)
    }

    /// Exact rational moment for real measures with closed-form rational
    /// moments; `None` otherwise.
    pub fn exact_moment(&self, k: &MultiIndex) -> Option<BigRational> {
        if k.dim() != self.dim() || !self.is_real() {
            return None;
        }
        let e = k.entries();
        let v = match &self.kind {
            MeasureKind::Arcsine { a, b } => {
                let (a, b) = (rational_from_f64(*a), rational_from_f64(*b));
                let two = BigRational::from_integer(BigInt::from(2));
                let c = (&a + &b) / &two;
                let h = (&b - &a) / &two;
                let m = e[0] as u64;
                let mut acc = BigRational::zero();
                for j in (0..=m).step_by(2) {
                    // ∫ t^j of the arcsine law on [-1, 1] is C(j, j/2) / 2^j.
                    let tj = BigRational::new(exact::binomial(j, j / 2), num_traits::pow(BigInt::from(2), j as usize));
                    let term = BigRational::from_integer(exact::binomial(m, j))
                        * exact::pow(&c, (m - j) as u32)
                        * exact::pow(&h, j as u32)
                        * tj;
                    acc += term;
                }
                acc
            }
            MeasureKind::LebesgueInterval { a, b } => {
                let (a, b) = (rational_from_f64(*a), rational_from_f64(*b));
                let p = e[0] + 1;
                (exact::pow(&b, p) - exact::pow(&a, p)) / (BigRational::from_integer(BigInt::from(p)) * (&b - &a))
            }
            MeasureKind::Product { factors } => {
                let mut acc = BigRational::one();
                for (f, &ek) in factors.iter().zip(e) {
                    acc *= f.exact_moment(&MultiIndex::new(vec![ek]))?;
                }
                acc
            }
            MeasureKind::Discrete { atoms, weights } => {
                let mut acc = BigRational::zero();
                for (p, w) in atoms.iter().zip(weights) {
                    let mut t = rational_from_f64(*w);
                    for (z, &ek) in p.iter().zip(e) {
                        t *= exact::pow(&rational_from_f64(z.re), ek);
                    }
                    acc += t;
                }
                acc
            }
            MeasureKind::UniformCircle { .. } | MeasureKind::LebesgueDisk { .. } => return None,
        };
        Some(v * rational_from_f64(self.scale))
    }

    /// Whether [`Measure::exact_moment`] is available.
    pub fn supports_exact(&self) -> bool {
        self.exact_moment(&MultiIndex::zero(self.dim())).is_some()
    }

    /// Rule for a one-dimensional non-product measure, exact for
    /// `∫ P(z, z̄)` of total degree `≤ degree` (with a 2× safety margin).
    fn coord_rule(&self, degree: u32) -> CoordRule {
        let n = points_for_degree(degree);
        match &self.kind {
            MeasureKind::Arcsine { a, b } => {
                let r = gauss_chebyshev(n);
                let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                CoordRule { nodes: r.nodes.iter().map(|x| C64::new(c + h * x, 0.0)).collect(), weights: r.weights }
            }
            MeasureKind::LebesgueInterval { a, b } => {
                let r = gauss_legendre(n);
                let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                CoordRule { nodes: r.nodes.iter().map(|x| C64::new(c + h * x, 0.0)).collect(), weights: r.weights }
            }
            MeasureKind::UniformCircle { center, radius } => {
                let m = 2 * degree as usize + 2;
                CoordRule {
                    nodes: (0..m).map(|j| center + C64::from_polar(*radius, 2.0 * PI * j as f64 / m as f64)).collect(),
                    weights: vec![1.0 / m as f64; m],
                }
            }
            MeasureKind::LebesgueDisk { center, radius } => {
                // dA/(πR²) = du dθ/(2π) with |w|² = R² u.
                let m = 2 * degree as usize + 2;
                let r = gauss_legendre(n);
                let mut nodes = Vec::with_capacity(m * n);
                let mut weights = Vec::with_capacity(m * n);
                for (x, w) in r.nodes.iter().zip(&r.weights) {
                    let u = 0.5 * (x + 1.0);
                    for t in 0..m {
                        nodes.push(center + C64::from_polar(radius * u.sqrt(), 2.0 * PI * t as f64 / m as f64));
                        weights.push(w / m as f64);
                    }
                }
                CoordRule { nodes, weights }
            }
            MeasureKind::Discrete { atoms, weights } if atoms[0].len() == 1 => {
                CoordRule { nodes: atoms.iter().map(|p| p[0]).collect(), weights: weights.clone() }
            }
            _ => unreachable!("coordinate rules exist for one-dimensional non-product measures"),
        }
    }

    /// One rule per coordinate for product-form measures, or `None` for
    /// multi-dimensional discrete measures.
    fn product_rules(&self, degree: u32) -> Option<Vec<CoordRule>> {
        match &self.kind {
            MeasureKind::Product { factors } => Some(factors.iter().map(|f| f.coord_rule(degree)).collect()),
            MeasureKind::Discrete { atoms, .. } if atoms[0].len() > 1 => None,
            _ => Some(vec![self.coord_rule(degree)]),
        }
    }

    /// Draws one point from `μ / μ(K)`.
    pub fn sample_with(&self, rng: &mut Rng) -> Point {
        let mut out = Vec::with_capacity(self.dim());
        self.push_sample(rng, &mut out);
        out
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = rng_from_seed(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }

    fn push_sample(&self, rng: &mut Rng, out: &mut Point) {
        match &self.kind {
            MeasureKind::Arcsine { a, b } => {
                let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                out.push(C64::new(c - h * (PI * rng.random::<f64>()).cos(), 0.0));
            }
            MeasureKind::LebesgueInterval { a, b } => out.push(C64::new(a + (b - a) * rng.random::<f64>(), 0.0)),
            MeasureKind::UniformCircle { center, radius } => {
                out.push(center + C64::from_polar(*radius, 2.0 * PI * rng.random::<f64>()))
            }
            MeasureKind::LebesgueDisk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                out.push(center + C64::from_polar(r, 2.0 * PI * rng.random::<f64>()));
            }
            MeasureKind::Product { factors } => {
                for f in factors {
                    f.push_sample(rng, out);
                }
            }
            MeasureKind::Discrete { atoms, weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = atoms.len() - 1;
                for (r, w) in weights.iter().enumerate() {
                    if u < *w {
                        pick = r;
                        break;
                    }
                    u -= w;
                }
                out.extend_from_slice(&atoms[pick]);
            }
        }
    }
}

/// Gram matrix of the first `indices.len()` monomials.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub mode: PairingMode,
    pub matrix: CMatrix,
    pub logdet: LogDet,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }
}

/// Hermitian Gram matrix `∫ P_α conj(P_β) dμ` in an arbitrary product basis.
pub fn hermitian_gram_in_basis(mu: &Measure, indices: &[MultiIndex], basis: &Basis) -> Result<CMatrix> {
    check_dim(mu.dim(), basis.dim())?;
    let size = indices.len();
    let max_deg = indices.iter().map(|k| k.degree()).max().unwrap_or(0);
    match mu.product_rules(2 * max_deg) {
        Some(rules) => {
            // Per-coordinate tables T_ν[a][b] = Σ w P_a(x) conj(P_b(x)).
            let d = max_deg as usize;
            let tables: Vec<Vec<C64>> = rules
                .iter()
                .enumerate()
                .map(|(nu, rule)| {
                    let coord_idx: Vec<MultiIndex> = (0..=max_deg)
                        .map(|e| {
                            let mut v = vec![0; mu.dim()];
                            v[nu] = e;
                            MultiIndex::new(v)
                        })
                        .collect();
                    let mut ev = basis.evaluator(&coord_idx);
                    let mut t = vec![C64::new(0.0, 0.0); (d + 1) * (d + 1)];
                    let mut z = vec![C64::new(0.0, 0.0); mu.dim()];
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        z[nu] = *x;
                        let vals = ev.eval(&z);
                        for a in 0..=d {
                            for b in 0..=d {
                                t[a * (d + 1) + b] += vals[a] * vals[b].conj() * *w;
                            }
                        }
                    }
                    t
                })
                .collect();
            Ok(CMatrix::from_fn(size, size, |r, c| {
                let (ka, kb) = (indices[r].entries(), indices[c].entries());
                let v = tables
                    .iter()
                    .enumerate()
                    .fold(C64::new(1.0, 0.0), |acc, (nu, t)| acc * t[ka[nu] as usize * (d + 1) + kb[nu] as usize]);
                v * mu.scale
            }))
        }
        None => {
            let MeasureKind::Discrete { atoms, weights } = &mu.kind else { unreachable!() };
            let e = vandermonde_matrix(atoms, indices, basis);
            Ok(CMatrix::from_fn(size, size, |r, c| {
                (0..atoms.len()).map(|q| e[(r, q)] * e[(c, q)].conj() * weights[q]).sum::<C64>() * mu.scale
            }))
        }
    }
}

/// Gram matrix of the monomial prefix `indices` in the given pairing mode.
pub fn gram(mu: &Measure, indices: &[MultiIndex], mode: PairingMode) -> Result<GramMatrix> {
    let size = indices.len();
    if size == 0 {
        return Err(Error::InvalidArgument("Gram size must be at least 1".into()));
    }
    let matrix = match mode {
        PairingMode::Hermitian => hermitian_gram_in_basis(mu, indices, &Basis::monomial(mu.dim()))?,
        PairingMode::Bilinear => {
            let mut cache: HashMap<MultiIndex, C64> = HashMap::new();
            let mut m = CMatrix::zeros(size, size);
            for r in 0..size {
                for c in 0..size {
                    let k = indices[r].add(&indices[c]);
                    let v = match cache.get(&k) {
                        Some(v) => *v,
                        None => {
                            let v = mu.moment(&k)?;
                            cache.insert(k, v);
                            v
                        }
                    };
                    m[(r, c)] = v;
                }
            }
            m
        }
    };
    let logdet = if mu.rank_bound().is_some_and(|rk| size > rk) { LogDet::ZERO } else { matrix.logdet() };
    Ok(GramMatrix { mode, matrix, logdet })
}

/// Exact determinant of the moment matrix `(∫ ζ^{k(α)+k(β)} dμ)` for real
/// measures with rational moments. For such measures both pairing modes give
/// this same matrix.
pub fn gram_exact_logdet(mu: &Measure, indices: &[MultiIndex]) -> Option<LogDet> {
    let size = indices.len();
    let mut cache: HashMap<MultiIndex, BigRational> = HashMap::new();
    let mut entries = Vec::with_capacity(size * size);
    for r in 0..size {
        for c in 0..size {
            let k = indices[r].add(&indices[c]);
            let v = match cache.get(&k) {
                Some(v) => v.clone(),
                None => {
                    let v = mu.exact_moment(&k)?;
                    cache.insert(k, v.clone());
                    v
                }
            };
            entries.push(v);
        }
    }
    let m = RationalMatrix::from_fn(size, |r, c| entries[r * size + c].clone());
    Some(exact::logdet_of_rational(&m.determinant()))
}

/// How determinants of moment matrices are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Double precision with partial pivoting.
    Float,
    /// Exact rational arithmetic; fails when moments are not rational.
    Exact,
    /// Exact when available, float otherwise.
    Auto,
}

/// `ln(m!)`.
pub fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

fn check_compatible(k: &CompactSet, mu: &Measure) -> Result<()> {
    check_dim(k.dim(), mu.dim())?;
    let probe: Vec<Point> = match &mu.kind {
        MeasureKind::Discrete { atoms, .. } => atoms.clone(),
        _ => mu.sample(32, 0x5eed),
    };
    for p in &probe {
        if !k.contains(p)? {
            return Err(Error::InvalidArgument("measure is not supported on the compact set".into()));
        }
    }
    Ok(())
}

/// `log Z_s = log(m_s!) + log det G` with `G` the Hermitian Gram matrix of
/// the first `m_s` monomials.
pub fn z_s_gram(k: &CompactSet, mu: &Measure, s: u32, precision: Precision) -> Result<LogDet> {
    check_compatible(k, mu)?;
    let c = counts(mu.dim(), s)?;
    let indices = enumerate(mu.dim(), c.m as usize);
    let use_exact = match precision {
        Precision::Float => false,
        Precision::Exact => true,
        Precision::Auto => mu.supports_exact(),
    };
    let det = if use_exact {
        gram_exact_logdet(mu, &indices)
            .ok_or_else(|| Error::Unsupported("exact moments are not available for this measure".into()))?
    } else {
        gram(mu, &indices, PairingMode::Hermitian)?.logdet
    };
    Ok(det.scale_log(ln_factorial(c.m)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    /// `ln` of the estimate; `-∞` when every sample vanished.
    pub log_estimate: f64,
    pub estimate: f64,
    pub std_error: f64,
}

const MC_CHUNK: usize = 2048;

/// Monte Carlo estimate of `Z_s = ∫ |V|² dμ^{⊗m_s}` from i.i.d. draws.
/// Chunk `c` of the samples uses the seed `derive_seed(seed, c)`.
pub fn z_s_montecarlo(k: &CompactSet, mu: &Measure, s: u32, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_compatible(k, mu)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let c = counts(mu.dim(), s)?;
    let m = c.m as usize;
    let indices = enumerate(mu.dim(), m);
    let basis = Basis::adapted(k);
    let chunks = samples.div_ceil(MC_CHUNK);
    let logs: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = rng_from_seed(derive_seed(seed, chunk as u64));
            let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let indices = &indices;
            let basis = &basis;
            (0..len)
                .map(move |_| {
                    let pts: Vec<Point> = (0..m).map(|_| mu.sample_with(&mut rng)).collect();
                    let repeated = (0..m).any(|a| (a + 1..m).any(|b| pts[a] == pts[b]));
                    if repeated {
                        f64::NEG_INFINITY
                    } else {
                        2.0 * vandermonde_matrix(&pts, indices, basis).logdet().log_abs
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let log_mass = m as f64 * mu.total_mass().ln();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(MonteCarloEstimate { samples, log_estimate: f64::NEG_INFINITY, estimate: 0.0, std_error: 0.0 });
    }
    let n = logs.len() as f64;
    let scaled: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    let mean = scaled.iter().sum::<f64>() / n;
    let var = if logs.len() > 1 {
        scaled.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let log_estimate = peak + mean.ln() + log_mass;
    let std_error = (peak + log_mass).exp() * (var / n).sqrt();
    Ok(MonteCarloEstimate { samples, log_estimate, estimate: log_estimate.exp(), std_error })
}

/// `sup_grid sqrt(K_s(z, z))` where `K_s` is the reproducing kernel of the
/// degree-`≤ s` polynomials in `L²(μ)`; equals `max_p ‖p‖_grid / ‖p‖_{L²(μ)}`
/// and is a lower bound for the supremum over `K`. A numerically singular
/// Gram matrix gives `+∞`.
pub fn bernstein_markov_ratio(k: &CompactSet, mu: &Measure, s: u32, grid: &[Point]) -> Result<f64> {
    check_compatible(k, mu)?;
    let c = counts(mu.dim(), s)?;
    let indices = enumerate(mu.dim(), c.m as usize);
    let basis = Basis::adapted(k);
    let g = hermitian_gram_in_basis(mu, &indices, &basis)?;
    if mu.rank_bound().is_some_and(|rk| indices.len() > rk) {
        return Ok(f64::INFINITY);
    }
    let Some(l) = cholesky(&g, 1e-13) else {
        return Ok(f64::INFINITY);
    };
    let best = grid
        .par_chunks(256)
        .map(|chunk| {
            let mut ev = basis.evaluator(&indices);
            chunk
                .iter()
                .map(|z| {
                    let e = ev.eval(z);
                    forward_substitute(&l, &e).iter().map(|q| q.norm_sqr()).sum::<f64>()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best.sqrt())
}

/// Smallest eigenvalue of a Hermitian Gram matrix relative to its trace.
pub fn min_relative_eigenvalue(g: &CMatrix) -> f64 {
    let ev = crate::linalg::hermitian_eigenvalues(g);
    ev[0] / g.trace().re.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn moment_examples() {
        let arc = Measure::arcsine(-1.0, 1.0).unwrap();
        assert!((arc.moment(&idx(&[2])).unwrap() - r(0.5)).norm() < 1e-15);
        assert!((arc.moment(&idx(&[0])).unwrap() - r(1.0)).norm() < 1e-15);
        let circ = Measure::uniform_circle(r(0.0), 1.0).unwrap();
        assert_eq!(circ.moment(&idx(&[3])).unwrap(), r(0.0));
        let d = Measure::discrete(vec![vec![r(0.0)], vec![r(1.0)]], vec![0.5, 0.5]).unwrap();
        assert_eq!(d.moment(&idx(&[4])).unwrap(), r(0.5));
        assert!(arc.moment(&idx(&[1, 1])).is_err());
    }

    #[test]
    fn quadrature_moments_match_exact() {
        let measures = [
            Measure::arcsine(-0.5, 2.0).unwrap(),
            Measure::lebesgue_interval(-1.0, 3.0).unwrap(),
            Measure::product(vec![Measure::arcsine(-1.0, 1.0).unwrap(), Measure::lebesgue_interval(0.0, 1.0).unwrap()]).unwrap(),
        ];
        for mu in &measures {
            for k in enumerate(mu.dim(), 30) {
                let q = mu.moment(&k).unwrap();
                let e = exact::ln_abs_rational(&mu.exact_moment(&k).unwrap());
                let ev = e.exp();
                assert!((q.re.abs() - ev).abs() <= 1e-12 * ev.max(1.0), "{k}: {q} vs {ev}");
            }
        }
    }

    #[test]
    fn gram_examples() {
        let circ = Measure::uniform_circle(r(0.0), 1.0).unwrap();
        let g = gram(&circ, &enumerate(1, 3), PairingMode::Hermitian).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g.matrix[(a, b)] - r(want)).norm() < 1e-14);
            }
        }
        let arc = Measure::arcsine(-1.0, 1.0).unwrap();
        let g = gram(&arc, &enumerate(1, 2), PairingMode::Bilinear).unwrap();
        assert!((g.logdet.value() - r(0.5)).norm() < 1e-15);
        let atom = Measure::point_mass(vec![r(0.7)]).unwrap();
        for mode in [PairingMode::Hermitian, PairingMode::Bilinear] {
            assert!(gram(&atom, &enumerate(1, 2), mode).unwrap().logdet.is_zero());
        }
    }

    #[test]
    fn real_modes_coincide() {
        let mu = Measure::product(vec![Measure::arcsine(-1.0, 1.0).unwrap(), Measure::lebesgue_interval(-2.0, 1.0).unwrap()]).unwrap();
        let idx = enumerate(2, 10);
        let h = gram(&mu, &idx, PairingMode::Hermitian).unwrap();
        let b = gram(&mu, &idx, PairingMode::Bilinear).unwrap();
        for a in 0..10 {
            for c in 0..10 {
                let scale = h.matrix[(a, c)].norm().max(1.0);
                assert!((h.matrix[(a, c)] - b.matrix[(a, c)]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn hermitian_gram_is_psd() {
        let mu = Measure::product(vec![Measure::lebesgue_disk(r(0.3), 1.0).unwrap(), Measure::uniform_circle(r(0.0), 2.0).unwrap()]).unwrap();
        let g = gram(&mu, &enumerate(2, 10), PairingMode::Hermitian).unwrap();
        assert!(min_relative_eigenvalue(&g.matrix) >= -1e-10);
        let d = Measure::discrete(vec![vec![r(0.0), C64::new(0.0, 1.0)], vec![r(1.0), r(1.0)]], vec![1.0, 2.0]).unwrap();
        let g = gram(&d, &enumerate(2, 3), PairingMode::Hermitian).unwrap();
        assert!(min_relative_eigenvalue(&g.matrix) >= -1e-10);
        assert!(g.logdet.is_zero());
    }

    #[test]
    fn z_s_gram_examples() {
        let circle = CompactSet::unit_circle();
        let circ = Measure::uniform_circle(r(0.0), 1.0).unwrap();
        let z = z_s_gram(&circle, &circ, 1, Precision::Float).unwrap();
        assert!((z.value() - r(2.0)).norm() < 1e-13);

        let interval = CompactSet::interval(-1.0, 1.0).unwrap();
        let arc = Measure::arcsine(-1.0, 1.0).unwrap();
        for p in [Precision::Float, Precision::Exact, Precision::Auto] {
            let z = z_s_gram(&interval, &arc, 1, p).unwrap();
            assert!((z.value() - r(1.0)).norm() < 1e-13);
        }
        let atoms = Measure::discrete(vec![vec![r(0.5)], vec![r(0.5)]], vec![1.0, 1.0]).unwrap();
        assert!(z_s_gram(&interval, &atoms, 1, Precision::Float).unwrap().is_zero());
        assert!(z_s_gram(&circle, &circ, 1, Precision::Exact).is_err());
        assert!(z_s_gram(&circle, &arc, 1, Precision::Float).is_err());
    }

    #[test]
    fn mass_scaling_multiplies_z_s() {
        let interval = CompactSet::interval(-1.0, 1.0).unwrap();
        let arc = Measure::arcsine(-1.0, 1.0).unwrap();
        let t = 3.5;
        let scaled = arc.clone().with_mass_factor(t).unwrap();
        for s in 1..5 {
            let m = counts(1, s).unwrap().m as f64;
            let a = z_s_gram(&interval, &arc, s, Precision::Float).unwrap().log_abs;
            let b = z_s_gram(&interval, &scaled, s, Precision::Float).unwrap().log_abs;
            assert!((b - a - m * t.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn point_mass_monte_carlo_is_zero() {
        let interval = CompactSet::interval(-1.0, 1.0).unwrap();
        let atom = Measure::point_mass(vec![r(0.25)]).unwrap();
        let est = z_s_montecarlo(&interval, &atom, 1, 500, 1).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.log_estimate, f64::NEG_INFINITY);
    }

    #[test]
    fn bm_ratio_examples() {
        let circle = CompactSet::unit_circle();
        let circ = Measure::uniform_circle(r(0.0), 1.0).unwrap();
        let grid = circle.grid(512);
        for s in [1, 4, 9] {
            let ratio = bernstein_markov_ratio(&circle, &circ, s, &grid).unwrap();
            assert!((ratio - ((s + 1) as f64).sqrt()).abs() < 1e-10);
        }
        let interval = CompactSet::interval(-1.0, 1.0).unwrap();
        let arc = Measure::arcsine(-1.0, 1.0).unwrap();
        let grid = interval.grid(4096);
        assert!((bernstein_markov_ratio(&interval, &arc, 0, &grid).unwrap() - 1.0).abs() < 1e-14);
        // Christoffel function of the Chebyshev weight peaks at ±1 with value 2s + 1.
        let ratio = bernstein_markov_ratio(&interval, &arc, 12, &grid).unwrap();
        assert!((ratio - 25f64.sqrt()).abs() < 1e-9);
        let atom = Measure::point_mass(vec![r(0.0)]).unwrap();
        assert_eq!(bernstein_markov_ratio(&interval, &atom, 2, &grid).unwrap(), f64::INFINITY);
    }
}
