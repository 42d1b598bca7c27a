//! Analytic functionals as coefficient families `a_k = f*(ζ^k)`, their
//! Hankel-like determinants `H_i` and the Polya quantities `D_i`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{check_dim, Error, Result};
use crate::exact::{self, rational_from_f64, RationalMatrix};
use crate::indexcomb::{counts, enumerate, MultiIndex};
use crate::linalg::{det_by_expansion, CMatrix, LogDet};
use crate::measures::{Measure, MeasureKind, Precision};
use crate::vandermonde::{vandermonde_matrix, Basis};
use crate::{Point, C64};

/// Germ evaluator `f'(z)` for the contour transform.
#[derive(Clone)]
pub enum Germ {
    /// `∏_ν 1/(z_ν - c_ν)`.
    Geometric { center: Point },
    /// `Σ_r w_r ∏_ν 1/(z_ν - ζ_{r,ν})`, the Cauchy transform of a discrete measure.
    Cauchy { atoms: Vec<Point>, weights: Vec<f64> },
    Custom { dim: usize, name: String, f: Arc<dyn Fn(&[C64]) -> C64 + Send + Sync> },
}

impl fmt::Debug for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Germ::Geometric { center } => f.debug_struct("Geometric").field("center", center).finish(),
            Germ::Cauchy { atoms, weights } => {
                f.debug_struct("Cauchy").field("atoms", atoms).field("weights", weights).finish()
            }
            Germ::Custom { dim, name, .. } => f.debug_struct("Custom").field("dim", dim).field("name", name).finish(),
        }
    }
}

impl Germ {
    pub fn dim(&self) -> usize {
        match self {
            Germ::Geometric { center } => center.len(),
            Germ::Cauchy { atoms, .. } => atoms.first().map_or(0, |p| p.len()),
            Germ::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        let cauchy = |p: &[C64]| z.iter().zip(p).fold(C64::new(1.0, 0.0), |acc, (zv, pv)| acc / (zv - pv));
        match self {
            Germ::Geometric { center } => cauchy(center),
            Germ::Cauchy { atoms, weights } => atoms.iter().zip(weights).map(|(p, w)| cauchy(p) * w).sum(),
            Germ::Custom { f, .. } => f(z),
        }
    }
}

/// Named closed-form coefficient families.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// Evaluation at `c`: `a_k = c^k`.
    PointMass(Point),
    /// `f'(z) = ∏ 1/(z_ν - c_ν)`, whose coefficients are again `c^k`.
    Geometric(Point),
    /// The zero functional.
    Zero(usize),
}

impl ClosedForm {
    fn dim(&self) -> usize {
        match self {
            ClosedForm::PointMass(c) | ClosedForm::Geometric(c) => c.len(),
            ClosedForm::Zero(n) => *n,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CoefficientSource {
    Measure(Measure),
    ClosedForm(ClosedForm),
    Contour { germ: Germ, radius: f64, order: usize },
}

/// Coefficients `a_k` of a germ at infinity, with a shared cache.
#[derive(Debug)]
pub struct GermCoefficients {
    dim: usize,
    source: CoefficientSource,
    cache: RwLock<HashMap<MultiIndex, C64>>,
    /// Unnormalized inverse DFT of the germ on the torus grid, row-major in
    /// the per-axis frequency.
    contour: Option<Vec<C64>>,
}

pub fn coeffs_from_measure(mu: Measure) -> GermCoefficients {
    GermCoefficients::new(mu.dim(), CoefficientSource::Measure(mu), None)
}

pub fn coeffs_closed_form(family: ClosedForm) -> GermCoefficients {
    GermCoefficients::new(family.dim(), CoefficientSource::ClosedForm(family), None)
}

/// Trapezoidal rule with `order` points per axis on the torus `|z_ν| = radius`.
/// The germ must be analytic on and outside the torus; aliasing from too small
/// an `order` is not detected.
pub fn coeffs_from_contour(germ: Germ, radius: f64, order: usize) -> Result<GermCoefficients> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("contour radius must be positive, got {radius}")));
    }
    if order < 4 {
        return Err(Error::InvalidArgument(format!("contour grid order must be at least 4, got {order}")));
    }
    let n = germ.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("germ has dimension 0".into()));
    }
    let total = order
        .checked_pow(n as u32)
        .filter(|t| *t <= 1 << 24)
        .ok_or_else(|| Error::LimitsExceeded(format!("torus grid {order}^{n} is too large")))?;
    let nodes: Vec<C64> = (0..order).map(|j| C64::from_polar(radius, 2.0 * PI * j as f64 / order as f64)).collect();
    let mut data: Vec<C64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut z = vec![C64::new(0.0, 0.0); n];
            for nu in (0..n).rev() {
                z[nu] = nodes[rest % order];
                rest /= order;
            }
            germ.eval(&z)
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_inverse(order);
    let mut line = vec![C64::new(0.0, 0.0); order];
    for nu in 0..n {
        let stride = order.pow((n - 1 - nu) as u32);
        for base in 0..total {
            if (base / stride) % order != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }
    Ok(GermCoefficients::new(n, CoefficientSource::Contour { germ, radius, order }, Some(data)))
}

impl Clone for GermCoefficients {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            source: self.source.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
            contour: self.contour.clone(),
        }
    }
}

impl GermCoefficients {
    fn new(dim: usize, source: CoefficientSource, contour: Option<Vec<C64>>) -> Self {
        Self { dim, source, cache: RwLock::new(HashMap::new()), contour }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &CoefficientSource {
        &self.source
    }

    /// `a_k`.
    pub fn a(&self, k: &MultiIndex) -> Result<C64> {
        check_dim(self.dim, k.dim())?;
        if let Some(v) = self.cache.read().unwrap().get(k) {
            return Ok(*v);
        }
        let v = self.compute(k)?;
        self.cache.write().unwrap().insert(k.clone(), v);
        Ok(v)
    }

    /// Fills the cache for every `|k| ≤ max_degree`.
    pub fn fill(&self, max_degree: u32) -> Result<()> {
        let c = counts(self.dim, max_degree)?;
        let missing: Vec<MultiIndex> = {
            let cache = self.cache.read().unwrap();
            enumerate(self.dim, c.m as usize).into_iter().filter(|k| !cache.contains_key(k)).collect()
        };
        let values = missing.iter().map(|k| self.compute(k)).collect::<Result<Vec<_>>>()?;
        self.cache.write().unwrap().extend(missing.into_iter().zip(values));
        Ok(())
    }

    fn compute(&self, k: &MultiIndex) -> Result<C64> {
        match &self.source {
            CoefficientSource::Measure(mu) => mu.moment(k),
            CoefficientSource::ClosedForm(ClosedForm::PointMass(c) | ClosedForm::Geometric(c)) => {
                Ok(c.iter().zip(k.entries()).fold(C64::new(1.0, 0.0), |acc, (z, &e)| acc * z.powu(e)))
            }
            CoefficientSource::ClosedForm(ClosedForm::Zero(_)) => Ok(C64::new(0.0, 0.0)),
            CoefficientSource::Contour { radius, order, .. } => {
                let table = self.contour.as_ref().expect("contour table");
                let mut flat = 0;
                for &e in k.entries() {
                    flat = flat * order + (e as usize + 1) % order;
                }
                let scale = (k.degree() as f64 + self.dim as f64) * radius.ln();
                Ok(table[flat] * (scale.exp() / (*order as f64).powi(self.dim as i32)))
            }
        }
    }

    /// Exact rational `a_k` when the source has one.
    pub fn exact(&self, k: &MultiIndex) -> Option<BigRational> {
        match &self.source {
            CoefficientSource::Measure(mu) => mu.exact_moment(k),
            CoefficientSource::ClosedForm(ClosedForm::PointMass(c) | ClosedForm::Geometric(c)) => {
                if c.iter().any(|z| z.im != 0.0) || k.dim() != c.len() {
                    return None;
                }
                let mut acc = rational_from_f64(1.0);
                for (z, &e) in c.iter().zip(k.entries()) {
                    acc *= exact::pow(&rational_from_f64(z.re), e);
                }
                Some(acc)
            }
            CoefficientSource::ClosedForm(ClosedForm::Zero(_)) => Some(rational_from_f64(0.0)),
            CoefficientSource::Contour { .. } => None,
        }
    }

    pub fn supports_exact(&self) -> bool {
        self.exact(&MultiIndex::zero(self.dim)).is_some()
    }

    /// Upper bound on the rank of every Hankel matrix, when known.
    pub fn rank_bound(&self) -> Option<usize> {
        match &self.source {
            CoefficientSource::Measure(mu) => mu.rank_bound(),
            CoefficientSource::ClosedForm(ClosedForm::PointMass(_) | ClosedForm::Geometric(_)) => Some(1),
            CoefficientSource::ClosedForm(ClosedForm::Zero(_)) => Some(0),
            CoefficientSource::Contour { .. } => None,
        }
    }
}

/// `(a_{k(α)+k(β)})_{α,β ≤ i}`.
pub fn hankel_matrix(a: &GermCoefficients, i: usize) -> Result<CMatrix> {
    if i == 0 {
        return Err(Error::InvalidArgument("Hankel size must be at least 1".into()));
    }
    let indices = enumerate(a.dim(), i);
    let mut m = CMatrix::zeros(i, i);
    for r in 0..i {
        for c in r..i {
            let v = a.a(&indices[r].add(&indices[c]))?;
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    Ok(m)
}

fn use_exact(a: &GermCoefficients, precision: Precision) -> Result<bool> {
    match precision {
        Precision::Float => Ok(false),
        Precision::Auto => Ok(a.supports_exact()),
        Precision::Exact if a.supports_exact() => Ok(true),
        Precision::Exact => Err(Error::Unsupported("exact coefficients are not available for this source".into())),
    }
}

/// `log|H_i|` for `i = 1..=i_max`.
pub fn hankel_logdets(a: &GermCoefficients, i_max: usize, precision: Precision) -> Result<Vec<LogDet>> {
    if i_max == 0 {
        return Err(Error::InvalidArgument("i_max must be at least 1".into()));
    }
    let indices = enumerate(a.dim(), i_max);
    let top = indices.last().map_or(0, |k| k.degree());
    let mut dets = if use_exact(a, precision)? {
        let mut entries: HashMap<MultiIndex, BigRational> = HashMap::new();
        for r in 0..i_max {
            for c in r..i_max {
                let k = indices[r].add(&indices[c]);
                if !entries.contains_key(&k) {
                    let v = a.exact(&k).expect("exact coefficient");
                    entries.insert(k, v);
                }
            }
        }
        let m = RationalMatrix::from_fn(i_max, |r, c| entries[&indices[r].add(&indices[c])].clone());
        m.leading_minors().iter().map(exact::logdet_of_rational).collect::<Vec<_>>()
    } else {
        a.fill(2 * top)?;
        (1..=i_max)
            .into_par_iter()
            .map(|i| hankel_matrix(a, i).map(|m| m.logdet()))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(rank) = a.rank_bound() {
        for d in dets.iter_mut().skip(rank) {
            *d = LogDet::ZERO;
        }
    }
    Ok(dets)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelRow {
    pub i: usize,
    /// Degree of the `i`-th multi-index.
    pub s: u32,
    pub log_abs: f64,
    /// `|H_i|^{1/(2 l_s)}`; `None` when `l_s = 0`.
    pub d: Option<f64>,
    /// Running maximum of the defined `D_j`, `j ≤ i`.
    pub running_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelSequenceReport {
    pub dim: usize,
    pub exact: bool,
    pub enumeration: Vec<MultiIndex>,
    pub rows: Vec<HankelRow>,
}

impl HankelSequenceReport {
    /// Rows at the diagonal sizes `i = m_s`.
    pub fn diagonal(&self) -> Vec<&HankelRow> {
        self.rows
            .iter()
            .filter(|r| self.rows.get(r.i).is_none_or(|next| next.s > r.s) && r.i == self.m(r.s))
            .collect()
    }

    fn m(&self, s: u32) -> usize {
        counts(self.dim, s).map_or(usize::MAX, |c| c.m as usize)
    }

    pub fn max_d(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.running_max)
    }
}

/// `D_i = |H_i|^{1/(2 l_{s(i)})}` for `i = 1..=i_max`.
pub fn polya_sequence(a: &GermCoefficients, i_max: usize, precision: Precision) -> Result<HankelSequenceReport> {
    let exact = use_exact(a, precision)?;
    let dets = hankel_logdets(a, i_max, precision)?;
    let enumeration = enumerate(a.dim(), i_max);
    let mut running = 0.0f64;
    let mut rows = Vec::with_capacity(i_max);
    for (j, det) in dets.iter().enumerate() {
        let s = enumeration[j].degree();
        let l = counts(a.dim(), s)?.l;
        let d = (l > 0).then(|| if det.is_zero() { 0.0 } else { (det.log_abs / (2.0 * l as f64)).exp() });
        if let Some(v) = d {
            running = running.max(v);
        }
        rows.push(HankelRow { i: j + 1, s, log_abs: det.log_abs, d, running_max: running });
    }
    Ok(HankelSequenceReport { dim: a.dim(), exact, enumeration, rows })
}

/// Brute-force value of the `i`-fold iterated application of `f* = μ` to
/// `V(ζ⁽¹⁾, …, ζ⁽ⁱ⁾)²`, summed over all atom tuples. Equals `i!·|H_i|`.
pub fn iterated_functional_oracle(mu: &Measure, i: usize) -> Result<f64> {
    let MeasureKind::Discrete { atoms, weights } = mu.kind() else {
        return Err(Error::InvalidArgument("the iterated-functional oracle needs a discrete measure".into()));
    };
    if i == 0 || i > 3 || atoms.len() > 4 {
        return Err(Error::LimitsExceeded(format!("oracle supports 1 ≤ i ≤ 3 and at most 4 atoms, got i = {i}, {} atoms", atoms.len())));
    }
    let indices = enumerate(mu.dim(), i);
    let basis = Basis::monomial(mu.dim());
    let a = atoms.len();
    let mut total = C64::new(0.0, 0.0);
    for t in 0..a.pow(i as u32) {
        let tuple: Vec<usize> = (0..i).map(|q| (t / a.pow(q as u32)) % a).collect();
        let pts: Vec<Point> = tuple.iter().map(|&r| atoms[r].clone()).collect();
        let v = det_by_expansion(&vandermonde_matrix(&pts, &indices, &basis));
        let w: f64 = tuple.iter().map(|&r| weights[r] * mu.mass_factor()).product();
        total += v * v * w;
    }
    Ok(total.norm())
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
    fn closed_and_measure_sources() {
        let pm = coeffs_from_measure(Measure::point_mass(vec![r(0.4)]).unwrap());
        for k in 0..6 {
            assert!((pm.a(&idx(&[k])).unwrap() - r(0.4f64.powi(k as i32))).norm() < 1e-15);
        }
        let arc = coeffs_from_measure(Measure::arcsine(-1.0, 1.0).unwrap());
        assert!((arc.a(&idx(&[2])).unwrap() - r(0.5)).norm() < 1e-15);
        assert!(arc.a(&idx(&[1])).unwrap().norm() < 1e-15);
        let prod = coeffs_closed_form(ClosedForm::PointMass(vec![r(0.5), C64::new(0.0, 2.0)]));
        assert_eq!(prod.a(&idx(&[2, 3])).unwrap(), C64::new(0.0, -8.0) * 0.25);
    }

    #[test]
    fn contour_examples() {
        let inv = coeffs_from_contour(Germ::Geometric { center: vec![r(0.0)] }, 2.0, 64).unwrap();
        assert!((inv.a(&idx(&[0])).unwrap() - r(1.0)).norm() < 1e-12);
        for k in 1..=10 {
            assert!(inv.a(&idx(&[k])).unwrap().norm() < 1e-12);
        }
        let g = coeffs_from_contour(Germ::Geometric { center: vec![r(0.3)] }, 2.0, 64).unwrap();
        for k in 0..=10 {
            assert!((g.a(&idx(&[k])).unwrap() - r(0.3f64.powi(k as i32))).norm() < 1e-10);
        }
        let two = coeffs_from_contour(Germ::Geometric { center: vec![r(0.0), r(0.0)] }, 1.5, 16).unwrap();
        for k in enumerate(2, 15) {
            let want = if k.degree() == 0 { 1.0 } else { 0.0 };
            assert!((two.a(&k).unwrap() - r(want)).norm() < 1e-12, "{k}");
        }
        assert!(coeffs_from_contour(Germ::Geometric { center: vec![r(0.0)] }, 0.0, 64).is_err());
        assert!(coeffs_from_contour(Germ::Geometric { center: vec![r(0.0)] }, 1.0, 3).is_err());
    }

    #[test]
    fn contour_radius_independence() {
        let germ = Germ::Cauchy { atoms: vec![vec![r(0.3)], vec![C64::new(-0.2, 0.5)]], weights: vec![0.25, 0.75] };
        let base = coeffs_from_contour(germ.clone(), 2.0, 64).unwrap();
        for radius in [1.5, 4.0] {
            let other = coeffs_from_contour(germ.clone(), radius, 64).unwrap();
            for k in 0..=10 {
                let k = idx(&[k]);
                assert!((base.a(&k).unwrap() - other.a(&k).unwrap()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn contour_matches_measure() {
        let c = C64::new(0.2, -0.4);
        let contour = coeffs_from_contour(Germ::Geometric { center: vec![c, r(0.5)] }, 2.0, 32).unwrap();
        let measure = coeffs_from_measure(Measure::point_mass(vec![c, r(0.5)]).unwrap());
        for k in enumerate(2, 28) {
            assert!((contour.a(&k).unwrap() - measure.a(&k).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn hankel_examples() {
        let pm = coeffs_closed_form(ClosedForm::PointMass(vec![r(0.7)]));
        let h = hankel_matrix(&pm, 2).unwrap();
        assert!((h[(1, 1)] - r(0.49)).norm() < 1e-15);
        assert!(hankel_logdets(&pm, 4, Precision::Float).unwrap()[1..].iter().all(|d| d.is_zero()));
        let arc = coeffs_from_measure(Measure::arcsine(-1.0, 1.0).unwrap());
        for p in [Precision::Float, Precision::Exact] {
            let d = hankel_logdets(&arc, 2, p).unwrap();
            assert!((d[1].value() - r(0.5)).norm() < 1e-15);
        }
        let zero = coeffs_closed_form(ClosedForm::Zero(2));
        assert!(hankel_logdets(&zero, 6, Precision::Auto).unwrap().iter().all(|d| d.is_zero()));
        let contour = coeffs_from_contour(Germ::Geometric { center: vec![r(0.3)] }, 2.0, 64).unwrap();
        assert!(hankel_logdets(&contour, 3, Precision::Exact).is_err());
    }

    #[test]
    fn polya_sequence_examples() {
        let pm = coeffs_closed_form(ClosedForm::PointMass(vec![r(0.0)]));
        let rep = polya_sequence(&pm, 5, Precision::Auto).unwrap();
        assert_eq!(rep.rows[0].d, None);
        assert!(rep.rows[1..].iter().all(|row| row.d == Some(0.0)));

        let arc = coeffs_from_measure(Measure::arcsine(-1.0, 1.0).unwrap());
        let rep = polya_sequence(&arc, 21, Precision::Exact).unwrap();
        let diag = rep.diagonal();
        assert_eq!(diag.len(), 21);
        // |H_{s+1}| = 2^{-s²} for the arcsine law.
        for row in &diag[1..] {
            let s = row.s as f64;
            assert!((row.log_abs + s * s * std::f64::consts::LN_2).abs() < 1e-9);
            assert!((row.d.unwrap() - 2f64.powf(-s / (s + 1.0))).abs() < 1e-12);
        }

        let circ = coeffs_from_measure(Measure::uniform_circle(r(0.0), 1.0).unwrap());
        let rep = polya_sequence(&circ, 4, Precision::Float).unwrap();
        assert_eq!(rep.rows[0].log_abs, 0.0);
        assert!(rep.rows[1..].iter().all(|row| row.d == Some(0.0)));
    }

    #[test]
    fn float_and_exact_routes_agree() {
        let mu = Measure::product(vec![Measure::arcsine(-1.0, 1.0).unwrap(), Measure::lebesgue_interval(0.0, 2.0).unwrap()]).unwrap();
        let a = coeffs_from_measure(mu);
        let f = hankel_logdets(&a, 10, Precision::Float).unwrap();
        let e = hankel_logdets(&a, 10, Precision::Exact).unwrap();
        for (x, y) in f.iter().zip(&e) {
            assert!((x.log_abs - y.log_abs).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_examples() {
        let atom = Measure::point_mass(vec![r(0.0)]).unwrap();
        assert_eq!(iterated_functional_oracle(&atom, 2).unwrap(), 0.0);
        let half = Measure::discrete(vec![vec![r(0.0)], vec![r(1.0)]], vec![0.5, 0.5]).unwrap();
        assert!((iterated_functional_oracle(&half, 2).unwrap() - 0.5).abs() < 1e-15);
        let h2 = hankel_logdets(&coeffs_from_measure(half.clone()), 2, Precision::Float).unwrap()[1].value().norm();
        assert!((2.0 * h2 - 0.5).abs() < 1e-15);
        assert!((iterated_functional_oracle(&half, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(iterated_functional_oracle(&half, 4).is_err());
        assert!(iterated_functional_oracle(&Measure::arcsine(-1.0, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn diagonal_minor_is_stable_under_reordering() {
        let mu = Measure::discrete(
            vec![vec![r(0.1), r(0.7)], vec![r(-0.4), r(0.2)], vec![r(0.9), r(-0.3)], vec![r(0.0), r(0.5)]],
            vec![0.2, 0.3, 0.1, 0.4],
        )
        .unwrap();
        let a = coeffs_from_measure(mu.with_mass_factor(1.0).unwrap());
        let base = hankel_logdets(&a, 3, Precision::Float).unwrap()[2].log_abs;
        let mut indices = enumerate(2, 3);
        indices.swap(1, 2);
        let m = CMatrix::from_fn(3, 3, |r, c| a.a(&indices[r].add(&indices[c])).unwrap());
        assert!((m.logdet().log_abs - base).abs() < 1e-10);
    }
}
