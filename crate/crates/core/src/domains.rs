//! Model compact sets `K ⊂ ℂⁿ`.
//!
//! Every set is a closed-form shape, so it can be sampled, parametrized for
//! local optimization, and scaled exactly. Boxes and polydisks are products
//! of one-dimensional factors.

use std::f64::consts::PI;

use rand::Rng as _;

use crate::error::{check_dim, Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::{Point, C64};

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `[a, b] ⊂ ℝ ⊂ ℂ`.
    Interval { a: f64, b: f64 },
    Circle { center: C64, radius: f64 },
    Disk { center: C64, radius: f64 },
    /// Finitely many points of `ℂⁿ`.
    Finite { points: Vec<Point> },
    /// Cartesian product; the dimension is the sum of the factor dimensions.
    Product { factors: Vec<CompactSet> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompactSet {
    shape: Shape,
    tol: f64,
}

/// How one coordinate of `K` is laid out; used to pick a well-conditioned
/// monic polynomial basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordFrame {
    /// Real coordinate ranging over `center ± half_width`.
    Real { center: f64, half_width: f64 },
    /// Complex coordinate centred at `center` with spread `radius`.
    Complex { center: C64, radius: f64 },
}

impl CompactSet {
    fn with_shape(shape: Shape) -> Self {
        Self { shape, tol: DEFAULT_MEMBERSHIP_TOL }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::InvalidArgument(format!("interval needs a <= b, got [{a}, {b}]")));
        }
        Ok(Self::with_shape(Shape::Interval { a, b }))
    }

    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("circle radius must be >= 0, got {radius}")));
        }
        Ok(Self::with_shape(Shape::Circle { center, radius }))
    }

    pub fn unit_circle() -> Self {
        Self::with_shape(Shape::Circle { center: C64::new(0.0, 0.0), radius: 1.0 })
    }

    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("disk radius must be >= 0, got {radius}")));
        }
        Ok(Self::with_shape(Shape::Disk { center, radius }))
    }

    pub fn finite(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("finite set needs at least one point".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidArgument("points must have dimension >= 1".into()));
        }
        for p in &points {
            check_dim(n, p.len())?;
        }
        Ok(Self::with_shape(Shape::Finite { points }))
    }

    pub fn product(factors: Vec<CompactSet>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product needs at least one factor".into()));
        }
        Ok(Self::with_shape(Shape::Product { factors }))
    }

    /// `∏ [aᵢ, bᵢ] ⊂ ℝⁿ`.
    pub fn real_box(bounds: &[(f64, f64)]) -> Result<Self> {
        let factors = bounds.iter().map(|&(a, b)| Self::interval(a, b)).collect::<Result<Vec<_>>>()?;
        Self::product(factors)
    }

    pub fn polydisk(discs: &[(C64, f64)]) -> Result<Self> {
        let factors = discs.iter().map(|&(c, r)| Self::disk(c, r)).collect::<Result<Vec<_>>>()?;
        Self::product(factors)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        if let Shape::Product { factors } = &mut self.shape {
            for f in factors {
                *f = f.clone().with_tolerance(tol);
            }
        }
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } | Shape::Circle { .. } | Shape::Disk { .. } => 1,
            Shape::Finite { points } => points[0].len(),
            Shape::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
        }
    }

    /// True iff `K ⊆ ℝⁿ`.
    pub fn is_real(&self) -> bool {
        match &self.shape {
            Shape::Interval { .. } => true,
            Shape::Circle { radius, center } | Shape::Disk { radius, center } => *radius == 0.0 && center.im == 0.0,
            Shape::Finite { points } => points.iter().flatten().all(|z| z.im == 0.0),
            Shape::Product { factors } => factors.iter().all(|f| f.is_real()),
        }
    }

    /// True iff `z` lies within the membership tolerance of `K`.
    pub fn contains(&self, z: &[C64]) -> Result<bool> {
        check_dim(self.dim(), z.len())?;
        let tol = self.tol;
        Ok(match &self.shape {
            Shape::Interval { a, b } => {
                let x = z[0];
                x.im.abs() <= tol && x.re >= a - tol && x.re <= b + tol
            }
            Shape::Circle { center, radius } => ((z[0] - center).norm() - radius).abs() <= tol,
            Shape::Disk { center, radius } => (z[0] - center).norm() <= radius + tol,
            Shape::Finite { points } => points.iter().any(|p| {
                p.iter().zip(z).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt() <= tol
            }),
            Shape::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    let d = f.dim();
                    if !f.contains(&z[offset..offset + d])? {
                        return Ok(false);
                    }
                    offset += d;
                }
                true
            }
        })
    }

    /// `count` points drawn uniformly with respect to the natural
    /// parametrization (arc length, Lebesgue measure, uniform on atoms).
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = rng_from_seed(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }

    pub fn sample_with(&self, rng: &mut Rng) -> Point {
        let mut out = Vec::with_capacity(self.dim());
        self.push_sample(rng, &mut out);
        out
    }

    fn push_sample(&self, rng: &mut Rng, out: &mut Point) {
        match &self.shape {
            Shape::Interval { a, b } => out.push(C64::new(a + (b - a) * rng.random::<f64>(), 0.0)),
            Shape::Circle { center, radius } => {
                let t = 2.0 * PI * rng.random::<f64>();
                out.push(center + C64::from_polar(*radius, t));
            }
            Shape::Disk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let t = 2.0 * PI * rng.random::<f64>();
                out.push(center + C64::from_polar(r, t));
            }
            Shape::Finite { points } => {
                let k = rng.random_range(0..points.len());
                out.extend_from_slice(&points[k]);
            }
            Shape::Product { factors } => {
                for f in factors {
                    f.push_sample(rng, out);
                }
            }
        }
    }

    /// Number of real parameters used by [`CompactSet::point_from_params`].
    /// Finite sets have none.
    pub fn param_dim(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } | Shape::Circle { .. } => 1,
            Shape::Disk { .. } => 2,
            Shape::Finite { .. } => 0,
            Shape::Product { factors } => factors.iter().map(|f| f.param_dim()).sum(),
        }
    }

    /// False when any factor is a finite point set; such sets cannot be
    /// moved continuously.
    pub fn is_continuous(&self) -> bool {
        match &self.shape {
            Shape::Finite { .. } => false,
            Shape::Product { factors } => factors.iter().all(|f| f.is_continuous()),
            _ => true,
        }
    }

    /// Characteristic length of each parameter, for step sizes.
    pub fn param_scales(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { a, b } => vec![(b - a).max(f64::MIN_POSITIVE)],
            Shape::Circle { .. } => vec![2.0 * PI],
            Shape::Disk { radius, .. } => vec![2.0 * radius.max(f64::MIN_POSITIVE); 2],
            Shape::Finite { .. } => vec![],
            Shape::Product { factors } => factors.iter().flat_map(|f| f.param_scales()).collect(),
        }
    }

    /// The point of `K` described by `params`; values outside the parameter
    /// domain are projected back onto `K`.
    pub fn point_from_params(&self, params: &[f64]) -> Point {
        let mut out = Vec::with_capacity(self.dim());
        self.push_from_params(params, &mut out);
        out
    }

    fn push_from_params(&self, p: &[f64], out: &mut Point) {
        match &self.shape {
            Shape::Interval { a, b } => out.push(C64::new(p[0].clamp(*a, *b), 0.0)),
            Shape::Circle { center, radius } => out.push(center + C64::from_polar(*radius, p[0])),
            Shape::Disk { center, radius } => {
                let mut w = C64::new(p[0], p[1]);
                let r = w.norm();
                if r > *radius {
                    w *= radius / r;
                }
                out.push(center + w);
            }
            Shape::Finite { .. } => panic!("finite sets have no continuous parametrization"),
            Shape::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    let d = f.param_dim();
                    f.push_from_params(&p[offset..offset + d], out);
                    offset += d;
                }
            }
        }
    }

    /// Inverse of [`CompactSet::point_from_params`] on points of `K`.
    pub fn params_of(&self, z: &[C64]) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { .. } => vec![z[0].re],
            Shape::Circle { center, .. } => vec![(z[0] - center).arg()],
            Shape::Disk { center, .. } => {
                let w = z[0] - center;
                vec![w.re, w.im]
            }
            Shape::Finite { .. } => vec![],
            Shape::Product { factors } => {
                let mut offset = 0;
                let mut out = Vec::new();
                for f in factors {
                    let d = f.dim();
                    out.extend(f.params_of(&z[offset..offset + d]));
                    offset += d;
                }
                out
            }
        }
    }

    /// Dimension of the unit cube fed to [`CompactSet::pool_point`].
    pub fn unit_dim(&self) -> usize {
        match &self.shape {
            Shape::Finite { .. } => 1,
            Shape::Product { factors } => factors.iter().map(|f| f.unit_dim()).sum(),
            _ => self.param_dim(),
        }
    }

    /// Maps `u ∈ [0,1)^unit_dim` onto `K` for deterministic candidate pools.
    /// Interval coordinates are clustered toward the endpoints (Chebyshev
    /// spacing), where extremal configurations accumulate.
    pub fn pool_point(&self, u: &[f64]) -> Point {
        let mut out = Vec::with_capacity(self.dim());
        self.push_pool_point(u, &mut out);
        out
    }

    fn push_pool_point(&self, u: &[f64], out: &mut Point) {
        match &self.shape {
            Shape::Interval { a, b } => {
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                out.push(C64::new(c - h * (PI * u[0]).cos(), 0.0));
            }
            Shape::Circle { center, radius } => out.push(center + C64::from_polar(*radius, 2.0 * PI * u[0])),
            Shape::Disk { center, radius } => {
                out.push(center + C64::from_polar(radius * u[0].sqrt(), 2.0 * PI * u[1]));
            }
            Shape::Finite { points } => {
                let k = ((u[0] * points.len() as f64) as usize).min(points.len() - 1);
                out.extend_from_slice(&points[k]);
            }
            Shape::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    let d = f.unit_dim();
                    f.push_pool_point(&u[offset..offset + d], out);
                    offset += d;
                }
            }
        }
    }

    /// Atoms of a finite set (all of them), or `None` for continuous sets.
    /// Products with a finite factor are treated as continuous in the other
    /// factors, so they also return `None`.
    pub fn atoms(&self) -> Option<&[Point]> {
        match &self.shape {
            Shape::Finite { points } => Some(points),
            _ => None,
        }
    }

    pub fn coordinate_frames(&self) -> Vec<CoordFrame> {
        match &self.shape {
            Shape::Interval { a, b } => vec![CoordFrame::Real {
                center: 0.5 * (a + b),
                half_width: 0.5 * (b - a),
            }],
            Shape::Circle { center, radius } | Shape::Disk { center, radius } => {
                vec![CoordFrame::Complex { center: *center, radius: *radius }]
            }
            Shape::Finite { points } => (0..points[0].len())
                .map(|nu| {
                    if points.iter().all(|p| p[nu].im == 0.0) {
                        let lo = points.iter().map(|p| p[nu].re).fold(f64::INFINITY, f64::min);
                        let hi = points.iter().map(|p| p[nu].re).fold(f64::NEG_INFINITY, f64::max);
                        CoordFrame::Real { center: 0.5 * (lo + hi), half_width: 0.5 * (hi - lo) }
                    } else {
                        let c = points.iter().map(|p| p[nu]).sum::<C64>() / points.len() as f64;
                        let r = points.iter().map(|p| (p[nu] - c).norm()).fold(0.0, f64::max);
                        CoordFrame::Complex { center: c, radius: r }
                    }
                })
                .collect(),
            Shape::Product { factors } => factors.iter().flat_map(|f| f.coordinate_frames()).collect(),
        }
    }

    /// Deterministic tensor grid with `per_axis` nodes along each real
    /// parameter (all atoms for finite sets). Interval grids include both
    /// endpoints; disks use a polar grid that includes the boundary circle.
    pub fn grid(&self, per_axis: usize) -> Vec<Point> {
        let per_axis = per_axis.max(2);
        match &self.shape {
            Shape::Interval { a, b } => (0..per_axis)
                .map(|j| vec![C64::new(a + (b - a) * j as f64 / (per_axis - 1) as f64, 0.0)])
                .collect(),
            Shape::Circle { center, radius } => (0..per_axis)
                .map(|j| vec![center + C64::from_polar(*radius, 2.0 * PI * j as f64 / per_axis as f64)])
                .collect(),
            Shape::Disk { center, radius } => {
                let mut out = Vec::with_capacity(per_axis * per_axis);
                for jr in 0..per_axis {
                    let r = radius * jr as f64 / (per_axis - 1) as f64;
                    for jt in 0..per_axis {
                        out.push(vec![center + C64::from_polar(r, 2.0 * PI * jt as f64 / per_axis as f64)]);
                    }
                }
                out
            }
            Shape::Finite { points } => points.clone(),
            Shape::Product { factors } => {
                let mut out: Vec<Point> = vec![Vec::new()];
                for f in factors {
                    let g = f.grid(per_axis);
                    out = out
                        .iter()
                        .flat_map(|prefix| {
                            g.iter().map(move |q| {
                                let mut p = prefix.clone();
                                p.extend_from_slice(q);
                                p
                            })
                        })
                        .collect();
                }
                out
            }
        }
    }

    /// `c·K` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {c}")));
        }
        let shape = match &self.shape {
            Shape::Interval { a, b } => Shape::Interval { a: c * a, b: c * b },
            Shape::Circle { center, radius } => Shape::Circle { center: center * c, radius: c * radius },
            Shape::Disk { center, radius } => Shape::Disk { center: center * c, radius: c * radius },
            Shape::Finite { points } => Shape::Finite {
                points: points.iter().map(|p| p.iter().map(|z| z * c).collect()).collect(),
            },
            Shape::Product { factors } => Shape::Product {
                factors: factors.iter().map(|f| f.scaled(c)).collect::<Result<_>>()?,
            },
        };
        Ok(Self { shape, tol: self.tol })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyDirection {
    /// `K_j ⊇ K_{j+1}`, `∩ K_j = K`.
    Outer,
    /// `K_j ⊆ K_{j+1} ⊆ K`.
    Inner,
    /// `K_j = K` for every `j`.
    Constant,
}

/// A nested family of compact sets indexed by `j ≥ 1`, obtained by moving
/// every boundary of the base set by `1/j` outward or inward.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactFamily {
    pub base: CompactSet,
    pub direction: FamilyDirection,
}

impl CompactFamily {
    pub fn new(base: CompactSet, direction: FamilyDirection) -> Self {
        Self { base, direction }
    }

    pub fn member(&self, j: u32) -> Result<CompactSet> {
        if j == 0 {
            return Err(Error::InvalidArgument("family index j must be >= 1".into()));
        }
        let delta = match self.direction {
            FamilyDirection::Constant => return Ok(self.base.clone()),
            FamilyDirection::Outer => 1.0 / j as f64,
            FamilyDirection::Inner => -1.0 / j as f64,
        };
        offset_set(&self.base, delta, j)
    }
}

fn offset_set(k: &CompactSet, delta: f64, j: u32) -> Result<CompactSet> {
    let shape = match &k.shape {
        Shape::Interval { a, b } => {
            if b - a + 2.0 * delta <= 0.0 {
                return Err(Error::DegenerateFamily {
                    j,
                    reason: format!("[{a}, {b}] shrunk by {} is empty or a point", -delta),
                });
            }
            Shape::Interval { a: a - delta, b: b + delta }
        }
        Shape::Disk { center, radius } => {
            if radius + delta <= 0.0 {
                return Err(Error::DegenerateFamily { j, reason: format!("disk radius {radius} shrunk by {}", -delta) });
            }
            Shape::Disk { center: *center, radius: radius + delta }
        }
        Shape::Product { factors } => Shape::Product {
            factors: factors.iter().map(|f| offset_set(f, delta, j)).collect::<Result<_>>()?,
        },
        Shape::Circle { .. } | Shape::Finite { .. } => {
            return Err(Error::Unsupported("nested families are defined for intervals, disks and their products".into()))
        }
    };
    Ok(CompactSet { shape, tol: k.tol })
}
