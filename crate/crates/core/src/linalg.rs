//! Dense complex matrices, partial-pivoting LU and log-domain determinants.

use std::ops::{Index, IndexMut};

use crate::C64;

/// `det = phase · exp(log_abs)`; an exactly singular matrix has
/// `log_abs = -∞` and `phase = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: C64,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet { log_abs: f64::NEG_INFINITY, phase: C64 { re: 0.0, im: 0.0 } };
    pub const ONE: LogDet = LogDet { log_abs: 0.0, phase: C64 { re: 1.0, im: 0.0 } };

    pub fn from_value(v: C64) -> Self {
        let a = v.norm();
        if a == 0.0 {
            Self::ZERO
        } else {
            Self { log_abs: a.ln(), phase: v / a }
        }
    }

    pub fn from_parts(log_abs: f64, phase: C64) -> Self {
        if log_abs == f64::NEG_INFINITY || phase == C64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self { log_abs, phase: phase / phase.norm() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// The determinant itself; overflows to infinity or underflows to zero
    /// outside the range of `f64`.
    pub fn value(&self) -> C64 {
        if self.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }

    pub fn mul(&self, other: &LogDet) -> LogDet {
        if self.is_zero() || other.is_zero() {
            Self::ZERO
        } else {
            Self::from_parts(self.log_abs + other.log_abs, self.phase * other.phase)
        }
    }

    /// Multiplies the magnitude by `exp(delta)`.
    pub fn scale_log(&self, delta: f64) -> LogDet {
        if self.is_zero() {
            *self
        } else {
            Self { log_abs: self.log_abs + delta, phase: self.phase }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn logdet(&self) -> LogDet {
        Lu::factor(self.clone()).logdet()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// `P·A = L·U` with row partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl Lu {
    pub fn factor(mut a: CMatrix) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, a[(r, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)];
            for r in k + 1..n {
                let f = a[(r, k)] / pivot;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                a[(r, k)] = f;
                for c in k + 1..n {
                    let u = a[(k, c)];
                    a[(r, c)] -= f * u;
                }
            }
        }
        Self { lu: a, perm, swaps, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn logdet(&self) -> LogDet {
        if self.singular {
            return LogDet::ZERO;
        }
        let n = self.lu.rows;
        let mut log_abs = 0.0;
        let mut phase = if self.swaps % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
        for k in 0..n {
            let u = self.lu[(k, k)];
            let a = u.norm();
            log_abs += a.ln();
            phase *= u / a;
        }
        LogDet::from_parts(log_abs, phase)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= self.lu[(r, c)] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= self.lu[(r, c)] * x[c];
            }
            x[r] = acc / self.lu[(r, r)];
        }
        x
    }

    /// Solves `Aᵀ x = b` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ z = y, x = Pᵀ z.
        let mut y = b.to_vec();
        for r in 0..n {
            let mut acc = y[r];
            for c in 0..r {
                acc -= self.lu[(c, r)] * y[c];
            }
            y[r] = acc / self.lu[(r, r)];
        }
        for r in (0..n).rev() {
            let mut acc = y[r];
            for c in r + 1..n {
                acc -= self.lu[(c, r)] * y[c];
            }
            y[r] = acc;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

/// Lower-triangular `L` with `G = L·Lᴴ`; `None` when a pivot is not
/// positive relative to `tol · max|G_jj|`.
pub fn cholesky(g: &CMatrix, tol: f64) -> Option<CMatrix> {
    let n = g.rows;
    let scale = (0..n).map(|i| g[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > tol * scale) {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = C64::new(dj, 0.0);
        for i in j + 1..n {
            let mut acc = g[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / dj;
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_substitute(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for r in 0..n {
        let mut acc = x[r];
        for c in 0..r {
            acc -= l[(r, c)] * x[c];
        }
        x[r] = acc / l[(r, r)];
    }
    x
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Works on the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
/// spectrum is that of `a` with every eigenvalue doubled, using cyclic Jacobi
/// rotations.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows;
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = a[(r, c)];
            s[r * m + c] = z.re;
            s[(r + n) * m + c + n] = z.re;
            s[r * m + c + n] = -z.im;
            s[(r + n) * m + c] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| s[r * m + c] * s[r * m + c])
            .sum();
        let diag: f64 = (0..m).map(|i| s[i * m + i] * s[i * m + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (s[q * m + q] - s[p * m + p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| s[i * m + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.into_iter().step_by(2).collect()
}

/// Determinant by cofactor expansion; only for tiny matrices in checks.
pub fn det_by_expansion(a: &CMatrix) -> C64 {
    let n = a.rows;
    match n {
        0 => C64::new(1.0, 0.0),
        1 => a[(0, 0)],
        _ => (0..n)
            .map(|c| {
                let minor = CMatrix::from_fn(n - 1, n - 1, |r, cc| a[(r + 1, if cc < c { cc } else { cc + 1 })]);
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                a[(0, c)] * det_by_expansion(&minor) * sign
            })
            .sum(),
    }
}
