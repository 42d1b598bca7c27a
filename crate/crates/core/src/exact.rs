//! Exact rational determinants.
//!
//! Moment matrices of the shipped real measures have rational entries (every
//! `f64` parameter is a dyadic rational), so their Hankel determinants can be
//! computed without rounding. This is the only way to get `log|H_i|` right for
//! sizes where the float condition number exceeds `1e16`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::LogDet;
use crate::C64;

/// Exact value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `ln|x|` of a big integer, accurate to double precision.
pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_abs_rational(x: &BigRational) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom())
    }
}

pub fn logdet_of_rational(x: &BigRational) -> LogDet {
    if x.is_zero() {
        LogDet::ZERO
    } else {
        let sign = if x.is_negative() { -1.0 } else { 1.0 };
        LogDet::from_parts(ln_abs_rational(x), C64::new(sign, 0.0))
    }
}

/// Square rational matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.n + c]
    }

    /// Integer matrix with each row scaled by the lcm of its denominators,
    /// together with the product of those scale factors.
    fn cleared(&self) -> (Vec<BigInt>, BigInt) {
        let n = self.n;
        let mut ints = Vec::with_capacity(n * n);
        let mut scale = BigInt::one();
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            for q in row {
                ints.push(q.numer() * (&l / q.denom()));
            }
            scale *= l;
        }
        (ints, scale)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination with row
    /// swaps on zero pivots.
    pub fn determinant(&self) -> BigRational {
        let n = self.n;
        if n == 0 {
            return BigRational::one();
        }
        let (mut a, scale) = self.cleared();
        let mut prev = BigInt::one();
        let mut negate = false;
        for k in 0..n {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(p) => {
                        for c in 0..n {
                            a.swap(k * n + c, p * n + c);
                        }
                        negate = !negate;
                    }
                    None => return BigRational::zero(),
                }
            }
            bareiss_step(&mut a, n, k, &prev);
            prev = a[k * n + k].clone();
        }
        let det = if negate { -prev } else { prev };
        BigRational::new(det, scale)
    }

    /// Every leading principal minor `det(A[..i, ..i])`, `i = 1..=n`.
    ///
    /// Plain Bareiss elimination yields them as successive pivots while no
    /// pivot vanishes; after the first vanishing minor the remaining ones are
    /// computed independently.
    pub fn leading_minors(&self) -> Vec<BigRational> {
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        let (mut a, _) = self.cleared();
        // Row scaling of the first i rows scales the i-th minor by the
        // product of the first i row factors.
        let row_scales: Vec<BigInt> = (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
            })
            .collect();
        let mut prev = BigInt::one();
        let mut scale = BigInt::one();
        for k in 0..n {
            scale *= &row_scales[k];
            let pivot = a[k * n + k].clone();
            if pivot.is_zero() {
                out.push(BigRational::zero());
                for i in k + 2..=n {
                    out.push(self.principal(i).determinant());
                }
                return out;
            }
            out.push(BigRational::new(pivot.clone(), scale.clone()));
            bareiss_step(&mut a, n, k, &prev);
            prev = pivot;
        }
        out
    }

    fn principal(&self, i: usize) -> RationalMatrix {
        RationalMatrix::from_fn(i, |r, c| self.get(r, c).clone())
    }
}

fn bareiss_step(a: &mut [BigInt], n: usize, k: usize, prev: &BigInt) {
    let pivot = a[k * n + k].clone();
    let mut row_k: Vec<BigInt> = a[k * n..(k + 1) * n].to_vec();
    for r in k + 1..n {
        let factor = a[r * n + k].clone();
        for c in k + 1..n {
            let v = &pivot * &a[r * n + c] - &factor * &row_k[c];
            let (q, rem) = v.div_rem(prev);
            debug_assert!(rem.is_zero(), "Bareiss division must be exact");
            a[r * n + c] = q;
        }
        a[r * n + k] = BigInt::zero();
    }
    row_k.clear();
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `x^e` for a rational base.
pub fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

pub fn is_negative(x: &BigRational) -> bool {
    x.numer().sign() == Sign::Minus
}
