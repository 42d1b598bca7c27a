//! Graded-lexicographic enumeration of `ℤ₊ⁿ`.
//!
//! Indices are ordered by total degree first. Inside one degree block the
//! order is lexicographic on `(k₁, …, k_n)` with the smaller first entry
//! first, so in two variables the degree-2 block reads `(0,2), (1,1), (2,0)`.
//! Determinants at the block boundaries `i = m_s` do not depend on this
//! choice up to sign.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        Self { entries, degree }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Componentwise sum `k + m`; the index of the product monomial.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex::new(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All indices of degree exactly `s` in `n` variables, in block order.
pub fn degree_block(n: usize, s: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=remaining {
            prefix.push(first);
            fill(prefix, remaining - first, slots - 1, out);
            prefix.pop();
        }
    }
    assert!(n >= 1, "dimension must be positive");
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n), s, n, &mut out);
    out
}

/// The first `count` multi-indices in graded-lex order.
pub fn enumerate(n: usize, count: usize) -> Vec<MultiIndex> {
    assert!(n >= 1 && count >= 1, "enumerate needs n >= 1 and count >= 1");
    let mut out = Vec::with_capacity(count);
    let mut s = 0;
    while out.len() < count {
        for k in degree_block(n, s) {
            if out.len() == count {
                break;
            }
            out.push(k);
        }
        s += 1;
    }
    out
}

/// An enumeration prefix covering every index of degree `≤ max_degree`.
#[derive(Clone, Debug)]
pub struct GradedEnumeration {
    dim: usize,
    max_degree: u32,
    indices: Vec<MultiIndex>,
    /// `block_starts[s]` is `m_{s-1}` (with `m_{-1} = 0`).
    block_starts: Vec<usize>,
}

impl GradedEnumeration {
    pub fn up_to_degree(n: usize, max_degree: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let total = counts(n, max_degree)?.m;
        let total = usize::try_from(total).map_err(|_| Error::Overflow("m_s as usize".into()))?;
        let mut indices = Vec::with_capacity(total);
        let mut block_starts = Vec::with_capacity(max_degree as usize + 1);
        for s in 0..=max_degree {
            block_starts.push(indices.len());
            indices.extend(degree_block(n, s));
        }
        Ok(Self { dim: n, max_degree, indices, block_starts })
    }

    /// Smallest enumeration holding at least `count` indices.
    pub fn with_count(n: usize, count: usize) -> Result<Self> {
        let mut s = 0;
        loop {
            let m = counts(n, s)?.m;
            if m as usize >= count {
                return Self::up_to_degree(n, s);
            }
            s += 1;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// The first `count` indices; panics when the enumeration is too short.
    pub fn prefix(&self, count: usize) -> &[MultiIndex] {
        &self.indices[..count]
    }

    /// `s(i) = |k(i)|` for the 1-based position `i`.
    pub fn degree_at(&self, i: usize) -> u32 {
        self.indices[i - 1].degree()
    }

    /// `m_s`, the number of indices of degree at most `s`.
    pub fn m(&self, s: u32) -> usize {
        if s >= self.max_degree {
            self.indices.len()
        } else {
            self.block_starts[s as usize + 1]
        }
    }

    /// Sum of the degrees of the first `i` indices.
    pub fn degree_sum(&self, i: usize) -> u64 {
        self.indices[..i].iter().map(|k| k.degree() as u64).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountingSequences {
    /// Number of indices of degree `≤ s`.
    pub m: u64,
    /// Number of indices of degree exactly `s`.
    pub n_s: u64,
    /// `Σ_{q ≤ s} q·N_q`, the total degree of the first `m_s` monomials.
    pub l: u64,
}

fn binomial(a: u64, b: u64) -> Option<u64> {
    let b = b.min(a.checked_sub(b)?);
    let mut c: u128 = 1;
    for i in 0..b {
        c = c.checked_mul((a - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(c).ok()
}

/// `m_s`, `N_s` and `l_s` for dimension `n`; overflow is reported.
pub fn counts(n: usize, s: u32) -> Result<CountingSequences> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let n = n as u64;
    let s64 = s as u64;
    let overflow = |what: &str| Error::Overflow(format!("{what} for n = {n}, s = {s}"));
    let m = s64
        .checked_add(n)
        .and_then(|t| binomial(t, s64))
        .ok_or_else(|| overflow("m_s"))?;
    let n_s = if s == 0 {
        1
    } else {
        binomial(n + s64 - 1, s64).ok_or_else(|| overflow("N_s"))?
    };
    let mut l: u64 = 0;
    for q in 1..=s64 {
        let nq = binomial(n + q - 1, q).ok_or_else(|| overflow("N_q"))?;
        l = q
            .checked_mul(nq)
            .and_then(|t| l.checked_add(t))
            .ok_or_else(|| overflow("l_s"))?;
    }
    Ok(CountingSequences { m, n_s, l })
}

/// `z^k`, with `0^0 = 1`.
pub fn monomial_eval(k: &MultiIndex, z: &[C64]) -> Result<C64> {
    check_dim(k.dim(), z.len())?;
    Ok(k.entries()
        .iter()
        .zip(z)
        .fold(C64::new(1.0, 0.0), |acc, (&e, &zv)| acc * zv.powu(e)))
}
