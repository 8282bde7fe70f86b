//! Strictly convex functions with rational images.
//!
//! Only maps that send rationals to rationals are representable: the square
//! and polynomials with rational coefficients. Convexity of a polynomial on
//! an interval is proven by showing its second derivative has strictly
//! positive Bernstein coefficients on (subintervals of) that interval.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numset::NumSet;
use crate::scalar::{ParseScalarError, Scalar};

/// Subdivision depth for the Bernstein positivity test.
const MAX_SUBDIVISIONS: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvexError {
    #[error("{f} is not provably strictly convex on {domain}")]
    NotConvexOnDomain { f: String, domain: Box<Interval> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseConvexError {
    #[error("unknown function {0:?}; expected `square` or `poly:c0,c1,...`")]
    Unknown(String),
    #[error("bad coefficient: {0}")]
    Coefficient(#[from] ParseScalarError),
    #[error("polynomial needs at least one coefficient")]
    NoCoefficients,
}

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval { lo: hi, hi: lo }
        }
    }

    /// Convex hull of a non-empty set.
    pub fn hull(set: &NumSet) -> Option<Self> {
        Some(Interval::new(set.min()?, set.max()?))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexKind {
    Square,
    /// Coefficients from degree 0 upward.
    Polynomial(Vec<Scalar>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexFn {
    pub kind: ConvexKind,
    /// Interval on which the caller asserts strict convexity, if any.
    pub domain_note: Option<Interval>,
}

impl ConvexFn {
    pub fn square() -> Self {
        ConvexFn {
            kind: ConvexKind::Square,
            domain_note: None,
        }
    }

    pub fn polynomial(coeffs: Vec<Scalar>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        ConvexFn {
            kind: ConvexKind::Polynomial(coeffs),
            domain_note: None,
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        match &self.kind {
            ConvexKind::Square => x.square(),
            ConvexKind::Polynomial(c) => horner(c, x),
        }
    }

    /// True when strict convexity on `[lo, hi]` could be proven. Never
    /// returns true for a function that is not strictly convex there.
    pub fn convexity_check(&self, interval: &Interval) -> bool {
        match &self.kind {
            ConvexKind::Square => true,
            ConvexKind::Polynomial(c) => {
                let second = derivative(&derivative(c));
                positive_on(&second, &interval.lo, &interval.hi)
            }
        }
    }

    /// Errors unless strictly convex on `[lo, hi]`.
    pub fn require_convex(&self, interval: &Interval) -> Result<(), ConvexError> {
        if self.convexity_check(interval) {
            Ok(())
        } else {
            Err(ConvexError::NotConvexOnDomain {
                f: self.to_string(),
                domain: Box::new(interval.clone()),
            })
        }
    }

    /// `f(A)` as a set; may be smaller than `A` if `f` is not injective on it.
    pub fn apply(&self, set: &NumSet) -> Result<NumSet, ConvexError> {
        if let Some(hull) = Interval::hull(set) {
            self.require_convex(&hull)?;
        }
        Ok(set.iter().map(|x| self.eval(&x)).collect())
    }
}

impl fmt::Display for ConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConvexKind::Square => write!(f, "square"),
            ConvexKind::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for ConvexFn {
    type Err = ParseConvexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "square" {
            return Ok(ConvexFn::square());
        }
        let Some(list) = s.strip_prefix("poly:") else {
            return Err(ParseConvexError::Unknown(s.to_string()));
        };
        let coeffs = list
            .split(',')
            .filter(|c| !c.trim().is_empty())
            .map(|c| c.parse::<Scalar>())
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err(ParseConvexError::NoCoefficients);
        }
        Ok(ConvexFn::polynomial(coeffs))
    }
}

fn horner(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    coeffs
        .iter()
        .rev()
        .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
}

fn derivative(coeffs: &[Scalar]) -> Vec<Scalar> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &Scalar::from(i as i64))
        .collect()
}

/// Coefficients of `p(lo + (hi - lo) u)` in powers of `u`.
fn reparametrize(p: &[Scalar], lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
    let width = hi - lo;
    // Horner on polynomials: q(u) = q(u) * (lo + width u) + c
    let mut q: Vec<Scalar> = Vec::new();
    for c in p.iter().rev() {
        let mut next = vec![Scalar::zero(); q.len() + 1];
        for (i, qi) in q.iter().enumerate() {
            next[i] = &next[i] + &(qi * lo);
            next[i + 1] = &next[i + 1] + &(qi * &width);
        }
        next[0] = &next[0] + c;
        q = next;
    }
    q
}

/// Bernstein coefficients of a power-basis polynomial on `[0, 1]`.
fn bernstein(power: &[Scalar]) -> Vec<Scalar> {
    let n = power.len().saturating_sub(1);
    let binom = |n: usize, k: usize| -> Scalar {
        let mut r = Scalar::one();
        for i in 0..k {
            r = &r * &Scalar::new((n - i) as i64, (i + 1) as i64).expect("nonzero");
        }
        r
    };
    (0..=n)
        .map(|i| {
            (0..=i).fold(Scalar::zero(), |acc, j| {
                let w = (&binom(i, j) * &power[j])
                    .checked_div(&binom(n, j))
                    .expect("nonzero binomial");
                &acc + &w
            })
        })
        .collect()
}

/// Splits Bernstein coefficients at `u = 1/2` (de Casteljau).
fn split_half(b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
    let half = Scalar::new(1, 2).expect("nonzero");
    let mut work = b.to_vec();
    let mut left = vec![work[0].clone()];
    let mut right = vec![work[work.len() - 1].clone()];
    while work.len() > 1 {
        work = work.windows(2).map(|w| &(&w[0] + &w[1]) * &half).collect();
        left.push(work[0].clone());
        right.push(work[work.len() - 1].clone());
    }
    right.reverse();
    (left, right)
}

fn bernstein_positive(b: &[Scalar], depth: u32) -> bool {
    // endpoint values are exact; a non-positive one settles the question
    if !b[0].is_positive() || !b[b.len() - 1].is_positive() {
        return false;
    }
    if b.iter().all(Scalar::is_positive) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let (l, r) = split_half(b);
    bernstein_positive(&l, depth - 1) && bernstein_positive(&r, depth - 1)
}

/// Sound test for `p > 0` on `[lo, hi]`; false when inconclusive.
fn positive_on(p: &[Scalar], lo: &Scalar, hi: &Scalar) -> bool {
    if p.is_empty() {
        return false;
    }
    if lo == hi {
        return horner(p, lo).is_positive();
    }
    let b = bernstein(&reparametrize(p, lo, hi));
    bernstein_positive(&b, MAX_SUBDIVISIONS)
}
