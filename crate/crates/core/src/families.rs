//! Deterministic and seeded generators of input sets.
//!
//! Random families draw from PCG-XSL-RR 128/64 (`Pcg64`) initialised as
//! `Pcg64::new(seed as u128, PCG_STREAM)`. A uniform integer in `[lo, hi]`
//! takes the next 64-bit output `v`, rejects it while
//! `v >= 2^64 - (2^64 mod span)`, and returns `lo + v mod span`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand_pcg::rand_core::Rng;
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::numset::NumSet;
use crate::scalar::Scalar;

pub const PCG_STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

/// Draw budget per requested element before a random family gives up.
const DRAWS_PER_ELEMENT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("cannot parse family {0:?}")]
    Parse(String),
    #[error("infeasible family spec: {0}")]
    InfeasibleSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    /// `{1, 2, ..., n}`.
    Ap,
    /// `{1 + sum_i j_i * steps_i : 0 <= j_i < dims_i}`, smallest `n` values.
    Gap {
        dims: Vec<usize>,
        steps: Vec<i64>,
    },
    /// `{1, r, r^2, ...}`.
    Geometric(Scalar),
    /// `{1, 4, 9, ..., n^2}`.
    Convex,
    RandomInteger {
        lo: i64,
        hi: i64,
    },
    /// `p/q` with `p` in the first range and `q` in the second.
    RandomRational {
        num: (i64, i64),
        den: (i64, i64),
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize, seed: u64) -> Self {
        FamilySpec { kind, n, seed }
    }
}

/// Seeded uniform draws with a documented reduction.
pub struct SeededRng(Pcg64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Pcg64::new(seed as u128, PCG_STREAM))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[lo, hi]` (inclusive).
    pub fn uniform(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        let full = 1u128 << 64;
        if span == full {
            return self.next_u64() as i64;
        }
        let zone = full - full % span;
        loop {
            let v = self.next_u64() as u128;
            if v < zone {
                return (lo as i128 + (v % span) as i128) as i64;
            }
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<NumSet, FamilyError> {
    let n = spec.n;
    if n == 0 {
        return Err(FamilyError::InfeasibleSpec("n must be at least 1".into()));
    }
    match &spec.kind {
        FamilyKind::Ap => Ok(NumSet::from_integers(1..=n as i64)),
        FamilyKind::Convex => Ok(NumSet::from_integers((1..=n as i64).map(|j| j * j))),
        FamilyKind::Geometric(r) => {
            if !r.is_positive() || *r == Scalar::one() {
                return Err(FamilyError::InfeasibleSpec(format!(
                    "ratio {r} must be positive and not 1"
                )));
            }
            let mut x = Scalar::one();
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(x.clone());
                x = &x * r;
            }
            Ok(NumSet::from_scalars(out))
        }
        FamilyKind::Gap { dims, steps } => {
            if dims.len() != steps.len() || dims.is_empty() {
                return Err(FamilyError::InfeasibleSpec(
                    "GAP needs one step per dimension".into(),
                ));
            }
            let total: usize = dims.iter().product();
            if total < n {
                return Err(FamilyError::InfeasibleSpec(format!(
                    "GAP has {total} points, {n} requested"
                )));
            }
            let mut values = BTreeSet::new();
            let mut index = vec![0usize; dims.len()];
            loop {
                let v = 1 + index
                    .iter()
                    .zip(steps)
                    .map(|(&i, &s)| i as i64 * s)
                    .sum::<i64>();
                values.insert(v);
                // odometer, last coordinate fastest
                let mut pos = dims.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    index[pos] += 1;
                    if index[pos] < dims[pos] {
                        break;
                    }
                    index[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
            if values.len() < n {
                return Err(FamilyError::InfeasibleSpec(format!(
                    "GAP has only {} distinct values",
                    values.len()
                )));
            }
            Ok(NumSet::from_integers(values.into_iter().take(n)))
        }
        FamilyKind::RandomInteger { lo, hi } => {
            if lo > hi || ((*hi as i128 - *lo as i128 + 1) as u128) < n as u128 {
                return Err(FamilyError::InfeasibleSpec(format!(
                    "[{lo}, {hi}] has fewer than {n} integers"
                )));
            }
            let mut rng = SeededRng::new(spec.seed);
            let mut seen = BTreeSet::new();
            while seen.len() < n {
                seen.insert(rng.uniform(*lo, *hi));
            }
            Ok(NumSet::from_integers(seen))
        }
        FamilyKind::RandomRational { num, den } => {
            if num.0 > num.1 || den.0 > den.1 || den.0 < 1 {
                return Err(FamilyError::InfeasibleSpec(
                    "rational ranges need lo <= hi and denominators >= 1".into(),
                ));
            }
            let mut rng = SeededRng::new(spec.seed);
            let mut seen = BTreeSet::new();
            let mut draws = 0;
            while seen.len() < n {
                if draws >= DRAWS_PER_ELEMENT * n {
                    return Err(FamilyError::InfeasibleSpec(format!(
                        "only {} distinct rationals after {draws} draws",
                        seen.len()
                    )));
                }
                draws += 1;
                let p = rng.uniform(num.0, num.1);
                let q = rng.uniform(den.0, den.1);
                seen.insert(Scalar::new(p, q).expect("q >= 1"));
            }
            Ok(NumSet::from_scalars(seen))
        }
    }
}

/// Integer literal with optional `b^e` power form, e.g. `10^6` or `-2^10`.
fn parse_int(s: &str) -> Option<i64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v = match body.split_once('^') {
        Some((b, e)) => b.parse::<i64>().ok()?.checked_pow(e.parse::<u32>().ok()?)?,
        None => body.parse::<i64>().ok()?,
    };
    Some(if neg { -v } else { v })
}

fn parse_range(s: &str) -> Option<(i64, i64)> {
    let (lo, hi) = s.split_once("..")?;
    Some((parse_int(lo)?, parse_int(hi)?))
}

impl FromStr for FamilyKind {
    type Err = FamilyError;

    /// `ap | convex | geo:<ratio> | randint:<lo>..<hi> |
    /// randrat:<lo>..<hi>/<lo>..<hi> | gap:r=<rank>,dims=AxB..,steps=s1:s2..`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::Parse(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("ap", None) => Ok(FamilyKind::Ap),
            ("convex", None) => Ok(FamilyKind::Convex),
            ("geo", Some(r)) => Ok(FamilyKind::Geometric(r.parse().map_err(|_| bad())?)),
            ("randint", Some(r)) => {
                let (lo, hi) = parse_range(r).ok_or_else(bad)?;
                Ok(FamilyKind::RandomInteger { lo, hi })
            }
            ("randrat", Some(r)) => {
                let (num, den) = r.split_once('/').ok_or_else(bad)?;
                Ok(FamilyKind::RandomRational {
                    num: parse_range(num).ok_or_else(bad)?,
                    den: parse_range(den).ok_or_else(bad)?,
                })
            }
            ("gap", Some(body)) => {
                let (mut rank, mut dims, mut steps) = (None, None, None);
                for part in body.split(',') {
                    let (key, value) = part.split_once('=').ok_or_else(bad)?;
                    match key.trim() {
                        "r" => rank = Some(value.parse::<usize>().map_err(|_| bad())?),
                        "dims" => {
                            dims = Some(
                                value
                                    .split('x')
                                    .map(|d| d.parse::<usize>())
                                    .collect::<Result<Vec<_>, _>>()
                                    .map_err(|_| bad())?,
                            )
                        }
                        "steps" => {
                            steps = Some(
                                value
                                    .split(':')
                                    .map(parse_int)
                                    .collect::<Option<Vec<_>>>()
                                    .ok_or_else(bad)?,
                            )
                        }
                        _ => return Err(bad()),
                    }
                }
                let (dims, steps) = (dims.ok_or_else(bad)?, steps.ok_or_else(bad)?);
                if dims.len() != steps.len() || rank.is_some_and(|r| r != dims.len()) {
                    return Err(bad());
                }
                Ok(FamilyKind::Gap { dims, steps })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Ap => write!(f, "ap"),
            FamilyKind::Convex => write!(f, "convex"),
            FamilyKind::Geometric(r) => write!(f, "geo:{r}"),
            FamilyKind::RandomInteger { lo, hi } => write!(f, "randint:{lo}..{hi}"),
            FamilyKind::RandomRational { num, den } => {
                write!(f, "randrat:{}..{}/{}..{}", num.0, num.1, den.0, den.1)
            }
            FamilyKind::Gap { dims, steps } => {
                let d: Vec<String> = dims.iter().map(|x| x.to_string()).collect();
                let s: Vec<String> = steps.iter().map(|x| x.to_string()).collect();
                write!(
                    f,
                    "gap:r={},dims={},steps={}",
                    dims.len(),
                    d.join("x"),
                    s.join(":")
                )
            }
        }
    }
}
