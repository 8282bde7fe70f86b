//! Finite sets of exact rationals and the arithmetic set operations on them.
//!
//! A [`NumSet`] stores its elements as integer numerators over one shared
//! denominator (the least common denominator of the elements). Set sums,
//! differences and products then reduce to integer work, done in `i64` lanes
//! when no overflow is possible and in `BigInt` lanes otherwise.

mod io;
mod kernel;

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::Scalar;
use kernel::Overflow;

pub use io::{parse_set_file, read_set_file, write_set_file, DuplicatePolicy, SetFileError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("set size exceeded the cardinality guard ({reached} > {max_card})")]
    GuardExceeded { max_card: usize, reached: usize },
    #[error("operation needs an even number of elements, got {0}")]
    OddCardinality(usize),
    #[error("operation needs at least {needed} elements, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("operation needs strictly positive elements")]
    NonPositive,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Upper bound on the size of any set an operation may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityGuard {
    max_card: usize,
}

impl CardinalityGuard {
    pub const DEFAULT_MAX_CARD: usize = 50_000_000;

    /// `None` for a zero bound.
    pub fn new(max_card: usize) -> Option<Self> {
        (max_card >= 1).then_some(CardinalityGuard { max_card })
    }

    pub fn unlimited() -> Self {
        CardinalityGuard {
            max_card: usize::MAX,
        }
    }

    pub fn max_card(&self) -> usize {
        self.max_card
    }

    fn trip(&self, o: Overflow) -> SetError {
        SetError::GuardExceeded {
            max_card: self.max_card,
            reached: o.reached,
        }
    }
}

impl Default for CardinalityGuard {
    fn default() -> Self {
        CardinalityGuard {
            max_card: Self::DEFAULT_MAX_CARD,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Lanes {
    /// Every entry satisfies `|n| <= i64::MAX`.
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

impl Lanes {
    fn len(&self) -> usize {
        match self {
            Lanes::Small(v) => v.len(),
            Lanes::Big(v) => v.len(),
        }
    }

    fn big(&self) -> Cow<'_, [BigInt]> {
        match self {
            Lanes::Small(v) => Cow::Owned(v.iter().map(|&x| BigInt::from(x)).collect()),
            Lanes::Big(v) => Cow::Borrowed(v),
        }
    }

    fn get(&self, i: usize) -> BigInt {
        match self {
            Lanes::Small(v) => BigInt::from(v[i]),
            Lanes::Big(v) => v[i].clone(),
        }
    }

    fn max_abs(&self) -> BigInt {
        match self {
            Lanes::Small(v) => match (v.first(), v.last()) {
                (Some(a), Some(b)) => BigInt::from((*a as i128).abs().max((*b as i128).abs())),
                _ => BigInt::zero(),
            },
            Lanes::Big(v) => match (v.first(), v.last()) {
                (Some(a), Some(b)) => a.abs().max(b.abs()),
                _ => BigInt::zero(),
            },
        }
    }

    /// Downcasts to `Small` when every entry fits.
    fn compact(self) -> Lanes {
        match self {
            Lanes::Big(v) => {
                let fits = v.iter().all(fits_small);
                if fits {
                    Lanes::Small(v.iter().map(|x| x.to_i64().expect("checked")).collect())
                } else {
                    Lanes::Big(v)
                }
            }
            small => small,
        }
    }

    /// Multiplies every entry by `factor` (positive), preserving order.
    fn scale(&self, factor: &BigInt) -> Lanes {
        if factor.is_one() {
            return self.clone();
        }
        if let (Lanes::Small(v), Some(f)) = (self, factor.to_i64()) {
            if small_product_fits(&self.max_abs(), &BigInt::from(f)) {
                return Lanes::Small(v.iter().map(|x| x * f).collect());
            }
        }
        Lanes::Big(self.big().iter().map(|x| x * factor).collect()).compact()
    }
}

fn fits_small(x: &BigInt) -> bool {
    x.abs() <= BigInt::from(i64::MAX)
}

fn small_product_fits(a: &BigInt, b: &BigInt) -> bool {
    fits_small(&(a * b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
}

/// Combines two lane vectors (same denominator for Add/Sub).
fn lane_op(a: &Lanes, b: &Lanes, op: BinOp, guard: &CardinalityGuard) -> Result<Lanes, SetError> {
    if a.len() == 0 || b.len() == 0 {
        return Ok(Lanes::Small(Vec::new()));
    }
    if let (Lanes::Small(x), Lanes::Small(y)) = (a, b) {
        let (ma, mb) = (a.max_abs(), b.max_abs());
        let safe = match op {
            BinOp::Add | BinOp::Sub => fits_small(&(&ma + &mb)),
            BinOp::Mul => small_product_fits(&ma, &mb),
        };
        if safe {
            return small_op(x, y, op, guard).map(Lanes::Small);
        }
    }
    let (x, y) = (a.big(), b.big());
    let out = match op {
        BinOp::Add => kernel::pairwise_sorted(&x, &y, |p, q| p + q, guard.max_card),
        BinOp::Sub => kernel::pairwise_sorted(&x, &y, |p, q| p - q, guard.max_card),
        BinOp::Mul => kernel::pairwise_sorted(&x, &y, |p, q| p * q, guard.max_card),
    }
    .map_err(|o| guard.trip(o))?;
    Ok(Lanes::Big(out).compact())
}

fn small_op(
    x: &[i64],
    y: &[i64],
    op: BinOp,
    guard: &CardinalityGuard,
) -> Result<Vec<i64>, SetError> {
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let (y0, y1) = (y[0], y[y.len() - 1]);
    let (lo, hi) = match op {
        BinOp::Add => (x0 + y0, x1 + y1),
        BinOp::Sub => (x0 - y1, x1 - y0),
        BinOp::Mul => {
            let corners = [x0 * y0, x0 * y1, x1 * y0, x1 * y1];
            (
                *corners.iter().min().unwrap(),
                *corners.iter().max().unwrap(),
            )
        }
    };
    let pairs = x.len() as u128 * y.len() as u128;
    let f = match op {
        BinOp::Add => |p: i64, q: i64| p + q,
        BinOp::Sub => |p: i64, q: i64| p - q,
        BinOp::Mul => |p: i64, q: i64| p * q,
    };
    let out = if kernel::dense_fits(lo, hi, pairs) {
        kernel::pairwise_dense(x, y, f, lo, hi, guard.max_card)
    } else {
        kernel::pairwise_sorted(x, y, |p, q| f(*p, *q), guard.max_card)
    };
    out.map_err(|o| guard.trip(o))
}

/// Order of association used for `kA`; the result does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumStrategy {
    LeftFold,
    #[default]
    MeetInTheMiddle,
}

/// A strictly increasing finite sequence of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NumSet {
    den: BigInt,
    lanes: Lanes,
}

impl NumSet {
    pub fn empty() -> Self {
        NumSet {
            den: BigInt::one(),
            lanes: Lanes::Small(Vec::new()),
        }
    }

    pub fn singleton(x: Scalar) -> Self {
        Self::from_sorted_unique(vec![x])
    }

    /// Sorts and deduplicates.
    pub fn from_scalars(items: impl IntoIterator<Item = Scalar>) -> Self {
        let mut v: Vec<Scalar> = items.into_iter().collect();
        v.sort();
        v.dedup();
        Self::from_sorted_unique(v)
    }

    pub fn from_integers(items: impl IntoIterator<Item = i64>) -> Self {
        Self::from_scalars(items.into_iter().map(Scalar::from))
    }

    /// Caller guarantees `items` is strictly increasing.
    fn from_sorted_unique(items: Vec<Scalar>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        let den = items
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let nums: Vec<BigInt> = items
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        NumSet {
            den,
            lanes: Lanes::Big(nums).compact(),
        }
    }

    /// Reduces `den` against the numerators and compacts the lanes.
    fn normalized(den: BigInt, lanes: Lanes) -> Self {
        let mut g = den.clone();
        match &lanes {
            Lanes::Small(v) => {
                if let Some(mut gs) = g.to_i64() {
                    for &x in v {
                        if gs == 1 {
                            break;
                        }
                        gs = gs.gcd(&x);
                    }
                    g = BigInt::from(gs);
                } else {
                    for &x in v {
                        if g.is_one() {
                            break;
                        }
                        g = g.gcd(&BigInt::from(x));
                    }
                }
            }
            Lanes::Big(v) => {
                for x in v {
                    if g.is_one() {
                        break;
                    }
                    g = g.gcd(x);
                }
            }
        }
        if lanes.len() == 0 {
            return Self::empty();
        }
        if g.is_one() {
            return NumSet {
                den,
                lanes: lanes.compact(),
            };
        }
        let lanes = match (lanes, g.to_i64()) {
            (Lanes::Small(v), Some(gs)) => Lanes::Small(v.into_iter().map(|x| x / gs).collect()),
            (other, _) => Lanes::Big(other.big().iter().map(|x| x / &g).collect()).compact(),
        };
        NumSet {
            den: den / g,
            lanes,
        }
    }

    pub fn len(&self) -> usize {
        self.lanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th smallest element (0-based).
    pub fn get(&self, i: usize) -> Scalar {
        Scalar::new(self.lanes.get(i), self.den.clone()).expect("positive denominator")
    }

    pub fn min(&self) -> Option<Scalar> {
        (!self.is_empty()).then(|| self.get(0))
    }

    pub fn max(&self) -> Option<Scalar> {
        (!self.is_empty()).then(|| self.get(self.len() - 1))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Scalar> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<Scalar> {
        self.iter().collect()
    }

    /// Least common denominator of the elements.
    pub fn common_denominator(&self) -> &BigInt {
        &self.den
    }

    /// True when every element is stored in machine-word lanes.
    pub fn is_compact(&self) -> bool {
        matches!(self.lanes, Lanes::Small(_))
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        if !(&self.den % x.denom()).is_zero() {
            return false;
        }
        let n = x.numer() * (&self.den / x.denom());
        match &self.lanes {
            Lanes::Small(v) => n.to_i64().is_some_and(|s| v.binary_search(&s).is_ok()),
            Lanes::Big(v) => v.binary_search(&n).is_ok(),
        }
    }

    pub fn is_subset(&self, other: &NumSet) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(&x))
    }

    /// Brings two sets onto a shared denominator.
    fn aligned(&self, other: &NumSet) -> (BigInt, Lanes, Lanes) {
        if self.den == other.den {
            return (self.den.clone(), self.lanes.clone(), other.lanes.clone());
        }
        let l = self.den.lcm(&other.den);
        let a = self.lanes.scale(&(&l / &self.den));
        let b = other.lanes.scale(&(&l / &other.den));
        (l, a, b)
    }

    /// `{a + b : a in self, b in other}`.
    pub fn sumset(&self, other: &NumSet, guard: &CardinalityGuard) -> Result<NumSet, SetError> {
        let (den, a, b) = self.aligned(other);
        Ok(Self::normalized(den, lane_op(&a, &b, BinOp::Add, guard)?))
    }

    /// `{a - b : a in self, b in other}`.
    pub fn difference_set(
        &self,
        other: &NumSet,
        guard: &CardinalityGuard,
    ) -> Result<NumSet, SetError> {
        let (den, a, b) = self.aligned(other);
        Ok(Self::normalized(den, lane_op(&a, &b, BinOp::Sub, guard)?))
    }

    /// `{a * b : a in self, b in other}`.
    pub fn product_set(
        &self,
        other: &NumSet,
        guard: &CardinalityGuard,
    ) -> Result<NumSet, SetError> {
        let lanes = lane_op(&self.lanes, &other.lanes, BinOp::Mul, guard)?;
        Ok(Self::normalized(&self.den * &other.den, lanes))
    }

    /// `kA = A + ... + A` (k copies).
    pub fn iterated_sumset(&self, k: usize, guard: &CardinalityGuard) -> Result<NumSet, SetError> {
        self.iterated_sumset_with(k, SumStrategy::default(), guard)
    }

    pub fn iterated_sumset_with(
        &self,
        k: usize,
        strategy: SumStrategy,
        guard: &CardinalityGuard,
    ) -> Result<NumSet, SetError> {
        if k == 0 {
            return Err(SetError::ZeroK);
        }
        let lanes = match strategy {
            SumStrategy::LeftFold => {
                let mut acc = self.lanes.clone();
                for _ in 1..k {
                    acc = lane_op(&acc, &self.lanes, BinOp::Add, guard)?;
                }
                acc
            }
            SumStrategy::MeetInTheMiddle => {
                let mut memo = HashMap::new();
                memo.insert(1, self.lanes.clone());
                kfold(&mut memo, k, guard)?
            }
        };
        Ok(Self::normalized(self.den.clone(), lanes))
    }

    /// `kA - kA`.
    pub fn k_diff(&self, k: usize, guard: &CardinalityGuard) -> Result<NumSet, SetError> {
        let ka = self.iterated_sumset(k, guard)?;
        ka.difference_set(&ka, guard)
    }

    /// `p*A - q*A`, the signed iterated sumset. `q` may be zero.
    pub fn signed_sumset(
        &self,
        plus: usize,
        minus: usize,
        guard: &CardinalityGuard,
    ) -> Result<NumSet, SetError> {
        let pos = self.iterated_sumset(plus, guard)?;
        if minus == 0 {
            return Ok(pos);
        }
        let neg = self.iterated_sumset(minus, guard)?;
        pos.difference_set(&neg, guard)
    }

    /// The dilate `{c}A = {c * a : a in A}`.
    pub fn dilate(&self, c: &Scalar) -> NumSet {
        if self.is_empty() {
            return Self::empty();
        }
        if c.is_zero() {
            return Self::singleton(Scalar::zero());
        }
        let scaled = self.lanes.scale(&c.numer().abs());
        let lanes = if c.is_negative() {
            negate_lanes(scaled)
        } else {
            scaled
        };
        Self::normalized(&self.den * c.denom(), lanes)
    }

    /// `-A`.
    pub fn negate(&self) -> NumSet {
        NumSet {
            den: self.den.clone(),
            lanes: negate_lanes(self.lanes.clone()),
        }
    }

    /// `c + A`.
    pub fn translate(&self, c: &Scalar) -> NumSet {
        self.sumset(&Self::singleton(c.clone()), &CardinalityGuard::unlimited())
            .expect("translate never grows a set")
    }

    /// `{(a - b)^2 : a, b in A}`.
    pub fn squared_difference_set(&self, guard: &CardinalityGuard) -> Result<NumSet, SetError> {
        let diff = self.difference_set(self, guard)?;
        let half = diff.nonnegative_part();
        let lanes = match &half.lanes {
            Lanes::Small(v) if small_product_fits(&half.lanes.max_abs(), &half.lanes.max_abs()) => {
                Lanes::Small(v.iter().map(|x| x * x).collect())
            }
            other => Lanes::Big(other.big().iter().map(|x| x * x).collect()).compact(),
        };
        Ok(Self::normalized(&half.den * &half.den, lanes))
    }

    /// Elements `>= 0`.
    pub fn nonnegative_part(&self) -> NumSet {
        let start = match &self.lanes {
            Lanes::Small(v) => v.partition_point(|x| *x < 0),
            Lanes::Big(v) => v.partition_point(|x| x.is_negative()),
        };
        self.slice(start, self.len())
    }

    /// Elements `x` with `lo <= x < hi`.
    pub fn range(&self, lo: &Scalar, hi: &Scalar) -> NumSet {
        let all = self.to_vec();
        let start = all.partition_point(|x| x < lo);
        let end = all.partition_point(|x| x < hi).max(start);
        self.slice(start, end)
    }

    fn slice(&self, start: usize, end: usize) -> NumSet {
        let lanes = match &self.lanes {
            Lanes::Small(v) => Lanes::Small(v[start..end].to_vec()),
            Lanes::Big(v) => Lanes::Big(v[start..end].to_vec()),
        };
        Self::normalized(self.den.clone(), lanes)
    }

    /// `A' = {a_1, ..., a_{N/2}}`, the lower half.
    pub fn half_lower(&self) -> Result<NumSet, SetError> {
        if self.len() % 2 == 1 {
            return Err(SetError::OddCardinality(self.len()));
        }
        Ok(self.slice(0, self.len() / 2))
    }

    /// Drops the largest element when the size is odd.
    pub fn trim_to_even(&self) -> NumSet {
        if self.len() % 2 == 1 {
            self.slice(0, self.len() - 1)
        } else {
            self.clone()
        }
    }

    /// Consecutive pair `(a, a')` with the smallest gap `a' - a`; lowest index wins ties.
    pub fn min_gap_pair(&self) -> Result<(Scalar, Scalar), SetError> {
        let i = self.min_gap_index()?;
        Ok((self.get(i), self.get(i + 1)))
    }

    /// 0-based index `i` of the minimal-gap pair `(a_i, a_{i+1})`.
    pub fn min_gap_index(&self) -> Result<usize, SetError> {
        if self.len() < 2 {
            return Err(SetError::TooSmall {
                needed: 2,
                got: self.len(),
            });
        }
        let best = match &self.lanes {
            Lanes::Small(v) => argmin_first(v.windows(2).map(|w| w[1] as i128 - w[0] as i128)),
            Lanes::Big(v) => argmin_first(v.windows(2).map(|w| &w[1] - &w[0])),
        };
        Ok(best)
    }

    /// Consecutive pair `(x, x')` with the smallest ratio `x'/x`; lowest index wins ties.
    /// This is the minimal-gap pair of `ln X`.
    pub fn min_ratio_pair(&self) -> Result<(Scalar, Scalar), SetError> {
        let i = self.min_ratio_index()?;
        Ok((self.get(i), self.get(i + 1)))
    }

    pub fn min_ratio_index(&self) -> Result<usize, SetError> {
        if self.len() < 2 {
            return Err(SetError::TooSmall {
                needed: 2,
                got: self.len(),
            });
        }
        if !self.get(0).is_positive() {
            return Err(SetError::NonPositive);
        }
        let v = self.lanes.big();
        let mut best = 0;
        for i in 1..v.len() - 1 {
            // v[i+1]/v[i] < v[best+1]/v[best]
            if &v[i + 1] * &v[best] < &v[best + 1] * &v[i] {
                best = i;
            }
        }
        Ok(best)
    }
}

fn argmin_first<T: Ord>(it: impl Iterator<Item = T>) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (i, g) in it.enumerate() {
        if best.as_ref().is_none_or(|(_, b)| g < *b) {
            best = Some((i, g));
        }
    }
    best.map(|(i, _)| i).unwrap_or(0)
}

fn negate_lanes(lanes: Lanes) -> Lanes {
    match lanes {
        Lanes::Small(v) => Lanes::Small(v.into_iter().rev().map(|x| -x).collect()),
        Lanes::Big(v) => Lanes::Big(v.into_iter().rev().map(|x| -x).collect()),
    }
}

fn kfold(
    memo: &mut HashMap<usize, Lanes>,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<Lanes, SetError> {
    if let Some(hit) = memo.get(&k) {
        return Ok(hit.clone());
    }
    let low = k / 2;
    let left = kfold(memo, low, guard)?;
    let right = kfold(memo, k - low, guard)?;
    let out = lane_op(&left, &right, BinOp::Add, guard)?;
    memo.insert(k, out.clone());
    Ok(out)
}

impl fmt::Debug for NumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Scalar> for NumSet {
    fn from_iter<I: IntoIterator<Item = Scalar>>(iter: I) -> Self {
        NumSet::from_scalars(iter)
    }
}
