//! Constructive squeezing certificates.
//!
//! Given an even-size set `A = {a_1 < ... < a_N}`, a strictly convex `f` and
//! the minimal-gap pair `(a, a')`, the images of the equal-length intervals
//! `(a + a_j, a' + a_j)` under `f` have strictly growing lengths. The lengths
//! over the lower half form `D`; the upper half supplies well-separated base
//! points `f(a + a_{kl})`, and the translates `f(a + a_{kl}) + (kD - kD)_+`
//! are pairwise disjoint. Their total size is an exact lower bound for
//! `|f(a + A) + kD - kD|`, which sits inside the signed sumset
//! `(k+1)f(a+A) + kf(a'+A) - kf(a+A) - kf(a'+A)`.
//!
//! Every step is checked with exact arithmetic while the certificate is
//! built; a [`SqueezeCertificate`] value only exists if all checks passed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex::{ConvexError, ConvexFn, Interval};
use crate::numset::{CardinalityGuard, NumSet, SetError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Intervals `(a + a_j, a' + a_j)`.
    ShiftPlus,
    /// Intervals `(a_j - a', a_j - a)`.
    ShiftMinus,
    /// `f = exp` on `ln X`, carried out on `X` itself: intervals `(x x_j, x' x_j)`.
    Multiplicative,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::ShiftPlus => "plus",
            Variant::ShiftMinus => "minus",
            Variant::Multiplicative => "mult",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "shift_plus" => Ok(Variant::ShiftPlus),
            "minus" | "shift_minus" => Ok(Variant::ShiftMinus),
            "mult" | "multiplicative" => Ok(Variant::Multiplicative),
            other => Err(format!(
                "unknown variant {other:?}; expected plus, minus or mult"
            )),
        }
    }
}

/// Which element the packing base points are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// `a` for the shift-plus and multiplicative variants, `a'` for shift-minus.
    #[default]
    Pair,
    /// The smallest element `a_1`.
    FirstElement,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SqueezeError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Convex(#[from] ConvexError),
    #[error("no integer l with {lower_exclusive} < l <= {upper_inclusive} (N = {n}, k = {k})")]
    EmptyEllRange {
        n: usize,
        k: usize,
        lower_exclusive: Scalar,
        upper_inclusive: Scalar,
    },
    #[error("variant {0} needs a convex function")]
    MissingFunction(Variant),
    #[error("image interval lengths are not strictly increasing at j = {j}")]
    NotIncreasing { j: usize },
    #[error("claim fails at l = {ell}: gap {gap} < k*t = {needed}")]
    ClaimViolated {
        ell: usize,
        gap: Scalar,
        needed: Scalar,
    },
    #[error("translates overlap at l = {ell}: gap {gap} <= radius {radius}")]
    PackingOverlap {
        ell: usize,
        gap: Scalar,
        radius: Scalar,
    },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// The integers `l` with `N/(2k) < l <= N/k - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllRange {
    pub lower_exclusive: Scalar,
    pub upper_inclusive: Scalar,
    pub first: usize,
    pub last: usize,
}

impl EllRange {
    pub fn new(n: usize, k: usize) -> Result<Self, SqueezeError> {
        if k == 0 {
            return Err(SetError::ZeroK.into());
        }
        let lower_exclusive = Scalar::new(n as i64, 2 * k as i64).expect("k > 0");
        let upper_inclusive = &Scalar::new(n as i64, k as i64).expect("k > 0") - &Scalar::one();
        let first = (lower_exclusive.floor() + BigInt::from(1))
            .to_i64()
            .expect("small");
        let last = upper_inclusive.floor().to_i64().expect("small");
        if first > last {
            return Err(SqueezeError::EmptyEllRange {
                n,
                k,
                lower_exclusive,
                upper_inclusive,
            });
        }
        Ok(EllRange {
            lower_exclusive,
            upper_inclusive,
            first: first as usize,
            last: last as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.first..=self.last
    }
}

/// One translate `base + (kD - kD)_+` of the packing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub ell: usize,
    /// 1-based index `k*l` of the element the base is taken from.
    pub index: usize,
    pub base: Scalar,
    /// Distance to the base point at index `k*(l+1)`.
    pub gap: Scalar,
    pub claim_holds: bool,
}

/// Image interval endpoints `(lo_j, hi_j)` for `j = 1..N`.
#[derive(Debug, Clone)]
struct Images {
    lo: Vec<Scalar>,
    hi: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct SqueezeCertificate {
    pub variant: Variant,
    pub function: Option<ConvexFn>,
    pub n: usize,
    pub k: usize,
    pub a: Scalar,
    pub a_prime: Scalar,
    pub anchor: Anchor,
    pub anchor_value: Scalar,
    pub d: NumSet,
    /// `max D`, the image length at `j = N/2`.
    pub t: Scalar,
    /// `max D - min D`.
    pub spread: Scalar,
    pub kd_kd: NumSet,
    pub kd_kd_plus: NumSet,
    /// `max (kD - kD)_+ = k * spread`.
    pub packing_radius: Scalar,
    /// Whether `kD - kD` lies strictly inside `(-kt, kt)`.
    pub strict_range: bool,
    pub ell: EllRange,
    pub a1: NumSet,
    pub blocks: Vec<Block>,
    /// Base-point image of every element of `A`.
    pub base_set: NumSet,
    pub certified_count: u64,
    pub target_superset_card: u64,
    pub corrections: Vec<String>,
}

impl SqueezeCertificate {
    /// The explicit-constant lower bound `|l range| * |(kD - kD)_+|`.
    pub fn lemma_lower_bound(&self) -> u64 {
        self.certified_count
    }

    /// `|l range| * ceil(|kD - kD| / 2)`.
    pub fn half_bound(&self) -> u64 {
        self.ell.len() as u64 * (self.kd_kd.len() as u64).div_ceil(2)
    }

    /// Materialises translate `i`.
    pub fn block_set(&self, i: usize) -> NumSet {
        self.kd_kd_plus.translate(&self.blocks[i].base)
    }

    pub fn to_doc(&self) -> CertificateDoc {
        CertificateDoc {
            variant: self.variant,
            function: self.function.as_ref().map(|f| f.to_string()),
            n: self.n,
            k: self.k,
            a: self.a.clone(),
            a_prime: self.a_prime.clone(),
            anchor: self.anchor,
            anchor_value: self.anchor_value.clone(),
            t: self.t.clone(),
            spread: self.spread.clone(),
            d: self.d.to_vec(),
            kd_kd_card: self.kd_kd.len() as u64,
            kd_kd_plus_card: self.kd_kd_plus.len() as u64,
            packing_radius: self.packing_radius.clone(),
            strict_range: self.strict_range,
            ell_range: self.ell.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    ell: b.ell,
                    index: b.index,
                    base: b.base.clone(),
                    gap: b.gap.clone(),
                    size: self.kd_kd_plus.len() as u64,
                    claim_holds: b.claim_holds,
                })
                .collect(),
            certified_count: self.certified_count,
            target_superset_card: self.target_superset_card,
            corrections: self.corrections.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("certificate serializes")
    }
}

/// Serialized form of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub variant: Variant,
    pub function: Option<String>,
    pub n: usize,
    pub k: usize,
    pub a: Scalar,
    pub a_prime: Scalar,
    pub anchor: Anchor,
    pub anchor_value: Scalar,
    pub t: Scalar,
    pub spread: Scalar,
    pub d: Vec<Scalar>,
    pub kd_kd_card: u64,
    pub kd_kd_plus_card: u64,
    pub packing_radius: Scalar,
    pub strict_range: bool,
    pub ell_range: EllRange,
    pub blocks: Vec<BlockDoc>,
    pub certified_count: u64,
    pub target_superset_card: u64,
    pub corrections: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub ell: usize,
    pub index: usize,
    pub base: Scalar,
    pub gap: Scalar,
    pub size: u64,
    pub claim_holds: bool,
}

fn require_even(set: &NumSet) -> Result<(), SqueezeError> {
    if set.len() < 2 {
        return Err(SetError::TooSmall {
            needed: 2,
            got: set.len(),
        }
        .into());
    }
    if set.len() % 2 == 1 {
        return Err(SetError::OddCardinality(set.len()).into());
    }
    Ok(())
}

fn function_for(variant: Variant, f: Option<&ConvexFn>) -> Result<Option<&ConvexFn>, SqueezeError> {
    match variant {
        Variant::Multiplicative => Ok(None),
        _ => f.map(Some).ok_or(SqueezeError::MissingFunction(variant)),
    }
}

/// The pair `(a, a')` the variant uses: minimal gap, or minimal ratio for
/// the multiplicative variant (minimal gap of `ln X`).
pub fn squeeze_pair(variant: Variant, set: &NumSet) -> Result<(Scalar, Scalar), SqueezeError> {
    match variant {
        Variant::Multiplicative => Ok(set.min_ratio_pair()?),
        _ => Ok(set.min_gap_pair()?),
    }
}

/// Evaluates `g(x, shift)` for every element, after checking convexity on
/// the hull of all arguments.
fn images(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    a: &Scalar,
    a_prime: &Scalar,
) -> Result<Images, SqueezeError> {
    let xs = set.to_vec();
    match variant {
        Variant::Multiplicative => {
            if !set.min().is_some_and(|m| m.is_positive()) {
                return Err(SetError::NonPositive.into());
            }
            Ok(Images {
                lo: xs.iter().map(|x| a * x).collect(),
                hi: xs.iter().map(|x| a_prime * x).collect(),
            })
        }
        Variant::ShiftPlus | Variant::ShiftMinus => {
            let f = f.ok_or(SqueezeError::MissingFunction(variant))?;
            let (lo_args, hi_args): (Vec<Scalar>, Vec<Scalar>) = match variant {
                Variant::ShiftPlus => (
                    xs.iter().map(|x| a + x).collect(),
                    xs.iter().map(|x| a_prime + x).collect(),
                ),
                _ => (
                    xs.iter().map(|x| x - a_prime).collect(),
                    xs.iter().map(|x| x - a).collect(),
                ),
            };
            let hull = Interval::new(
                lo_args
                    .iter()
                    .chain(&hi_args)
                    .min()
                    .expect("non-empty")
                    .clone(),
                lo_args
                    .iter()
                    .chain(&hi_args)
                    .max()
                    .expect("non-empty")
                    .clone(),
            );
            f.require_convex(&hull)?;
            Ok(Images {
                lo: lo_args.iter().map(|x| f.eval(x)).collect(),
                hi: hi_args.iter().map(|x| f.eval(x)).collect(),
            })
        }
    }
}

/// `D`: the image interval lengths `hi_j - lo_j` for `j <= N/2`.
///
/// For shift-minus this is `f(a_j - a) - f(a_j - a')`, the negation of the
/// textbook expression; `D - D` and `kD - kD` are unaffected.
pub fn build_d(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    a: &Scalar,
    a_prime: &Scalar,
) -> Result<NumSet, SqueezeError> {
    require_even(set)?;
    let img = images(variant, f, set, a, a_prime)?;
    let half = set.len() / 2;
    Ok(img
        .lo
        .iter()
        .zip(&img.hi)
        .take(half)
        .map(|(lo, hi)| hi - lo)
        .collect())
}

/// Base points `f(anchor-shifted a_j)` for every `j`.
fn base_points(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    anchor_value: &Scalar,
) -> Vec<Scalar> {
    set.iter()
        .map(|x| match variant {
            Variant::ShiftPlus => f.expect("checked").eval(&(anchor_value + &x)),
            Variant::ShiftMinus => f.expect("checked").eval(&(&x - anchor_value)),
            Variant::Multiplicative => anchor_value * &x,
        })
        .collect()
}

pub fn build_certificate(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<SqueezeCertificate, SqueezeError> {
    build_certificate_anchored(variant, f, set, k, Anchor::Pair, guard)
}

pub fn build_certificate_anchored(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    k: usize,
    anchor: Anchor,
    guard: &CardinalityGuard,
) -> Result<SqueezeCertificate, SqueezeError> {
    require_even(set)?;
    let f = function_for(variant, f)?;
    let n = set.len();
    let ell = EllRange::new(n, k)?;
    let (a, a_prime) = squeeze_pair(variant, set)?;
    let img = images(variant, f, set, &a, &a_prime)?;
    let lengths: Vec<Scalar> = img.lo.iter().zip(&img.hi).map(|(lo, hi)| hi - lo).collect();
    if let Some(j) = lengths.windows(2).position(|w| w[0] >= w[1]) {
        return Err(SqueezeError::NotIncreasing { j: j + 2 });
    }

    let half = n / 2;
    let d: NumSet = lengths[..half].iter().cloned().collect();
    let t = lengths[half - 1].clone();
    let spread = &t - &lengths[0];
    let ks = Scalar::from(k as i64);
    let kt = &ks * &t;
    let mut corrections = Vec::new();

    let kd_kd = d.k_diff(k, guard)?;
    let packing_radius = &ks * &spread;
    let (lo, hi) = (
        kd_kd.min().expect("contains 0"),
        kd_kd.max().expect("contains 0"),
    );
    if hi != packing_radius || lo != -&packing_radius {
        return Err(SqueezeError::Inconsistent(format!(
            "kD-kD spans [{lo}, {hi}], expected +-{packing_radius}"
        )));
    }
    let strict_range = hi < kt && lo > -&kt;
    let kd_kd_plus = kd_kd.nonnegative_part();
    if lengths[0].is_positive() {
        // D inside (0, t]: the non-negative part is exactly (kD - kD) ∩ [0, kt)
        debug_assert!(strict_range);
    } else {
        corrections.push(format!(
            "min D = {} is not positive; packing radius k*(max D - min D) = {} replaces k*t = {}",
            lengths[0], packing_radius, kt
        ));
    }
    if (kd_kd_plus.len() as u64) < (kd_kd.len() as u64).div_ceil(2) {
        return Err(SqueezeError::Inconsistent(
            "(kD - kD)_+ smaller than half of kD - kD".into(),
        ));
    }

    let anchor_value = match (anchor, variant) {
        (Anchor::FirstElement, _) => set.get(0),
        (Anchor::Pair, Variant::ShiftMinus) => a_prime.clone(),
        (Anchor::Pair, _) => a.clone(),
    };
    if anchor == Anchor::FirstElement {
        corrections.push(format!("base points anchored at a_1 = {anchor_value}"));
    }
    let bases = base_points(variant, f, set, &anchor_value);
    let mut blocks = Vec::with_capacity(ell.len());
    for l in ell.iter() {
        let index = k * l;
        let base = bases[index - 1].clone();
        let gap = &bases[k * (l + 1) - 1] - &base;
        let claim_holds = gap >= kt;
        if !claim_holds {
            return Err(SqueezeError::ClaimViolated {
                ell: l,
                gap,
                needed: kt,
            });
        }
        if gap <= packing_radius {
            return Err(SqueezeError::PackingOverlap {
                ell: l,
                gap,
                radius: packing_radius,
            });
        }
        blocks.push(Block {
            ell: l,
            index,
            base,
            gap,
            claim_holds,
        });
    }
    let a1: NumSet = blocks.iter().map(|b| set.get(b.index - 1)).collect();

    let base_set: NumSet = bases.into_iter().collect();
    let certified_count = blocks.len() as u64 * kd_kd_plus.len() as u64;
    let target_superset_card = base_set.sumset(&kd_kd, guard)?.len() as u64;
    if certified_count > target_superset_card {
        return Err(SqueezeError::Inconsistent(format!(
            "certified {certified_count} exceeds |F + kD - kD| = {target_superset_card}"
        )));
    }

    Ok(SqueezeCertificate {
        variant,
        function: f.cloned(),
        n,
        k,
        a,
        a_prime,
        anchor,
        anchor_value,
        d,
        t,
        spread,
        kd_kd,
        kd_kd_plus,
        packing_radius,
        strict_range,
        ell,
        a1,
        blocks,
        base_set,
        certified_count,
        target_superset_card,
        corrections,
    })
}

/// `(k+1)P + kQ - kP - kQ` with `P`, `Q` the lower and upper interval
/// endpoint images: the set the squeezing lemma bounds from below.
pub fn lemma_target(
    variant: Variant,
    f: Option<&ConvexFn>,
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<NumSet, SqueezeError> {
    require_even(set)?;
    let f = function_for(variant, f)?;
    let (a, a_prime) = squeeze_pair(variant, set)?;
    let img = images(variant, f, set, &a, &a_prime)?;
    let p: NumSet = img.lo.into_iter().collect();
    let q: NumSet = img.hi.into_iter().collect();
    let u = p.signed_sumset(k + 1, k, guard)?;
    let v = q.k_diff(k, guard)?;
    Ok(u.sumset(&v, guard)?)
}
