//! End-to-end verifiers. Each computes every set involved exactly and
//! decides its inequality by integer comparison, returning a
//! [`VerifyReport`]. Mathematical failures come back as `holds = false`
//! with witness sets attached; operational problems (guard, vacuous range,
//! bad input) come back as errors.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex::ConvexFn;
use crate::numset::{CardinalityGuard, NumSet, SetError};
use crate::scalar::Scalar;
use crate::squeeze::{self, Anchor, SqueezeCertificate, SqueezeError, Variant};

/// Witness sets are truncated to this many elements.
pub const WITNESS_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementId {
    CorQuad,
    #[serde(rename = "ruzsa")]
    RuzsaTriangle,
    #[serde(rename = "main-chain")]
    MainTheoremChain,
    #[serde(rename = "expander")]
    ExpanderXX,
    #[serde(rename = "distributive")]
    DistributiveRefinement,
    LemmaDifferences,
    DIdentity,
}

impl StatementId {
    pub const ALL: [StatementId; 7] = [
        StatementId::CorQuad,
        StatementId::RuzsaTriangle,
        StatementId::MainTheoremChain,
        StatementId::ExpanderXX,
        StatementId::DistributiveRefinement,
        StatementId::LemmaDifferences,
        StatementId::DIdentity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StatementId::CorQuad => "cor-quad",
            StatementId::RuzsaTriangle => "ruzsa",
            StatementId::MainTheoremChain => "main-chain",
            StatementId::ExpanderXX => "expander",
            StatementId::DistributiveRefinement => "distributive",
            StatementId::LemmaDifferences => "lemma-differences",
            StatementId::DIdentity => "d-identity",
        }
    }
}

impl std::str::FromStr for StatementId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatementId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown statement {s:?}"))
    }
}

impl std::fmt::Display for StatementId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputsSummary {
    pub family: Option<String>,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub statement_id: StatementId,
    pub inputs: InputsSummary,
    /// Every set size computed, by name.
    pub cardinalities: BTreeMap<String, u64>,
    /// The certified lower bound on the quantity the statement bounds.
    pub certified_lower_bound: u64,
    pub holds: bool,
    /// Names of the checks that failed; empty when `holds`.
    pub failed_checks: Vec<String>,
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<BTreeMap<String, Vec<Scalar>>>,
}

impl VerifyReport {
    pub fn with_source(mut self, family: Option<String>, seed: Option<u64>) -> Self {
        self.inputs.family = family;
        self.inputs.seed = seed;
        self
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = None;
        self
    }

    pub fn card(&self, name: &str) -> Option<u64> {
        self.cardinalities.get(name).copied()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Squeeze(#[from] SqueezeError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

impl VerifyError {
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            VerifyError::Set(SetError::GuardExceeded { .. })
                | VerifyError::Squeeze(SqueezeError::Set(SetError::GuardExceeded { .. }))
        )
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(
            self,
            VerifyError::Squeeze(SqueezeError::EmptyEllRange { .. })
        )
    }
}

/// Accumulates sizes, check outcomes and the sets behind them.
struct Tally {
    statement: StatementId,
    start: Instant,
    cards: BTreeMap<String, u64>,
    failed: Vec<String>,
    sets: Vec<(String, NumSet)>,
}

impl Tally {
    fn new(statement: StatementId) -> Self {
        Tally {
            statement,
            start: Instant::now(),
            cards: BTreeMap::new(),
            failed: Vec::new(),
            sets: Vec::new(),
        }
    }

    fn set(&mut self, name: &str, set: &NumSet) -> u64 {
        let n = set.len() as u64;
        self.cards.insert(name.to_string(), n);
        self.sets.push((name.to_string(), set.clone()));
        n
    }

    fn value(&mut self, name: &str, v: u64) {
        self.cards.insert(name.to_string(), v);
    }

    fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self, n: usize, k: Option<usize>, certified: u64) -> VerifyReport {
        let holds = self.failed.is_empty();
        let witness = (!holds).then(|| {
            self.sets
                .iter()
                .map(|(name, s)| (name.clone(), s.iter().take(WITNESS_CAP).collect()))
                .collect()
        });
        VerifyReport {
            statement_id: self.statement,
            inputs: InputsSummary {
                family: None,
                n,
                k,
                seed: None,
            },
            cardinalities: self.cards,
            certified_lower_bound: certified,
            holds,
            failed_checks: self.failed,
            runtime_ms: Some(self.start.elapsed().as_millis() as u64),
            witness,
        }
    }
}

fn require_even(set: &NumSet, min: usize) -> Result<(), VerifyError> {
    if set.len() % 2 == 1 {
        return Err(SetError::OddCardinality(set.len()).into());
    }
    if set.len() < min {
        return Err(SetError::TooSmall {
            needed: min,
            got: set.len(),
        }
        .into());
    }
    Ok(())
}

fn require_k(k: usize) -> Result<(), VerifyError> {
    if k == 0 {
        return Err(SetError::ZeroK.into());
    }
    Ok(())
}

/// Squeeze certificate for `f = x^2` with the shifted-difference intervals.
///
/// The bases `f(a_{kl} - a')` can fail to separate when the minimal gap sits
/// high in `A` (squaring is not monotone on the negative arguments of the
/// lower half). The bases `f(a_{kl} - a_1)` also lie in `(A - A)^2` and always
/// separate, so they are used in that case.
pub fn quadratic_certificate(
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<SqueezeCertificate, SqueezeError> {
    let sq = ConvexFn::square();
    match squeeze::build_certificate(Variant::ShiftMinus, Some(&sq), set, k, guard) {
        Err(SqueezeError::ClaimViolated { .. }) | Err(SqueezeError::PackingOverlap { .. }) => {
            squeeze::build_certificate_anchored(
                Variant::ShiftMinus,
                Some(&sq),
                set,
                k,
                Anchor::FirstElement,
                guard,
            )
        }
        other => other,
    }
}

/// `|(2k+1)(A-A)^2 - 2k(A-A)^2| >= |l range| * ceil(|kA' - kA'| / 2)`.
pub fn verify_cor_quad(
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    require_even(set, 4)?;
    let mut tally = Tally::new(StatementId::CorQuad);
    let s = set.squared_difference_set(guard)?;
    tally.set("S", &s);
    let signed = s.signed_sumset(2 * k + 1, 2 * k, guard)?;
    let big_l = tally.set("(2k+1)S-2kS", &signed);

    let cert = quadratic_certificate(set, k, guard)?;
    let half = set.half_lower()?;
    let k_half = half.k_diff(k, guard)?;
    let k_half_card = tally.set("kA'-kA'", &k_half);
    tally.set("kD-kD", &cert.kd_kd);
    tally.set("(kD-kD)+", &cert.kd_kd_plus);
    tally.value("ell_range", cert.ell.len() as u64);
    tally.value("F+kD-kD", cert.target_superset_card);
    tally.value("certified", cert.certified_count);

    let dd = cert.d.difference_set(&cert.d, guard)?;
    let dilated = half
        .difference_set(&half, guard)?
        .dilate(&(&Scalar::from(-2) * &(&cert.a_prime - &cert.a)));
    tally.check("d_identity", dd == dilated);
    tally.check(
        "kd_kd_card_equals_k_half_diff",
        cert.kd_kd.len() as u64 == k_half_card,
    );
    let packed = cert.base_set.sumset(&cert.kd_kd, guard)?;
    tally.check(
        "packing_superset_inside_signed_set",
        packed.is_subset(&signed),
    );
    tally.check("signed_ge_certified", big_l >= cert.certified_count);
    tally.check(
        "certified_ge_half_bound",
        cert.certified_count >= cert.ell.len() as u64 * k_half_card.div_ceil(2),
    );
    Ok(tally.finish(set.len(), Some(k), cert.certified_count))
}

/// `|Y - Z| * |X| <= |X + Y| * |X + Z|`.
pub fn ruzsa_triangle(
    x: &NumSet,
    y: &NumSet,
    z: &NumSet,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    if x.is_empty() || y.is_empty() || z.is_empty() {
        return Err(VerifyError::PreconditionViolated(
            "Ruzsa triangle needs non-empty sets".into(),
        ));
    }
    let mut tally = Tally::new(StatementId::RuzsaTriangle);
    let nx = tally.set("X", x) as u128;
    tally.set("Y", y);
    tally.set("Z", z);
    let ymz = tally.set("Y-Z", &y.difference_set(z, guard)?) as u128;
    let xpy = tally.set("X+Y", &x.sumset(y, guard)?) as u128;
    let xpz = tally.set("X+Z", &x.sumset(z, guard)?) as u128;
    let lhs = ymz * nx;
    tally.check("triangle", lhs <= xpy * xpz);
    Ok(tally.finish(x.len(), None, u64::try_from(lhs).unwrap_or(u64::MAX)))
}

/// The integer chain behind the distance bound, with `S = (A-A)^2`:
/// `|(2k+3)S|^2 >= |(2k+3)S| |(2k+2)S| >= |2S| |(2k+1)S - 2kS| >= |2S| * certified`.
/// The count `|(2k+3)S|` is the number of distinct squared distances in `A^(2k+3)`.
pub fn verify_main_chain(
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    require_even(set, 2)?;
    let mut tally = Tally::new(StatementId::MainTheoremChain);
    let s = set.squared_difference_set(guard)?;
    tally.set("S", &s);
    let two_s = tally.set("2S", &s.iterated_sumset(2, guard)?) as u128;
    let top = s.iterated_sumset(2 * k + 3, guard)?;
    let top_card = tally.set("(2k+3)S", &top) as u128;
    tally.value("distances", top_card as u64);
    let next = tally.set("(2k+2)S", &s.iterated_sumset(2 * k + 2, guard)?) as u128;
    let signed = tally.set("(2k+1)S-2kS", &s.signed_sumset(2 * k + 1, 2 * k, guard)?) as u128;

    let certified = match quadratic_certificate(set, k, guard) {
        Ok(cert) => cert.certified_count,
        Err(SqueezeError::EmptyEllRange { .. }) => {
            tally.value("vacuous", 1);
            0
        }
        Err(e) => return Err(e.into()),
    };
    tally.value("certified", certified);
    let certified = certified as u128;

    tally.check("square_step", top_card * top_card >= top_card * next);
    tally.check("ruzsa_step", top_card * next >= two_s * signed);
    tally.check("certificate_step", two_s * signed >= two_s * certified);
    Ok(tally.finish(set.len(), Some(k), (two_s * certified) as u64))
}

fn require_positive(set: &NumSet) -> Result<(), VerifyError> {
    if !set.min().is_some_and(|m| m.is_positive()) {
        return Err(VerifyError::PreconditionViolated(
            "all elements must be positive".into(),
        ));
    }
    Ok(())
}

/// `|(2k+1)XX - 2kXX| >= |l range| * ceil(|kX' - kX'| / 2)`.
pub fn verify_expander(
    x: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    require_even(x, 2)?;
    require_positive(x)?;
    let mut tally = Tally::new(StatementId::ExpanderXX);
    let xx = x.product_set(x, guard)?;
    tally.set("XX", &xx);
    let signed = xx.signed_sumset(2 * k + 1, 2 * k, guard)?;
    let big_l = tally.set("(2k+1)XX-2kXX", &signed);

    let cert = squeeze::build_certificate(Variant::Multiplicative, None, x, k, guard)?;
    let half = x.half_lower()?;
    let k_half_card = tally.set("kX'-kX'", &half.k_diff(k, guard)?);
    tally.set("kD-kD", &cert.kd_kd);
    tally.value("ell_range", cert.ell.len() as u64);
    tally.value("certified", cert.certified_count);

    let dd = cert.d.difference_set(&cert.d, guard)?;
    let dilated = half
        .difference_set(&half, guard)?
        .dilate(&(&cert.a_prime - &cert.a));
    tally.check("d_identity", dd == dilated);
    tally.check(
        "kd_kd_card_equals_k_half_diff",
        cert.kd_kd.len() as u64 == k_half_card,
    );
    let packed = cert.base_set.sumset(&cert.kd_kd, guard)?;
    tally.check(
        "packing_superset_inside_signed_set",
        packed.is_subset(&signed),
    );
    tally.check("signed_ge_certified", big_l >= cert.certified_count);
    tally.check(
        "certified_ge_half_bound",
        cert.certified_count >= cert.ell.len() as u64 * k_half_card.div_ceil(2),
    );
    Ok(tally.finish(x.len(), Some(k), cert.certified_count))
}

/// `|{x}((k+1)X - kX) + {x'}(kX - kX)| >= certified`, `(x, x')` the minimal-ratio pair.
pub fn verify_distributive_refinement(
    x: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    require_even(x, 2)?;
    require_positive(x)?;
    let mut tally = Tally::new(StatementId::DistributiveRefinement);
    let cert = squeeze::build_certificate(Variant::Multiplicative, None, x, k, guard)?;
    let outer = x.signed_sumset(k + 1, k, guard)?;
    tally.set("(k+1)X-kX", &outer);
    let inner = x.k_diff(k, guard)?;
    tally.set("kX-kX", &inner);
    let refined = outer
        .dilate(&cert.a)
        .sumset(&inner.dilate(&cert.a_prime), guard)?;
    let refined_card = tally.set("refined", &refined);
    let k_half_card = tally.set("kX'-kX'", &x.half_lower()?.k_diff(k, guard)?);
    tally.value("kD-kD", cert.kd_kd.len() as u64);
    tally.value("ell_range", cert.ell.len() as u64);
    tally.value("certified", cert.certified_count);

    tally.check(
        "kd_kd_card_equals_k_half_diff",
        cert.kd_kd.len() as u64 == k_half_card,
    );
    let packed = cert.base_set.sumset(&cert.kd_kd, guard)?;
    tally.check(
        "packing_superset_inside_refined_set",
        packed.is_subset(&refined),
    );
    tally.check("refined_ge_certified", refined_card >= cert.certified_count);
    Ok(tally.finish(x.len(), Some(k), cert.certified_count))
}

/// `A ⊂ (0, t)` implies `kA - kA ⊂ (-kt, kt)`.
pub fn verify_lemma_differences(
    set: &NumSet,
    k: usize,
    t: &Scalar,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    let (Some(lo), Some(hi)) = (set.min(), set.max()) else {
        return Err(VerifyError::PreconditionViolated("empty set".into()));
    };
    if !lo.is_positive() || hi >= *t {
        return Err(VerifyError::PreconditionViolated(format!(
            "set spans [{lo}, {hi}], not inside (0, {t})"
        )));
    }
    let mut tally = Tally::new(StatementId::LemmaDifferences);
    tally.set("A", set);
    let diff = set.k_diff(k, &CardinalityGuard::default())?;
    tally.set("kA-kA", &diff);
    let kt = &Scalar::from(k as i64) * t;
    let neg_kt = -&kt;
    tally.check(
        "strict_inclusion",
        diff.iter().all(|x| neg_kt < x && x < kt),
    );
    Ok(tally.finish(set.len(), Some(k), 0))
}

/// `D - D = {-2(a'-a)}(A' - A')` for `f = x^2`, both shift variants, and
/// `|kD - kD| = |kA' - kA'|`.
pub fn verify_d_identity(
    set: &NumSet,
    k: usize,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, VerifyError> {
    require_k(k)?;
    require_even(set, 2)?;
    let mut tally = Tally::new(StatementId::DIdentity);
    let sq = ConvexFn::square();
    let (a, a_prime) = set.min_gap_pair()?;
    let half = set.half_lower()?;
    let expected = half
        .difference_set(&half, guard)?
        .dilate(&(&Scalar::from(-2) * &(&a_prime - &a)));
    tally.set("{-2(a'-a)}(A'-A')", &expected);
    let k_half = tally.set("kA'-kA'", &half.k_diff(k, guard)?);
    for (variant, label) in [(Variant::ShiftMinus, "minus"), (Variant::ShiftPlus, "plus")] {
        let d = squeeze::build_d(variant, Some(&sq), set, &a, &a_prime)?;
        let dd = d.difference_set(&d, guard)?;
        tally.set(&format!("D-D[{label}]"), &dd);
        tally.check(&format!("d_identity_{label}"), dd == expected);
        let kd = tally.set(&format!("kD-kD[{label}]"), &d.k_diff(k, guard)?);
        tally.check(&format!("kd_card_{label}"), kd == k_half);
    }
    Ok(tally.finish(set.len(), Some(k), k_half))
}
