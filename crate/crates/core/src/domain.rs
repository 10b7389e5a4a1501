//! Exact domain calculus for diagonal power-scale operators.
//!
//! `diag(k^a)`, `k = 1, 2, ...`, acts on square-summable sequences with
//! maximal domain `D(k^{a+})`, where `x+ = max(x, 0)` and
//! `D(k^s) = { psi : sum k^{2s} |psi_k|^2 < inf }`. Every domain and range
//! that appears in a product of such operators is one of these weighted
//! spaces, so containment questions reduce to comparing rational weights.
//!
//! ```
//! use zeno_core::domain::{adjoint_of, compose, Exponent, PowerScaleOp};
//!
//! // A H A with a = -1, h = 2
//! let a = PowerScaleOp::new(Exponent::integer(-1));
//! let h = PowerScaleOp::new(Exponent::integer(2));
//! let aha = compose(&[a, h, a]).unwrap();
//! assert_eq!(aha.symbol_exponent, Exponent::ZERO);
//! assert_eq!(aha.domain.weight, Exponent::integer(1));
//! // its adjoint is the identity on the whole space
//! assert!(adjoint_of(&aha).domain.is_whole());
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest numerator or denominator accepted for an exponent, so that the
/// sums formed by the rules cannot overflow.
pub const MAX_EXPONENT_PART: i64 = 10_000;

/// An exact rational exponent. Serialized as a string such as `"-1/2"`;
/// integers are also accepted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub const ZERO: Exponent = Exponent(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::param("exponent", "zero denominator"));
        }
        let r = Ratio::new(numer, denom);
        if r.numer().abs() > MAX_EXPONENT_PART || r.denom().abs() > MAX_EXPONENT_PART {
            return Err(Error::param(
                "exponent",
                format!("{r} exceeds the supported size (parts up to {MAX_EXPONENT_PART})"),
            ));
        }
        Ok(Exponent(r))
    }

    /// Panics when `|n|` exceeds [`MAX_EXPONENT_PART`].
    pub fn integer(n: i64) -> Self {
        Self::new(n, 1).expect("integer exponent out of range")
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `max(self, 0)`.
    pub fn pos(self) -> Self {
        self.max(Self::ZERO)
    }

    pub fn is_positive(self) -> bool {
        self > Self::ZERO
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::param(
                "exponent",
                format!("`{s}` is not a rational such as -3, 1/2 or -3/4"),
            )
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => Exponent::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Exponent::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string like \"-1/2\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::new(v, 1).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                let v = i64::try_from(v).map_err(E::custom)?;
                Exponent::new(v, 1).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Err(E::custom(format!(
                    "floating-point exponent {v}; write it as a string such as \"1/2\""
                )))
            }
        }
        d.deserialize_any(V)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 - rhs.0)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

/// `diag(k^a)` on its maximal domain. Always selfadjoint and injective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerScaleOp {
    pub exponent: Exponent,
}

impl PowerScaleOp {
    pub fn new(exponent: Exponent) -> Self {
        PowerScaleOp { exponent }
    }

    /// Bounded, equivalently everywhere defined, iff `a <= 0`.
    pub fn is_bounded(&self) -> bool {
        self.exponent <= Exponent::ZERO
    }
}

/// The weighted space `D(k^s)`; `s = 0` is the whole space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDescriptor {
    pub weight: Exponent,
}

impl DomainDescriptor {
    pub const WHOLE: DomainDescriptor = DomainDescriptor {
        weight: Exponent::ZERO,
    };

    /// Negative weights are clamped to the whole space.
    pub fn new(weight: Exponent) -> Self {
        DomainDescriptor {
            weight: weight.pos(),
        }
    }

    pub fn is_whole(&self) -> bool {
        self.weight == Exponent::ZERO
    }

    /// `self ⊇ other`, i.e. `s <= t`.
    pub fn contains(&self, other: &DomainDescriptor) -> bool {
        self.weight <= other.weight
    }
}

impl fmt::Display for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_whole() {
            f.write_str("l2")
        } else {
            write!(f, "D(k^{})", self.weight)
        }
    }
}

/// A product of power-scale operators: multiplication by `k^p` on the
/// composition domain `D(k^q)`, `q >= p+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedOp {
    pub symbol_exponent: Exponent,
    pub domain: DomainDescriptor,
}

impl ComposedOp {
    pub fn maximal(symbol: Exponent) -> Self {
        ComposedOp {
            symbol_exponent: symbol,
            domain: DomainDescriptor::new(symbol),
        }
    }

    /// Defined on the largest domain its symbol allows.
    pub fn is_maximal(&self) -> bool {
        self.domain.weight == self.symbol_exponent.pos()
    }

    /// `{k^p psi : psi in D(k^q)} = D(k^{(q - p)+})`.
    pub fn range(&self) -> DomainDescriptor {
        DomainDescriptor::new(self.domain.weight - self.symbol_exponent)
    }
}

impl From<PowerScaleOp> for ComposedOp {
    fn from(op: PowerScaleOp) -> Self {
        ComposedOp::maximal(op.exponent)
    }
}

/// `D(diag(k^a)) = D(k^{a+})`.
pub fn domain_of(op: &PowerScaleOp) -> DomainDescriptor {
    DomainDescriptor::new(op.exponent)
}

/// `R(diag(k^a)) = D(k^{(-a)+})`.
pub fn range_of(op: &PowerScaleOp) -> DomainDescriptor {
    DomainDescriptor::new(-op.exponent)
}

/// Product `ops[0] ops[1] ... ops[m-1]`, applied right to left. A vector is
/// in the composition domain iff every partial product from the right keeps
/// it square-summable.
pub fn compose(ops: &[PowerScaleOp]) -> Result<ComposedOp> {
    if ops.is_empty() {
        return Err(Error::param("ops", "cannot compose an empty list"));
    }
    let mut suffix = Exponent::ZERO;
    let mut weight = Exponent::ZERO;
    for op in ops.iter().rev() {
        suffix = suffix + op.exponent;
        weight = weight.max(suffix.pos());
    }
    Ok(ComposedOp {
        symbol_exponent: suffix,
        domain: DomainDescriptor { weight },
    })
}

/// The adjoint of a densely defined diagonal operator is the maximal
/// operator with the same real symbol.
pub fn adjoint_of(c: &ComposedOp) -> ComposedOp {
    ComposedOp::maximal(c.symbol_exponent)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    LhsProperlyExtendsRhs,
    RhsProperlyExtendsLhs,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::LhsProperlyExtendsRhs => "lhs-properly-extends-rhs",
            Verdict::RhsProperlyExtendsLhs => "rhs-properly-extends-lhs",
        }
    }
}

/// Compares two operators with the same symbol by their domains.
pub fn compare(lhs: &ComposedOp, rhs: &ComposedOp) -> Verdict {
    assert_eq!(
        lhs.symbol_exponent, rhs.symbol_exponent,
        "operators with different symbols are not comparable"
    );
    match lhs.domain.weight.cmp(&rhs.domain.weight) {
        std::cmp::Ordering::Equal => Verdict::Equal,
        std::cmp::Ordering::Less => Verdict::LhsProperlyExtendsRhs,
        std::cmp::Ordering::Greater => Verdict::RhsProperlyExtendsLhs,
    }
}

/// `psi_k = k^exponent`, in `D(k^{s_in})` but not in `D(k^{s_out})`.
///
/// `sum k^{2 s_in} |psi_k|^2` is the p-series with term exponent
/// `in_series_exponent < -1`; `sum k^{2 s_out} |psi_k|^2` has term exponent
/// `out_series_exponent >= -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSequence {
    pub s_in: Exponent,
    pub s_out: Exponent,
    pub exponent: Exponent,
    pub in_series_exponent: Exponent,
    pub out_series_exponent: Exponent,
}

impl WitnessSequence {
    pub fn term(&self, k: u64) -> f64 {
        (k as f64).powf(self.exponent.to_f64())
    }

    /// Partial sums up to `k_max` of the convergent and the divergent
    /// defining series.
    pub fn partial_sums(&self, k_max: u64) -> (f64, f64) {
        let (p_in, p_out) = (
            self.in_series_exponent.to_f64(),
            self.out_series_exponent.to_f64(),
        );
        // summed from the small terms up
        (1..=k_max).rev().fold((0.0, 0.0), |(a, b), k| {
            let x = k as f64;
            (a + x.powf(p_in), b + x.powf(p_out))
        })
    }
}

pub fn witness_sequence(s_in: Exponent, s_out: Exponent) -> Result<WitnessSequence> {
    if s_in < Exponent::ZERO {
        return Err(Error::param(
            "s_in",
            format!("weights are non-negative, got {s_in}"),
        ));
    }
    if s_out <= s_in {
        return Err(Error::NoWitness {
            s_in: s_in.to_string(),
            s_out: s_out.to_string(),
        });
    }
    let delta = s_out - s_in;
    let half = Exponent(Ratio::new(1, 2));
    let exponent = -s_in - half - Exponent(delta.0 / 2);
    Ok(WitnessSequence {
        s_in,
        s_out,
        exponent,
        in_series_exponent: -(Exponent::integer(1) + delta),
        out_series_exponent: delta - Exponent::integer(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
    H,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::A => "A",
            Role::B => "B",
            Role::C => "C",
            Role::H => "H",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "lemma-3-1")]
    Lemma31,
    #[serde(rename = "theorem-3-1")]
    Theorem31,
    #[serde(rename = "theorem-4-1")]
    Theorem41,
    #[serde(rename = "corollary-4-1")]
    Corollary41,
    #[serde(rename = "corollary-4-2")]
    Corollary42,
}

impl RuleId {
    pub const ALL: [RuleId; 5] = [
        RuleId::Lemma31,
        RuleId::Theorem31,
        RuleId::Theorem41,
        RuleId::Corollary41,
        RuleId::Corollary42,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Lemma31 => "lemma-3-1",
            RuleId::Theorem31 => "theorem-3-1",
            RuleId::Theorem41 => "theorem-4-1",
            RuleId::Corollary41 => "corollary-4-1",
            RuleId::Corollary42 => "corollary-4-2",
        }
    }

    pub fn roles(self) -> &'static [Role] {
        match self {
            RuleId::Lemma31 => &[Role::A, Role::B],
            RuleId::Theorem41 => &[Role::A, Role::B, Role::C],
            RuleId::Theorem31 | RuleId::Corollary41 | RuleId::Corollary42 => &[Role::A, Role::H],
        }
    }
}

impl FromStr for RuleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::param("rule", format!("unknown rule `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub statement: String,
    pub holds: bool,
}

/// Hypotheses and both sides of a rule's adjoint identity at one point of
/// exponent space. Failing conclusions are reported, not raised.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub rule_id: RuleId,
    pub exponents: BTreeMap<Role, Exponent>,
    pub hypotheses: Vec<Hypothesis>,
    pub hypotheses_hold: bool,
    pub lhs: ComposedOp,
    pub rhs: ComposedOp,
    pub verdict: Verdict,
    pub witness: Option<WitnessSequence>,
    pub conclusion: Conclusion,
}

fn automatic(name: &str) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        holds: true,
        detail: "holds (model-automatic)".to_string(),
    }
}

/// `big ⊇ small` as a hypothesis line.
fn containment(name: &str, big: DomainDescriptor, small: DomainDescriptor) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        holds: big.contains(&small),
        detail: format!("{big} vs {small}"),
    }
}

fn equality(name: &str, x: DomainDescriptor, y: DomainDescriptor) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        holds: x == y,
        detail: format!("{x} vs {y}"),
    }
}

fn roles_of(
    rule: RuleId,
    exponents: &BTreeMap<Role, Exponent>,
) -> Result<BTreeMap<Role, PowerScaleOp>> {
    if let Some(extra) = exponents.keys().find(|r| !rule.roles().contains(r)) {
        return Err(Error::param(
            "exponents",
            format!("role `{}` is not used by {}", extra.as_str(), rule.as_str()),
        ));
    }
    rule.roles()
        .iter()
        .map(|&r| {
            exponents
                .get(&r)
                .map(|&e| (r, PowerScaleOp::new(e)))
                .ok_or_else(|| Error::MissingRole(r.as_str().to_string()))
        })
        .collect()
}

/// Evaluates `rule` at the given role exponents.
pub fn check_rule(rule: RuleId, exponents: &BTreeMap<Role, Exponent>) -> Result<HypothesisReport> {
    let ops = roles_of(rule, exponents)?;
    let op = |r: Role| ops[&r];
    let mut hypotheses = Vec::new();
    let (lhs, rhs, statement);
    let mut conclusion_holds = None;
    match rule {
        RuleId::Lemma31 => {
            let (a, b) = (op(Role::A), op(Role::B));
            hypotheses.push(automatic("D(AB) dense"));
            hypotheses.push(containment("R(B) ⊇ D(A)", range_of(&b), domain_of(&a)));
            hypotheses.push(containment("D(B*) ⊇ R(A*)", domain_of(&b), range_of(&a)));
            hypotheses.push(automatic("B is 1-1"));
            lhs = adjoint_of(&compose(&[a, b])?);
            rhs = compose(&[b, a])?;
            statement = "(AB)* = B*A*";
        }
        RuleId::Theorem31 => {
            let (a, h) = (op(Role::A), op(Role::H));
            hypotheses.push(Hypothesis {
                name: "A = A* bounded".to_string(),
                holds: a.is_bounded(),
                detail: format!("a = {}", a.exponent),
            });
            hypotheses.push(containment("R(A) ⊇ D(H)", range_of(&a), domain_of(&h)));
            hypotheses.push(automatic("D(HA) dense"));
            lhs = adjoint_of(&compose(&[a, h, a])?);
            rhs = compose(&[a, h, a])?;
            statement = "(AHA)* is selfadjoint";
            conclusion_holds = Some(adjoint_of(&lhs) == lhs);
        }
        RuleId::Theorem41 => {
            let (a, b, c) = (op(Role::A), op(Role::B), op(Role::C));
            let bc = compose(&[b, c])?;
            hypotheses.push(automatic("D(BC) dense"));
            hypotheses.push(automatic("D(ABC) dense"));
            hypotheses.push(containment("R(BC) ⊇ D(A)", bc.range(), domain_of(&a)));
            hypotheses.push(equality("R(C) = D(B)", range_of(&c), domain_of(&b)));
            hypotheses.push(containment(
                "D((BC)*) ⊇ R(A*)",
                adjoint_of(&bc).domain,
                range_of(&a),
            ));
            hypotheses.push(containment("D(C*) ⊇ R(B*)", domain_of(&c), range_of(&b)));
            hypotheses.push(automatic("C is 1-1"));
            hypotheses.push(automatic("BC is 1-1"));
            lhs = adjoint_of(&compose(&[a, b, c])?);
            rhs = compose(&[c, b, a])?;
            statement = "(ABC)* = C*B*A*";
        }
        RuleId::Corollary41 | RuleId::Corollary42 => {
            let (a, h) = (op(Role::A), op(Role::H));
            let ha = compose(&[h, a])?;
            hypotheses.push(automatic("D(HA) dense"));
            hypotheses.push(automatic("D(AHA) dense"));
            hypotheses.push(containment("R(HA) ⊇ D(A)", ha.range(), domain_of(&a)));
            hypotheses.push(containment("R(A) ⊇ D(H)", range_of(&a), domain_of(&h)));
            hypotheses.push(containment(
                "D((HA)*) ⊇ R(A)",
                adjoint_of(&ha).domain,
                range_of(&a),
            ));
            hypotheses.push(containment("D(A) ⊇ R(H)", domain_of(&a), range_of(&h)));
            lhs = adjoint_of(&compose(&[a, h, a])?);
            rhs = compose(&[a, h, a])?;
            if rule == RuleId::Corollary42 {
                statement = "R(H) = D(A)";
                conclusion_holds = Some(range_of(&h) == domain_of(&a));
            } else {
                statement = "(AHA)* = AHA";
            }
        }
    }
    let verdict = compare(&lhs, &rhs);
    let witness = match verdict {
        Verdict::Equal => None,
        Verdict::LhsProperlyExtendsRhs => {
            Some(witness_sequence(lhs.domain.weight, rhs.domain.weight)?)
        }
        Verdict::RhsProperlyExtendsLhs => {
            Some(witness_sequence(rhs.domain.weight, lhs.domain.weight)?)
        }
    };
    Ok(HypothesisReport {
        rule_id: rule,
        exponents: ops.iter().map(|(&r, o)| (r, o.exponent)).collect(),
        hypotheses_hold: hypotheses.iter().all(|h| h.holds),
        hypotheses,
        lhs,
        rhs,
        verdict,
        witness,
        conclusion: Conclusion {
            statement: statement.to_string(),
            holds: conclusion_holds.unwrap_or(verdict == Verdict::Equal),
        },
    })
}

/// `{-3, -2, -1, -1/2, 0, 1/2, 1, 2, 3}`.
pub fn standard_exponents() -> Vec<Exponent> {
    [
        (-3, 1),
        (-2, 1),
        (-1, 1),
        (-1, 2),
        (0, 1),
        (1, 2),
        (1, 1),
        (2, 1),
        (3, 1),
    ]
    .into_iter()
    .map(|(n, d)| Exponent::new(n, d).expect("small exponent"))
    .collect()
}

/// Every assignment of `values` to the rule's roles, in lexicographic order
/// of the roles.
pub fn sweep_rule(rule: RuleId, values: &[Exponent]) -> Result<Vec<HypothesisReport>> {
    let roles = rule.roles();
    let total = values.len().pow(roles.len() as u32);
    let mut reports = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut point = BTreeMap::new();
        for &role in roles.iter().rev() {
            point.insert(role, values[idx % values.len()]);
            idx /= values.len();
        }
        reports.push(check_rule(rule, &point)?);
    }
    Ok(reports)
}

/// What the necessity `R(H) = D(A)` demands of a measuror when `H` has
/// exponent `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurorRequirement {
    pub h: Exponent,
    pub range_of_h: DomainDescriptor,
    /// `R(H)` is the whole space.
    pub surjective: bool,
    /// `D(A)` must equal this space.
    pub required_domain: DomainDescriptor,
    pub bounded_admissible: bool,
    /// The only admissible exponent of `A` when it must be unbounded.
    pub forced_exponent: Option<Exponent>,
}

pub fn measuror_requirement(h: Exponent) -> MeasurorRequirement {
    let range_of_h = range_of(&PowerScaleOp::new(h));
    let surjective = range_of_h.is_whole();
    MeasurorRequirement {
        h,
        range_of_h,
        surjective,
        required_domain: range_of_h,
        bounded_admissible: surjective,
        forced_exponent: (!surjective).then_some(range_of_h.weight),
    }
}
