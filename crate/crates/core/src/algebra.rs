//! Sign arithmetic, sign sets, trend triplets and the single-variable
//! transition table.
//!
//! Everything here is a small `Copy` value. A [`SignSet`] is a bit set over
//! the three signs and stands in for qualitative ambiguity: the sum of a
//! positive and a negative quantity is "any sign", which is the full set.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid triplet {0:?}: expected three symbols from + 0 - *")]
    InvalidTriplet(String),
    #[error("invalid sign {0:?}")]
    InvalidSign(String),
    #[error("transitions are only defined for positive-valued triplets, got {0}")]
    UnsupportedValue(Triplet),
}

/// A qualitative value. The derived order `Pos < Zero < Neg` is the
/// canonical enumeration order used for every sorted output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Zero,
    Neg,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Pos, Sign::Zero, Sign::Neg];

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Zero => '0',
            Sign::Neg => '-',
        }
    }

    /// Accepts the ASCII hyphen and the Unicode minus sign for `Neg`.
    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Pos),
            '0' => Some(Sign::Zero),
            '-' | '\u{2212}' => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Zero => Sign::Zero,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }

    /// Sign of `x * x`.
    pub fn square(self) -> Sign {
        self.times(self)
    }

    fn bit(self) -> u8 {
        match self {
            Sign::Pos => 0b001,
            Sign::Zero => 0b010,
            Sign::Neg => 0b100,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Sign {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next().and_then(Sign::from_symbol), chars.next()) {
            (Some(sign), None) => Ok(sign),
            _ => Err(AlgebraError::InvalidSign(s.to_string())),
        }
    }
}

/// Sign of `x * x`.
pub fn qsquare(s: Sign) -> Sign {
    s.square()
}

/// A non-empty subset of `{+, 0, -}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignSet(u8);

impl SignSet {
    pub const POS: SignSet = SignSet(0b001);
    pub const ZERO: SignSet = SignSet(0b010);
    pub const NEG: SignSet = SignSet(0b100);
    /// The unconstrained set, written `*`.
    pub const ALL: SignSet = SignSet(0b111);

    pub fn single(s: Sign) -> SignSet {
        SignSet(s.bit())
    }

    /// Returns `None` for the empty set.
    pub fn from_signs<I: IntoIterator<Item = Sign>>(signs: I) -> Option<SignSet> {
        let bits = signs.into_iter().fold(0u8, |acc, s| acc | s.bit());
        (bits != 0).then_some(SignSet(bits))
    }

    pub fn contains(self, s: Sign) -> bool {
        self.0 & s.bit() != 0
    }

    pub fn is_subset(self, other: SignSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_full(self) -> bool {
        self == SignSet::ALL
    }

    pub fn as_single(self) -> Option<Sign> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Never true for a constructed set; present for API symmetry with `len`.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in canonical order.
    pub fn iter(self) -> impl Iterator<Item = Sign> {
        Sign::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    pub fn union(self, other: SignSet) -> SignSet {
        SignSet(self.0 | other.0)
    }

    pub fn intersect(self, other: SignSet) -> Option<SignSet> {
        let bits = self.0 & other.0;
        (bits != 0).then_some(SignSet(bits))
    }

    pub fn negate(self) -> SignSet {
        SignSet::from_signs(self.iter().map(Sign::negate)).expect("non-empty")
    }

    /// Qualitative sum, lifted to sets by union over member pairs.
    pub fn qadd(self, other: SignSet) -> SignSet {
        let mut out = 0u8;
        for a in self.iter() {
            for b in other.iter() {
                out |= add_signs(a, b).0;
            }
        }
        SignSet(out)
    }

    /// Qualitative product, lifted to sets by union over member pairs.
    pub fn qmul(self, other: SignSet) -> SignSet {
        let mut out = 0u8;
        for a in self.iter() {
            for b in other.iter() {
                out |= a.times(b).bit();
            }
        }
        SignSet(out)
    }
}

fn add_signs(a: Sign, b: Sign) -> SignSet {
    match (a, b) {
        (Sign::Zero, s) | (s, Sign::Zero) => SignSet::single(s),
        (a, b) if a == b => SignSet::single(a),
        _ => SignSet::ALL,
    }
}

pub fn qadd(a: SignSet, b: SignSet) -> SignSet {
    a.qadd(b)
}

pub fn qmul(a: SignSet, b: SignSet) -> SignSet {
    a.qmul(b)
}

impl From<Sign> for SignSet {
    fn from(s: Sign) -> Self {
        SignSet::single(s)
    }
}

impl fmt::Debug for SignSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SignSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return f.write_str("*");
        }
        if let Some(s) = self.as_single() {
            return write!(f, "{s}");
        }
        let parts: Vec<String> = self.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// (value, first derivative, second derivative) of one variable.
///
/// `d2` is a definite sign in full mode and the full set `*` when second
/// derivatives are not considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub value: Sign,
    pub d1: Sign,
    d2: SignSet,
}

impl Triplet {
    pub fn new(value: Sign, d1: Sign, d2: Sign) -> Triplet {
        Triplet { value, d1, d2: SignSet::single(d2) }
    }

    /// A triplet whose second derivative is left unspecified (`*`).
    pub fn first_order(value: Sign, d1: Sign) -> Triplet {
        Triplet { value, d1, d2: SignSet::ALL }
    }

    pub fn d2(&self) -> SignSet {
        self.d2
    }

    /// The definite second derivative, `None` for first-order triplets.
    pub fn d2_sign(&self) -> Option<Sign> {
        self.d2.as_single()
    }

    pub fn is_first_order(&self) -> bool {
        self.d2.is_full()
    }

    fn sort_key(&self) -> (Sign, Sign, u8) {
        let d2 = match self.d2_sign() {
            Some(s) => s as u8,
            None => 3,
        };
        (self.value, self.d1, d2)
    }
}

impl PartialOrd for Triplet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triplet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.value, self.d1, self.d2)
    }
}

impl FromStr for Triplet {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AlgebraError::InvalidTriplet(s.to_string());
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != 3 {
            return Err(err());
        }
        let value = Sign::from_symbol(chars[0]).ok_or_else(err)?;
        let d1 = Sign::from_symbol(chars[1]).ok_or_else(err)?;
        if chars[2] == '*' {
            return Ok(Triplet::first_order(value, d1));
        }
        let d2 = Sign::from_symbol(chars[2]).ok_or_else(err)?;
        Ok(Triplet::new(value, d1, d2))
    }
}

/// A per-slot pattern over triplets; `*` in a slot matches anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripletPattern {
    pub value: SignSet,
    pub d1: SignSet,
    pub d2: SignSet,
}

impl TripletPattern {
    pub fn matches(&self, t: &Triplet) -> bool {
        // A first-order triplet only matches a wildcard d2 slot.
        self.value.contains(t.value) && self.d1.contains(t.d1) && t.d2().is_subset(self.d2)
    }
}

impl FromStr for TripletPattern {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AlgebraError::InvalidTriplet(s.to_string());
        let slots: Vec<SignSet> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '*' => Some(SignSet::ALL),
                c => Sign::from_symbol(c).map(SignSet::single),
            })
            .collect::<Option<_>>()
            .ok_or_else(err)?;
        match slots[..] {
            [value, d1, d2] => Ok(TripletPattern { value, d1, d2 }),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for TripletPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.value, self.d1, self.d2)
    }
}

use Sign::{Neg as N, Pos as P, Zero as Z};

type Rule = ((Sign, Sign), &'static [(Sign, Sign)]);

/// Transition rules for a positive variable that stays positive, keyed by
/// (d1, d2) of the source.
const TRANSITIONS: [Rule; 9] = [
    ((P, P), &[(P, Z)]),
    ((P, Z), &[(P, P), (P, N)]),
    ((P, N), &[(P, Z), (Z, N), (Z, Z)]),
    ((Z, P), &[(P, P)]),
    ((Z, Z), &[(P, P), (N, N)]),
    ((Z, N), &[(N, N)]),
    ((N, P), &[(N, Z), (Z, P), (Z, Z)]),
    ((N, Z), &[(N, P), (N, N)]),
    ((N, N), &[(N, Z)]),
];

/// Triplets a positive-valued variable may move to in one step. The source
/// itself is never included.
pub fn successors(t: &Triplet) -> Result<Vec<Triplet>, AlgebraError> {
    let d2 = match (t.value, t.d2_sign()) {
        (Sign::Pos, Some(d2)) => d2,
        _ => return Err(AlgebraError::UnsupportedValue(*t)),
    };
    let (_, targets) =
        TRANSITIONS.iter().find(|(from, _)| *from == (t.d1, d2)).expect("table covers every (d1, d2) pair");
    Ok(targets.iter().map(|&(d1, d2)| Triplet::new(Sign::Pos, d1, d2)).collect())
}

/// True when `to` is `from` or one of its successors.
pub fn is_legal_step(from: &Triplet, to: &Triplet) -> Result<bool, AlgebraError> {
    if from == to {
        // Still reject non-positive values so callers see a uniform error.
        successors(from)?;
        return Ok(true);
    }
    Ok(successors(from)?.contains(to))
}
