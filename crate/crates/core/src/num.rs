//! Arbitrary-precision operands, operand splitting, exact small-constant
//! division and the schoolbook reference multiplier.
//!
//! A [`Nat`] is read as a bit polynomial: bit `i` is the coefficient of
//! `x^i`. Whether two values combine with carries or with XOR is chosen by
//! [`ArithMode`].

use std::fmt;
use std::ops::{Add, BitXor, Shl, Shr};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("value of {bits} bits does not fit in {width} bits")]
    Overflow { bits: u64, width: u64 },
    #[error("{divisor} does not divide the value exactly")]
    InexactDivision { divisor: u32 },
    #[error("division by zero")]
    ZeroDivisor,
    #[error("invalid hex literal `{0}`")]
    BadHex(String),
}

/// Unsigned integer of unbounded width.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nat(BigUint);

impl Nat {
    pub fn zero() -> Self {
        Nat(BigUint::zero())
    }

    pub fn one() -> Self {
        Nat(BigUint::one())
    }

    /// `2^width - 1`.
    pub fn ones(width: u64) -> Self {
        Nat((BigUint::one() << width) - 1u32)
    }

    pub fn from_hex(text: &str) -> Result<Self, NumError> {
        let digits: String = text
            .trim()
            .trim_start_matches("0x")
            .trim_start_matches("0X")
            .chars()
            .filter(|c| *c != '_')
            .collect();
        if digits.is_empty() {
            return Err(NumError::BadHex(text.to_string()));
        }
        BigUint::parse_bytes(digits.as_bytes(), 16)
            .map(Nat)
            .ok_or_else(|| NumError::BadHex(text.to_string()))
    }

    /// Uppercase hex without prefix; zero prints as `0`.
    pub fn to_hex(&self) -> String {
        self.0.to_str_radix(16).to_uppercase()
    }

    /// Number of significant bits (0 for zero).
    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn fits(&self, width: u64) -> bool {
        self.bits() <= width
    }

    pub fn bit(&self, index: u64) -> bool {
        self.0.bit(index)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Bits `[lo, lo + width)`.
    pub fn extract(&self, lo: u64, width: u64) -> Nat {
        Nat((&self.0 >> lo) & ((BigUint::one() << width) - 1u32))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Uniform value below `2^width` drawn from `rng`.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, width: u64) -> Nat {
        let words: Vec<u32> = (0..width.div_ceil(32)).map(|_| rng.gen()).collect();
        Nat(BigUint::new(words) % (BigUint::one() << width))
    }

    pub fn to_u64(&self) -> Option<u64> {
        let digits = self.0.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => Some(digits[0]),
            _ => None,
        }
    }

    pub(crate) fn check_fits(&self, width: u64) -> Result<(), NumError> {
        if self.fits(width) {
            Ok(())
        } else {
            Err(NumError::Overflow {
                bits: self.bits(),
                width,
            })
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Self {
        Nat(v)
    }
}

impl Add<&Nat> for &Nat {
    type Output = Nat;
    fn add(self, rhs: &Nat) -> Nat {
        Nat(&self.0 + &rhs.0)
    }
}

impl BitXor<&Nat> for &Nat {
    type Output = Nat;
    fn bitxor(self, rhs: &Nat) -> Nat {
        Nat(&self.0 ^ &rhs.0)
    }
}

impl Shl<u64> for &Nat {
    type Output = Nat;
    fn shl(self, k: u64) -> Nat {
        Nat(&self.0 << k)
    }
}

impl Shr<u64> for &Nat {
    type Output = Nat;
    fn shr(self, k: u64) -> Nat {
        Nat(&self.0 >> k)
    }
}

/// How partial products are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ArithMode {
    /// Ordinary integer arithmetic with carries.
    #[default]
    Integer,
    /// GF(2)[x] arithmetic: addition is XOR.
    CarryLess,
}

impl ArithMode {
    pub fn combine(self, x: &Nat, y: &Nat) -> Nat {
        match self {
            ArithMode::Integer => x + y,
            ArithMode::CarryLess => x ^ y,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArithMode::Integer => "integer",
            ArithMode::CarryLess => "gf2",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "integer" | "int" => Some(ArithMode::Integer),
            "gf2" | "carryless" | "carry-less" | "clmul" => Some(ArithMode::CarryLess),
            _ => None,
        }
    }
}

impl fmt::Display for ArithMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Operand cut into equal-width parts, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limbs {
    pub parts: Vec<Nat>,
    pub part_width: u64,
}

impl Limbs {
    pub fn count(&self) -> usize {
        self.parts.len()
    }
}

/// Reference product straight from the schoolbook double sum: every set bit
/// `j` of `b` contributes `a << j`, combined per `mode`.
pub fn oracle_mul(a: &Nat, b: &Nat, mode: ArithMode) -> Nat {
    let mut acc = Nat::zero();
    for j in 0..b.bits() {
        if b.bit(j) {
            acc = mode.combine(&acc, &(a << j));
        }
    }
    acc
}

pub fn split(v: &Nat, parts: usize, part_width: u64) -> Result<Limbs, NumError> {
    v.check_fits(parts as u64 * part_width)?;
    let parts = (0..parts as u64)
        .map(|i| v.extract(i * part_width, part_width))
        .collect();
    Ok(Limbs { parts, part_width })
}

/// Positional recombination; overlapping parts are resolved per `mode`.
pub fn join(limbs: &Limbs, mode: ArithMode) -> Nat {
    limbs
        .parts
        .iter()
        .enumerate()
        .fold(Nat::zero(), |acc, (i, part)| {
            mode.combine(&acc, &(part << (i as u64 * limbs.part_width)))
        })
}

/// Inverse of an odd `k` modulo `2^width` (Newton iteration).
pub fn inverse_mod_pow2(k: &BigUint, width: u64) -> BigUint {
    assert!(k.bit(0), "only odd values are invertible modulo a power of two");
    let modulus = BigUint::one() << width;
    let mask = &modulus - 1u32;
    let two = BigUint::from(2u32);
    let mut x = BigUint::one();
    let mut precision = 1;
    while precision < width {
        precision *= 2;
        let kx = (k * &x) & &mask;
        x = (&x * ((&two + &modulus - kx) & &mask)) & &mask;
    }
    x & mask
}

/// `v / k` for a divisor known to divide `v`; the odd part of `k` is removed
/// by multiplying with its inverse modulo `2^W` on a window wide enough to
/// hold the quotient. A non-exact division is reported, never truncated.
pub fn exact_div(v: &Nat, k: u32) -> Result<Nat, NumError> {
    if k == 0 {
        return Err(NumError::ZeroDivisor);
    }
    let shift = k.trailing_zeros() as u64;
    let odd = k >> shift;
    if (0..shift).any(|i| v.bit(i)) {
        return Err(NumError::InexactDivision { divisor: k });
    }
    let shifted = v >> shift;
    let window = shifted.bits().max(1);
    let inv = inverse_mod_pow2(&BigUint::from(odd), window);
    let mask = (BigUint::one() << window) - 1u32;
    let quotient = (shifted.as_biguint() * inv) & mask;
    if &quotient * BigUint::from(odd) != *shifted.as_biguint() {
        return Err(NumError::InexactDivision { divisor: k });
    }
    Ok(Nat(quotient))
}

/// Evaluation point for Toom-Cook splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalPoint {
    Finite(i64),
    Infinity,
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalPoint::Finite(p) => write!(f, "{p}"),
            EvalPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Signed intermediate held as sign and magnitude.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SignedNat(BigInt);

impl SignedNat {
    pub fn from_parts(negative: bool, magnitude: Nat) -> Self {
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        SignedNat(BigInt::from_biguint(sign, magnitude.0))
    }

    pub fn from_i64(v: i64) -> Self {
        SignedNat(BigInt::from(v))
    }

    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Minus
    }

    pub fn magnitude(&self) -> Nat {
        Nat(self.0.magnitude().clone())
    }

    /// The value as a `Nat`, or `None` when negative.
    pub fn to_nat(&self) -> Option<Nat> {
        (!self.is_negative()).then(|| self.magnitude())
    }

    pub fn as_bigint(&self) -> &BigInt {
        &self.0
    }

    pub fn add(&self, rhs: &SignedNat) -> SignedNat {
        SignedNat(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &SignedNat) -> SignedNat {
        SignedNat(&self.0 - &rhs.0)
    }

    pub fn mul(&self, rhs: &SignedNat) -> SignedNat {
        SignedNat(&self.0 * &rhs.0)
    }

    pub fn scale(&self, k: i64) -> SignedNat {
        SignedNat(&self.0 * k)
    }

    pub fn shl(&self, k: u64) -> SignedNat {
        SignedNat(&self.0 << k)
    }

    /// Exact division applied to the magnitude.
    pub fn exact_div(&self, k: u32) -> Result<SignedNat, NumError> {
        let q = exact_div(&self.magnitude(), k)?;
        Ok(SignedNat::from_parts(self.is_negative(), q))
    }
}

impl From<Nat> for SignedNat {
    fn from(v: Nat) -> Self {
        SignedNat::from_parts(false, v)
    }
}

impl fmt::Debug for SignedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// `Σ limb[i]·point^i`; infinity selects the top limb.
pub fn signed_eval(limbs: &Limbs, point: EvalPoint) -> SignedNat {
    match point {
        EvalPoint::Infinity => limbs
            .parts
            .last()
            .cloned()
            .map(SignedNat::from)
            .unwrap_or_default(),
        EvalPoint::Finite(p) => {
            // Horner from the top limb down.
            let mut acc = BigInt::zero();
            for part in limbs.parts.iter().rev() {
                acc = acc * p + BigInt::from_biguint(Sign::Plus, part.0.clone());
            }
            SignedNat(acc)
        }
    }
}
