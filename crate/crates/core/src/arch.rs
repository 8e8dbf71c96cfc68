//! Cycle-accurate behavioral models of the multiplier architectures.
//!
//! Each model follows the schedule of the generated hardware: sequential
//! shift-add sub-multipliers that consume one bit of their multiplier operand
//! per clock, running in parallel under a Karatsuba or Toom-Cook top level,
//! plus a fixed number of register stages for interpolation. The returned
//! cycle count depends only on the architecture and the widths.

use std::fmt;

use thiserror::Error;

use crate::num::{
    join, signed_eval, split, ArithMode, EvalPoint, Limbs, Nat, NumError, SignedNat,
};

/// Register stages between the Toom-3 point products and the output.
pub const TOOM3_STAGES: u64 = 2;
/// Register stages between the Toom-4 point products and the output.
pub const TOOM4_STAGES: u64 = 3;

pub const TOOM3_POINTS: [EvalPoint; 5] = [
    EvalPoint::Finite(0),
    EvalPoint::Finite(1),
    EvalPoint::Finite(-1),
    EvalPoint::Finite(2),
    EvalPoint::Infinity,
];

pub const TOOM4_POINTS: [EvalPoint; 7] = [
    EvalPoint::Finite(0),
    EvalPoint::Finite(1),
    EvalPoint::Finite(-1),
    EvalPoint::Finite(2),
    EvalPoint::Finite(-2),
    EvalPoint::Finite(3),
    EvalPoint::Infinity,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArchError {
    #[error("operand overflow: {0}")]
    Overflow(#[from] NumError),
    #[error("digit size {n} is not in 1..={m}")]
    BadDigit { n: u64, m: u64 },
    #[error("{0} supports integer arithmetic only")]
    IntegerOnly(Method),
    #[error("operand width must be at least 1")]
    ZeroWidth,
    #[error("interpolation failed for {method}: {reason}")]
    Interpolation { method: Method, reason: String },
}

/// Non-digitized multiplication method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Sbm,
    Karatsuba2,
    Toom3,
    Toom4,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Sbm, Method::Karatsuba2, Method::Toom3, Method::Toom4];

    /// Short name used in file names and configs.
    pub fn short_name(self) -> &'static str {
        match self {
            Method::Sbm => "sbm",
            Method::Karatsuba2 => "km2",
            Method::Toom3 => "tc3",
            Method::Toom4 => "tc4",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "sbm" | "schoolbook" => Some(Method::Sbm),
            "km2" | "karatsuba" | "karatsuba2" => Some(Method::Karatsuba2),
            "tc3" | "toom3" => Some(Method::Toom3),
            "tc4" | "toom4" => Some(Method::Toom4),
            _ => None,
        }
    }

    pub fn supports(self, mode: ArithMode) -> bool {
        match self {
            Method::Sbm | Method::Karatsuba2 => true,
            Method::Toom3 | Method::Toom4 => mode == ArithMode::Integer,
        }
    }

    /// Number of parallel sub-multipliers.
    pub fn sub_multipliers(self) -> u64 {
        match self {
            Method::Sbm => 1,
            Method::Karatsuba2 => 3,
            Method::Toom3 => 5,
            Method::Toom4 => 7,
        }
    }

    /// Ways the operands are split (1 for schoolbook).
    pub fn ways(self) -> u64 {
        match self {
            Method::Sbm => 1,
            Method::Karatsuba2 => 2,
            Method::Toom3 => 3,
            Method::Toom4 => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// One of the five architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchKind {
    Plain(Method),
    /// Digit-serial wrapper over `digit`-bit digits of `b`.
    DigitSerial { digit: u64, inner: Method },
}

impl ArchKind {
    pub const SBM: ArchKind = ArchKind::Plain(Method::Sbm);
    pub const KARATSUBA2: ArchKind = ArchKind::Plain(Method::Karatsuba2);
    pub const TOOM3: ArchKind = ArchKind::Plain(Method::Toom3);
    pub const TOOM4: ArchKind = ArchKind::Plain(Method::Toom4);

    pub fn digit_serial(digit: u64) -> Self {
        ArchKind::DigitSerial { digit, inner: Method::Sbm }
    }

    /// Resolves a method name (`wrapper`/`digit_serial` for the wrapper), an
    /// optional digit size and an inner method name.
    pub fn from_parts(method: &str, digit: Option<u64>, inner: &str) -> Result<Self, String> {
        match method.to_ascii_lowercase().as_str() {
            "wrapper" | "digit_serial" | "digitserial" => {
                let digit = digit.ok_or("the wrapper needs a digit size")?;
                let inner = Method::parse(inner).ok_or_else(|| format!("unknown inner method `{inner}`"))?;
                Ok(ArchKind::DigitSerial { digit, inner })
            }
            other => {
                if digit.is_some() {
                    return Err("a digit size is only valid with the wrapper".into());
                }
                Ok(ArchKind::Plain(Method::parse(other).ok_or_else(|| format!("unknown method `{other}`"))?))
            }
        }
    }

    pub fn supports(self, mode: ArithMode) -> bool {
        match self {
            ArchKind::Plain(method) | ArchKind::DigitSerial { inner: method, .. } => {
                method.supports(mode)
            }
        }
    }
}

impl fmt::Display for ArchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArchKind::Plain(method) => write!(f, "{method}"),
            ArchKind::DigitSerial { digit, inner } => write!(f, "wrapper(n={digit}, {inner})"),
        }
    }
}

/// Result of one modeled multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub product: Nat,
    pub cycles: u64,
    pub sub_mults: u64,
}

pub fn div_ceil(x: u64, y: u64) -> u64 {
    x.div_ceil(y)
}

/// Clock cycles a non-digitized method needs for `m`-bit operands.
pub fn method_cycles(method: Method, m: u64) -> u64 {
    match method {
        Method::Sbm => m,
        Method::Karatsuba2 => div_ceil(m, 2) + 1,
        Method::Toom3 => div_ceil(m, 3) + TOOM3_STAGES,
        Method::Toom4 => div_ceil(m, 4) + TOOM4_STAGES,
    }
}

/// Clock cycles of one digit step inside the wrapper. A schoolbook inner
/// multiplier runs over the `n`-bit digit; other methods run at full width.
pub fn digit_step_cycles(inner: Method, m: u64, n: u64) -> u64 {
    match inner {
        Method::Sbm => n,
        other => method_cycles(other, m),
    }
}

/// Data-independent cycle count of `kind` at operand width `m`.
pub fn cycle_contract(kind: ArchKind, m: u64) -> u64 {
    match kind {
        ArchKind::Plain(method) => method_cycles(method, m),
        ArchKind::DigitSerial { digit, inner } => {
            div_ceil(m, digit) * digit_step_cycles(inner, m, digit)
        }
    }
}

pub fn run(kind: ArchKind, a: &Nat, b: &Nat, m: u64, mode: ArithMode) -> Result<RunTrace, ArchError> {
    match kind {
        ArchKind::Plain(method) => run_method(method, a, b, m, mode),
        ArchKind::DigitSerial { digit, inner } => run_digit_serial(a, b, m, digit, inner, mode),
    }
}

pub fn run_method(
    method: Method,
    a: &Nat,
    b: &Nat,
    m: u64,
    mode: ArithMode,
) -> Result<RunTrace, ArchError> {
    match method {
        Method::Sbm => run_sbm(a, b, m, mode),
        Method::Karatsuba2 => run_karatsuba2(a, b, m, mode),
        Method::Toom3 | Method::Toom4 if mode != ArithMode::Integer => {
            Err(ArchError::IntegerOnly(method))
        }
        Method::Toom3 => run_toom3(a, b, m),
        Method::Toom4 => run_toom4(a, b, m),
    }
}

fn check_operands(a: &Nat, b: &Nat, m: u64) -> Result<(), ArchError> {
    if m == 0 {
        return Err(ArchError::ZeroWidth);
    }
    a.check_fits(m)?;
    b.check_fits(m)?;
    Ok(())
}

/// Shift-add schedule over `b_width` bits of `b`: one cycle per bit.
fn shift_add(a: &Nat, b: &Nat, b_width: u64, mode: ArithMode) -> (Nat, u64) {
    let mut acc = Nat::zero();
    let mut shifted = a.clone();
    for cycle in 0..b_width {
        if b.bit(cycle) {
            acc = mode.combine(&acc, &shifted);
        }
        shifted = &shifted << 1;
    }
    (acc, b_width)
}

pub fn run_sbm(a: &Nat, b: &Nat, m: u64, mode: ArithMode) -> Result<RunTrace, ArchError> {
    check_operands(a, b, m)?;
    let (product, cycles) = shift_add(a, b, m, mode);
    Ok(RunTrace { product, cycles, sub_mults: m })
}

pub fn run_karatsuba2(a: &Nat, b: &Nat, m: u64, mode: ArithMode) -> Result<RunTrace, ArchError> {
    check_operands(a, b, m)?;
    let h = div_ceil(m, 2);
    let al = split(a, 2, h)?;
    let bl = split(b, 2, h)?;
    let a_sum = mode.combine(&al.parts[0], &al.parts[1]);
    let b_sum = mode.combine(&bl.parts[0], &bl.parts[1]);

    // Three sub-multipliers sized for the (h+1)-bit operand sums.
    let (c0, t0) = shift_add(&al.parts[0], &bl.parts[0], h + 1, mode);
    let (c1, t1) = shift_add(&al.parts[1], &bl.parts[1], h + 1, mode);
    let (mid, tm) = shift_add(&a_sum, &b_sum, h + 1, mode);

    let c2 = match mode {
        ArithMode::Integer => {
            let c2 = SignedNat::from(mid).sub(&SignedNat::from(c1.clone())).sub(&SignedNat::from(c0.clone()));
            c2.to_nat().ok_or_else(|| ArchError::Interpolation {
                method: Method::Karatsuba2,
                reason: "negative middle coefficient".into(),
            })?
        }
        ArithMode::CarryLess => &(&mid ^ &c1) ^ &c0,
    };
    let product = join(&Limbs { parts: vec![c0, c2, c1], part_width: h }, mode);
    Ok(RunTrace { product, cycles: t0.max(t1).max(tm), sub_mults: 3 })
}

/// Point product `A(p)·B(p)` scheduled over bit slices: in cycle `i` the
/// multiplier digit is `Σ_j p^j·b_j[i]`, so the loop runs `h` cycles no
/// matter how far the evaluated operands grow.
fn sliced_point_product(a_eval: &SignedNat, b: &Limbs, point: i64) -> (SignedNat, u64) {
    let h = b.part_width;
    let weights: Vec<i64> = (0..b.count() as u32).map(|j| point.pow(j)).collect();
    let mut acc = SignedNat::default();
    for i in 0..h {
        let digit: i64 = b
            .parts
            .iter()
            .zip(&weights)
            .filter(|(part, _)| part.bit(i))
            .map(|(_, w)| *w)
            .sum();
        if digit != 0 {
            acc = acc.add(&a_eval.scale(digit).shl(i));
        }
    }
    (acc, h)
}

fn point_products(
    a: &Nat,
    b: &Nat,
    m: u64,
    points: &[EvalPoint],
) -> Result<(Vec<SignedNat>, u64, u64), ArchError> {
    check_operands(a, b, m)?;
    let ways = points.len().div_ceil(2);
    let h = div_ceil(m, ways as u64);
    let al = split(a, ways, h)?;
    let bl = split(b, ways, h)?;
    let mut products = Vec::with_capacity(points.len());
    let mut cycles = 0;
    for &point in points {
        let (v, t) = match point {
            EvalPoint::Finite(0) => {
                let (p, t) = shift_add(&al.parts[0], &bl.parts[0], h, ArithMode::Integer);
                (SignedNat::from(p), t)
            }
            EvalPoint::Infinity => {
                let (p, t) = shift_add(&al.parts[ways - 1], &bl.parts[ways - 1], h, ArithMode::Integer);
                (SignedNat::from(p), t)
            }
            EvalPoint::Finite(p) => sliced_point_product(&signed_eval(&al, point), &bl, p),
        };
        products.push(v);
        cycles = cycles.max(t);
    }
    Ok((products, h, cycles))
}

fn finish_toom(
    method: Method,
    coeffs: Vec<SignedNat>,
    h: u64,
    cycles: u64,
) -> Result<RunTrace, ArchError> {
    let mut parts = Vec::with_capacity(coeffs.len());
    for (j, c) in coeffs.into_iter().enumerate() {
        parts.push(c.to_nat().ok_or_else(|| ArchError::Interpolation {
            method,
            reason: format!("coefficient c{j} is negative"),
        })?);
    }
    Ok(RunTrace {
        product: join(&Limbs { parts, part_width: h }, ArithMode::Integer),
        cycles,
        sub_mults: method.sub_multipliers(),
    })
}

fn interp_err(method: Method) -> impl Fn(NumError) -> ArchError {
    move |e| ArchError::Interpolation { method, reason: e.to_string() }
}

/// Toom-3 interpolation from values at `0, 1, -1, 2, ∞` to `c0..c4`.
pub fn interpolate_toom3(v: &[SignedNat]) -> Result<Vec<SignedNat>, NumError> {
    let [v0, v1, vm1, v2, vinf] = v else {
        panic!("toom-3 interpolation takes five values");
    };
    let c0 = v0.clone();
    let c4 = vinf.clone();
    let odd = v1.sub(vm1).exact_div(2)?; // c1 + c3
    let c2 = v1.add(vm1).exact_div(2)?.sub(&c0).sub(&c4);
    let u = v2.sub(&c0).sub(&c2.scale(4)).sub(&c4.scale(16)).exact_div(2)?; // c1 + 4c3
    let c3 = u.sub(&odd).exact_div(3)?;
    let c1 = odd.sub(&c3);
    Ok(vec![c0, c1, c2, c3, c4])
}

/// Toom-4 interpolation from values at `0, 1, -1, 2, -2, 3, ∞` to `c0..c6`.
pub fn interpolate_toom4(v: &[SignedNat]) -> Result<Vec<SignedNat>, NumError> {
    let [v0, v1, vm1, v2, vm2, v3, vinf] = v else {
        panic!("toom-4 interpolation takes seven values");
    };
    let c0 = v0.clone();
    let c6 = vinf.clone();
    let even1 = v1.add(vm1).exact_div(2)?; // c0 + c2 + c4 + c6
    let odd1 = v1.sub(vm1).exact_div(2)?; // c1 + c3 + c5
    let even2 = v2.add(vm2).exact_div(2)?; // c0 + 4c2 + 16c4 + 64c6
    let odd2 = v2.sub(vm2).exact_div(4)?; // c1 + 4c3 + 16c5

    let e = even1.sub(&c0).sub(&c6); // c2 + c4
    let f = even2.sub(&c0).sub(&c6.scale(64)).exact_div(4)?; // c2 + 4c4
    let c4 = f.sub(&e).exact_div(3)?;
    let c2 = e.sub(&c4);

    let odd3 = v3
        .sub(&c0)
        .sub(&c2.scale(9))
        .sub(&c4.scale(81))
        .sub(&c6.scale(729))
        .exact_div(3)?; // c1 + 9c3 + 81c5
    let g1 = odd2.sub(&odd1).exact_div(3)?; // c3 + 5c5
    let g2 = odd3.sub(&odd1).exact_div(8)?; // c3 + 10c5
    let c5 = g2.sub(&g1).exact_div(5)?;
    let c3 = g1.sub(&c5.scale(5));
    let c1 = odd1.sub(&c3).sub(&c5);
    Ok(vec![c0, c1, c2, c3, c4, c5, c6])
}

pub fn run_toom3(a: &Nat, b: &Nat, m: u64) -> Result<RunTrace, ArchError> {
    let (v, h, cycles) = point_products(a, b, m, &TOOM3_POINTS)?;
    let coeffs = interpolate_toom3(&v).map_err(interp_err(Method::Toom3))?;
    finish_toom(Method::Toom3, coeffs, h, cycles + TOOM3_STAGES)
}

pub fn run_toom4(a: &Nat, b: &Nat, m: u64) -> Result<RunTrace, ArchError> {
    let (v, h, cycles) = point_products(a, b, m, &TOOM4_POINTS)?;
    let coeffs = interpolate_toom4(&v).map_err(interp_err(Method::Toom4))?;
    finish_toom(Method::Toom4, coeffs, h, cycles + TOOM4_STAGES)
}

/// Digit-serial wrapper: `b` is processed in `⌈m/n⌉` digits of `n` bits,
/// each multiplied by `a` on the inner multiplier and accumulated at its
/// digit offset.
pub fn run_digit_serial(
    a: &Nat,
    b: &Nat,
    m: u64,
    n: u64,
    inner: Method,
    mode: ArithMode,
) -> Result<RunTrace, ArchError> {
    check_operands(a, b, m)?;
    if n == 0 || n > m {
        return Err(ArchError::BadDigit { n, m });
    }
    if !inner.supports(mode) {
        return Err(ArchError::IntegerOnly(inner));
    }
    let digits = div_ceil(m, n);
    let mut acc = Nat::zero();
    let mut cycles = 0;
    for i in 0..digits {
        let digit = b.extract(i * n, n);
        let step = match inner {
            Method::Sbm => {
                let (p, t) = shift_add(a, &digit, n, mode);
                RunTrace { product: p, cycles: t, sub_mults: 1 }
            }
            other => run_method(other, a, &digit, m, mode)?,
        };
        acc = mode.combine(&acc, &(&step.product << (i * n)));
        cycles += step.cycles;
    }
    Ok(RunTrace { product: acc, cycles, sub_mults: digits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::oracle_mul;

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn sbm_examples() {
        let t = run_sbm(&nat(0xF), &nat(0xF), 4, ArithMode::Integer).unwrap();
        assert_eq!((t.product, t.cycles, t.sub_mults), (nat(225), 4, 4));
        let t = run_sbm(&nat(0x5A), &nat(0), 8, ArithMode::Integer).unwrap();
        assert_eq!((t.product, t.cycles), (nat(0), 8));
        let t = run_sbm(&nat(0b1011), &nat(0b110), 4, ArithMode::CarryLess).unwrap();
        assert_eq!((t.product, t.cycles), (nat(0b111010), 4));
        assert!(matches!(
            run_sbm(&nat(0x10), &nat(1), 4, ArithMode::Integer),
            Err(ArchError::Overflow(_))
        ));
    }

    #[test]
    fn karatsuba_examples() {
        let t = run_karatsuba2(&nat(0xAB), &nat(0xCD), 8, ArithMode::Integer).unwrap();
        assert_eq!((t.product, t.cycles, t.sub_mults), (nat(35055), 5, 3));
        assert_eq!(run_karatsuba2(&nat(1), &nat(1), 8, ArithMode::Integer).unwrap().product, nat(1));
        for m in [4u64, 7, 9, 33] {
            let max = Nat::ones(m);
            let t = run_karatsuba2(&max, &max, m, ArithMode::Integer).unwrap();
            assert_eq!(t.product, oracle_mul(&max, &max, ArithMode::Integer));
            let t = run_karatsuba2(&max, &max, m, ArithMode::CarryLess).unwrap();
            assert_eq!(t.product, oracle_mul(&max, &max, ArithMode::CarryLess));
        }
    }

    #[test]
    fn toom3_examples() {
        assert_eq!(run_toom3(&nat(0), &nat(0x3FFFF), 18).unwrap().product, nat(0));
        let t = run_toom3(&nat(0x3FFFF), &nat(0x3FFFF), 18).unwrap();
        assert_eq!(t.product, Nat::from_hex("FFFF80001").unwrap());
        assert_eq!((t.cycles, t.sub_mults), (8, 5));
    }

    #[test]
    fn toom4_examples() {
        assert_eq!(run_toom4(&nat(1), &nat(1), 16).unwrap().product, nat(1));
        let (a, b) = (nat(0xDEADBEEF), nat(0xCAFEBABE));
        let t = run_toom4(&a, &b, 32).unwrap();
        assert_eq!(t.product, oracle_mul(&a, &b, ArithMode::Integer));
        assert_eq!((t.cycles, t.sub_mults), (11, 7));
    }

    #[test]
    fn toom_rejects_carryless() {
        assert_eq!(
            run_method(Method::Toom3, &nat(1), &nat(1), 8, ArithMode::CarryLess),
            Err(ArchError::IntegerOnly(Method::Toom3))
        );
    }

    #[test]
    fn digit_serial_examples() {
        assert_eq!(cycle_contract(ArchKind::digit_serial(64), 1024), 1024);
        assert_eq!(cycle_contract(ArchKind::digit_serial(32), 521), 544);
        let (a, b) = (nat(0xA7), nat(0x3C));
        let ds = run_digit_serial(&a, &b, 8, 8, Method::Sbm, ArithMode::Integer).unwrap();
        let sbm = run_sbm(&a, &b, 8, ArithMode::Integer).unwrap();
        assert_eq!((ds.product, ds.cycles), (sbm.product, sbm.cycles));
        assert_eq!(
            run_digit_serial(&a, &b, 8, 9, Method::Sbm, ArithMode::Integer),
            Err(ArchError::BadDigit { n: 9, m: 8 })
        );
        assert_eq!(
            run_digit_serial(&a, &b, 8, 0, Method::Sbm, ArithMode::Integer),
            Err(ArchError::BadDigit { n: 0, m: 8 })
        );
    }

    #[test]
    fn digit_serial_with_parallel_inner() {
        let (a, b) = (nat(0xBEEF), nat(0xF00D));
        for inner in [Method::Karatsuba2, Method::Toom3, Method::Toom4] {
            let t = run_digit_serial(&a, &b, 16, 5, inner, ArithMode::Integer).unwrap();
            assert_eq!(t.product, oracle_mul(&a, &b, ArithMode::Integer));
            assert_eq!(t.cycles, 4 * method_cycles(inner, 16));
        }
    }

    #[test]
    fn interpolation_rejects_inconsistent_values() {
        let v: Vec<SignedNat> = [1i64, 2, 1, 4, 0].iter().map(|x| SignedNat::from_i64(*x)).collect();
        assert!(interpolate_toom3(&v).is_err());
    }
}
