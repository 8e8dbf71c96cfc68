use super::builder::{clk, ModuleBuilder};
use super::sbm::gen_sbm_rect;
use super::{generate, mode_suffix, Design, GenError, GenParams};
use crate::arch::{ArchKind, Method};
use crate::num::ArithMode;
use crate::rtl::ir::{Expr, ModuleKind, ModuleMeta};

/// Digit-serial wrapper: `b` is consumed in `d = ⌈m/n⌉` digits of `n` bits,
/// most significant digit first, each multiplied by `a` on one inner
/// multiplier and folded in as `acc·2^n + a·digit`.
///
/// A one-hot phase ring of the inner latency `L` restarts the inner
/// multiplier after every digit; a one-hot digit ring stops the sequence
/// after the last digit. Latency is `d·L`.
pub fn gen_digit_serial(m: u32, n: u32, inner: Method, mode: ArithMode) -> Result<Design, GenError> {
    let kind = ArchKind::DigitSerial { digit: u64::from(n), inner };
    GenParams::new(kind, m, mode).validate()?;

    let child = match inner {
        Method::Sbm => Design::leaf(gen_sbm_rect(m, n, mode)),
        other => generate(&GenParams::new(ArchKind::Plain(other), m, mode))?,
    };
    let inner_width = child.top.input_width("b").expect("inner has port b");
    let l = u32::try_from(child.top.latency_cycles).expect("latency fits u32");
    let d = m.div_ceil(n);
    let p = d * n;
    let w = 2 * m;

    let meta = ModuleMeta { method: "wrapper".into(), m, n: Some(n), mode, kind: ModuleKind::Multiplier };
    let name = format!("mul_ds_{m}_{n}_{}{}", inner.short_name(), mode_suffix(mode));
    let mut mb = ModuleBuilder::new(name, meta, u64::from(d) * u64::from(l));
    let a = mb.input("a", m);
    let b = mb.input("b", m);

    let first = mb.reg("first", 1, 1);
    let a_r = mb.reg("a_r", m, 0);
    let b_sh = mb.reg("b_sh", p, 0);
    let acc = mb.reg("acc", w, 0);
    let ph = mb.reg("ph", l, 1);
    let dg = mb.reg("dg", d, 1);

    let a_cur = mb.net("a_cur", Expr::mux(first.clone(), a, a_r));
    let b_ext = mb.resize(b, p);
    let b_cur = mb.net("b_cur", Expr::mux(first, b_ext, b_sh));
    let digit = mb.slice(b_cur.clone(), p - n, n);
    let digit = mb.net("digit", digit);
    let end = mb.bit(ph.clone(), l - 1);
    let last = mb.bit(dg.clone(), d - 1);
    let adv = mb.net("adv", end.and(last.not()));
    let inner_rst = mb.net("inner_rst", Expr::mux(Expr::reference("rst", 1), Expr::constant(1, 1u32), adv.clone()));

    let prod_width = child.top.output_width("c").expect("inner has port c");
    let prod = mb.wire("prod", prod_width);
    let inner_b = mb.resize(digit, inner_width);
    mb.instance(
        "u_inner",
        &child.top,
        vec![("clk", clk()), ("rst", inner_rst), ("a", a_cur.clone()), ("b", inner_b), ("c", prod.clone())],
    );

    let shifted = acc.clone().shl(n.min(w));
    let prod = mb.resize(prod, w);
    let horner = match mode {
        ArithMode::Integer => shifted.add(prod),
        ArithMode::CarryLess => shifted.xor(prod),
    };
    let horner = mb.net("horner", horner);
    mb.output("c", horner.clone());

    mb.next("first", Expr::zero(1));
    mb.next("a_r", a_cur);
    mb.next("acc", Expr::mux(adv.clone(), horner, acc));
    mb.next("b_sh", Expr::mux(adv.clone(), b_cur.clone().shl(n), b_cur));
    let ph_next = if l == 1 {
        ph
    } else {
        let lo = mb.slice(ph.clone(), 0, l - 1);
        let top = mb.bit(ph, l - 1);
        Expr::Concat(vec![lo, top])
    };
    mb.next("ph", ph_next);
    mb.next("dg", Expr::mux(adv, dg.clone().shl(1), dg));

    let mut design = Design::leaf(mb.finish());
    design.adopt(child);
    Ok(design)
}
