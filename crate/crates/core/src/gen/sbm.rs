use super::builder::ModuleBuilder;
use super::{mode_suffix, validate_method, Design, GenError};
use crate::arch::Method;
use crate::num::ArithMode;
use crate::rtl::ir::{Expr, ModuleKind, ModuleMeta, RtlModule};

/// Sequential shift-add multiplier for `m`-bit operands.
pub fn gen_sbm(m: u32, mode: ArithMode) -> Result<Design, GenError> {
    validate_method(Method::Sbm, m, mode)?;
    Ok(Design::leaf(gen_sbm_rect(m, m, mode)))
}

/// Shift-add multiplier of a `wa`-bit by a `wb`-bit operand; one bit of `b`
/// per cycle, so the latency is `wb`.
///
/// Registers: `first` marks cycle 1 (operands are sampled from the ports),
/// `a_sh` holds `a` shifted left, `b_sh` holds the unconsumed bits of `b`,
/// and `acc` the running sum. `c` is the combinational `acc + pp`.
pub fn gen_sbm_rect(wa: u32, wb: u32, mode: ArithMode) -> RtlModule {
    assert!(wa >= 1 && wb >= 1);
    let w = wa + wb;
    let name = if wa == wb {
        format!("mul_sbm_{wa}{}", mode_suffix(mode))
    } else {
        format!("mul_sbm_{wa}x{wb}{}", mode_suffix(mode))
    };
    let meta = ModuleMeta {
        method: "sbm".into(),
        m: wa,
        n: (wa != wb).then_some(wb),
        mode,
        kind: ModuleKind::Multiplier,
    };
    let mut mb = ModuleBuilder::new(name, meta, u64::from(wb));
    let a = mb.input("a", wa);
    let b = mb.input("b", wb);

    let first = mb.reg("first", 1, 1);
    let a_sh = mb.reg("a_sh", w, 0);
    let b_sh = mb.reg("b_sh", wb, 0);
    let acc = mb.reg("acc", w, 0);

    let a_ext = mb.resize(a, w);
    let a_cur = mb.net("a_cur", Expr::mux(first.clone(), a_ext, a_sh));
    let b_cur = mb.net("b_cur", Expr::mux(first, b, b_sh));
    let sel = mb.bit(b_cur.clone(), 0);
    let pp = mb.net("pp", Expr::mux(sel, a_cur.clone(), Expr::zero(w)));
    let sum = match mode {
        ArithMode::Integer => acc.add(pp),
        ArithMode::CarryLess => acc.xor(pp),
    };
    let sum = mb.net("sum", sum);
    mb.output("c", sum.clone());

    mb.next("first", Expr::zero(1));
    mb.next("a_sh", a_cur.shl(1));
    let b_next = if wb == 1 {
        Expr::zero(1)
    } else {
        let rest = mb.slice(b_cur, 1, wb - 1);
        Expr::Concat(vec![Expr::zero(1), rest])
    };
    mb.next("b_sh", b_next);
    mb.next("acc", sum);
    mb.finish()
}
