use super::builder::{clk, rst, ModuleBuilder};
use super::sbm::gen_sbm_rect;
use super::{mode_suffix, validate_method, Design, GenError};
use crate::arch::Method;
use crate::num::ArithMode;
use crate::rtl::ir::{ModuleKind, ModuleMeta};

/// Two-way Karatsuba over three parallel `(h+1)`-bit shift-add children,
/// `h = ⌈m/2⌉`. Pre-adders and the recombination network are combinational.
pub fn gen_karatsuba2(m: u32, mode: ArithMode) -> Result<Design, GenError> {
    validate_method(Method::Karatsuba2, m, mode)?;
    let h = m.div_ceil(2);
    let hw = h + 1;
    let child = gen_sbm_rect(hw, hw, mode);
    let latency = child.latency_cycles;

    let meta = ModuleMeta { method: "km2".into(), m, n: None, mode, kind: ModuleKind::Multiplier };
    let mut mb = ModuleBuilder::new(format!("mul_km2_{m}{}", mode_suffix(mode)), meta, latency);
    let a = mb.input("a", m);
    let b = mb.input("b", m);

    let a0 = mb.slice(a.clone(), 0, h);
    let a1 = mb.slice(a, h, m - h);
    let b0 = mb.slice(b.clone(), 0, h);
    let b1 = mb.slice(b, h, m - h);
    let a0 = mb.resize(a0, hw);
    let a1 = mb.resize(a1, hw);
    let b0 = mb.resize(b0, hw);
    let b1 = mb.resize(b1, hw);
    let (a_sum, b_sum) = match mode {
        ArithMode::Integer => (a0.clone().add(a1.clone()), b0.clone().add(b1.clone())),
        ArithMode::CarryLess => (a0.clone().xor(a1.clone()), b0.clone().xor(b1.clone())),
    };
    let a_sum = mb.net("a_sum", a_sum);
    let b_sum = mb.net("b_sum", b_sum);

    let pw = 2 * hw;
    let p0 = mb.wire("p0", pw);
    let p1 = mb.wire("p1", pw);
    let pm = mb.wire("pm", pw);
    for (inst, x, y, out) in [("u_p0", a0, b0, &p0), ("u_p1", a1, b1, &p1), ("u_pm", a_sum, b_sum, &pm)] {
        mb.instance(inst, &child, vec![("clk", clk()), ("rst", rst()), ("a", x), ("b", y), ("c", out.clone())]);
    }

    let mid = match mode {
        ArithMode::Integer => pm.sub(p1.clone()).sub(p0.clone()),
        ArithMode::CarryLess => pm.xor(p1.clone()).xor(p0.clone()),
    };
    let mid = mb.net("mid", mid);

    // Recombine at a width that holds every shifted term, then truncate.
    let rw = (2 * h + pw).max(2 * m);
    let t0 = mb.resize(p0, rw);
    let t1 = mb.resize(mid, rw).shl(h);
    let t2 = mb.resize(p1, rw).shl(2 * h);
    let full = match mode {
        ArithMode::Integer => t0.add(t1).add(t2),
        ArithMode::CarryLess => t0.xor(t1).xor(t2),
    };
    let full = mb.net("full", full);
    let c = mb.resize(full, 2 * m);
    mb.output("c", c);

    let mut design = Design::leaf(mb.finish());
    design.adopt(Design::leaf(child));
    Ok(design)
}
