use super::builder::{clk, rst, ModuleBuilder};
use super::sbm::gen_sbm_rect;
use super::{validate_method, Design, GenError};
use crate::arch::{Method, TOOM3_STAGES, TOOM4_STAGES};
use crate::num::ArithMode;
use crate::rtl::ir::{Expr, ModuleKind, ModuleMeta, RtlModule};

/// Toom-Cook shape: `k` limbs, the finite nonzero evaluation points, and the
/// signed widths of evaluations (`eval_guard` over `h`) and of point
/// products and interpolation values (`guard` over `2h`).
struct Shape {
    method: Method,
    k: u32,
    points: &'static [i64],
    eval_guard: u32,
    guard: u32,
    stages: u64,
}

const TOOM3: Shape = Shape { method: Method::Toom3, k: 3, points: &[1, -1, 2], eval_guard: 4, guard: 8, stages: TOOM3_STAGES };
const TOOM4: Shape = Shape { method: Method::Toom4, k: 4, points: &[1, -1, 2, -2, 3], eval_guard: 7, guard: 13, stages: TOOM4_STAGES };

fn point_tag(p: i64) -> String {
    if p < 0 {
        format!("m{}", -p)
    } else {
        p.to_string()
    }
}

/// Point-product unit for a finite point `p`: `a` is the two's complement
/// evaluation `A(p)`, `b` carries the `k` raw limbs of the other operand.
/// In cycle `i` it adds `A(p)·2^i·Σ_j p^j·b_j[i]`, so it finishes in `h`
/// cycles regardless of how wide `B(p)` would be.
fn gen_point_unit(shape: &Shape, m: u32, h: u32, p: i64) -> RtlModule {
    let (k, we, w) = (shape.k, h + shape.eval_guard, 2 * h + shape.guard);
    let meta = ModuleMeta {
        method: shape.method.short_name().into(),
        m: h,
        n: None,
        mode: ArithMode::Integer,
        kind: ModuleKind::Component,
    };
    let name = format!("mul_{}_{m}_pt_{}", shape.method.short_name(), point_tag(p));
    let mut mb = ModuleBuilder::new(name, meta, u64::from(h));
    let a = mb.input("a", we);
    let b = mb.input("b", k * h);

    let first = mb.reg("first", 1, 1);
    let a_sh = mb.reg("a_sh", w, 0);
    let b_sh = mb.reg("b_sh", k * h, 0);
    let acc = mb.reg("acc", w, 0);

    let a_ext = mb.sext(a, w);
    let a_cur = mb.net("a_cur", Expr::mux(first.clone(), a_ext, a_sh));
    let b_cur = mb.net("b_cur", Expr::mux(first, b, b_sh));

    let mut pp: Option<Expr> = None;
    for j in 0..k {
        let weight = p.pow(j);
        let scaled = mb.mul_small(a_cur.clone(), weight);
        let scaled = mb.net(&format!("w{j}"), scaled);
        let sel = mb.bit(b_cur.clone(), j * h);
        let term = Expr::mux(sel, scaled, Expr::zero(w));
        pp = Some(match pp {
            None => term,
            Some(x) => x.add(term),
        });
    }
    let pp = mb.net("pp", pp.expect("at least one limb"));
    let sum = mb.net("sum", acc.add(pp));
    mb.output("c", sum.clone());

    mb.next("first", Expr::zero(1));
    mb.next("a_sh", a_cur.shl(1));
    // Each limb shifts right on its own so that bit `j*h` always holds the
    // current bit of limb `j`.
    let mut parts = Vec::new();
    for j in (0..k).rev() {
        parts.push(Expr::zero(1));
        if h > 1 {
            parts.push(mb.slice(b_cur.clone(), j * h + 1, h - 1));
        }
    }
    mb.next("b_sh", Expr::Concat(parts));
    mb.next("acc", sum);
    mb.finish()
}

struct TopParts {
    mb: ModuleBuilder,
    /// Point products keyed like the model's point order.
    v0: Expr,
    vinf: Expr,
    finite: Vec<Expr>,
    library: Vec<RtlModule>,
    h: u32,
    w: u32,
}

fn limb(mb: &mut ModuleBuilder, x: &Expr, m: u32, h: u32, j: u32) -> Expr {
    let lo = j * h;
    if lo >= m {
        return Expr::zero(h);
    }
    let s = mb.slice(x.clone(), lo, h.min(m - lo));
    mb.resize(s, h)
}

fn build_front(shape: &Shape, m: u32) -> TopParts {
    let (k, h) = (shape.k, m.div_ceil(shape.k));
    let (we, w) = (h + shape.eval_guard, 2 * h + shape.guard);
    let latency = u64::from(h) + shape.stages;
    let meta = ModuleMeta {
        method: shape.method.short_name().into(),
        m,
        n: None,
        mode: ArithMode::Integer,
        kind: ModuleKind::Multiplier,
    };
    let mut mb = ModuleBuilder::new(format!("mul_{}_{m}", shape.method.short_name()), meta, latency);
    let a = mb.input("a", m);
    let b = mb.input("b", m);

    let a_limbs: Vec<Expr> = (0..k).map(|j| limb(&mut mb, &a, m, h, j)).collect();
    let b_limbs: Vec<Expr> = (0..k).map(|j| limb(&mut mb, &b, m, h, j)).collect();
    let b_all = mb.resize(b, k * h);

    let outer = gen_sbm_rect(h, h, ArithMode::Integer);
    let v0 = mb.wire("v0", 2 * h);
    let vinf = mb.wire("vinf", 2 * h);
    mb.instance(
        "u_v0",
        &outer,
        vec![("clk", clk()), ("rst", rst()), ("a", a_limbs[0].clone()), ("b", b_limbs[0].clone()), ("c", v0.clone())],
    );
    mb.instance(
        "u_vinf",
        &outer,
        vec![
            ("clk", clk()),
            ("rst", rst()),
            ("a", a_limbs[k as usize - 1].clone()),
            ("b", b_limbs[k as usize - 1].clone()),
            ("c", vinf.clone()),
        ],
    );

    let mut library = vec![outer];
    let mut finite = Vec::new();
    for &p in shape.points {
        let tag = point_tag(p);
        let mut eval: Option<Expr> = None;
        for (j, part) in a_limbs.iter().enumerate() {
            let ext = mb.resize(part.clone(), we);
            let term = mb.mul_small(ext, p.pow(j as u32));
            eval = Some(match eval {
                None => term,
                Some(x) => x.add(term),
            });
        }
        let eval = mb.net(&format!("ea_{tag}"), eval.expect("limbs"));
        let unit = gen_point_unit(shape, m, h, p);
        let v = mb.wire(&format!("v{tag}"), w);
        mb.instance(
            &format!("u_v{tag}"),
            &unit,
            vec![("clk", clk()), ("rst", rst()), ("a", eval), ("b", b_all.clone()), ("c", v.clone())],
        );
        library.push(unit);
        finite.push(v);
    }
    TopParts { mb, v0, vinf, finite, library, h, w }
}

/// Output: `Σ c_j·2^{jh}` truncated to `2m` bits.
fn finish(mut parts: TopParts, m: u32, coeffs: Vec<Expr>) -> Design {
    let TopParts { ref mut mb, h, w, .. } = parts;
    let rw = (2 * m).max((coeffs.len() as u32 - 1) * h + w);
    let mut total: Option<Expr> = None;
    for (j, c) in coeffs.into_iter().enumerate() {
        let term = mb.resize(c, rw).shl(j as u32 * h);
        total = Some(match total {
            None => term,
            Some(x) => x.add(term),
        });
    }
    let full = mb.net("full", total.expect("coefficients"));
    let c = mb.resize(full, 2 * m);
    mb.output("c", c);
    let mut design = Design::leaf(parts.mb.finish());
    for child in parts.library {
        design.adopt(Design::leaf(child));
    }
    design
}

/// Toom-3 over points `0, 1, -1, 2, ∞` with two interpolation register
/// stages; latency `⌈m/3⌉ + 2`.
pub fn gen_toom3(m: u32) -> Result<Design, GenError> {
    validate_method(Method::Toom3, m, ArithMode::Integer)?;
    let mut parts = build_front(&TOOM3, m);
    let w = parts.w;
    let (v0, vinf) = (parts.v0.clone(), parts.vinf.clone());
    let [v1, vm1, v2] = <[Expr; 3]>::try_from(parts.finite.clone()).expect("three finite points");
    let mb = &mut parts.mb;

    let v0 = mb.resize(v0, w);
    let vinf = mb.resize(vinf, w);
    let s1_c0 = mb.stage("s1_c0", v0.clone());
    let s1_c4 = mb.stage("s1_c4", vinf.clone());
    let diff = mb.net("d1", v1.clone().sub(vm1.clone()));
    let odd = mb.exact_div(diff, 2);
    let s1_odd = mb.stage("s1_odd", odd);
    let sum = mb.net("e1", v1.add(vm1));
    let half = mb.exact_div(sum, 2);
    let s1_c2 = mb.stage("s1_c2", half.sub(v0).sub(vinf));
    let s1_v2 = mb.stage("s1_v2", v2);

    let four_c2 = mb.mul_small(s1_c2.clone(), 4);
    let sixteen_c4 = mb.mul_small(s1_c4.clone(), 16);
    let u = mb.net("u2", s1_v2.sub(s1_c0.clone()).sub(four_c2).sub(sixteen_c4));
    let u = mb.exact_div(u, 2);
    let u = mb.net("u", u);
    let c3 = mb.net("c3_num", u.sub(s1_odd.clone()));
    let c3 = mb.exact_div(c3, 3);
    let c3 = mb.net("c3", c3);
    let c1 = s1_odd.sub(c3.clone());

    let s2_c0 = mb.stage("s2_c0", s1_c0);
    let s2_c1 = mb.stage("s2_c1", c1);
    let s2_c2 = mb.stage("s2_c2", s1_c2);
    let s2_c3 = mb.stage("s2_c3", c3);
    let s2_c4 = mb.stage("s2_c4", s1_c4);
    Ok(finish(parts, m, vec![s2_c0, s2_c1, s2_c2, s2_c3, s2_c4]))
}

/// Toom-4 over points `0, 1, -1, 2, -2, 3, ∞` with three interpolation
/// register stages; latency `⌈m/4⌉ + 3`.
pub fn gen_toom4(m: u32) -> Result<Design, GenError> {
    validate_method(Method::Toom4, m, ArithMode::Integer)?;
    let mut parts = build_front(&TOOM4, m);
    let w = parts.w;
    let (v0, vinf) = (parts.v0.clone(), parts.vinf.clone());
    let [v1, vm1, v2, vm2, v3] = <[Expr; 5]>::try_from(parts.finite.clone()).expect("five finite points");
    let mb = &mut parts.mb;

    // Stage 1: even and odd halves at ±1 and ±2.
    let v0 = mb.resize(v0, w);
    let vinf = mb.resize(vinf, w);
    let s1_c0 = mb.stage("s1_c0", v0);
    let s1_c6 = mb.stage("s1_c6", vinf);
    let x = mb.net("x_e1", v1.clone().add(vm1.clone()));
    let x = mb.exact_div(x, 2);
    let s1_e1 = mb.stage("s1_e1", x);
    let x = mb.net("x_o1", v1.sub(vm1));
    let x = mb.exact_div(x, 2);
    let s1_o1 = mb.stage("s1_o1", x);
    let x = mb.net("x_e2", v2.clone().add(vm2.clone()));
    let x = mb.exact_div(x, 2);
    let s1_e2 = mb.stage("s1_e2", x);
    let x = mb.net("x_o2", v2.sub(vm2));
    let x = mb.exact_div(x, 4);
    let s1_o2 = mb.stage("s1_o2", x);
    let s1_v3 = mb.stage("s1_v3", v3);

    // Stage 2: even coefficients.
    let e = mb.net("e", s1_e1.sub(s1_c0.clone()).sub(s1_c6.clone()));
    let c6x64 = mb.mul_small(s1_c6.clone(), 64);
    let f = mb.net("f4", s1_e2.sub(s1_c0.clone()).sub(c6x64));
    let f = mb.exact_div(f, 4);
    let f = mb.net("f", f);
    let c4 = mb.net("c4_num", f.sub(e.clone()));
    let c4 = mb.exact_div(c4, 3);
    let c4 = mb.net("c4", c4);
    let c2 = e.sub(c4.clone());
    let s2_c0 = mb.stage("s2_c0", s1_c0);
    let s2_c2 = mb.stage("s2_c2", c2);
    let s2_c4 = mb.stage("s2_c4", c4);
    let s2_c6 = mb.stage("s2_c6", s1_c6);
    let s2_o1 = mb.stage("s2_o1", s1_o1);
    let s2_o2 = mb.stage("s2_o2", s1_o2);
    let s2_v3 = mb.stage("s2_v3", s1_v3);

    // Stage 3: odd coefficients.
    let t9 = mb.mul_small(s2_c2.clone(), 9);
    let t81 = mb.mul_small(s2_c4.clone(), 81);
    let t729 = mb.mul_small(s2_c6.clone(), 729);
    let o3 = mb.net("o3_num", s2_v3.sub(s2_c0.clone()).sub(t9).sub(t81).sub(t729));
    let o3 = mb.exact_div(o3, 3);
    let o3 = mb.net("o3", o3);
    let g1 = mb.net("g1_num", s2_o2.sub(s2_o1.clone()));
    let g1 = mb.exact_div(g1, 3);
    let g1 = mb.net("g1", g1);
    let g2 = mb.net("g2_num", o3.sub(s2_o1.clone()));
    let g2 = mb.exact_div(g2, 8);
    let c5 = mb.net("c5_num", g2.sub(g1.clone()));
    let c5 = mb.exact_div(c5, 5);
    let c5 = mb.net("c5", c5);
    let c5x5 = mb.mul_small(c5.clone(), 5);
    let c3 = mb.net("c3", g1.sub(c5x5));
    let c1 = s2_o1.sub(c3.clone()).sub(c5.clone());

    let s3 = [
        mb.stage("s3_c0", s2_c0),
        mb.stage("s3_c1", c1),
        mb.stage("s3_c2", s2_c2),
        mb.stage("s3_c3", c3),
        mb.stage("s3_c4", s2_c4),
        mb.stage("s3_c5", c5),
        mb.stage("s3_c6", s2_c6),
    ];
    Ok(finish(parts, m, s3.to_vec()))
}
