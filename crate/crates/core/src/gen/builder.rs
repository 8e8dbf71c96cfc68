use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::rtl::ir::*;

/// Incremental construction of one [`RtlModule`].
pub(crate) struct ModuleBuilder {
    module: RtlModule,
    temps: usize,
}

pub(crate) fn clk() -> Expr {
    Expr::reference("clk", 1)
}

pub(crate) fn rst() -> Expr {
    Expr::reference("rst", 1)
}

impl ModuleBuilder {
    pub fn new(name: String, meta: ModuleMeta, latency_cycles: u64) -> Self {
        let module = RtlModule {
            name,
            ports: vec![
                Port { name: "clk".into(), dir: Dir::Input, width: 1 },
                Port { name: "rst".into(), dir: Dir::Input, width: 1 },
            ],
            nets: Vec::new(),
            regs: Vec::new(),
            assigns: Vec::new(),
            instances: Vec::new(),
            latency_cycles,
            meta,
        };
        ModuleBuilder { module, temps: 0 }
    }

    pub fn input(&mut self, name: &str, width: u32) -> Expr {
        self.module.ports.push(Port { name: name.into(), dir: Dir::Input, width });
        Expr::reference(name, width)
    }

    pub fn output(&mut self, name: &str, expr: Expr) {
        self.module.ports.push(Port { name: name.into(), dir: Dir::Output, width: expr.width() });
        self.module.assigns.push(Assign { target: name.into(), expr });
    }

    /// Declares a net driven by `expr` and returns a reference to it.
    pub fn net(&mut self, name: &str, expr: Expr) -> Expr {
        let width = expr.width();
        self.module.nets.push(Net { name: name.into(), width });
        self.module.assigns.push(Assign { target: name.into(), expr });
        Expr::reference(name, width)
    }

    /// Declares an undriven net, to be connected to an instance output.
    pub fn wire(&mut self, name: &str, width: u32) -> Expr {
        self.module.nets.push(Net { name: name.into(), width });
        Expr::reference(name, width)
    }

    /// Declares a register; its next-value expression is set with [`Self::next`].
    pub fn reg(&mut self, name: &str, width: u32, reset: u64) -> Expr {
        self.module.regs.push(Reg {
            name: name.into(),
            width,
            reset: BigUint::from(reset),
            next: Expr::reference(name, width),
        });
        Expr::reference(name, width)
    }

    pub fn next(&mut self, name: &str, expr: Expr) {
        let reg = self.module.regs.iter_mut().find(|r| r.name == name).expect("register declared");
        reg.next = expr;
    }

    /// Register loaded with `expr` on every clock edge.
    pub fn stage(&mut self, name: &str, expr: Expr) -> Expr {
        let r = self.reg(name, expr.width(), 0);
        self.next(name, expr);
        r
    }

    pub fn instance(&mut self, name: &str, child: &RtlModule, bindings: Vec<(&str, Expr)>) {
        self.module.instances.push(Instance {
            name: name.into(),
            module: child.name.clone(),
            child_ports: child.ports.clone(),
            bindings: bindings
                .into_iter()
                .map(|(port, expr)| Binding { port: port.into(), expr })
                .collect(),
        });
    }

    pub fn finish(self) -> RtlModule {
        self.module
    }

    /// Returns `expr` as a named signal, introducing a temporary net if needed.
    pub fn named(&mut self, expr: Expr) -> (String, Expr) {
        if let Some(name) = expr.as_ref_name() {
            return (name.to_string(), expr);
        }
        let name = format!("t{}", self.temps);
        self.temps += 1;
        let r = self.net(&name, expr);
        (name, r)
    }

    pub fn slice(&mut self, expr: Expr, lo: u32, width: u32) -> Expr {
        if lo == 0 && width == expr.width() {
            return expr;
        }
        let (name, _) = self.named(expr);
        Expr::Slice { name, lo, width }
    }

    pub fn bit(&mut self, expr: Expr, index: u32) -> Expr {
        self.slice(expr, index, 1)
    }

    /// Zero-extends or truncates to `width`.
    pub fn resize(&mut self, expr: Expr, width: u32) -> Expr {
        let w = expr.width();
        if w == width {
            expr
        } else if w < width {
            Expr::Concat(vec![Expr::zero(width - w), expr])
        } else {
            self.slice(expr, 0, width)
        }
    }

    /// Sign-extends a two's complement value to `width` (>= its width).
    pub fn sext(&mut self, expr: Expr, width: u32) -> Expr {
        let w = expr.width();
        if w >= width {
            return self.resize(expr, width);
        }
        let (name, r) = self.named(expr);
        let sign = Expr::Slice { name, lo: w - 1, width: 1 };
        let mut parts = vec![sign; (width - w) as usize];
        parts.push(r);
        Expr::Concat(parts)
    }

    /// Arithmetic shift right by `amount`, keeping the width.
    pub fn asr(&mut self, expr: Expr, amount: u32) -> Expr {
        let w = expr.width();
        if amount == 0 {
            return expr;
        }
        let (name, _) = self.named(expr);
        let sign = Expr::Slice { name: name.clone(), lo: w - 1, width: 1 };
        let mut parts = vec![sign; amount as usize];
        parts.push(Expr::Slice { name, lo: amount, width: w - amount });
        Expr::Concat(parts)
    }

    /// `expr * k` modulo `2^width(expr)` as a shift-add network over the
    /// non-adjacent form of `k`.
    pub fn mul_const(&mut self, expr: Expr, k: &BigUint) -> Expr {
        let w = expr.width();
        let k = k % (BigUint::one() << w);
        if k.is_zero() {
            return Expr::zero(w);
        }
        let (_, x) = self.named(expr);
        let mut acc: Option<Expr> = None;
        for (shift, digit) in naf(&k) {
            if shift >= u64::from(w) {
                break;
            }
            let term = if shift == 0 { x.clone() } else { x.clone().shl(shift as u32) };
            acc = Some(match (acc, digit) {
                (None, 1) => term,
                (None, _) => Expr::zero(w).sub(term),
                (Some(a), 1) => a.add(term),
                (Some(a), _) => a.sub(term),
            });
        }
        acc.unwrap_or_else(|| Expr::zero(w))
    }

    /// `expr * k` modulo `2^width(expr)` for a small signed constant.
    pub fn mul_small(&mut self, expr: Expr, k: i64) -> Expr {
        let w = expr.width();
        let magnitude = self.mul_const(expr, &BigUint::from(k.unsigned_abs()));
        if k < 0 {
            Expr::zero(w).sub(magnitude)
        } else {
            magnitude
        }
    }

    /// Exact division of a two's complement value by `k`: an arithmetic
    /// shift for the power-of-two part, then multiplication by the inverse
    /// of the odd part modulo `2^width`.
    pub fn exact_div(&mut self, expr: Expr, k: u32) -> Expr {
        assert!(k > 0, "division by zero");
        let w = expr.width();
        let shifted = self.asr(expr, k.trailing_zeros());
        let odd = k >> k.trailing_zeros();
        if odd == 1 {
            return shifted;
        }
        let inverse = crate::num::inverse_mod_pow2(&BigUint::from(odd), u64::from(w));
        self.mul_const(shifted, &inverse)
    }
}

/// Non-adjacent form of `k`: (bit position, +1 or -1) pairs, low first.
fn naf(k: &BigUint) -> Vec<(u64, i8)> {
    let mut k = k.clone();
    let mut out = Vec::new();
    let mut pos = 0;
    while !k.is_zero() {
        if k.bit(0) {
            if k.bit(1) {
                out.push((pos, -1));
                k += 1u32;
            } else {
                out.push((pos, 1));
                k -= 1u32;
            }
        }
        k >>= 1;
        pos += 1;
    }
    out
}
