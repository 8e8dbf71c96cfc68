use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::num::ArithMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Port {
    pub name: String,
    pub dir: Dir,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Net {
    pub name: String,
    pub width: u32,
}

/// Register clocked on `posedge clk` with a synchronous active-high reset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reg {
    pub name: String,
    pub width: u32,
    pub reset: BigUint,
    pub next: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assign {
    pub target: String,
    pub expr: Expr,
}

/// Port connection of an instance. Inputs take any expression; outputs must
/// be a plain reference to a net of the parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub port: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub name: String,
    pub module: String,
    /// Interface of the child as seen when the instance was built.
    pub child_ports: Vec<Port>,
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuleKind {
    /// `c` is the full product of `a` and `b`.
    Multiplier,
    /// Building block with the clk/rst/a/b/c port order but its own widths.
    Component,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleMeta {
    pub method: String,
    pub m: u32,
    pub n: Option<u32>,
    pub mode: ArithMode,
    pub kind: ModuleKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RtlModule {
    pub name: String,
    pub ports: Vec<Port>,
    pub nets: Vec<Net>,
    pub regs: Vec<Reg>,
    pub assigns: Vec<Assign>,
    pub instances: Vec<Instance>,
    /// Cycle (counted from reset release) at the end of which `c` holds
    /// the product; `c` keeps it until the next reset.
    pub latency_cycles: u64,
    pub meta: ModuleMeta,
}

impl RtlModule {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn input_width(&self, name: &str) -> Option<u32> {
        self.port(name).filter(|p| p.dir == Dir::Input).map(|p| p.width)
    }

    pub fn output_width(&self, name: &str) -> Option<u32> {
        self.port(name).filter(|p| p.dir == Dir::Output).map(|p| p.width)
    }

    /// Width of any declared signal (port, net or register).
    pub fn signal_width(&self, name: &str) -> Option<u32> {
        self.ports
            .iter()
            .map(|p| (&p.name, p.width))
            .chain(self.nets.iter().map(|n| (&n.name, n.width)))
            .chain(self.regs.iter().map(|r| (&r.name, r.width)))
            .find(|(n, _)| n.as_str() == name)
            .map(|(_, w)| w)
    }
}

/// Combinational expression; every node has a fixed bit width.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const { width: u32, value: BigUint },
    Ref { name: String, width: u32 },
    /// `width` bits of a named signal starting at bit `lo`.
    Slice { name: String, lo: u32, width: u32 },
    /// Most significant part first, as in Verilog.
    Concat(Vec<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Mux { sel: Box<Expr>, then: Box<Expr>, other: Box<Expr> },
    /// Left shift by a constant, keeping the operand width.
    Shl { expr: Box<Expr>, amount: u32 },
}

// Builder-style constructors; Expr is a syntax tree, not a number.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn width(&self) -> u32 {
        match self {
            Expr::Const { width, .. } | Expr::Ref { width, .. } | Expr::Slice { width, .. } => *width,
            Expr::Concat(parts) => parts.iter().map(Expr::width).sum(),
            Expr::Add(x, _) | Expr::Sub(x, _) | Expr::And(x, _) | Expr::Xor(x, _) => x.width(),
            Expr::Not(x) => x.width(),
            Expr::Mux { then, .. } => then.width(),
            Expr::Shl { expr, .. } => expr.width(),
        }
    }

    pub fn constant(width: u32, value: impl Into<BigUint>) -> Expr {
        Expr::Const { width, value: value.into() }
    }

    pub fn zero(width: u32) -> Expr {
        Expr::Const { width, value: BigUint::zero() }
    }

    pub fn reference(name: impl Into<String>, width: u32) -> Expr {
        Expr::Ref { name: name.into(), width }
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: Expr) -> Expr {
        Expr::And(Box::new(self), Box::new(rhs))
    }

    pub fn xor(self, rhs: Expr) -> Expr {
        Expr::Xor(Box::new(self), Box::new(rhs))
    }

    pub fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }

    pub fn shl(self, amount: u32) -> Expr {
        Expr::Shl { expr: Box::new(self), amount }
    }

    pub fn mux(sel: Expr, then: Expr, other: Expr) -> Expr {
        Expr::Mux { sel: Box::new(sel), then: Box::new(then), other: Box::new(other) }
    }

    /// Name of the signal this expression reads directly, if it is a plain reference.
    pub fn as_ref_name(&self) -> Option<&str> {
        match self {
            Expr::Ref { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Calls `f` on every signal name read by the expression.
    pub fn for_each_ref(&self, f: &mut impl FnMut(&str)) {
        match self {
            Expr::Const { .. } => {}
            Expr::Ref { name, .. } | Expr::Slice { name, .. } => f(name),
            Expr::Concat(parts) => parts.iter().for_each(|p| p.for_each_ref(f)),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::And(x, y) | Expr::Xor(x, y) => {
                x.for_each_ref(f);
                y.for_each_ref(f);
            }
            Expr::Not(x) | Expr::Shl { expr: x, .. } => x.for_each_ref(f),
            Expr::Mux { sel, then, other } => {
                sel.for_each_ref(f);
                then.for_each_ref(f);
                other.for_each_ref(f);
            }
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::Input => "input",
            Dir::Output => "output",
        })
    }
}
