//! Width and shape checker for [`RtlModule`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::ir::{Dir, Expr, ModuleKind, RtlModule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagKind {
    DuplicateDeclaration,
    ZeroWidth,
    Undeclared(String),
    /// Expression width differs from the width of what it drives.
    WidthMismatch { expected: u32, found: u32 },
    /// Operands of a binary operator or mux arms differ in width.
    OperandWidthMismatch { left: u32, right: u32 },
    SliceOutOfRange { lo: u32, width: u32, signal_width: u32 },
    SelectNotOneBit(u32),
    ConstantTooWide,
    EmptyConcat,
    MultipleDrivers(usize),
    Undriven,
    NotAssignable,
    ResetTooWide,
    BadInterface(String),
    BindingMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub module: String,
    pub item: String,
    pub kind: DiagKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {:?}", self.module, self.item, self.kind)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SignalClass {
    Input,
    Output,
    Net,
    Reg,
}

struct Checker<'a> {
    module: &'a RtlModule,
    signals: HashMap<&'a str, (SignalClass, u32)>,
    diags: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn report(&mut self, item: impl Into<String>, kind: DiagKind) {
        self.diags.push(Diagnostic {
            module: self.module.name.clone(),
            item: item.into(),
            kind,
        });
    }

    fn declare(&mut self, name: &'a str, class: SignalClass, width: u32, item: &str) {
        if width == 0 {
            self.report(item, DiagKind::ZeroWidth);
        }
        if self.signals.insert(name, (class, width)).is_some() {
            self.report(item, DiagKind::DuplicateDeclaration);
        }
    }

    /// Returns the width of `expr`, reporting problems found along the way.
    fn expr(&mut self, item: &str, expr: &Expr) -> u32 {
        match expr {
            Expr::Const { width, value } => {
                if *width == 0 {
                    self.report(item, DiagKind::ZeroWidth);
                }
                if value.bits() > u64::from(*width) {
                    self.report(item, DiagKind::ConstantTooWide);
                }
                *width
            }
            Expr::Ref { name, width } => {
                match self.signals.get(name.as_str()) {
                    None => self.report(item, DiagKind::Undeclared(name.clone())),
                    Some(&(_, declared)) if declared != *width => self.report(
                        item,
                        DiagKind::WidthMismatch { expected: declared, found: *width },
                    ),
                    Some(_) => {}
                }
                *width
            }
            Expr::Slice { name, lo, width } => {
                match self.signals.get(name.as_str()) {
                    None => self.report(item, DiagKind::Undeclared(name.clone())),
                    Some(&(_, declared)) if lo + width > declared || *width == 0 => self.report(
                        item,
                        DiagKind::SliceOutOfRange { lo: *lo, width: *width, signal_width: declared },
                    ),
                    Some(_) => {}
                }
                *width
            }
            Expr::Concat(parts) => {
                if parts.is_empty() {
                    self.report(item, DiagKind::EmptyConcat);
                }
                parts.iter().map(|p| self.expr(item, p)).sum()
            }
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::And(x, y) | Expr::Xor(x, y) => {
                let (left, right) = (self.expr(item, x), self.expr(item, y));
                if left != right {
                    self.report(item, DiagKind::OperandWidthMismatch { left, right });
                }
                left
            }
            Expr::Not(x) => self.expr(item, x),
            Expr::Shl { expr, .. } => self.expr(item, expr),
            Expr::Mux { sel, then, other } => {
                let s = self.expr(item, sel);
                if s != 1 {
                    self.report(item, DiagKind::SelectNotOneBit(s));
                }
                let (left, right) = (self.expr(item, then), self.expr(item, other));
                if left != right {
                    self.report(item, DiagKind::OperandWidthMismatch { left, right });
                }
                left
            }
        }
    }

    fn interface(&mut self) {
        let expected = [("clk", Dir::Input), ("rst", Dir::Input), ("a", Dir::Input), ("b", Dir::Input), ("c", Dir::Output)];
        let ports = &self.module.ports;
        for (i, (name, dir)) in expected.iter().enumerate() {
            match ports.get(i) {
                Some(p) if p.name == *name && p.dir == *dir => {}
                _ => {
                    self.report("ports", DiagKind::BadInterface(format!("port {i} must be {dir} {name}")));
                    return;
                }
            }
        }
        for p in &ports[..2] {
            if p.width != 1 {
                self.report(format!("port {}", p.name), DiagKind::BadInterface("clock and reset are 1 bit".into()));
            }
        }
        if self.module.meta.kind == ModuleKind::Multiplier && ports[4].width != ports[2].width + ports[3].width {
            self.report(
                "port c",
                DiagKind::BadInterface(format!(
                    "product width {} != {} + {}",
                    ports[4].width, ports[2].width, ports[3].width
                )),
            );
        }
    }
}

/// Checks every structural invariant of `module`; an empty result means the
/// module is well formed. Instance bindings are checked against the child
/// interface recorded on the instance.
pub fn check(module: &RtlModule) -> Vec<Diagnostic> {
    let mut c = Checker { module, signals: HashMap::new(), diags: Vec::new() };

    for p in &module.ports {
        let class = if p.dir == Dir::Input { SignalClass::Input } else { SignalClass::Output };
        c.declare(&p.name, class, p.width, &format!("port {}", p.name));
    }
    for n in &module.nets {
        c.declare(&n.name, SignalClass::Net, n.width, &format!("net {}", n.name));
    }
    for r in &module.regs {
        c.declare(&r.name, SignalClass::Reg, r.width, &format!("reg {}", r.name));
    }
    let mut instance_names = HashSet::new();
    for inst in &module.instances {
        if c.signals.contains_key(inst.name.as_str()) || !instance_names.insert(inst.name.as_str()) {
            c.report(format!("instance {}", inst.name), DiagKind::DuplicateDeclaration);
        }
    }
    c.interface();

    let mut drivers: BTreeMap<&str, usize> = BTreeMap::new();
    for a in &module.assigns {
        let item = format!("assign {}", a.target);
        let found = c.expr(&item, &a.expr);
        match c.signals.get(a.target.as_str()).copied() {
            None => c.report(item, DiagKind::Undeclared(a.target.clone())),
            Some((SignalClass::Input | SignalClass::Reg, _)) => c.report(item, DiagKind::NotAssignable),
            Some((_, expected)) => {
                if expected != found {
                    c.report(item, DiagKind::WidthMismatch { expected, found });
                }
                *drivers.entry(a.target.as_str()).or_default() += 1;
            }
        }
    }
    for r in &module.regs {
        let item = format!("reg {}", r.name);
        if r.reset.bits() > u64::from(r.width) {
            c.report(&item, DiagKind::ResetTooWide);
        }
        let found = c.expr(&item, &r.next);
        if found != r.width {
            c.report(item, DiagKind::WidthMismatch { expected: r.width, found });
        }
    }
    for inst in &module.instances {
        let mut bound = HashSet::new();
        for b in &inst.bindings {
            let item = format!("instance {} port {}", inst.name, b.port);
            if !bound.insert(b.port.as_str()) {
                c.report(&item, DiagKind::BindingMismatch("port bound twice".into()));
            }
            let Some(port) = inst.child_ports.iter().find(|p| p.name == b.port) else {
                c.report(item, DiagKind::BindingMismatch("no such port on child".into()));
                continue;
            };
            let found = c.expr(&item, &b.expr);
            if found != port.width {
                c.report(&item, DiagKind::WidthMismatch { expected: port.width, found });
            }
            if port.dir == Dir::Output {
                match b.expr.as_ref_name().and_then(|n| c.signals.get(n).map(|s| (n, s.0))) {
                    Some((name, SignalClass::Net | SignalClass::Output)) => {
                        *drivers.entry(name).or_default() += 1;
                    }
                    _ => c.report(item, DiagKind::NotAssignable),
                }
            }
        }
        for p in &inst.child_ports {
            if !bound.contains(p.name.as_str()) {
                c.report(
                    format!("instance {} port {}", inst.name, p.name),
                    DiagKind::BindingMismatch("port left unbound".into()),
                );
            }
        }
    }

    let driven: Vec<(String, usize)> = module
        .nets
        .iter()
        .map(|n| n.name.as_str())
        .chain(module.ports.iter().filter(|p| p.dir == Dir::Output).map(|p| p.name.as_str()))
        .map(|name| (name.to_string(), drivers.get(name).copied().unwrap_or(0)))
        .collect();
    for (name, count) in driven {
        match count {
            0 => c.report(name, DiagKind::Undriven),
            1 => {}
            k => c.report(name, DiagKind::MultipleDrivers(k)),
        }
    }
    c.diags
}
