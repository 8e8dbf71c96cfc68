//! Cycle-stepping interpreter for RTL IR hierarchies.
//!
//! The hierarchy is elaborated into one flat list of word-level operations
//! in dependency order. Each call to [`Simulator::eval`] settles the
//! combinational logic; [`Simulator::edge`] applies one rising clock edge.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use super::flatten::{flatten_hierarchy, FlattenError};
use super::ir::{Dir, Expr, RtlModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Hierarchy(#[from] FlattenError),
    #[error("combinational loop through `{0}`")]
    CombinationalLoop(String),
    #[error("`{0}` is read but never declared")]
    UnknownSignal(String),
    #[error("`{0}` is not a top-level port")]
    NoSuchPort(String),
    #[error("output changed after the declared latency ({latency} cycles)")]
    Unstable { latency: u64 },
}

#[derive(Clone, Copy)]
struct Slot {
    offset: usize,
    width: u32,
}

impl Slot {
    fn words(&self) -> usize {
        words(self.width)
    }
}

fn words(width: u32) -> usize {
    (width as usize).div_ceil(64)
}

fn top_mask(width: u32) -> u64 {
    match width % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

enum Op {
    Slice { src: Slot, lo: u32 },
    Concat(Vec<Slot>),
    Add(Slot, Slot),
    Sub(Slot, Slot),
    And(Slot, Slot),
    Xor(Slot, Slot),
    Not(Slot),
    Mux { sel: Slot, then: Slot, other: Slot },
    Shl { src: Slot, amount: u32 },
}

struct Node {
    dst: Slot,
    op: Op,
}

struct RegState {
    cur: Slot,
    next: Slot,
    rst: Slot,
    reset: Vec<u64>,
}

enum Def {
    External,
    Reg,
    Comb { expr: Expr, scope: usize },
    Alias(usize),
}

struct Signal {
    name: String,
    width: u32,
    def: Def,
    slot: Option<Slot>,
    visiting: bool,
}

struct Scope {
    signals: HashMap<String, usize>,
}

pub struct Simulator {
    mem: Vec<u64>,
    nodes: Vec<Node>,
    regs: Vec<RegState>,
    ports: HashMap<String, (Dir, Slot)>,
    staging: Vec<u64>,
}

struct Builder<'a> {
    modules: HashMap<&'a str, &'a RtlModule>,
    signals: Vec<Signal>,
    scopes: Vec<Scope>,
    regs: Vec<(usize, usize, Expr, BigUint)>, // (signal, scope, next, reset)
    mem: Vec<u64>,
    nodes: Vec<Node>,
}

impl<'a> Builder<'a> {
    fn alloc(&mut self, width: u32) -> Slot {
        let slot = Slot { offset: self.mem.len(), width };
        self.mem.resize(self.mem.len() + words(width), 0);
        slot
    }

    fn add_signal(&mut self, scope: usize, name: &str, width: u32, def: Def) -> usize {
        let id = self.signals.len();
        self.signals.push(Signal { name: name.to_string(), width, def, slot: None, visiting: false });
        self.scopes[scope].signals.insert(name.to_string(), id);
        id
    }

    /// Declares every signal of `module` (and, recursively, its children)
    /// in a fresh scope. Input ports of a child take their definition from
    /// the parent binding.
    fn elaborate(&mut self, module: &'a RtlModule, prefix: &str, inputs: Option<(usize, &'a [super::ir::Binding])>) -> usize {
        let scope = self.scopes.len();
        self.scopes.push(Scope { signals: HashMap::new() });
        for p in &module.ports {
            let def = match (p.dir, inputs) {
                (Dir::Input, None) => Def::External,
                (Dir::Input, Some((parent, bindings))) => {
                    let expr = bindings
                        .iter()
                        .find(|b| b.port == p.name)
                        .map(|b| b.expr.clone())
                        .unwrap_or_else(|| Expr::zero(p.width));
                    Def::Comb { expr, scope: parent }
                }
                (Dir::Output, _) => Def::External, // replaced below
            };
            self.add_signal(scope, &format!("{prefix}{}", p.name), p.width, def);
            let id = self.signals.len() - 1;
            self.scopes[scope].signals.insert(p.name.clone(), id);
        }
        for n in &module.nets {
            self.add_signal(scope, &format!("{prefix}{}", n.name), n.width, Def::External);
            let id = self.signals.len() - 1;
            self.scopes[scope].signals.insert(n.name.clone(), id);
        }
        for r in &module.regs {
            let id = self.add_signal(scope, &format!("{prefix}{}", r.name), r.width, Def::Reg);
            self.scopes[scope].signals.insert(r.name.clone(), id);
            self.regs.push((id, scope, r.next.clone(), r.reset.clone()));
        }
        for a in &module.assigns {
            if let Some(&id) = self.scopes[scope].signals.get(&a.target) {
                self.signals[id].def = Def::Comb { expr: a.expr.clone(), scope };
            }
        }
        for inst in &module.instances {
            let child = self.modules[inst.module.as_str()];
            let child_scope = self.elaborate(child, &format!("{prefix}{}.", inst.name), Some((scope, &inst.bindings)));
            for b in &inst.bindings {
                let is_output = child.ports.iter().any(|p| p.name == b.port && p.dir == Dir::Output);
                if let (true, Some(target)) = (is_output, b.expr.as_ref_name()) {
                    let child_sig = self.scopes[child_scope].signals[&b.port];
                    if let Some(&id) = self.scopes[scope].signals.get(target) {
                        self.signals[id].def = Def::Alias(child_sig);
                    }
                }
            }
        }
        scope
    }

    fn lookup(&self, scope: usize, name: &str) -> Result<usize, SimError> {
        self.scopes[scope].signals.get(name).copied().ok_or_else(|| SimError::UnknownSignal(name.to_string()))
    }

    fn resolve(&mut self, id: usize) -> Result<Slot, SimError> {
        if let Some(slot) = self.signals[id].slot {
            return Ok(slot);
        }
        if self.signals[id].visiting {
            return Err(SimError::CombinationalLoop(self.signals[id].name.clone()));
        }
        self.signals[id].visiting = true;
        let def = std::mem::replace(&mut self.signals[id].def, Def::External);
        let slot = match &def {
            Def::External | Def::Reg => self.alloc(self.signals[id].width),
            Def::Comb { expr, scope } => self.compile(expr, *scope)?,
            Def::Alias(target) => self.resolve(*target)?,
        };
        self.signals[id].def = def;
        self.signals[id].visiting = false;
        self.signals[id].slot = Some(slot);
        Ok(slot)
    }

    fn emit(&mut self, width: u32, op: Op) -> Slot {
        let dst = self.alloc(width);
        self.nodes.push(Node { dst, op });
        dst
    }

    fn compile(&mut self, expr: &Expr, scope: usize) -> Result<Slot, SimError> {
        Ok(match expr {
            Expr::Const { width, value } => {
                let slot = self.alloc(*width);
                write_biguint(&mut self.mem[slot.offset..slot.offset + slot.words()], value, *width);
                slot
            }
            Expr::Ref { name, .. } => {
                let id = self.lookup(scope, name)?;
                self.resolve(id)?
            }
            Expr::Slice { name, lo, width } => {
                let id = self.lookup(scope, name)?;
                let src = self.resolve(id)?;
                self.emit(*width, Op::Slice { src, lo: *lo })
            }
            Expr::Concat(parts) => {
                let slots = parts.iter().map(|p| self.compile(p, scope)).collect::<Result<Vec<_>, _>>()?;
                self.emit(expr.width(), Op::Concat(slots))
            }
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::And(x, y) | Expr::Xor(x, y) => {
                let (x, y) = (self.compile(x, scope)?, self.compile(y, scope)?);
                let op = match expr {
                    Expr::Add(..) => Op::Add(x, y),
                    Expr::Sub(..) => Op::Sub(x, y),
                    Expr::And(..) => Op::And(x, y),
                    _ => Op::Xor(x, y),
                };
                self.emit(x.width, op)
            }
            Expr::Not(x) => {
                let x = self.compile(x, scope)?;
                self.emit(x.width, Op::Not(x))
            }
            Expr::Mux { sel, then, other } => {
                let sel = self.compile(sel, scope)?;
                let then = self.compile(then, scope)?;
                let other = self.compile(other, scope)?;
                self.emit(then.width, Op::Mux { sel, then, other })
            }
            Expr::Shl { expr, amount } => {
                let src = self.compile(expr, scope)?;
                self.emit(src.width, Op::Shl { src, amount: *amount })
            }
        })
    }
}

fn write_biguint(dst: &mut [u64], value: &BigUint, width: u32) {
    dst.fill(0);
    for (d, v) in dst.iter_mut().zip(value.iter_u64_digits()) {
        *d = v;
    }
    if let Some(last) = dst.last_mut() {
        *last &= top_mask(width);
    }
}

fn read_biguint(src: &[u64]) -> BigUint {
    let digits: Vec<u32> = src.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect();
    BigUint::new(digits)
}

fn bits_at(src: &[u64], bit: usize) -> u64 {
    let (q, r) = (bit / 64, bit % 64);
    let lo = src.get(q).copied().unwrap_or(0) >> r;
    if r == 0 {
        lo
    } else {
        lo | (src.get(q + 1).copied().unwrap_or(0) << (64 - r))
    }
}

impl Simulator {
    /// Elaborates `top` against `library`.
    pub fn new(top: &RtlModule, library: &[RtlModule]) -> Result<Self, SimError> {
        let owned = flatten_hierarchy(top, library)?;
        let mut b = Builder {
            modules: owned.iter().map(|m| (m.name.as_str(), m)).collect(),
            signals: Vec::new(),
            scopes: Vec::new(),
            regs: Vec::new(),
            mem: Vec::new(),
            nodes: Vec::new(),
        };
        let top_ref = b.modules[top.name.as_str()];
        b.elaborate(top_ref, "", None);

        // Register and input storage first so every operand precedes its users.
        for id in 0..b.signals.len() {
            if matches!(b.signals[id].def, Def::Reg | Def::External) {
                b.resolve(id)?;
            }
        }
        let mut ports = HashMap::new();
        for p in &top_ref.ports {
            let id = b.scopes[0].signals[&p.name];
            ports.insert(p.name.clone(), (p.dir, b.resolve(id)?));
        }
        let mut regs = Vec::new();
        let reg_defs = std::mem::take(&mut b.regs);
        for (id, scope, next, reset_value) in reg_defs {
            let cur = b.resolve(id)?;
            let next = b.compile(&next, scope)?;
            let rst_id = b.lookup(scope, "rst")?;
            let rst = b.resolve(rst_id)?;
            let mut reset = vec![0; cur.words()];
            write_biguint(&mut reset, &reset_value, cur.width);
            regs.push(RegState { cur, next, rst, reset });
        }
        // Anything not reached from an output or register is dead logic but
        // still evaluated so that every signal can be inspected.
        for id in 0..b.signals.len() {
            b.resolve(id)?;
        }
        let staging = vec![0; regs.iter().map(|r| r.cur.words()).sum()];
        Ok(Simulator { mem: b.mem, nodes: b.nodes, regs, ports, staging })
    }

    pub fn set_input(&mut self, name: &str, value: &BigUint) -> Result<(), SimError> {
        match self.ports.get(name) {
            Some(&(Dir::Input, slot)) => {
                write_biguint(&mut self.mem[slot.offset..slot.offset + slot.words()], value, slot.width);
                Ok(())
            }
            _ => Err(SimError::NoSuchPort(name.to_string())),
        }
    }

    pub fn get(&self, name: &str) -> Result<BigUint, SimError> {
        let &(_, slot) = self.ports.get(name).ok_or_else(|| SimError::NoSuchPort(name.to_string()))?;
        Ok(read_biguint(&self.mem[slot.offset..slot.offset + slot.words()]))
    }

    /// Settles all combinational logic.
    pub fn eval(&mut self) {
        for node in &self.nodes {
            let (src, rest) = self.mem.split_at_mut(node.dst.offset);
            let dst = &mut rest[..node.dst.words()];
            let read = |s: &Slot| &src[s.offset..s.offset + s.words()];
            match &node.op {
                Op::Slice { src: s, lo } => {
                    let s = read(s);
                    for (k, d) in dst.iter_mut().enumerate() {
                        *d = bits_at(s, *lo as usize + 64 * k);
                    }
                }
                Op::Concat(parts) => {
                    dst.fill(0);
                    let mut pos = 0usize;
                    for part in parts.iter().rev() {
                        let s = read(part);
                        let (q, r) = (pos / 64, pos % 64);
                        for (k, w) in s.iter().enumerate() {
                            if let Some(d) = dst.get_mut(q + k) {
                                *d |= w << r;
                            }
                            if r != 0 {
                                if let Some(d) = dst.get_mut(q + k + 1) {
                                    *d |= w >> (64 - r);
                                }
                            }
                        }
                        pos += part.width as usize;
                    }
                }
                Op::Add(x, y) => {
                    let (x, y) = (read(x), read(y));
                    let mut carry = false;
                    for (k, d) in dst.iter_mut().enumerate() {
                        let (s1, c1) = x[k].overflowing_add(y[k]);
                        let (s2, c2) = s1.overflowing_add(carry as u64);
                        *d = s2;
                        carry = c1 || c2;
                    }
                }
                Op::Sub(x, y) => {
                    let (x, y) = (read(x), read(y));
                    let mut borrow = false;
                    for (k, d) in dst.iter_mut().enumerate() {
                        let (s1, b1) = x[k].overflowing_sub(y[k]);
                        let (s2, b2) = s1.overflowing_sub(borrow as u64);
                        *d = s2;
                        borrow = b1 || b2;
                    }
                }
                Op::And(x, y) => {
                    let (x, y) = (read(x), read(y));
                    for (k, d) in dst.iter_mut().enumerate() {
                        *d = x[k] & y[k];
                    }
                }
                Op::Xor(x, y) => {
                    let (x, y) = (read(x), read(y));
                    for (k, d) in dst.iter_mut().enumerate() {
                        *d = x[k] ^ y[k];
                    }
                }
                Op::Not(x) => {
                    for (d, w) in dst.iter_mut().zip(read(x)) {
                        *d = !w;
                    }
                }
                Op::Mux { sel, then, other } => {
                    let chosen = if read(sel)[0] & 1 == 1 { then } else { other };
                    dst.copy_from_slice(read(chosen));
                }
                Op::Shl { src: s, amount } => {
                    let s = read(s);
                    let amount = *amount as usize;
                    let (q, r) = (amount / 64, amount % 64);
                    for k in (0..dst.len()).rev() {
                        dst[k] = if k < q {
                            0
                        } else {
                            let hi = s[k - q] << r;
                            let lo = if r != 0 && k > q { s[k - q - 1] >> (64 - r) } else { 0 };
                            hi | lo
                        };
                    }
                }
            }
            if let Some(last) = dst.last_mut() {
                *last &= top_mask(node.dst.width);
            }
        }
    }

    /// Applies one rising clock edge to every register.
    pub fn edge(&mut self) {
        let mut pos = 0;
        for reg in &self.regs {
            let n = reg.cur.words();
            let in_reset = self.mem[reg.rst.offset] & 1 == 1;
            let src = if in_reset { &reg.reset[..] } else { &self.mem[reg.next.offset..reg.next.offset + n] };
            self.staging[pos..pos + n].copy_from_slice(src);
            pos += n;
        }
        let mut pos = 0;
        for reg in &self.regs {
            let n = reg.cur.words();
            self.mem[reg.cur.offset..reg.cur.offset + n].copy_from_slice(&self.staging[pos..pos + n]);
            pos += n;
        }
    }

    pub fn step(&mut self) {
        self.eval();
        self.edge();
    }

    /// One multiplication under the standard protocol: a reset edge, then
    /// `latency` cycles with the operands applied. Returns `c` as seen at the
    /// end of cycle `latency`, and checks that it holds for two more cycles.
    pub fn run_transaction(&mut self, a: &BigUint, b: &BigUint, latency: u64) -> Result<BigUint, SimError> {
        let one = BigUint::from(1u32);
        let zero = BigUint::from(0u32);
        self.set_input("rst", &one)?;
        self.set_input("a", a)?;
        self.set_input("b", b)?;
        self.step();
        self.set_input("rst", &zero)?;
        for _ in 1..latency {
            self.step();
        }
        self.eval();
        let product = self.get("c")?;
        for _ in 0..2 {
            self.edge();
            self.eval();
            if self.get("c")? != product {
                return Err(SimError::Unstable { latency });
            }
        }
        Ok(product)
    }

    /// Number of compiled operations (a rough size measure).
    pub fn op_count(&self) -> usize {
        self.nodes.len()
    }
}
