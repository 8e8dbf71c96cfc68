use std::fmt::Write;

use thiserror::Error;

use crate::gen::{Design, GENERATOR_VERSION};
use crate::rtl::check::{check, Diagnostic};
use crate::rtl::flatten::FlattenError;
use crate::rtl::ir::{Expr, RtlModule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerilogArtifact {
    pub file_name: String,
    pub text: String,
    pub top_name: String,
    pub latency_cycles: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("IR has {} diagnostic(s), first: {}", .0.len(), .0[0])]
    UncheckedIR(Vec<Diagnostic>),
    #[error("nothing to emit")]
    Empty,
    #[error("identifier `{0}` is a Verilog keyword or not a plain identifier")]
    BadIdentifier(String),
    #[error(transparent)]
    Hierarchy(#[from] FlattenError),
}

/// Verilog-2001 reserved words.
pub const VERILOG_KEYWORDS: &[&str] = &[
    "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case", "casex", "casez", "cell",
    "cmos", "config", "deassign", "default", "defparam", "design", "disable", "edge", "else", "end", "endcase",
    "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive", "endspecify", "endtable", "endtask",
    "event", "for", "force", "forever", "fork", "function", "generate", "genvar", "highz0", "highz1", "if",
    "ifnone", "incdir", "include", "initial", "inout", "input", "instance", "integer", "join", "large", "liblist",
    "library", "localparam", "macromodule", "medium", "module", "nand", "negedge", "nmos", "nor",
    "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter", "pmos", "posedge", "primitive",
    "pull0", "pull1", "pulldown", "pullup", "pulsestyle_ondetect", "pulsestyle_onevent", "rcmos", "real",
    "realtime", "reg", "release", "repeat", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "scalared",
    "showcancelled", "signed", "small", "specify", "specparam", "strong0", "strong1", "supply0", "supply1",
    "table", "task", "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand", "trior", "trireg",
    "unsigned", "use", "uwire", "vectored", "wait", "wand", "weak0", "weak1", "while", "wire", "wor", "xnor", "xor",
];

pub fn is_keyword(ident: &str) -> bool {
    VERILOG_KEYWORDS.contains(&ident)
}

fn check_ident(ident: &str) -> Result<(), EmitError> {
    let mut chars = ident.chars();
    let plain = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain && !is_keyword(ident) {
        Ok(())
    } else {
        Err(EmitError::BadIdentifier(ident.to_string()))
    }
}

fn range(width: u32) -> String {
    if width == 1 {
        String::new()
    } else {
        format!("[{}:0] ", width - 1)
    }
}

fn expr(module: &RtlModule, e: &Expr) -> String {
    match e {
        Expr::Const { width, value } => format!("{width}'h{value:x}"),
        Expr::Ref { name, .. } => name.clone(),
        Expr::Slice { name, lo, width } => {
            let full = module.signal_width(name).unwrap_or(0);
            if *lo == 0 && *width == full {
                name.clone()
            } else if *width == 1 {
                format!("{name}[{lo}]")
            } else {
                format!("{name}[{}:{lo}]", lo + width - 1)
            }
        }
        Expr::Concat(parts) => {
            let parts: Vec<String> = parts.iter().map(|p| expr(module, p)).collect();
            format!("{{{}}}", parts.join(", "))
        }
        Expr::Add(x, y) => format!("({} + {})", expr(module, x), expr(module, y)),
        Expr::Sub(x, y) => format!("({} - {})", expr(module, x), expr(module, y)),
        Expr::And(x, y) => format!("({} & {})", expr(module, x), expr(module, y)),
        Expr::Xor(x, y) => format!("({} ^ {})", expr(module, x), expr(module, y)),
        Expr::Not(x) => format!("(~{})", expr(module, x)),
        Expr::Mux { sel, then, other } => {
            format!("({} ? {} : {})", expr(module, sel), expr(module, then), expr(module, other))
        }
        Expr::Shl { expr: x, amount } => format!("({} << {amount})", expr(module, x)),
    }
}

fn module_idents(module: &RtlModule) -> impl Iterator<Item = &str> {
    std::iter::once(module.name.as_str())
        .chain(module.ports.iter().map(|p| p.name.as_str()))
        .chain(module.nets.iter().map(|n| n.name.as_str()))
        .chain(module.regs.iter().map(|r| r.name.as_str()))
        .chain(module.instances.iter().flat_map(|i| [i.name.as_str(), i.module.as_str()]))
}

fn emit_module(out: &mut String, module: &RtlModule) {
    let _ = writeln!(out, "module {}(", module.name);
    for (i, p) in module.ports.iter().enumerate() {
        let sep = if i + 1 == module.ports.len() { "" } else { "," };
        let _ = writeln!(out, "  {} {}{}{sep}", p.dir, range(p.width), p.name);
    }
    out.push_str(");\n");
    if !module.nets.is_empty() || !module.regs.is_empty() {
        out.push('\n');
    }
    for n in &module.nets {
        let _ = writeln!(out, "  wire {}{};", range(n.width), n.name);
    }
    for r in &module.regs {
        let _ = writeln!(out, "  reg {}{};", range(r.width), r.name);
    }
    for inst in &module.instances {
        let _ = writeln!(out, "\n  {} {} (", inst.module, inst.name);
        for (i, b) in inst.bindings.iter().enumerate() {
            let sep = if i + 1 == inst.bindings.len() { "" } else { "," };
            let _ = writeln!(out, "    .{}({}){sep}", b.port, expr(module, &b.expr));
        }
        out.push_str("  );\n");
    }
    if !module.assigns.is_empty() {
        out.push('\n');
    }
    for a in &module.assigns {
        let _ = writeln!(out, "  assign {} = {};", a.target, expr(module, &a.expr));
    }
    if !module.regs.is_empty() {
        out.push_str("\n  always @(posedge clk) begin\n    if (rst) begin\n");
        for r in &module.regs {
            let _ = writeln!(out, "      {} <= {}'h{:x};", r.name, r.width, r.reset);
        }
        out.push_str("    end else begin\n");
        for r in &module.regs {
            let _ = writeln!(out, "      {} <= {};", r.name, expr(module, &r.next));
        }
        out.push_str("    end\n  end\n");
    }
    out.push_str("endmodule\n");
}

/// Serializes `mods` (children first, top last) into one source file.
pub fn emit_verilog(mods: &[RtlModule]) -> Result<VerilogArtifact, EmitError> {
    let top = mods.last().ok_or(EmitError::Empty)?;
    let diags: Vec<Diagnostic> = mods.iter().flat_map(check).collect();
    if !diags.is_empty() {
        return Err(EmitError::UncheckedIR(diags));
    }
    for module in mods {
        for ident in module_idents(module) {
            check_ident(ident)?;
        }
    }

    let meta = &top.meta;
    let mut out = String::new();
    let _ = writeln!(out, "// {}", top.name);
    let n = meta.n.map_or_else(|| "-".to_string(), |n| n.to_string());
    let _ = writeln!(
        out,
        "// method: {}  m: {}  n: {}  mode: {}  latency_cycles: {}",
        meta.method,
        meta.m,
        n,
        meta.mode.name(),
        top.latency_cycles
    );
    let _ = writeln!(out, "// generator: {GENERATOR_VERSION}");
    for module in mods {
        out.push('\n');
        emit_module(&mut out, module);
    }
    Ok(VerilogArtifact {
        file_name: format!("{}.v", top.name),
        text: out,
        top_name: top.name.clone(),
        latency_cycles: top.latency_cycles,
    })
}

pub fn emit_design(design: &Design) -> Result<VerilogArtifact, EmitError> {
    emit_verilog(&design.modules()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_karatsuba2, gen_sbm};
    use crate::num::ArithMode;

    #[test]
    fn sbm_header_and_ports() {
        let art = emit_design(&gen_sbm(8, ArithMode::Integer).unwrap()).unwrap();
        assert_eq!(art.file_name, "mul_sbm_8.v");
        assert!(art.text.contains("module mul_sbm_8(\n  input clk,\n  input rst,\n  input [7:0] a,"));
        assert!(art.text.contains("  output [15:0] c\n);"));
        assert!(art.text.contains("latency_cycles: 8"));
        assert!(!art.text.contains('\r'));
    }

    #[test]
    fn karatsuba_has_one_child_definition() {
        let art = emit_design(&gen_karatsuba2(192, ArithMode::Integer).unwrap()).unwrap();
        assert_eq!(art.text.matches("module mul_sbm_97(").count(), 1);
        assert_eq!(art.text.matches("  mul_sbm_97 u_").count(), 3);
    }

    #[test]
    fn unchecked_ir_is_refused() {
        let mut d = gen_sbm(8, ArithMode::Integer).unwrap();
        d.top.assigns.pop();
        assert!(matches!(emit_verilog(&[d.top]), Err(EmitError::UncheckedIR(_))));
    }

    #[test]
    fn keyword_identifiers_are_refused() {
        let mut d = gen_sbm(8, ArithMode::Integer).unwrap();
        d.top.name = "module".into();
        assert_eq!(emit_verilog(&[d.top]), Err(EmitError::BadIdentifier("module".into())));
    }
}
