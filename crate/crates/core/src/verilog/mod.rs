//! Verilog-2001 serialization of RTL IR, self-checking testbenches, and a
//! light structural re-parser for emitted text.

mod emit;
pub mod reparse;
mod testbench;

pub use emit::{emit_design, emit_verilog, is_keyword, EmitError, VerilogArtifact, VERILOG_KEYWORDS};
pub use testbench::{emit_testbench, testbench_vectors, TestbenchArtifact, TestbenchOptions};
