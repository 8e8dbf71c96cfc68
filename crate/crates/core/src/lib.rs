//! Large-integer multiplier workbench: reference arithmetic, cycle-level
//! architecture models, an RTL generator with Verilog and synthesis-script
//! backends, and tooling to turn synthesis sweeps into latency and
//! figure-of-merit tables.

pub mod analysis;
pub mod arch;
pub mod batch;
pub mod cli;
pub mod config;
pub mod gen;
pub mod num;
pub mod rtl;
pub mod synth;
pub mod verilog;
