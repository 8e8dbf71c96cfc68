use std::fmt::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::num::{oracle_mul, Nat};
use crate::rtl::ir::RtlModule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestbenchArtifact {
    pub file_name: String,
    pub text: String,
    pub vector_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestbenchOptions {
    pub vectors: usize,
    pub seed: u64,
    /// Adds `$dumpfile`/`$dumpvars` to the initial block.
    pub dump: bool,
}

impl TestbenchOptions {
    pub fn new(vectors: usize, seed: u64) -> Self {
        TestbenchOptions { vectors, seed, dump: false }
    }
}

/// Operand pairs used by the testbench for `module`.
pub fn testbench_vectors(width: u32, vectors: usize, seed: u64) -> Vec<(Nat, Nat)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..vectors)
        .map(|_| (Nat::random(&mut rng, u64::from(width)), Nat::random(&mut rng, u64::from(width))))
        .collect()
}

fn range(width: u32) -> String {
    if width == 1 {
        String::new()
    } else {
        format!(" [{}:0]", width - 1)
    }
}

fn literal(width: u32, v: &Nat) -> String {
    format!("{width}'h{}", v.to_hex().to_lowercase())
}

/// Self-checking testbench. Each vector gets a reset cycle, then `c` is
/// compared after `latency_cycles - 1` further edges and once more after one
/// extra edge. Prints `TB_PASS` or `TB_FAIL <index>`.
pub fn emit_testbench(module: &RtlModule, opts: TestbenchOptions) -> TestbenchArtifact {
    let wa = module.input_width("a").expect("port a");
    let wb = module.input_width("b").expect("port b");
    let wc = module.output_width("c").expect("port c");
    let top = &module.name;
    let tb = format!("tb_{top}");
    let latency = module.latency_cycles;
    let mut out = String::new();

    let _ = writeln!(out, "// {tb}: {} vectors, seed {}", opts.vectors, opts.seed);
    out.push_str("`timescale 1ns/1ps\n\n");
    let _ = writeln!(out, "module {tb};");
    out.push_str("  reg clk;\n  reg rst;\n");
    let _ = writeln!(out, "  reg{} a;", range(wa));
    let _ = writeln!(out, "  reg{} b;", range(wb));
    let _ = writeln!(out, "  wire{} c;", range(wc));
    let _ = writeln!(out, "\n  {top} dut (\n    .clk(clk),\n    .rst(rst),\n    .a(a),\n    .b(b),\n    .c(c)\n  );");
    out.push_str("\n  always #5 clk = ~clk;\n");

    let _ = writeln!(out, "\n  task run;\n    input integer idx;\n    input{} ta;\n    input{} tb;\n    input{} expected;", range(wa), range(wb), range(wc));
    out.push_str("    begin\n      a = ta;\n      b = tb;\n      rst = 1'b1;\n      @(posedge clk);\n      #1 rst = 1'b0;\n");
    if latency > 1 {
        let _ = writeln!(out, "      repeat ({}) @(posedge clk);", latency - 1);
    }
    out.push_str("      #1 if (c !== expected) begin\n        $display(\"TB_FAIL %0d\", idx);\n        $finish;\n      end\n");
    out.push_str("      @(posedge clk);\n      #1 if (c !== expected) begin\n        $display(\"TB_FAIL %0d\", idx);\n        $finish;\n      end\n");
    out.push_str("    end\n  endtask\n");

    out.push_str("\n  initial begin\n");
    if opts.dump {
        let _ = writeln!(out, "    $dumpfile(\"{tb}.vcd\");\n    $dumpvars(0, {tb});");
    }
    let _ = writeln!(out, "    clk = 1'b0;\n    rst = 1'b1;\n    a = {};\n    b = {};", literal(wa, &Nat::zero()), literal(wb, &Nat::zero()));
    let mode = module.meta.mode;
    for (i, (a, b)) in testbench_vectors(wa.min(wb), opts.vectors, opts.seed).iter().enumerate() {
        let expected = oracle_mul(a, b, mode);
        let _ = writeln!(out, "    run({i}, {}, {}, {});", literal(wa, a), literal(wb, b), literal(wc, &expected));
    }
    out.push_str("    $display(\"TB_PASS\");\n    $finish;\n  end\nendmodule\n");

    TestbenchArtifact { file_name: format!("{tb}.v"), text: out, vector_count: opts.vectors, seed: opts.seed }
}
