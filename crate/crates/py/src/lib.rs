//! Python bindings: behavioral models, RTL generation and simulation,
//! configuration parsing and sweep analysis.

use std::path::PathBuf;

use num_bigint::BigUint;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use polymul::analysis::{self, Columns};
use polymul::arch::{self, ArchKind};
use polymul::batch::run_batch;
use polymul::config;
use polymul::gen::{self, GenParams};
use polymul::num::{ArithMode, Nat};
use polymul::rtl::{check, Simulator};
use polymul::verilog::{emit_design, emit_testbench, TestbenchOptions};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<ArithMode> {
    ArithMode::parse(mode).ok_or_else(|| value_err(format!("unknown mode `{mode}`")))
}

/// A multiplier architecture: `sbm`, `km2`, `tc3`, `tc4` or `wrapper`.
#[pyclass(name = "Arch", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyArch {
    kind: ArchKind,
}

#[pymethods]
impl PyArch {
    #[new]
    #[pyo3(signature = (method, digit=None, inner="sbm"))]
    fn new(method: &str, digit: Option<u64>, inner: &str) -> PyResult<Self> {
        ArchKind::from_parts(method, digit, inner).map(|kind| PyArch { kind }).map_err(value_err)
    }

    /// Clock cycles for `m`-bit operands.
    fn cycles(&self, m: u64) -> u64 {
        arch::cycle_contract(self.kind, m)
    }

    fn supports(&self, mode: &str) -> PyResult<bool> {
        Ok(self.kind.supports(parse_mode(mode)?))
    }

    fn __repr__(&self) -> String {
        format!("Arch({})", self.kind)
    }
}

/// Result of one modeled multiplication.
#[pyclass(name = "Trace", frozen, get_all)]
struct PyTrace {
    product: BigUint,
    cycles: u64,
    sub_mults: u64,
}

#[pymethods]
impl PyTrace {
    fn __repr__(&self) -> String {
        format!("Trace(product=0x{:X}, cycles={}, sub_mults={})", self.product, self.cycles, self.sub_mults)
    }
}

/// Reference product of `a` and `b`.
#[pyfunction]
#[pyo3(signature = (a, b, mode="integer"))]
fn oracle_mul(a: BigUint, b: BigUint, mode: &str) -> PyResult<BigUint> {
    Ok(polymul::num::oracle_mul(&Nat::from(a), &Nat::from(b), parse_mode(mode)?).into_biguint())
}

/// Runs the cycle-accurate model of `arch` on `m`-bit operands.
#[pyfunction]
#[pyo3(signature = (arch, a, b, m, mode="integer"))]
fn model(arch: &PyArch, a: BigUint, b: BigUint, m: u64, mode: &str) -> PyResult<PyTrace> {
    let t = arch::run(arch.kind, &Nat::from(a), &Nat::from(b), m, parse_mode(mode)?).map_err(value_err)?;
    Ok(PyTrace { product: t.product.into_biguint(), cycles: t.cycles, sub_mults: t.sub_mults })
}

/// A generated RTL hierarchy.
#[pyclass(name = "Design", frozen)]
struct PyDesign {
    design: gen::Design,
}

#[pymethods]
impl PyDesign {
    #[getter]
    fn top_name(&self) -> String {
        self.design.top.name.clone()
    }

    #[getter]
    fn latency_cycles(&self) -> u64 {
        self.design.top.latency_cycles
    }

    /// Module names, children first.
    fn module_names(&self) -> PyResult<Vec<String>> {
        Ok(self.design.modules().map_err(value_err)?.into_iter().map(|m| m.name).collect())
    }

    /// Structural check messages over the whole hierarchy; empty when clean.
    fn diagnostics(&self) -> PyResult<Vec<String>> {
        let modules = self.design.modules().map_err(value_err)?;
        Ok(modules.iter().flat_map(check).map(|d| d.to_string()).collect())
    }

    /// `(file_name, text)` of the Verilog source.
    fn verilog(&self) -> PyResult<(String, String)> {
        let art = emit_design(&self.design).map_err(value_err)?;
        Ok((art.file_name, art.text))
    }

    /// `(file_name, text)` of a self-checking testbench.
    #[pyo3(signature = (vectors=100, seed=1))]
    fn testbench(&self, vectors: usize, seed: u64) -> (String, String) {
        let art = emit_testbench(&self.design.top, TestbenchOptions::new(vectors, seed));
        (art.file_name, art.text)
    }

    /// Simulates one transaction on the IR and returns `c`.
    fn simulate(&self, a: BigUint, b: BigUint) -> PyResult<BigUint> {
        let mut sim = Simulator::new(&self.design.top, &self.design.library).map_err(value_err)?;
        sim.run_transaction(&a, &b, self.design.top.latency_cycles).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Design({}, latency_cycles={})", self.design.top.name, self.design.top.latency_cycles)
    }
}

/// Generates the RTL for `arch` at width `m`.
#[pyfunction]
#[pyo3(signature = (arch, m, mode="integer"))]
fn generate(arch: &PyArch, m: u32, mode: &str) -> PyResult<PyDesign> {
    let design = gen::generate(&GenParams::new(arch.kind, m, parse_mode(mode)?)).map_err(value_err)?;
    Ok(PyDesign { design })
}

/// Latency in µs of `cycles` per digit at `freq_mhz`, over `digits` digits.
#[pyfunction]
#[pyo3(signature = (cycles, freq_mhz, digits=1))]
fn latency_us(cycles: f64, freq_mhz: f64, digits: u64) -> PyResult<f64> {
    analysis::latency_us(cycles, freq_mhz, digits).map_err(value_err)
}

#[pyfunction]
fn fom_area(latency_us: f64, area: f64) -> PyResult<f64> {
    analysis::fom_area(latency_us, area).map_err(value_err)
}

#[pyfunction]
fn fom_power(latency_us: f64, power_mw: f64) -> PyResult<f64> {
    analysis::fom_power(latency_us, power_mw).map_err(value_err)
}

/// Latency and figure-of-merit report over a sweep CSV.
#[pyclass(name = "SweepReport", frozen)]
struct PySweepReport {
    report: analysis::SweepReport,
}

#[pymethods]
impl PySweepReport {
    #[getter]
    fn argmax_area(&self) -> usize {
        self.report.argmax_area
    }

    #[getter]
    fn argmax_power(&self) -> usize {
        self.report.argmax_power
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.report.rows.iter().map(|r| r.label.clone()).collect()
    }

    /// `(label, m, n, latency_us, fom_area, fom_power)` per row.
    fn rows(&self) -> Vec<(String, u64, Option<u64>, f64, f64, f64)> {
        self.report.rows.iter().map(|r| (r.label.clone(), r.m, r.n, r.latency_us, r.fom_area, r.fom_power)).collect()
    }

    fn to_csv(&self) -> String {
        self.report.to_csv()
    }

    fn to_table(&self) -> String {
        self.report.to_table()
    }
}

#[pyfunction]
#[pyo3(signature = (csv_text, freq_col="freq_mhz", area_col="area", power_col="power", cycles_col="cycles"))]
fn sweep_report(csv_text: &str, freq_col: &str, area_col: &str, power_col: &str, cycles_col: &str) -> PyResult<PySweepReport> {
    let columns = Columns {
        freq: freq_col.into(),
        cycles: cycles_col.into(),
        area: area_col.into(),
        power: power_col.into(),
    };
    let rows = analysis::parse_rows(csv_text, &columns).map_err(value_err)?;
    Ok(PySweepReport { report: analysis::sweep_report(rows).map_err(value_err)? })
}

/// Parses a job configuration; returns `(arch, m, mode)` per job.
#[pyfunction]
fn parse_config(xml: &str) -> PyResult<Vec<(PyArch, u32, String)>> {
    let jobs = config::parse_config(xml).map_err(value_err)?;
    Ok(jobs.into_iter().map(|j| (PyArch { kind: j.kind }, j.m, j.mode.name().to_string())).collect())
}

/// Runs every job of `xml` into `out_dir`; returns `(succeeded, failed)`.
#[pyfunction]
fn gen_config(xml: &str, out_dir: PathBuf) -> PyResult<(usize, usize)> {
    let jobs = config::parse_config(xml).map_err(value_err)?;
    let result = run_batch(&jobs, &out_dir).map_err(|e| PyOSError::new_err(e.to_string()))?;
    Ok((result.succeeded(), result.failed()))
}

#[pymodule]
fn polymul_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArch>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyDesign>()?;
    m.add_class::<PySweepReport>()?;
    m.add_function(wrap_pyfunction!(oracle_mul, m)?)?;
    m.add_function(wrap_pyfunction!(model, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(latency_us, m)?)?;
    m.add_function(wrap_pyfunction!(fom_area, m)?)?;
    m.add_function(wrap_pyfunction!(fom_power, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_report, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(gen_config, m)?)?;
    m.add("GENERATOR_VERSION", gen::GENERATOR_VERSION)?;
    Ok(())
}
