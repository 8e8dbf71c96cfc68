//! Batch generation of configured jobs into `vlog/`, `synth/` and a manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::JobSpec;
use crate::gen::{generate, GenError, GenParams};
use crate::synth::{emit_synth_script, SynthError, SynthParams};
use crate::verilog::{emit_design, emit_testbench, EmitError, TestbenchOptions};

pub const MANIFEST: &str = "manifest.tsv";
pub const DEFAULT_REPORT_DIR: &str = "reports";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutcome {
    pub job: JobSpec,
    pub latency_cycles: Option<u64>,
    pub result: Result<Vec<Artifact>, JobError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    /// One entry per job, in configuration order.
    pub outcomes: Vec<JobOutcome>,
}

impl BatchResult {
    pub fn succeeded(&self) -> usize {
        self.outcomes.iter().filter(|o| o.result.is_ok()).count()
    }

    pub fn failed(&self) -> usize {
        self.outcomes.len() - self.succeeded()
    }
}

/// Files of one job, rendered in memory.
struct Rendered {
    latency: u64,
    files: Vec<(String, String)>,
}

fn render(job: &JobSpec) -> Result<Rendered, JobError> {
    let design = generate(&GenParams::new(job.kind, job.m, job.mode))?;
    let verilog = emit_design(&design)?;
    let vlog_path = format!("vlog/{}", verilog.file_name);
    let mut files = vec![(vlog_path.clone(), verilog.text)];
    if let Some(tb) = job.testbench {
        let art = emit_testbench(&design.top, TestbenchOptions::new(tb.vectors, tb.seed));
        files.push((format!("vlog/{}", art.file_name), art.text));
    }
    for s in &job.synth {
        let params = SynthParams {
            tool: s.tool,
            clock_ns: s.clock_ns,
            lib_path: s.lib.clone(),
            top_name: design.top.name.clone(),
            source_files: vec![vlog_path.clone()],
            report_dir: s.report_dir.clone().unwrap_or_else(|| DEFAULT_REPORT_DIR.to_string()),
        };
        let script = emit_synth_script(&params)?;
        files.push((format!("synth/{}", params.file_name()), script));
    }
    Ok(Rendered { latency: design.top.latency_cycles, files })
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn write_file(out_dir: &Path, rel: &str, text: &str) -> Result<(), JobError> {
    let path = out_dir.join(rel);
    let io = |e: std::io::Error| JobError::Io { path: path.display().to_string(), message: e.to_string() };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(&path, text).map_err(io)
}

/// Generates every job, writing artifacts under `out_dir`. A failing job is
/// recorded in its outcome and does not stop the others. Rendering runs in
/// parallel; files and the manifest are written in a fixed order.
pub fn run_batch(jobs: &[JobSpec], out_dir: &Path) -> Result<BatchResult, JobError> {
    let rendered: Vec<Result<Rendered, JobError>> = jobs.par_iter().map(render).collect();

    let mut outcomes = Vec::with_capacity(jobs.len());
    for (job, r) in jobs.iter().zip(rendered) {
        let outcome = match r {
            Ok(r) => {
                let mut artifacts = Vec::new();
                let mut result = Ok(());
                for (path, text) in &r.files {
                    if let Err(e) = write_file(out_dir, path, text) {
                        result = Err(e);
                        break;
                    }
                    artifacts.push(Artifact { path: path.clone(), sha256: digest(text) });
                }
                JobOutcome { job: job.clone(), latency_cycles: Some(r.latency), result: result.map(|()| artifacts) }
            }
            Err(e) => JobOutcome { job: job.clone(), latency_cycles: None, result: Err(e) },
        };
        outcomes.push(outcome);
    }

    let manifest = manifest_text(&outcomes);
    write_file(out_dir, MANIFEST, &manifest)?;
    Ok(BatchResult { outcomes })
}

/// Tab-separated lines `method m n mode latency_cycles path sha256`, sorted
/// by job identity then path. `n` is `-` for non-digitized jobs.
pub fn manifest_text(outcomes: &[JobOutcome]) -> String {
    let mut lines = Vec::new();
    for o in outcomes {
        let (Ok(artifacts), Some(latency)) = (&o.result, o.latency_cycles) else {
            continue;
        };
        for a in artifacts {
            lines.push((o.job.identity(), a.path.clone(), latency, a.sha256.clone()));
        }
    }
    lines.sort();
    let mut out = String::new();
    for ((method, inner, m, n, mode), path, latency, sha) in lines {
        let method = if inner.is_empty() { method.to_string() } else { format!("{method}/{inner}") };
        let n = if n == 0 { "-".to_string() } else { n.to_string() };
        let _ = writeln!(out, "{method}\t{m}\t{n}\t{mode}\t{latency}\t{path}\t{sha}");
    }
    out
}
