//! XML job configuration.
//!
//! ```xml
//! <config version="1">
//!   <!-- one element per design to generate -->
//!   <job method="wrapper" width="1024" digit="64" inner="sbm" mode="integer">
//!     <synth tool="genus" clock_ns="3.5" lib="/libs/tech65.lib" report_dir="reports"/>
//!     <synth tool="dc" clock_ns="3.5"/>
//!     <testbench vectors="100" seed="1"/>
//!   </job>
//! </config>
//! ```
//!
//! `method` is one of `sbm`, `km2`/`karatsuba`, `tc3`/`toom3`,
//! `tc4`/`toom4` or `wrapper`/`digit_serial`; `digit` is required for the
//! wrapper and rejected otherwise, `inner` (default `sbm`) is only allowed
//! on the wrapper. `mode` is `integer` (default) or `gf2`. Width limits of
//! the generators are checked when the batch runs, not here.

use std::collections::HashSet;
use std::fmt::Write;

use thiserror::Error;

use crate::arch::{ArchKind, Method};
use crate::num::ArithMode;
use crate::synth::{format_ns, SynthTool};

pub const CONFIG_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub tool: SynthTool,
    pub clock_ns: f64,
    pub lib: Option<String>,
    pub report_dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestbenchSpec {
    pub vectors: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub kind: ArchKind,
    pub m: u32,
    pub mode: ArithMode,
    pub synth: Vec<SynthSpec>,
    pub testbench: Option<TestbenchSpec>,
}

impl JobSpec {
    pub fn new(kind: ArchKind, m: u32, mode: ArithMode) -> Self {
        JobSpec { kind, m, mode, synth: Vec::new(), testbench: None }
    }

    pub fn digit(&self) -> Option<u32> {
        match self.kind {
            ArchKind::DigitSerial { digit, .. } => Some(digit as u32),
            ArchKind::Plain(_) => None,
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self.kind {
            ArchKind::Plain(method) => method.short_name(),
            ArchKind::DigitSerial { .. } => "wrapper",
        }
    }

    /// (method, inner, m, n, mode): unique within one configuration.
    pub fn identity(&self) -> (&'static str, &'static str, u32, u32, ArithMode) {
        let inner = match self.kind {
            ArchKind::DigitSerial { inner, .. } => inner.short_name(),
            ArchKind::Plain(_) => "",
        };
        (self.method_name(), inner, self.m, self.digit().unwrap_or(0), self.mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{line}:{col}: malformed XML: {message}")]
    XmlSyntax { line: u32, col: u32, message: String },
    #[error("{line}:{col}: {message}")]
    SchemaViolation { line: u32, col: u32, message: String },
    #[error("{line}:{col}: Toom-Cook methods require integer mode")]
    ToomRequiresInteger { line: u32, col: u32 },
    #[error("{line}:{col}: digit size {n} is not in 1..={m}")]
    BadDigit { line: u32, col: u32, n: u64, m: u32 },
}

struct Cx<'a> {
    doc: &'a roxmltree::Document<'a>,
}

impl Cx<'_> {
    fn pos(&self, node: roxmltree::Node) -> (u32, u32) {
        let p = self.doc.text_pos_at(node.range().start);
        (p.row, p.col)
    }

    fn schema(&self, node: roxmltree::Node, message: impl Into<String>) -> ConfigError {
        let (line, col) = self.pos(node);
        ConfigError::SchemaViolation { line, col, message: message.into() }
    }

    fn only_attrs(&self, node: roxmltree::Node, allowed: &[&str]) -> Result<(), ConfigError> {
        for a in node.attributes() {
            if !allowed.contains(&a.name()) {
                return Err(self.schema(node, format!("unknown attribute `{}` on <{}>", a.name(), node.tag_name().name())));
            }
        }
        Ok(())
    }

    fn required<'n>(&self, node: roxmltree::Node<'n, 'n>, name: &str) -> Result<&'n str, ConfigError> {
        node.attribute(name)
            .ok_or_else(|| self.schema(node, format!("<{}> needs attribute `{name}`", node.tag_name().name())))
    }

    fn number<T: std::str::FromStr>(&self, node: roxmltree::Node, name: &str, text: &str) -> Result<T, ConfigError> {
        text.trim().parse().map_err(|_| self.schema(node, format!("attribute `{name}`: `{text}` is not a valid number")))
    }

    fn elements<'n>(&self, node: roxmltree::Node<'n, 'n>) -> Result<Vec<roxmltree::Node<'n, 'n>>, ConfigError> {
        let mut out = Vec::new();
        for child in node.children() {
            if child.is_element() {
                out.push(child);
            } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
                return Err(self.schema(child, "unexpected text"));
            }
        }
        Ok(out)
    }
}

pub fn parse_config(xml: &str) -> Result<Vec<JobSpec>, ConfigError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| {
        let p = e.pos();
        ConfigError::XmlSyntax { line: p.row, col: p.col, message: e.to_string() }
    })?;
    let cx = Cx { doc: &doc };
    let root = doc.root_element();
    if root.tag_name().name() != "config" {
        return Err(cx.schema(root, format!("root element must be <config>, found <{}>", root.tag_name().name())));
    }
    cx.only_attrs(root, &["version"])?;
    if let Some(v) = root.attribute("version") {
        if v != CONFIG_VERSION {
            return Err(cx.schema(root, format!("unsupported config version `{v}`")));
        }
    }

    let mut jobs = Vec::new();
    let mut seen = HashSet::new();
    for node in cx.elements(root)? {
        if node.tag_name().name() != "job" {
            return Err(cx.schema(node, format!("unknown element <{}>", node.tag_name().name())));
        }
        let job = parse_job(&cx, node)?;
        if !seen.insert(job.identity()) {
            return Err(cx.schema(node, "duplicate job (same method, width, digit and mode)"));
        }
        jobs.push(job);
    }
    Ok(jobs)
}

fn parse_job(cx: &Cx, node: roxmltree::Node) -> Result<JobSpec, ConfigError> {
    cx.only_attrs(node, &["method", "width", "mode", "digit", "inner"])?;
    let method_text = cx.required(node, "method")?;
    let m: u32 = cx.number(node, "width", cx.required(node, "width")?)?;
    if m == 0 {
        return Err(cx.schema(node, "width must be positive"));
    }
    let mode = match node.attribute("mode") {
        None => ArithMode::Integer,
        Some(t) => ArithMode::parse(t).ok_or_else(|| cx.schema(node, format!("unknown mode `{t}`")))?,
    };
    let wrapper = matches!(method_text.to_ascii_lowercase().as_str(), "wrapper" | "digit_serial" | "digitserial");
    let kind = if wrapper {
        let n: u64 = cx.number(node, "digit", cx.required(node, "digit")?)?;
        let inner = match node.attribute("inner") {
            None => Method::Sbm,
            Some(t) => Method::parse(t).ok_or_else(|| cx.schema(node, format!("unknown inner method `{t}`")))?,
        };
        if n == 0 || n > u64::from(m) {
            let (line, col) = cx.pos(node);
            return Err(ConfigError::BadDigit { line, col, n, m });
        }
        ArchKind::DigitSerial { digit: n, inner }
    } else {
        let method =
            Method::parse(method_text).ok_or_else(|| cx.schema(node, format!("unknown method `{method_text}`")))?;
        for attr in ["digit", "inner"] {
            if node.attribute(attr).is_some() {
                return Err(cx.schema(node, format!("`{attr}` is only allowed with method=\"wrapper\"")));
            }
        }
        ArchKind::Plain(method)
    };
    if !kind.supports(mode) {
        let (line, col) = cx.pos(node);
        return Err(ConfigError::ToomRequiresInteger { line, col });
    }

    let mut job = JobSpec::new(kind, m, mode);
    for child in cx.elements(node)? {
        match child.tag_name().name() {
            "synth" => {
                cx.only_attrs(child, &["tool", "clock_ns", "lib", "report_dir"])?;
                let tool_text = cx.required(child, "tool")?;
                let tool = SynthTool::parse(tool_text)
                    .ok_or_else(|| cx.schema(child, format!("unknown synthesis tool `{tool_text}`")))?;
                let clock_ns: f64 = cx.number(child, "clock_ns", cx.required(child, "clock_ns")?)?;
                if !(clock_ns > 0.0 && clock_ns.is_finite()) {
                    return Err(cx.schema(child, "clock_ns must be positive"));
                }
                if job.synth.iter().any(|s| s.tool == tool) {
                    return Err(cx.schema(child, format!("second <synth> for tool `{tool}`")));
                }
                job.synth.push(SynthSpec {
                    tool,
                    clock_ns,
                    lib: child.attribute("lib").map(String::from),
                    report_dir: child.attribute("report_dir").map(String::from),
                });
            }
            "testbench" => {
                cx.only_attrs(child, &["vectors", "seed"])?;
                if job.testbench.is_some() {
                    return Err(cx.schema(child, "second <testbench>"));
                }
                let vectors = match child.attribute("vectors") {
                    Some(t) => cx.number(child, "vectors", t)?,
                    None => 100,
                };
                let seed = match child.attribute("seed") {
                    Some(t) => cx.number(child, "seed", t)?,
                    None => 1,
                };
                job.testbench = Some(TestbenchSpec { vectors, seed });
            }
            other => return Err(cx.schema(child, format!("unknown element <{other}>"))),
        }
    }
    Ok(job)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Writes `jobs` in the schema read by [`parse_config`], with every
/// attribute explicit.
pub fn serialize(jobs: &[JobSpec]) -> String {
    let mut out = format!("<config version=\"{CONFIG_VERSION}\">\n");
    for job in jobs {
        let _ = write!(out, "  <job method=\"{}\" width=\"{}\"", job.method_name(), job.m);
        if let ArchKind::DigitSerial { digit, inner } = job.kind {
            let _ = write!(out, " digit=\"{digit}\" inner=\"{}\"", inner.short_name());
        }
        let _ = write!(out, " mode=\"{}\"", job.mode.name());
        if job.synth.is_empty() && job.testbench.is_none() {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        for s in &job.synth {
            let _ = write!(out, "    <synth tool=\"{}\" clock_ns=\"{}\"", s.tool, format_ns(s.clock_ns));
            if let Some(lib) = &s.lib {
                let _ = write!(out, " lib=\"{}\"", escape(lib));
            }
            if let Some(dir) = &s.report_dir {
                let _ = write!(out, " report_dir=\"{}\"", escape(dir));
            }
            out.push_str("/>\n");
        }
        if let Some(tb) = job.testbench {
            let _ = writeln!(out, "    <testbench vectors=\"{}\" seed=\"{}\"/>", tb.vectors, tb.seed);
        }
        out.push_str("  </job>\n");
    }
    out.push_str("</config>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config() {
        let jobs = parse_config(r#"<config><job method="sbm" width="192"/></config>"#).unwrap();
        assert_eq!(jobs, vec![JobSpec::new(ArchKind::SBM, 192, ArithMode::Integer)]);
    }

    #[test]
    fn wrapper_job() {
        let jobs = parse_config(r#"<config><job method="wrapper" width="1024" digit="64" inner="sbm"/></config>"#).unwrap();
        assert_eq!(jobs[0].kind, ArchKind::DigitSerial { digit: 64, inner: Method::Sbm });
        assert_eq!(jobs[0].m, 1024);
    }

    #[test]
    fn toom_in_gf2_is_rejected() {
        let err = parse_config("<config>\n  <job method=\"toom3\" width=\"192\" mode=\"gf2\"/>\n</config>").unwrap_err();
        assert_eq!(err, ConfigError::ToomRequiresInteger { line: 2, col: 3 });
    }

    #[test]
    fn errors_carry_locations() {
        assert!(matches!(parse_config("<config><job"), Err(ConfigError::XmlSyntax { .. })));
        let err = parse_config("<config>\n<jobs/>\n</config>").unwrap_err();
        assert!(matches!(err, ConfigError::SchemaViolation { line: 2, col: 1, .. }), "{err:?}");
        assert!(matches!(
            parse_config(r#"<config><job method="sbm" width="8" colour="red"/></config>"#),
            Err(ConfigError::SchemaViolation { .. })
        ));
        assert!(matches!(
            parse_config(r#"<config><job method="wrapper" width="8" digit="9"/></config>"#),
            Err(ConfigError::BadDigit { n: 9, m: 8, .. })
        ));
        assert!(matches!(
            parse_config(r#"<config><job method="sbm" width="8" digit="2"/></config>"#),
            Err(ConfigError::SchemaViolation { .. })
        ));
        assert!(matches!(
            parse_config(r#"<config><job method="sbm" width="8"/><job method="sbm" width="8"/></config>"#),
            Err(ConfigError::SchemaViolation { .. })
        ));
        assert!(matches!(
            parse_config(r#"<config><job method="sbm" width="8"><synth tool="genus" clock_ns="-1"/></job></config>"#),
            Err(ConfigError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn too_narrow_width_is_left_to_the_generator() {
        let jobs = parse_config(r#"<config><job method="sbm" width="3"/></config>"#).unwrap();
        assert_eq!(jobs[0].m, 3);
    }

    fn arb_job() -> impl Strategy<Value = JobSpec> {
        let kind = prop_oneof![
            Just(ArchKind::SBM),
            Just(ArchKind::KARATSUBA2),
            Just(ArchKind::TOOM3),
            Just(ArchKind::TOOM4),
            (1u64..8, 0usize..4).prop_map(|(n, i)| ArchKind::DigitSerial { digit: n, inner: Method::ALL[i] }),
        ];
        let synth = (prop::bool::ANY, 0.1f64..20.0, prop::option::of("[a-z/&<>\" ]{1,12}"), prop::option::of("[a-z_]{1,8}"))
            .prop_map(|(dc, clock_ns, lib, report_dir)| SynthSpec {
                tool: if dc { SynthTool::Dc } else { SynthTool::Genus },
                clock_ns,
                lib,
                report_dir,
            });
        (kind, 8u32..600, prop::bool::ANY, prop::option::of(synth), prop::option::of((0usize..500, any::<u64>())))
            .prop_map(|(kind, m, gf2, synth, tb)| {
                let mode = if gf2 && kind.supports(ArithMode::CarryLess) { ArithMode::CarryLess } else { ArithMode::Integer };
                JobSpec {
                    kind,
                    m,
                    mode,
                    synth: synth.into_iter().collect(),
                    testbench: tb.map(|(vectors, seed)| TestbenchSpec { vectors, seed }),
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_round_trips(jobs in prop::collection::vec(arb_job(), 0..6)) {
            let mut unique = Vec::new();
            let mut seen = HashSet::new();
            for j in jobs {
                if seen.insert(j.identity()) {
                    unique.push(j);
                }
            }
            prop_assert_eq!(parse_config(&serialize(&unique)).unwrap(), unique);
        }
    }
}
