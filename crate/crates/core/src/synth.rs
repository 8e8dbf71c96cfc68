//! Tcl synthesis scripts for Cadence Genus and Synopsys Design Compiler,
//! plus a tolerant extractor for the numbers in their reports.

use std::fmt::{self, Write};
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

/// Environment variable consulted by scripts when no library path is given.
pub const LIB_ENV: &str = "POLYMUL_LIB";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SynthTool {
    Genus,
    Dc,
}

impl SynthTool {
    pub fn name(self) -> &'static str {
        match self {
            SynthTool::Genus => "genus",
            SynthTool::Dc => "dc",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "genus" => Some(SynthTool::Genus),
            "dc" => Some(SynthTool::Dc),
            _ => None,
        }
    }
}

impl fmt::Display for SynthTool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub tool: SynthTool,
    pub clock_ns: f64,
    pub lib_path: Option<String>,
    pub top_name: String,
    pub source_files: Vec<String>,
    pub report_dir: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("bad synthesis parameters: {0}")]
    BadParams(String),
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.clock_ns.is_finite() && self.clock_ns > 0.0) {
            return Err(SynthError::BadParams(format!("clock period must be positive, got {}", self.clock_ns)));
        }
        if self.top_name.is_empty() {
            return Err(SynthError::BadParams("empty top module name".into()));
        }
        if self.source_files.is_empty() {
            return Err(SynthError::BadParams("no source files".into()));
        }
        Ok(())
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.tcl", self.top_name, self.tool)
    }
}

/// Clock period as written in scripts: shortest round-trip form, always
/// with a decimal point.
pub fn format_ns(clock_ns: f64) -> String {
    let s = format!("{clock_ns:?}");
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{s}.0")
    }
}

fn tcl_list(items: &[String]) -> String {
    items.iter().map(|s| format!("{{{s}}}")).collect::<Vec<_>>().join(" ")
}

pub fn emit_synth_script(p: &SynthParams) -> Result<String, SynthError> {
    p.validate()?;
    let clock = format_ns(p.clock_ns);
    let freq = 1000.0 / p.clock_ns;
    let top = &p.top_name;
    let rpt = &p.report_dir;
    let lib = match &p.lib_path {
        Some(path) => format!("set LIB {{{path}}}"),
        None => format!("set LIB $::env({LIB_ENV})"),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# {} synthesis for {top}", p.tool);
    let _ = writeln!(s, "# clock {clock} ns ({freq:.1} MHz)\n");
    let _ = writeln!(s, "{lib}");
    let _ = writeln!(s, "set TOP {top}");
    let _ = writeln!(s, "set SOURCES [list {}]", tcl_list(&p.source_files));
    let _ = writeln!(s, "set CLOCK_NS {clock}");
    let _ = writeln!(s, "set REPORT_DIR {{{rpt}}}");
    s.push_str("file mkdir $REPORT_DIR\n\n");
    match p.tool {
        SynthTool::Genus => {
            s.push_str("# knobs: set_db syn_generic_effort medium; set_db syn_map_effort high\n");
            s.push_str("set_db library $LIB\n");
            s.push_str("read_hdl -v2001 $SOURCES\n");
            s.push_str("elaborate $TOP\n");
            s.push_str("current_design $TOP\n\n");
            s.push_str("create_clock -name clk -period $CLOCK_NS [get_ports clk]\n");
            s.push_str("set_input_delay 0 -clock clk [remove_from_collection [all_inputs] [get_ports clk]]\n");
            s.push_str("set_output_delay 0 -clock clk [all_outputs]\n\n");
            s.push_str("syn_generic\nsyn_map\nsyn_opt\n\n");
            s.push_str("report_area > $REPORT_DIR/${TOP}_genus_area.rpt\n");
            s.push_str("report_power > $REPORT_DIR/${TOP}_genus_power.rpt\n");
            s.push_str("report_timing > $REPORT_DIR/${TOP}_genus_timing.rpt\n");
            s.push_str("write_hdl > $REPORT_DIR/${TOP}_genus_netlist.v\n");
        }
        SynthTool::Dc => {
            s.push_str("# knobs: compile_ultra -retime; set_max_area 0\n");
            s.push_str("set target_library $LIB\n");
            s.push_str("set link_library [concat * $LIB]\n");
            s.push_str("analyze -format verilog $SOURCES\n");
            s.push_str("elaborate $TOP\n");
            s.push_str("current_design $TOP\n");
            s.push_str("link\n\n");
            s.push_str("create_clock -name clk -period $CLOCK_NS [get_ports clk]\n");
            s.push_str("set_input_delay 0 -clock clk [remove_from_collection [all_inputs] [get_ports clk]]\n");
            s.push_str("set_output_delay 0 -clock clk [all_outputs]\n\n");
            s.push_str("compile\n\n");
            s.push_str("report_area > $REPORT_DIR/${TOP}_dc_area.rpt\n");
            s.push_str("report_power > $REPORT_DIR/${TOP}_dc_power.rpt\n");
            s.push_str("report_timing > $REPORT_DIR/${TOP}_dc_timing.rpt\n");
            s.push_str("write -format verilog -hierarchy -output $REPORT_DIR/${TOP}_dc_netlist.v\n");
        }
    }
    s.push_str("exit\n");
    Ok(s)
}

/// Numbers pulled from synthesis reports. Missing values stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractedReport {
    /// Cell area in µm².
    pub area: Option<f64>,
    /// Total power in mW.
    pub power_mw: Option<f64>,
    /// Achieved frequency in MHz, from the clock period and worst slack.
    pub freq_mhz: Option<f64>,
}

fn report_patterns() -> &'static [Regex; 5] {
    static P: OnceLock<[Regex; 5]> = OnceLock::new();
    P.get_or_init(|| {
        [
            // DC: "Total cell area:   12345.6"
            Regex::new(r"(?i)total\s+cell\s+area\s*:?\s*([0-9.eE+-]+)").unwrap(),
            // Genus area table row: "<top>  <cells>  <cell area> ..."
            Regex::new(r"^\s*(\w+)\s+(\d+)\s+([0-9.]+)\s+[0-9.]+\s+[0-9.]+").unwrap(),
            // "Total Dynamic Power = 1.23 mW" / "Total  ...  1.23e-03" style totals.
            Regex::new(r"(?i)total(?:\s+dynamic)?\s+power\s*[=:]?\s*([0-9.eE+-]+)\s*(mW|uW|W|nW)?").unwrap(),
            Regex::new(r"(?i)slack\s*(?:\(\w+\))?\s*:?\s*(-?[0-9.]+)").unwrap(),
            Regex::new(r"(?i)clock\s+\w+\s+(?:\(rise edge\)\s+)?([0-9.]+)").unwrap(),
        ]
    })
}

fn to_mw(value: f64, unit: Option<&str>) -> f64 {
    match unit.map(str::to_ascii_lowercase).as_deref() {
        Some("w") => value * 1e3,
        Some("uw") => value * 1e-3,
        Some("nw") => value * 1e-6,
        _ => value,
    }
}

/// Best-effort scan of area, power and timing report text. Lines that do
/// not match a known shape are ignored.
pub fn extract_report(area_text: &str, power_text: &str, timing_text: &str, top: &str) -> ExtractedReport {
    let [dc_area, genus_area, power, slack, clock] = report_patterns();
    let mut r = ExtractedReport::default();
    for line in area_text.lines() {
        if let Some(c) = dc_area.captures(line) {
            r.area = c[1].parse().ok();
        } else if let Some(c) = genus_area.captures(line) {
            if &c[1] == top && r.area.is_none() {
                r.area = c[3].parse().ok();
            }
        }
    }
    for line in power_text.lines() {
        if let Some(c) = power.captures(line) {
            if let Ok(v) = c[1].parse::<f64>() {
                r.power_mw = Some(to_mw(v, c.get(2).map(|m| m.as_str())));
            }
        }
    }
    let mut period = None;
    let mut worst_slack = None;
    for line in timing_text.lines() {
        if period.is_none() {
            if let Some(c) = clock.captures(line) {
                period = c[1].parse::<f64>().ok().filter(|p| *p > 0.0);
            }
        }
        if let Some(c) = slack.captures(line) {
            if let Ok(v) = c[1].parse::<f64>() {
                worst_slack = Some(worst_slack.map_or(v, |w: f64| w.min(v)));
            }
        }
    }
    if let (Some(p), Some(s)) = (period, worst_slack) {
        let achieved = p - s;
        if achieved > 0.0 {
            r.freq_mhz = Some(1000.0 / achieved);
        }
    }
    r
}
