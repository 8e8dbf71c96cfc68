//! Latency and figure-of-merit computation over synthesis sweeps.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("frequency must be positive, got {0} MHz")]
    BadFrequency(f64),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: column `{column}`: cannot parse `{value}`")]
    BadCell { line: u64, column: String, value: String },
}

/// Latency in µs of `cycles` clock cycles at `freq_mhz`, repeated for
/// `digits` digits (1 for non-digitized designs).
pub fn latency_us(cycles: f64, freq_mhz: f64, digits: u64) -> Result<f64, AnalysisError> {
    if !(freq_mhz > 0.0 && freq_mhz.is_finite()) {
        return Err(AnalysisError::BadFrequency(freq_mhz));
    }
    Ok(cycles / freq_mhz * digits as f64)
}

fn positive(name: &str, v: f64) -> Result<f64, AnalysisError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(AnalysisError::BadInput(format!("{name} must be positive, got {v}")))
    }
}

pub fn fom_area(latency_us: f64, area: f64) -> Result<f64, AnalysisError> {
    Ok(1.0 / (positive("latency", latency_us)? * positive("area", area)?))
}

pub fn fom_power(latency_us: f64, power_mw: f64) -> Result<f64, AnalysisError> {
    Ok(1.0 / (positive("latency", latency_us)? * positive("power", power_mw)?))
}

/// One synthesized design point. `cycles` counts per-digit cycles for
/// digitized designs (`d` set) and total cycles otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub m: u64,
    pub n: Option<u64>,
    pub d: Option<u64>,
    pub freq_mhz: f64,
    pub cycles: u64,
    pub latency_us: f64,
    /// µm² for ASIC results, LUTs for FPGA results.
    pub area: f64,
    pub power_mw: f64,
    pub fom_area: f64,
    pub fom_power: f64,
}

impl ReportRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        m: u64,
        n: Option<u64>,
        d: Option<u64>,
        freq_mhz: f64,
        cycles: u64,
        area: f64,
        power_mw: f64,
    ) -> Result<Self, AnalysisError> {
        let latency = latency_us(cycles as f64, freq_mhz, d.unwrap_or(1))?;
        Ok(ReportRow {
            label: label.into(),
            m,
            n,
            d,
            freq_mhz,
            cycles,
            latency_us: latency,
            area,
            power_mw,
            fom_area: fom_area(latency, area)?,
            fom_power: fom_power(latency, power_mw)?,
        })
    }
}

/// Column names used when reading a sweep CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Columns {
    pub freq: String,
    pub cycles: String,
    pub area: String,
    pub power: String,
}

impl Default for Columns {
    fn default() -> Self {
        Columns { freq: "freq_mhz".into(), cycles: "cycles".into(), area: "area".into(), power: "power".into() }
    }
}

/// Reads sweep rows from CSV. Columns are located by header name; unknown
/// columns are ignored and lines starting with `#` are comments. `n` and
/// `d` may be absent or empty.
pub fn parse_rows(text: &str, columns: &Columns) -> Result<Vec<ReportRow>, AnalysisError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| AnalysisError::Csv(e.to_string()))?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let find = |name: &str| index.get(name).copied().ok_or_else(|| AnalysisError::MissingColumn(name.to_string()));
    let label = find("label")?;
    let m = find("m")?;
    let n = index.get("n").copied();
    let d = index.get("d").copied();
    let freq = find(&columns.freq)?;
    let cycles = find(&columns.cycles)?;
    let area = find(&columns.area)?;
    let power = find(&columns.power)?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| AnalysisError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(i).unwrap_or("");
        let bad = |i: usize| AnalysisError::BadCell {
            line,
            column: headers.get(i).unwrap_or("").to_string(),
            value: cell(i).to_string(),
        };
        let int = |i: usize| cell(i).parse::<u64>().map_err(|_| bad(i));
        let float = |i: usize| cell(i).parse::<f64>().map_err(|_| bad(i));
        let opt = |i: Option<usize>| match i.map(cell) {
            None | Some("") => Ok(None),
            Some(_) => int(i.unwrap()).map(Some),
        };
        rows.push(ReportRow::new(
            cell(label),
            int(m)?,
            opt(n)?,
            opt(d)?,
            float(freq)?,
            int(cycles)?,
            float(area)?,
            float(power)?,
        )?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<ReportRow>,
    pub argmax_area: usize,
    pub argmax_power: usize,
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Marks the rows with the highest area and power figures of merit. The
/// first row wins a tie.
pub fn sweep_report(rows: Vec<ReportRow>) -> Result<SweepReport, AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::BadInput("no rows".into()));
    }
    let argmax_area = argmax(rows.iter().map(|r| r.fom_area));
    let argmax_power = argmax(rows.iter().map(|r| r.fom_power));
    Ok(SweepReport { rows, argmax_area, argmax_power })
}

fn opt_str(v: Option<u64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "label,m,n,d,freq_mhz,cycles,area,power,latency_us,fom_area,fom_power,is_argmax_area,is_argmax_power\n",
        );
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:e},{:e},{},{}",
                r.label,
                r.m,
                opt_str(r.n),
                opt_str(r.d),
                r.freq_mhz,
                r.cycles,
                r.area,
                r.power_mw,
                r.latency_us,
                r.fom_area,
                r.fom_power,
                i == self.argmax_area,
                i == self.argmax_power
            );
        }
        out
    }

    /// Aligned text table; `*` marks the argmax rows.
    pub fn to_table(&self) -> String {
        let header = ["label", "m", "n", "d", "freq_mhz", "cycles", "latency_us", "area", "power", "fom_area", "fom_power"];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for (i, r) in self.rows.iter().enumerate() {
            let mark = |hit: bool| if hit { "*" } else { "" };
            cells.push(vec![
                r.label.clone(),
                r.m.to_string(),
                opt_str(r.n),
                opt_str(r.d),
                format!("{:.2}", r.freq_mhz),
                r.cycles.to_string(),
                format!("{:.3}", r.latency_us),
                format!("{:.1}", r.area),
                format!("{:.1}", r.power_mw),
                format!("{:.3e}{}", r.fom_area, mark(i == self.argmax_area)),
                format!("{:.3e}{}", r.fom_power, mark(i == self.argmax_power)),
            ]);
        }
        let widths: Vec<usize> =
            (0..header.len()).map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}
