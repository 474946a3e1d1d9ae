//! `(k, c)` parameter sweeps over the two example families.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mech::{
    circulatory_verdicts, example_charged_particle, example_circulatory3, gyro_reduced_polynomial,
    gyroscopic_verdict_thm4,
};
use crate::oracle::verify_instability;
use crate::polycrit::{prop2_verdicts, CriterionVerdict};

pub const DEFAULT_RANGE: (f64, f64) = (-3.0, 3.0);
pub const DEFAULT_RESOLUTION: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Circulatory3,
    ChargedParticle,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Circulatory3 => "circulatory3",
            Family::ChargedParticle => "charged-particle",
        }
    }

    /// Criterion identifiers a sweep of this family can evaluate.
    pub fn available_criteria(self) -> &'static [&'static str] {
        match self {
            Family::Circulatory3 => &["thm2-i", "thm2-ii", "thm2-iii", "rmk-ii-alt", "cor-i", "cor-ii"],
            Family::ChargedParticle => &["thm4", "prop2-i", "prop2-ii", "prop2-iii"],
        }
    }

    pub fn default_criteria(self) -> &'static [&'static str] {
        match self {
            Family::Circulatory3 => &["thm2-i", "thm2-ii", "thm2-iii"],
            Family::ChargedParticle => &["thm4", "prop2-ii", "prop2-iii"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circulatory3" => Ok(Family::Circulatory3),
            "charged-particle" => Ok(Family::ChargedParticle),
            other => Err(Error::input(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub k_min: f64,
    pub k_max: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub nk: usize,
    pub nc: usize,
    pub criteria: Vec<String>,
    pub oracle: bool,
}

impl SweepConfig {
    /// `[−3, 3]²` at 401 × 401 with the family's default criteria.
    pub fn new(family: Family) -> Self {
        Self {
            family,
            k_min: DEFAULT_RANGE.0,
            k_max: DEFAULT_RANGE.1,
            c_min: DEFAULT_RANGE.0,
            c_max: DEFAULT_RANGE.1,
            nk: DEFAULT_RESOLUTION,
            nc: DEFAULT_RESOLUTION,
            criteria: family.default_criteria().iter().map(|s| s.to_string()).collect(),
            oracle: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.k_min, self.k_max, self.c_min, self.c_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.k_min >= self.k_max || self.c_min >= self.c_max {
            return Err(Error::input("sweep ranges must be finite with min < max"));
        }
        if self.nk < 2 || self.nc < 2 {
            return Err(Error::input("sweep grids need at least 2 nodes per axis"));
        }
        if self.criteria.is_empty() {
            return Err(Error::input("no criteria requested"));
        }
        let available = self.family.available_criteria();
        for id in &self.criteria {
            if !available.contains(&id.as_str()) {
                return Err(Error::input(format!(
                    "criterion {id:?} is not available for {} (choose from {})",
                    self.family,
                    available.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// `i`-th node of the k axis. Node `2i` of a grid with `2n − 1` nodes
    /// equals node `i` of a grid with `n` nodes bit for bit.
    pub fn k_at(&self, i: usize) -> f64 {
        axis_node(self.k_min, self.k_max, self.nk, i)
    }

    pub fn c_at(&self, j: usize) -> f64 {
        axis_node(self.c_min, self.c_max, self.nc, j)
    }
}

fn axis_node(min: f64, max: f64, count: usize, i: usize) -> f64 {
    min + ((max - min) * i as f64) / (count - 1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub k: f64,
    pub c: f64,
    /// One flag per requested criterion, in config order.
    pub fired: Vec<bool>,
    pub margins: Vec<f64>,
    pub oracle_unstable: Option<bool>,
    /// Parameter values the example excludes (`k = 0` or `c = 0` for the
    /// charged particle).
    pub excluded: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// Row-major by `(k index, c index)`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.config.nc + j]
    }

    /// Number of cells where criterion `id` fired.
    pub fn fired_count(&self, id: &str) -> usize {
        match self.config.criteria.iter().position(|c| c == id) {
            Some(p) => self.cells.iter().filter(|c| c.fired[p]).count(),
            None => 0,
        }
    }
}

fn pick(verdicts: &[CriterionVerdict], ids: &[String]) -> (Vec<bool>, Vec<f64>) {
    ids.iter()
        .map(|id| {
            verdicts
                .iter()
                .find(|v| &v.id == id)
                .map(|v| (v.fired, v.margin))
                .unwrap_or((false, f64::NAN))
        })
        .unzip()
}

fn evaluate_cell(cfg: &SweepConfig, k: f64, c: f64) -> SweepCell {
    let mut error = None;
    let (verdicts, excluded, spectrum) = match cfg.family {
        Family::Circulatory3 => {
            let sys = example_circulatory3(k, c);
            let spectrum = cfg.oracle.then(|| verify_instability(&sys));
            (circulatory_verdicts(&sys).to_vec(), false, spectrum)
        }
        Family::ChargedParticle => {
            let sys = example_charged_particle(k, c);
            let mut verdicts = vec![gyroscopic_verdict_thm4(&sys)];
            match gyro_reduced_polynomial(&sys).and_then(|q| prop2_verdicts(&q)) {
                Ok(v) => verdicts.extend(v),
                Err(e) => error = Some(e.to_string()),
            }
            let spectrum = cfg.oracle.then(|| verify_instability(&sys));
            (verdicts, k == 0.0 || c == 0.0, spectrum)
        }
    };
    let oracle_unstable = match spectrum {
        None => None,
        Some(Ok(s)) => Some(s.unstable()),
        Some(Err(e)) => {
            error.get_or_insert_with(|| e.to_string());
            None
        }
    };
    let (fired, margins) = pick(&verdicts, &cfg.criteria);
    SweepCell {
        k,
        c,
        fired,
        margins,
        oracle_unstable,
        excluded,
        error,
    }
}

/// Evaluates every grid node on the global rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let cells = (0..cfg.nk * cfg.nc)
        .into_par_iter()
        .map(|idx| evaluate_cell(cfg, cfg.k_at(idx / cfg.nc), cfg.c_at(idx % cfg.nc)))
        .collect();
    Ok(SweepResult {
        config: cfg.clone(),
        cells,
    })
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::input(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

/// 17 significant digits.
fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_column(id: &str) -> String {
    id.replace('-', "_")
}

pub fn csv_header(cfg: &SweepConfig) -> String {
    let mut cols = vec!["k".to_string(), "c".to_string()];
    cols.extend(cfg.criteria.iter().map(|id| csv_column(id)));
    if cfg.oracle {
        cols.push("oracle_unstable".into());
    }
    cols.join(",")
}

pub fn emit_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    let mut buf = String::with_capacity(result.cells.len() * 48);
    buf.push_str(&csv_header(&result.config));
    buf.push('\n');
    for cell in &result.cells {
        buf.push_str(&format_number(cell.k));
        buf.push(',');
        buf.push_str(&format_number(cell.c));
        for &f in &cell.fired {
            buf.push_str(if f { ",1" } else { ",0" });
        }
        if result.config.oracle {
            buf.push_str(match cell.oracle_unstable {
                Some(true) => ",1",
                Some(false) => ",0",
                None => ",NA",
            });
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub k: f64,
    pub c: f64,
    pub fired: Vec<bool>,
    pub oracle_unstable: Option<bool>,
}

/// Reads back a file written by [`emit_csv`].
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<CsvRow>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::input("empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    if header.len() < 3 || header[0] != "k" || header[1] != "c" {
        return Err(Error::input("CSV header must start with k,c and name a criterion"));
    }
    let has_oracle = header.last().map(String::as_str) == Some("oracle_unstable");
    let n_criteria = header.len() - 2 - usize::from(has_oracle);
    let flag = |s: &str| match s {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::input(format!("bad flag {other:?}"))),
    };
    let number = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::input(format!("bad number {s:?}")))
    };
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::input(format!("row has {} fields, header {}", fields.len(), header.len())));
        }
        let fired = fields[2..2 + n_criteria]
            .iter()
            .map(|s| flag(s))
            .collect::<Result<Vec<_>>>()?;
        let oracle_unstable = if has_oracle {
            match fields[fields.len() - 1] {
                "NA" => None,
                s => Some(flag(s)?),
            }
        } else {
            None
        };
        rows.push(CsvRow {
            k: number(fields[0])?,
            c: number(fields[1])?,
            fired,
            oracle_unstable,
        });
    }
    Ok((header, rows))
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 620.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 7;

struct Frame {
    cfg: SweepConfig,
    plot_w: f64,
    plot_h: f64,
}

impl Frame {
    fn new(cfg: &SweepConfig) -> Self {
        Self {
            cfg: cfg.clone(),
            plot_w: WIDTH - LEFT - RIGHT,
            plot_h: HEIGHT - TOP - BOTTOM,
        }
    }

    fn cell_w(&self) -> f64 {
        self.plot_w / self.cfg.nk as f64
    }

    fn cell_h(&self) -> f64 {
        self.plot_h / self.cfg.nc as f64
    }

    // Node i occupies the i-th of nk equal columns; c grows upwards.
    fn x_of_node(&self, i: usize) -> f64 {
        LEFT + i as f64 * self.cell_w()
    }

    fn y_of_node_top(&self, j: usize) -> f64 {
        TOP + self.plot_h - (j + 1) as f64 * self.cell_h()
    }

    fn x_of_value(&self, k: f64) -> f64 {
        let h = (self.cfg.k_max - self.cfg.k_min) / (self.cfg.nk - 1) as f64;
        LEFT + (k - self.cfg.k_min + h / 2.0) / (h * self.cfg.nk as f64) * self.plot_w
    }

    fn y_of_value(&self, c: f64) -> f64 {
        let h = (self.cfg.c_max - self.cfg.c_min) / (self.cfg.nc - 1) as f64;
        TOP + self.plot_h - (c - self.cfg.c_min + h / 2.0) / (h * self.cfg.nc as f64) * self.plot_h
    }
}

/// Vertical runs of consecutive selected cells, one `<rect>` each.
fn runs(result: &SweepResult, frame: &Frame, select: impl Fn(&SweepCell) -> bool, attrs: &str) -> String {
    let cfg = &result.config;
    let mut s = String::new();
    for i in 0..cfg.nk {
        let mut j = 0;
        while j < cfg.nc {
            if !select(result.cell(i, j)) {
                j += 1;
                continue;
            }
            let start = j;
            while j < cfg.nc && select(result.cell(i, j)) {
                j += 1;
            }
            let top = frame.y_of_node_top(j - 1);
            let h = (j - start) as f64 * frame.cell_h();
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {attrs}/>"#,
                frame.x_of_node(i),
                top,
                frame.cell_w(),
                h
            );
        }
    }
    s
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn render_svg(result: &SweepResult) -> String {
    let cfg = &result.config;
    let frame = Frame::new(cfg);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{} instability regions</text>"#,
        LEFT + frame.plot_w / 2.0,
        cfg.family
    );

    for (p, id) in cfg.criteria.iter().enumerate() {
        let color = PALETTE[p % PALETTE.len()];
        let _ = writeln!(s, r#"<g id="layer-{id}">"#);
        s.push_str(&runs(
            result,
            &frame,
            |cell| cell.fired[p],
            &format!(r#"fill="{color}" fill-opacity="0.35" stroke="none""#),
        ));
        s.push_str("</g>\n");
    }
    if cfg.oracle {
        s.push_str("<g id=\"layer-oracle\">\n");
        s.push_str(&runs(
            result,
            &frame,
            |cell| cell.oracle_unstable == Some(true),
            r##"fill="none" stroke="#000000" stroke-opacity="0.25" stroke-width="0.5""##,
        ));
        s.push_str("</g>\n");
    }

    // axes
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#,
        frame.plot_w, frame.plot_h
    );
    let bottom = TOP + frame.plot_h;
    for t in 0..TICKS {
        let frac = t as f64 / (TICKS - 1) as f64;
        let k = cfg.k_min + (cfg.k_max - cfg.k_min) * frac;
        let x = frame.x_of_value(k);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{bottom:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 19.0,
            tick_label(k)
        );
        let c = cfg.c_min + (cfg.c_max - cfg.c_min) * frac;
        let y = frame.y_of_value(c);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(c)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">k</text>"#,
        LEFT + frame.plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">c</text>"#,
        TOP + frame.plot_h / 2.0,
        TOP + frame.plot_h / 2.0
    );

    // legend
    let lx = LEFT + frame.plot_w + 20.0;
    s.push_str("<g id=\"legend\">\n");
    for (p, id) in cfg.criteria.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * p as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.1}" y="{y:.1}" width="16" height="12" fill="{}" fill-opacity="0.35" stroke="black" stroke-width="0.5"/><text x="{:.1}" y="{:.1}">{id}</text>"#,
            PALETTE[p % PALETTE.len()],
            lx + 24.0,
            y + 10.0
        );
    }
    if cfg.oracle {
        let y = TOP + 10.0 + 22.0 * cfg.criteria.len() as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.1}" y="{y:.1}" width="16" height="12" fill="none" stroke="black" stroke-opacity="0.5"/><text x="{:.1}" y="{:.1}">oracle unstable</text>"#,
            lx + 24.0,
            y + 10.0
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn emit_svg<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    out.write_all(render_svg(result).as_bytes())?;
    out.flush()?;
    Ok(())
}
