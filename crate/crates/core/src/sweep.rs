//! Grid sweeps over channel parameters.
//!
//! Three layouts are supported:
//!
//! * `cube3d`: `(λ1, λ2, λ3)` on a cube at fixed `t3`, λ1 outermost;
//! * `phase_covariant_2d`: `(λ1, λ3)` with `λ2 = λ1` at fixed `t3`;
//! * `family_1d`: the scalar parameter of one named family.
//!
//! Every node is classified, non-CP nodes included (with `cp = false`). Row
//! order is canonical and independent of the execution strategy.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::families::FamilyKind;
use crate::grid::{linspace, node};
use crate::nonlocality::{classify, Classification};
use crate::parallel::Execution;

/// Column order of the CSV interchange format.
pub const CSV_HEADER: [&str; 10] = [
    "lambda1",
    "lambda2",
    "lambda3",
    "t3",
    "cp",
    "ch1",
    "ch2",
    "paper_generating",
    "breaks_chsh_direct",
    "horodecki_m",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Cube3d,
    PhaseCovariant2d,
    Family1d,
}

impl SweepMode {
    pub fn axes(self) -> usize {
        match self {
            SweepMode::Cube3d => 3,
            SweepMode::PhaseCovariant2d => 2,
            SweepMode::Family1d => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Cube3d => "cube3d",
            SweepMode::PhaseCovariant2d => "phase_covariant_2d",
            SweepMode::Family1d => "family_1d",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cube3d" | "cube" => Ok(SweepMode::Cube3d),
            "phase_covariant_2d" | "pc2d" => Ok(SweepMode::PhaseCovariant2d),
            "family_1d" | "family" => Ok(SweepMode::Family1d),
            other => Err(Error::InvalidParameter(format!("unknown sweep mode '{other}'"))),
        }
    }
}

/// What to sweep. Empty `bounds` means the default box for the mode:
/// `[-1, 1]` per axis, or the family's own domain for `family_1d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRequest {
    pub mode: SweepMode,
    pub t3: f64,
    pub resolution: usize,
    #[serde(default)]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub family: Option<FamilyKind>,
    #[serde(default)]
    pub p: f64,
    #[serde(default = "default_axis")]
    pub axis: u8,
}

fn default_axis() -> u8 {
    3
}

impl SweepRequest {
    pub fn cube3d(t3: f64, resolution: usize) -> Self {
        Self {
            mode: SweepMode::Cube3d,
            t3,
            resolution,
            bounds: Vec::new(),
            family: None,
            p: 0.0,
            axis: 3,
        }
    }

    pub fn phase_covariant_2d(t3: f64, resolution: usize) -> Self {
        Self {
            mode: SweepMode::PhaseCovariant2d,
            ..Self::cube3d(t3, resolution)
        }
    }

    pub fn family_1d(kind: FamilyKind, resolution: usize, p: f64, axis: u8) -> Self {
        Self {
            mode: SweepMode::Family1d,
            family: Some(kind),
            p,
            axis,
            ..Self::cube3d(0.0, resolution)
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<[f64; 2]>) -> Self {
        self.bounds = bounds;
        self
    }

    /// Grid node count.
    pub fn node_count(&self) -> usize {
        self.resolution.pow(self.mode.axes() as u32)
    }

    fn resolved_bounds(&self) -> Result<Vec<[f64; 2]>> {
        let axes = self.mode.axes();
        if self.bounds.is_empty() {
            let default = match (self.mode, self.family) {
                (SweepMode::Family1d, Some(kind)) => {
                    let (lo, hi) = kind.lambda_domain();
                    [lo, hi]
                }
                _ => [-1.0, 1.0],
            };
            return Ok(vec![default; axes]);
        }
        if self.bounds.len() != axes {
            return Err(Error::InvalidParameter(format!(
                "{} needs {axes} bound pairs, got {}",
                self.mode,
                self.bounds.len()
            )));
        }
        for &[lo, hi] in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && -1.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "bounds [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1"
                )));
            }
        }
        Ok(self.bounds.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if !self.t3.is_finite() {
            return Err(Error::InvalidParameter("t3 must be finite".into()));
        }
        if self.mode == SweepMode::Family1d && self.family.is_none() {
            return Err(Error::InvalidParameter("family_1d sweep needs a family".into()));
        }
        self.resolved_bounds().map(|_| ())
    }
}

/// One classified grid node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub t3: f64,
    pub cp: bool,
    pub ch1: bool,
    pub ch2: bool,
    pub paper_generating: bool,
    pub breaks_chsh_direct: bool,
    pub horodecki_m: f64,
}

impl SweepRow {
    pub fn new(ch: &QubitChannel, c: &Classification) -> Self {
        let [lambda1, lambda2, lambda3] = ch.lambda();
        Self {
            lambda1,
            lambda2,
            lambda3,
            t3: ch.t()[2],
            cp: c.cp,
            ch1: c.ch1,
            ch2: c.ch2,
            paper_generating: c.paper_generating,
            breaks_chsh_direct: c.breaks_chsh_direct,
            horodecki_m: c.horodecki_m,
        }
    }

    pub fn is_discrepant(&self) -> bool {
        self.cp && self.paper_generating != self.breaks_chsh_direct
    }

    /// The five boolean columns in CSV order.
    pub fn flags(&self) -> [bool; 5] {
        [self.cp, self.ch1, self.ch2, self.paper_generating, self.breaks_chsh_direct]
    }
}

/// A validated request with its axis grids.
#[derive(Clone, Debug)]
pub struct Sweep {
    req: SweepRequest,
    axes: Vec<Vec<f64>>,
}

impl Sweep {
    pub fn new(req: &SweepRequest) -> Result<Self> {
        req.validate()?;
        let axes = req
            .resolved_bounds()?
            .into_iter()
            .map(|[lo, hi]| linspace(lo, hi, req.resolution))
            .collect();
        let sweep = Self { req: req.clone(), axes };
        if let (SweepMode::Family1d, Some(kind)) = (req.mode, req.family) {
            // reject out-of-domain bounds or p up front
            for &l in [sweep.axes[0][0], *sweep.axes[0].last().unwrap()].iter() {
                kind.spec(l, req.p, req.axis).channel()?;
            }
        }
        Ok(sweep)
    }

    pub fn request(&self) -> &SweepRequest {
        &self.req
    }

    pub fn len(&self) -> usize {
        self.req.node_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Channel at canonical index `idx` (λ1 outermost, λ3 innermost).
    pub fn channel_at(&self, idx: usize) -> Result<QubitChannel> {
        if idx >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                limit: self.len(),
            });
        }
        let res = self.req.resolution;
        match self.req.mode {
            SweepMode::Cube3d => {
                let (i, j, k) = (idx / (res * res), (idx / res) % res, idx % res);
                QubitChannel::diagonal([self.axes[0][i], self.axes[1][j], self.axes[2][k]], self.req.t3)
            }
            SweepMode::PhaseCovariant2d => {
                let l1 = self.axes[0][idx / res];
                let l3 = self.axes[1][idx % res];
                QubitChannel::diagonal([l1, l1, l3], self.req.t3)
            }
            SweepMode::Family1d => {
                let kind = self.req.family.expect("validated");
                kind.spec(self.axes[0][idx], self.req.p, self.req.axis).channel()
            }
        }
    }

    pub fn row_at(&self, idx: usize) -> Result<SweepRow> {
        let ch = self.channel_at(idx)?;
        Ok(SweepRow::new(&ch, &classify(&ch)?))
    }

    /// Every row in canonical order.
    pub fn rows(&self, exec: Execution) -> Result<Vec<SweepRow>> {
        exec.try_map(self.len(), |i| self.row_at(i))
    }

    /// Rows satisfying `keep`, in canonical order.
    pub fn rows_where<P>(&self, exec: Execution, keep: P) -> Result<Vec<SweepRow>>
    where
        P: Fn(&SweepRow) -> bool + Sync + Send,
    {
        exec.try_filter_map(self.len(), |i| {
            let row = self.row_at(i)?;
            Ok(keep(&row).then_some(row))
        })
    }

    /// Region counts without materializing the rows.
    pub fn summary(&self, exec: Execution) -> Result<RegionSummary> {
        let counts = exec.try_fold(
            self.len(),
            |i| self.row_at(i),
            |mut acc: RegionCounts, row| {
                acc.add(&row);
                acc
            },
            RegionCounts::merge,
        )?;
        counts.finish()
    }
}

/// Classifies every node of `req` in canonical order.
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<SweepRow>> {
    Sweep::new(req)?.rows(Execution::default())
}

/// Running counts behind [`RegionSummary`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegionCounts {
    pub rows: usize,
    pub cp: usize,
    pub ch1: usize,
    pub ch2: usize,
    pub cp_generating: usize,
    pub cp_breaks_direct: usize,
    pub discrepancy: usize,
}

impl RegionCounts {
    pub fn add(&mut self, row: &SweepRow) {
        self.rows += 1;
        self.ch1 += row.ch1 as usize;
        self.ch2 += row.ch2 as usize;
        if row.cp {
            self.cp += 1;
            self.cp_generating += row.paper_generating as usize;
            self.cp_breaks_direct += row.breaks_chsh_direct as usize;
            self.discrepancy += (row.paper_generating != row.breaks_chsh_direct) as usize;
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            rows: self.rows + other.rows,
            cp: self.cp + other.cp,
            ch1: self.ch1 + other.ch1,
            ch2: self.ch2 + other.ch2,
            cp_generating: self.cp_generating + other.cp_generating,
            cp_breaks_direct: self.cp_breaks_direct + other.cp_breaks_direct,
            discrepancy: self.discrepancy + other.discrepancy,
        }
    }

    pub fn finish(self) -> Result<RegionSummary> {
        if self.rows == 0 {
            return Err(Error::EmptyDataset);
        }
        let frac = |n: usize| if self.cp == 0 { 0.0 } else { n as f64 / self.cp as f64 };
        Ok(RegionSummary {
            rows: self.rows,
            cp_count: self.cp,
            ch1_count: self.ch1,
            ch2_count: self.ch2,
            cp_generating_count: self.cp_generating,
            generating_fraction_of_cp: frac(self.cp_generating),
            direct_fraction_of_cp: frac(self.cp_breaks_direct),
            discrepancy_count: self.discrepancy,
        })
    }
}

/// Aggregate counts of a sweep. `ch1_count`/`ch2_count` count all rows;
/// fractions are relative to the CP rows (0 when there are none).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub rows: usize,
    pub cp_count: usize,
    pub ch1_count: usize,
    pub ch2_count: usize,
    pub cp_generating_count: usize,
    pub generating_fraction_of_cp: f64,
    pub direct_fraction_of_cp: f64,
    pub discrepancy_count: usize,
}

pub fn region_summary(rows: &[SweepRow]) -> Result<RegionSummary> {
    let mut counts = RegionCounts::default();
    rows.iter().for_each(|r| counts.add(r));
    counts.finish()
}

/// CP rows where the CH1/CH2 verdict and direct CHSH violation differ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub summary: RegionSummary,
    /// Discrepant CP rows where the conditions say "generating" but the
    /// Choi state satisfies CHSH.
    pub generating_but_local: usize,
    /// Discrepant CP rows where the Choi state violates CHSH but neither
    /// condition holds.
    pub violating_but_not_generating: usize,
    pub examples: Vec<SweepRow>,
}

pub fn discrepancy_report(rows: &[SweepRow], max_examples: usize) -> Result<DiscrepancyReport> {
    let summary = region_summary(rows)?;
    let discrepant: Vec<&SweepRow> = rows.iter().filter(|r| r.is_discrepant()).collect();
    let generating_but_local = discrepant.iter().filter(|r| r.paper_generating).count();
    Ok(DiscrepancyReport {
        summary,
        generating_but_local,
        violating_but_not_generating: discrepant.len() - generating_but_local,
        examples: discrepant.into_iter().take(max_examples).copied().collect(),
    })
}

fn fmt_real(x: f64) -> String {
    // 17 significant digits
    format!("{x:.16e}")
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes rows in the fixed CSV layout: booleans as 0/1, reals with 17
/// significant digits.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_real(r.lambda1).as_str(),
            fmt_real(r.lambda2).as_str(),
            fmt_real(r.lambda3).as_str(),
            fmt_real(r.t3).as_str(),
            fmt_bool(r.cp),
            fmt_bool(r.ch1),
            fmt_bool(r.ch2),
            fmt_bool(r.paper_generating),
            fmt_bool(r.breaks_chsh_direct),
            fmt_real(r.horodecki_m).as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidParameter(format!("unexpected CSV header {header:?}")));
    }
    let real = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::InvalidParameter(format!("'{s}' is not a number")))
    };
    let flag = |s: &str| -> Result<bool> {
        match s {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::InvalidParameter(format!("'{s}' is not a 0/1 flag"))),
        }
    };
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(SweepRow {
                lambda1: real(&rec[0])?,
                lambda2: real(&rec[1])?,
                lambda3: real(&rec[2])?,
                t3: real(&rec[3])?,
                cp: flag(&rec[4])?,
                ch1: flag(&rec[5])?,
                ch2: flag(&rec[6])?,
                paper_generating: flag(&rec[7])?,
                breaks_chsh_direct: flag(&rec[8])?,
                horodecki_m: real(&rec[9])?,
            })
        })
        .collect()
}

pub fn write_json<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    serde_json::to_writer(out, rows)?;
    Ok(())
}

/// Grid value at index `k` of an axis; exposed for callers that need to
/// locate nodes without building the sweep.
pub fn axis_value(lo: f64, hi: f64, resolution: usize, k: usize) -> f64 {
    node(lo, hi, resolution, k)
}
