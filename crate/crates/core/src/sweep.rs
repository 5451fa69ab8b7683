//! Parameter sweeps: one axis, a list of values, and a set of output
//! columns evaluated at every point. Results render to CSV with a
//! self-describing `# config:` JSON header line and parse back without
//! loss (17-significant-digit float rendering).
//!
//! Named presets cover the standard comparisons: the tail-bound overlay
//! (`fig1`) and PER versus rate, diversity order, SNR, and blocklength
//! (`fig2`..`fig5`).

use crate::bound::{minimize_bound, per_asymptotic};
use crate::error::{Error, Result};
use crate::finite_blocklength::CodeParams;
use crate::montecarlo::{estimate_per, Estimator, SimSpec};
use crate::outage::{chernoff_bound, corrected_bound, outage_exact, LinkConfig, OutageModelKind};
use serde::{Deserialize, Serialize};

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Code rate, bits/symbol.
    Rate,
    /// Diversity order L (integer values).
    Bins,
    /// SNR in dB (per-bin or total, see [`PowerMode`]).
    SnrDb,
    /// Codeword length n (integer values).
    Blocklength,
    /// Normalized tail argument z: evaluates raw tail curves instead of
    /// optimized bounds.
    TailZ,
}

impl Axis {
    fn column_name(self) -> &'static str {
        match self {
            Axis::Rate => "rate",
            Axis::Bins => "bins",
            Axis::SnrDb => "snr_db",
            Axis::Blocklength => "blocklength",
            Axis::TailZ => "z",
        }
    }
}

/// Requested output column(s) per sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    /// ε-minimized bound with the exact outage CDF (tail-z sweeps: the
    /// exact CDF itself).
    BoundExact,
    /// ε-minimized bound with the corrected Chernoff tail (tail-z sweeps:
    /// the corrected bound itself).
    BoundCorrected,
    /// ε-minimized bound with the plain Chernoff tail (tail-z sweeps: the
    /// Chernoff bound itself).
    BoundChernoff,
    /// Large-blocklength outage limit.
    Asymptotic,
    /// Monte Carlo estimate; contributes value and CI columns.
    Simulation,
}

/// Interpretation of `snr_db` when the diversity order varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PowerMode {
    /// `snr_db` is the per-bin SNR; total transmit power grows with L.
    #[default]
    PerBinFixed,
    /// `snr_db` is the total SNR `L·P/N₀`; each bin gets a 1/L share.
    TotalFixed,
}

/// Optional overrides for the simulation column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SimOverrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub shards: Option<u32>,
    pub estimator: Option<Estimator>,
}

const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 1;

/// Base configuration a sweep perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseConfig {
    pub link: LinkConfig,
    pub code: CodeParams,
}

/// Declarative sweep description; serializable as a JSON spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: BaseConfig,
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub power_mode: PowerMode,
    #[serde(default)]
    pub sim: SimOverrides,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.link.validate()?;
        self.base.code.validate()?;
        if self.values.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("sweep values must be finite".into()));
        }
        if matches!(self.axis, Axis::Bins | Axis::Blocklength)
            && self
                .values
                .iter()
                .any(|&v| v < 1.0 || v.fract() != 0.0 || v > f64::from(u32::MAX))
        {
            return Err(Error::InvalidConfig(format!(
                "{} axis requires positive integer values",
                self.axis.column_name()
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one output".into()));
        }
        let mut seen = Vec::new();
        for o in &self.outputs {
            if seen.contains(o) {
                return Err(Error::InvalidConfig("duplicate output column".into()));
            }
            seen.push(*o);
        }
        if self.axis == Axis::TailZ {
            if self
                .outputs
                .iter()
                .any(|o| matches!(o, OutputKind::Asymptotic | OutputKind::Simulation))
            {
                return Err(Error::InvalidConfig(
                    "tail-z sweeps support only the tail outputs".into(),
                ));
            }
            if self.values.iter().any(|&z| z <= 0.0) {
                return Err(Error::InvalidConfig("tail-z values must be positive".into()));
            }
        }
        Ok(())
    }

    fn column_names(&self) -> Vec<String> {
        let mut cols = vec![self.axis.column_name().to_string()];
        for o in &self.outputs {
            match (self.axis, o) {
                (Axis::TailZ, OutputKind::BoundExact) => cols.push("outage_exact".into()),
                (Axis::TailZ, OutputKind::BoundCorrected) => cols.push("outage_corrected".into()),
                (Axis::TailZ, OutputKind::BoundChernoff) => cols.push("outage_chernoff".into()),
                (_, OutputKind::BoundExact) => cols.push("bound_exact".into()),
                (_, OutputKind::BoundCorrected) => cols.push("bound_corrected".into()),
                (_, OutputKind::BoundChernoff) => cols.push("bound_chernoff".into()),
                (_, OutputKind::Asymptotic) => cols.push("asymptotic".into()),
                (_, OutputKind::Simulation) => {
                    cols.push("sim_per".into());
                    cols.push("sim_ci95".into());
                }
            }
        }
        cols
    }
}

/// One sweep point: the axis value, one cell per value column, and a
/// status ("ok", "degenerate", or an error description). Failed cells
/// stay empty and the sweep continues.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub cells: Vec<Option<f64>>,
    pub status: String,
}

/// Sweep results plus the spec that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Run every point of the sweep, in axis order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let columns = spec.column_names();
    let rows = spec
        .values
        .iter()
        .map(|&v| run_point(spec, v))
        .collect::<Vec<_>>();
    Ok(SweepTable {
        spec: clone_spec(spec),
        columns,
        rows,
    })
}

fn clone_spec(spec: &SweepSpec) -> SweepSpec {
    SweepSpec {
        axis: spec.axis,
        values: spec.values.clone(),
        base: spec.base,
        outputs: spec.outputs.clone(),
        power_mode: spec.power_mode,
        sim: spec.sim,
    }
}

fn run_point(spec: &SweepSpec, value: f64) -> SweepRow {
    let mut cells = Vec::new();
    let mut status: Option<String> = None;
    let record = |status_slot: &mut Option<String>, res: Result<f64>| match res {
        Ok(v) => Some(v),
        Err(e) => {
            status_slot.get_or_insert_with(|| e.to_string());
            None
        }
    };

    if spec.axis == Axis::TailZ {
        let bins = spec.base.link.bins;
        for o in &spec.outputs {
            let cell = match o {
                OutputKind::BoundExact => outage_exact(bins, value).map(|p| p.value()),
                OutputKind::BoundCorrected => corrected_bound(bins, value).map(|p| p.value()),
                OutputKind::BoundChernoff => chernoff_bound(bins, value).map(|p| p.value()),
                _ => unreachable!("rejected by validate"),
            };
            cells.push(record(&mut status, cell));
        }
        return SweepRow {
            axis_value: value,
            cells,
            status: status.unwrap_or_else(|| "ok".into()),
        };
    }

    let (link, code) = match point_config(spec, value) {
        Ok(pair) => pair,
        Err(e) => {
            return SweepRow {
                axis_value: value,
                cells: vec![None; point_cell_count(spec)],
                status: e.to_string(),
            };
        }
    };

    let mut degenerate = false;
    for o in &spec.outputs {
        match o {
            OutputKind::BoundExact | OutputKind::BoundCorrected | OutputKind::BoundChernoff => {
                let model = match o {
                    OutputKind::BoundExact => OutageModelKind::Exact,
                    OutputKind::BoundCorrected => OutageModelKind::CorrectedB,
                    _ => OutageModelKind::ChernoffU,
                };
                let cell = minimize_bound(&code, &link, model).map(|r| {
                    degenerate |= r.degenerate;
                    r.per_bound.value()
                });
                cells.push(record(&mut status, cell));
            }
            OutputKind::Asymptotic => {
                let cell = per_asymptotic(&code, &link).map(|p| p.value());
                cells.push(record(&mut status, cell));
            }
            OutputKind::Simulation => {
                let sim_spec = SimSpec {
                    link,
                    code,
                    trials: spec.sim.trials.unwrap_or(DEFAULT_TRIALS),
                    seed: spec.sim.seed.unwrap_or(DEFAULT_SEED),
                    estimator: spec.sim.estimator.unwrap_or(Estimator::AnalyticAverage),
                    shards: spec.sim.shards.unwrap_or(1),
                };
                match estimate_per(&sim_spec) {
                    Ok(est) => {
                        cells.push(Some(est.per.value()));
                        cells.push(Some(est.ci_halfwidth_95));
                    }
                    Err(e) => {
                        status.get_or_insert_with(|| e.to_string());
                        cells.push(None);
                        cells.push(None);
                    }
                }
            }
        }
    }

    let status = status.unwrap_or_else(|| {
        if degenerate {
            "degenerate".into()
        } else {
            "ok".into()
        }
    });
    SweepRow {
        axis_value: value,
        cells,
        status,
    }
}

fn point_cell_count(spec: &SweepSpec) -> usize {
    spec.outputs
        .iter()
        .map(|o| if *o == OutputKind::Simulation { 2 } else { 1 })
        .sum()
}

/// Per-point link and code, applying the axis value and the power mode.
fn point_config(spec: &SweepSpec, value: f64) -> Result<(LinkConfig, CodeParams)> {
    let mut link = spec.base.link;
    let mut code = spec.base.code;
    match spec.axis {
        Axis::Rate => code.rate = value,
        Axis::Bins => link.bins = value as u32,
        Axis::SnrDb => link.snr_db = value,
        Axis::Blocklength => code.n = value as u32,
        Axis::TailZ => unreachable!(),
    }
    if spec.power_mode == PowerMode::TotalFixed {
        // snr_db holds the total budget; split it evenly over the bins.
        link.snr_db -= 10.0 * f64::from(link.bins).log10();
    }
    link.validate()?;
    code.validate()?;
    Ok((link, code))
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

impl SweepTable {
    /// Render to CSV. First line is a `# config:` comment carrying the
    /// sweep spec as JSON; floats use 17 significant digits so parsing
    /// recovers them bit-exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# config: ");
        out.push_str(&serde_json::to_string(&self.spec).expect("spec serializes"));
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push_str(",status\n");
        for row in &self.rows {
            out.push_str(&format_f64(row.axis_value));
            for cell in &row.cells {
                out.push(',');
                if let Some(v) = cell {
                    out.push_str(&format_f64(*v));
                }
            }
            out.push(',');
            out.push_str(&row.status);
            out.push('\n');
        }
        out
    }

    /// Parse a table produced by [`SweepTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<SweepTable> {
        let mut lines = text.lines();
        let config = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table".into()))?;
        let json = config
            .strip_prefix("# config: ")
            .ok_or_else(|| Error::Parse("missing '# config:' header line".into()))?;
        let spec: SweepSpec =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("bad config JSON: {e}")))?;
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing column header".into()))?;
        let mut columns: Vec<String> = header.split(',').map(str::to_string).collect();
        if columns.pop().as_deref() != Some("status") {
            return Err(Error::Parse("last column must be 'status'".into()));
        }
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            // The trailing status field is free text and may itself carry
            // commas, so cap the split at the known column count.
            let fields: Vec<&str> = line.splitn(columns.len() + 1, ',').collect();
            if fields.len() != columns.len() + 1 {
                return Err(Error::Parse(format!(
                    "row has {} fields, expected {}",
                    fields.len(),
                    columns.len() + 1
                )));
            }
            let axis_value = parse_f64(fields[0])?;
            let cells = fields[1..fields.len() - 1]
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        parse_f64(f).map(Some)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(SweepRow {
                axis_value,
                cells,
                status: fields[fields.len() - 1].to_string(),
            });
        }
        Ok(SweepTable {
            spec,
            columns,
            rows,
        })
    }

    /// Index of a named column among the value cells (axis excluded).
    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name).map(|i| i - 1)
    }
}

fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// The anchor configuration the presets perturb: n = 4096, R = 1/2,
/// L = 4, 3 dB, unit channel power.
fn anchor() -> BaseConfig {
    BaseConfig {
        link: LinkConfig {
            bins: 4,
            sigma_h2: 1.0,
            snr_db: 3.0,
        },
        code: CodeParams { n: 4096, rate: 0.5 },
    }
}

/// Named sweep presets.
///
/// - `fig1` — tail overlay: exact CDF vs corrected vs Chernoff over a log
///   grid z ∈ [1e-4, 0.99], L = 4.
/// - `fig2` — PER vs rate (0.1 to 1.5, step 0.05) at the anchor.
/// - `fig3` — PER vs diversity order 1..10 at 3 dB *total* power.
/// - `fig4` — PER vs per-bin SNR (−3 to 15 dB, step 0.5), L = 4.
/// - `fig5` — PER vs blocklength 2^7..2^15 at the anchor.
///
/// Axis ranges bracket the PER window 1e-6..1; they are choices, not
/// externally mandated values.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let base = anchor();
    let bound_and_sim = vec![OutputKind::BoundCorrected, OutputKind::Simulation];
    let spec = match name {
        "fig1" => SweepSpec {
            axis: Axis::TailZ,
            values: log_grid(1e-4, 0.99, 61),
            base,
            outputs: vec![
                OutputKind::BoundExact,
                OutputKind::BoundCorrected,
                OutputKind::BoundChernoff,
            ],
            power_mode: PowerMode::PerBinFixed,
            sim: SimOverrides::default(),
        },
        "fig2" => SweepSpec {
            axis: Axis::Rate,
            values: (0..29).map(|i| f64::from(10 + 5 * i) / 100.0).collect(),
            base,
            outputs: bound_and_sim,
            power_mode: PowerMode::PerBinFixed,
            sim: SimOverrides::default(),
        },
        "fig3" => SweepSpec {
            axis: Axis::Bins,
            values: (1..=10).map(f64::from).collect(),
            base,
            outputs: bound_and_sim,
            power_mode: PowerMode::TotalFixed,
            sim: SimOverrides::default(),
        },
        "fig4" => SweepSpec {
            axis: Axis::SnrDb,
            values: (0..=36).map(|i| f64::from(-30 + 5 * i) / 10.0).collect(),
            base,
            outputs: bound_and_sim,
            power_mode: PowerMode::PerBinFixed,
            sim: SimOverrides::default(),
        },
        "fig5" => SweepSpec {
            axis: Axis::Blocklength,
            values: (7..=15).map(|k| f64::from(1u32 << k)).collect(),
            base,
            outputs: bound_and_sim,
            power_mode: PowerMode::PerBinFixed,
            sim: SimOverrides::default(),
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset {other:?} (expected fig1..fig5)"
            )))
        }
    };
    Ok(spec)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
