//! Measurement-record ingestion, campaign configuration, and report emission.
//!
//! Record files are comma-delimited with the header
//! `freq_ghz,distance_m,pt_dbm,pr_dbm,gt_dbi,gr_dbi,env,mut_name,mut_thickness_cm,polarization`
//! plus optional `azimuth_deg`/`elevation_deg` passthrough columns. Ingestion
//! is total: every data line becomes either a record or a line-numbered
//! diagnostic, never a silent drop.
//!
//! Reports are emitted as JSON (full precision) or CSV (dB values rounded to
//! two decimals); both use a fixed field order so identical inputs yield
//! byte-identical files.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linkbudget::Budget;
use crate::penetration::{
    MaterialAggregate, PenetrationMeasurement, Polarization, reference_table,
};
use crate::plfit::{BootstrapRow, FittedModel, ModelComparison, ModelKind, PlSample};
use crate::rfmath::friis_received_power_dbm;
use crate::sounder::SounderConfig;

/// Required record-file columns, in emission order.
pub const RECORD_HEADER: [&str; 10] = [
    "freq_ghz",
    "distance_m",
    "pt_dbm",
    "pr_dbm",
    "gt_dbi",
    "gr_dbi",
    "env",
    "mut_name",
    "mut_thickness_cm",
    "polarization",
];

/// Optional passthrough columns (accepted, preserved, not processed).
pub const OPTIONAL_COLUMNS: [&str; 2] = ["azimuth_deg", "elevation_deg"];

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// Propagation environment tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Environment {
    Los,
    Nlos,
    #[default]
    FreeSpace,
}

impl Environment {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag.trim().to_ascii_uppercase().as_str() {
            "LOS" => Ok(Environment::Los),
            "NLOS" => Ok(Environment::Nlos),
            "FREESPACE" => Ok(Environment::FreeSpace),
            other => Err(Error::Schema(format!(
                "unknown environment tag `{other}` (expected LOS, NLOS, or FREESPACE)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Environment::Los => "LOS",
            Environment::Nlos => "NLOS",
            Environment::FreeSpace => "FREESPACE",
        }
    }
}

/// One campaign observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub freq_ghz: f64,
    pub distance_m: f64,
    pub pt_dbm: f64,
    pub pr_dbm: f64,
    pub gt_dbi: f64,
    pub gr_dbi: f64,
    pub env: Environment,
    pub mut_name: Option<String>,
    pub mut_thickness_cm: Option<f64>,
    pub polarization: Polarization,
    pub azimuth_deg: Option<f64>,
    pub elevation_deg: Option<f64>,
}

impl MeasurementRecord {
    pub fn frequency_hz(&self) -> f64 {
        self.freq_ghz * 1e9
    }

    pub fn has_mut(&self) -> bool {
        self.mut_name.is_some()
    }
}

/// A line-numbered ingestion diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Outcome of parsing a record file: accepted records plus per-line
/// diagnostics; `records.len() + diagnostics.len()` equals the number of
/// data lines.
#[derive(Debug, Clone, Default)]
pub struct Ingest {
    pub records: Vec<MeasurementRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Ingest {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Parse a record file from disk.
pub fn parse_records(path: &Path) -> Result<Ingest> {
    let file = std::fs::File::open(path)?;
    parse_records_from_reader(file)
}

/// Parse records from any reader; the header row is validated up front
/// (missing required columns and unrecognized columns are schema errors),
/// then each data line is parsed independently.
pub fn parse_records_from_reader<R: Read>(reader: R) -> Result<Ingest> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header row: {e}")))?
        .clone();
    let mut columns = Vec::with_capacity(RECORD_HEADER.len());
    for required in RECORD_HEADER {
        match headers.iter().position(|h| h == required) {
            Some(idx) => columns.push(idx),
            None => {
                return Err(Error::Schema(format!(
                    "record file is missing required column `{required}`"
                )))
            }
        }
    }
    for header in headers.iter() {
        if !RECORD_HEADER.contains(&header) && !OPTIONAL_COLUMNS.contains(&header) {
            return Err(Error::Schema(format!(
                "unrecognized record column `{header}`"
            )));
        }
    }
    let azimuth_idx = headers.iter().position(|h| h == "azimuth_deg");
    let elevation_idx = headers.iter().position(|h| h == "elevation_deg");

    let mut ingest = Ingest::default();
    for (row_idx, row) in csv_reader.records().enumerate() {
        let line = (row_idx + 2) as u64;
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                ingest.diagnostics.push(Diagnostic {
                    line,
                    message: format!("unparseable row: {e}"),
                });
                continue;
            }
        };
        if row.len() != headers.len() {
            ingest.diagnostics.push(Diagnostic {
                line,
                message: format!("expected {} fields, got {}", headers.len(), row.len()),
            });
            continue;
        }
        match parse_row(&row, &columns, azimuth_idx, elevation_idx) {
            Ok(record) => ingest.records.push(record),
            Err(message) => ingest.diagnostics.push(Diagnostic { line, message }),
        }
    }
    Ok(ingest)
}

fn parse_row(
    row: &csv::StringRecord,
    columns: &[usize],
    azimuth_idx: Option<usize>,
    elevation_idx: Option<usize>,
) -> std::result::Result<MeasurementRecord, String> {
    let field = |slot: usize| row.get(columns[slot]).unwrap_or_default();
    let number = |slot: usize| -> std::result::Result<f64, String> {
        let name = RECORD_HEADER[slot];
        let raw = field(slot);
        raw.parse()
            .map_err(|_| format!("malformed numeric `{raw}` in column `{name}`"))
    };
    let optional_number =
        |idx: Option<usize>, name: &str| -> std::result::Result<Option<f64>, String> {
            match idx.map(|i| row.get(i).unwrap_or_default()) {
                None | Some("") => Ok(None),
                Some(raw) => raw
                    .parse()
                    .map(Some)
                    .map_err(|_| format!("malformed numeric `{raw}` in column `{name}`")),
            }
        };

    let freq_ghz = number(0)?;
    let distance_m = number(1)?;
    if freq_ghz <= 0.0 || !freq_ghz.is_finite() {
        return Err(format!("freq_ghz must be > 0, got {freq_ghz}"));
    }
    if distance_m <= 0.0 || !distance_m.is_finite() {
        return Err(format!("distance_m must be > 0, got {distance_m}"));
    }
    let mut_name = match field(7) {
        "" => None,
        name => Some(name.to_string()),
    };
    let mut_thickness_cm = match field(8) {
        "" => None,
        raw => Some(
            raw.parse::<f64>()
                .map_err(|_| format!("malformed numeric `{raw}` in column `mut_thickness_cm`"))?,
        ),
    };
    match (&mut_name, mut_thickness_cm) {
        (Some(_), None) => return Err("mut_name given without mut_thickness_cm".into()),
        (None, Some(_)) => return Err("mut_thickness_cm given without mut_name".into()),
        (Some(_), Some(t)) if t <= 0.0 => {
            return Err(format!("mut_thickness_cm must be > 0, got {t}"))
        }
        _ => {}
    }

    Ok(MeasurementRecord {
        freq_ghz,
        distance_m,
        pt_dbm: number(2)?,
        pr_dbm: number(3)?,
        gt_dbi: number(4)?,
        gr_dbi: number(5)?,
        env: Environment::parse(field(6)).map_err(|e| e.to_string())?,
        mut_name,
        mut_thickness_cm,
        polarization: Polarization::parse(field(9)).map_err(|e| e.to_string())?,
        azimuth_deg: optional_number(azimuth_idx, "azimuth_deg")?,
        elevation_deg: optional_number(elevation_idx, "elevation_deg")?,
    })
}

/// Quote a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// Serialize records back to the record-file format. Angular passthrough
/// columns are included when any record carries them; emit-then-parse
/// reproduces the records exactly.
pub fn emit_records(records: &[MeasurementRecord]) -> String {
    let with_angles = records
        .iter()
        .any(|r| r.azimuth_deg.is_some() || r.elevation_deg.is_some());
    let mut out = RECORD_HEADER.join(",");
    if with_angles {
        out.push(',');
        out.push_str(&OPTIONAL_COLUMNS.join(","));
    }
    out.push('\n');
    let opt_num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let mut fields = vec![
            r.freq_ghz.to_string(),
            r.distance_m.to_string(),
            r.pt_dbm.to_string(),
            r.pr_dbm.to_string(),
            r.gt_dbi.to_string(),
            r.gr_dbi.to_string(),
            r.env.label().to_string(),
            csv_field(r.mut_name.as_deref().unwrap_or_default()),
            opt_num(r.mut_thickness_cm),
            r.polarization.label().to_string(),
        ];
        if with_angles {
            fields.push(opt_num(r.azimuth_deg));
            fields.push(opt_num(r.elevation_deg));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Convert gain-calibrated records to path-loss samples:
/// `PL = pt + gt + gr - pr`. Records carrying a material under test are
/// routed to penetration analysis instead; the second return value counts
/// them.
pub fn to_pl_samples(records: &[MeasurementRecord]) -> Result<(Vec<PlSample<f64>>, usize)> {
    let mut samples = Vec::new();
    let mut excluded_mut = 0usize;
    for r in records {
        if r.has_mut() {
            excluded_mut += 1;
            continue;
        }
        let path_loss = r.pt_dbm + r.gt_dbi + r.gr_dbi - r.pr_dbm;
        samples.push(PlSample::new(r.frequency_hz(), r.distance_m, path_loss)?);
    }
    Ok((samples, excluded_mut))
}

/// Routing summary of [`to_penetration_measurements`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PenetrationRouting {
    /// Records without a material under test.
    pub non_mut: usize,
    /// Cross-polarized records; only co-polarized (V-V) loss is defined,
    /// so these are carried in the schema but not processed.
    pub cross_polarized: usize,
}

/// Convert co-polarized MUT-bearing records to penetration measurements;
/// non-MUT and cross-polarized records are counted, not processed.
pub fn to_penetration_measurements(
    records: &[MeasurementRecord],
) -> (Vec<PenetrationMeasurement<f64>>, PenetrationRouting) {
    let mut measurements = Vec::new();
    let mut routing = PenetrationRouting::default();
    for r in records {
        match (&r.mut_name, r.mut_thickness_cm) {
            (Some(name), Some(thickness)) => {
                if r.polarization != Polarization::VV {
                    routing.cross_polarized += 1;
                    continue;
                }
                measurements.push(PenetrationMeasurement {
                    pt_dbm: r.pt_dbm,
                    pr_mut_dbm: r.pr_dbm,
                    gt_dbi: r.gt_dbi,
                    gr_dbi: r.gr_dbi,
                    distance_m: r.distance_m,
                    frequency_hz: r.frequency_hz(),
                    material: name.clone(),
                    thickness_cm: thickness,
                    polarization: r.polarization,
                });
            }
            _ => routing.non_mut += 1,
        }
    }
    (measurements, routing)
}

/// Records that replay the embedded penetration reference table: one row per
/// table entry at 5 m with the standard 0 dBm / 27 dBi setup, the received
/// power constructed so the published loss is recovered exactly.
pub fn reference_replay_records() -> Vec<MeasurementRecord> {
    reference_table::<f64>()
        .into_iter()
        .map(|row| {
            let distance_m = 5.0;
            let (pt, gain) = (0.0, 27.0);
            let pr = friis_received_power_dbm(pt, gain, gain, row.frequency_ghz * 1e9, distance_m)
                .expect("reference geometry is valid")
                - row.loss_db;
            MeasurementRecord {
                freq_ghz: row.frequency_ghz,
                distance_m,
                pt_dbm: pt,
                pr_dbm: pr,
                gt_dbi: gain,
                gr_dbi: gain,
                env: Environment::Los,
                mut_name: Some(row.material),
                mut_thickness_cm: Some(row.thickness_cm),
                polarization: Polarization::VV,
                azimuth_deg: None,
                elevation_deg: None,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Campaign configuration
// ---------------------------------------------------------------------------

/// Campaign-wide configuration: sounder settings, fit options, and the
/// optional atmospheric table, loadable from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub sounder: SounderConfig<f64>,
    /// Receiver noise injected by simulations, in dBm.
    pub noise_power_dbm: f64,
    pub fit_d0_m: f64,
    pub fit_f0_override_hz: Option<f64>,
    pub fit_models: Vec<ModelKind>,
    pub atmos_table_path: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            sounder: SounderConfig::default(),
            noise_power_dbm: -100.0,
            fit_d0_m: 1.0,
            fit_f0_override_hz: None,
            fit_models: ModelKind::ALL.to_vec(),
            atmos_table_path: None,
        }
    }
}

impl CampaignConfig {
    /// The sounder's link budget.
    pub fn budget(&self) -> Budget<f64> {
        self.sounder.budget()
    }

    pub fn validate(&self) -> Result<()> {
        self.sounder.validate()?;
        if !(self.fit_d0_m.is_finite() && self.fit_d0_m > 0.0) {
            return Err(Error::Config(format!(
                "fit_d0_m must be > 0, got {}",
                self.fit_d0_m
            )));
        }
        if let Some(path) = &self.atmos_table_path {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "atmos_table file does not exist: {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_contents(&text)
    }

    /// Parse the flat `key = value` format; `#` starts a comment and
    /// unknown keys are rejected.
    pub fn from_str_contents(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Schema(format!("line {line_no}: expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = || -> Result<f64> {
                value.parse().map_err(|_| {
                    Error::Schema(format!("line {line_no}: malformed number `{value}` for `{key}`"))
                })
            };
            let parse_u32 = || -> Result<u32> {
                value.parse().map_err(|_| {
                    Error::Schema(format!("line {line_no}: malformed integer `{value}` for `{key}`"))
                })
            };
            match key {
                "tx_power_dbm" => config.sounder.tx_power_dbm = parse_f64()?,
                "tx_gain_dbi" => config.sounder.tx_gain_dbi = parse_f64()?,
                "rx_gain_dbi" => config.sounder.rx_gain_dbi = parse_f64()?,
                "rx_sensitivity_dbm" => config.sounder.rx_sensitivity_dbm = parse_f64()?,
                "chip_rate_cps" => config.sounder.chip_rate_cps = parse_f64()?,
                "pn_order" => config.sounder.pn_order = parse_u32()?,
                "slide_factor" => config.sounder.slide_factor = parse_u32()?,
                "if_frequency_hz" => config.sounder.if_frequency_hz = parse_f64()?,
                "lo_frequency_hz" => config.sounder.lo_frequency_hz = parse_f64()?,
                "lo_multiplier" => config.sounder.lo_multiplier = parse_u32()?,
                "passband_low_hz" => config.sounder.passband_hz.0 = parse_f64()?,
                "passband_high_hz" => config.sounder.passband_hz.1 = parse_f64()?,
                "oversampling" => config.sounder.oversampling = parse_u32()?,
                "noise_power_dbm" => config.noise_power_dbm = parse_f64()?,
                "fit_d0_m" => config.fit_d0_m = parse_f64()?,
                "fit_f0_hz" => config.fit_f0_override_hz = Some(parse_f64()?),
                "fit_models" => {
                    config.fit_models = value
                        .split(',')
                        .map(ModelKind::parse)
                        .collect::<Result<Vec<_>>>()?;
                }
                "atmos_table" => config.atmos_table_path = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Schema(format!(
                        "line {line_no}: unknown configuration key `{other}`"
                    )))
                }
            }
        }
        Ok(config)
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Schema(format!("unknown report format `{other}`"))),
        }
    }
}

/// Anything emittable through [`emit_report`].
pub trait Report {
    fn is_empty(&self) -> bool;
    fn to_json(&self) -> String;
    fn to_csv(&self) -> String;
}

/// Render a report and write it to disk; empty reports are rejected before
/// any file is created, and identical inputs produce byte-identical files.
pub fn emit_report<R: Report>(report: &R, format: ReportFormat, path: &Path) -> Result<()> {
    let rendered = render_report(report, format)?;
    std::fs::write(path, rendered)?;
    Ok(())
}

/// Render a report to its textual form without touching the filesystem.
pub fn render_report<R: Report>(report: &R, format: ReportFormat) -> Result<String> {
    if report.is_empty() {
        return Err(Error::InsufficientData(
            "refusing to emit an empty report".into(),
        ));
    }
    Ok(match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    })
}

fn fmt_db(v: f64) -> String {
    let rendered = format!("{v:.2}");
    if rendered == "-0.00" {
        "0.00".to_string()
    } else {
        rendered
    }
}

fn fmt_opt_db(v: Option<f64>) -> String {
    v.map(fmt_db).unwrap_or_default()
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

/// One row of a model-comparison report.
#[derive(Debug, Clone, Serialize)]
pub struct FitReportRow {
    pub model: String,
    pub sigma_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ple: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abg_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abg_beta_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abg_gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ple_bootstrap_std: Option<f64>,
}

/// Model-comparison report: fitted rows sorted by sigma plus skipped models.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub samples: usize,
    pub rows: Vec<FitReportRow>,
    pub skipped: Vec<SkippedModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedModel {
    pub model: String,
    pub reason: String,
}

impl FitReport {
    pub fn from_comparison(
        samples: usize,
        comparison: &ModelComparison<f64>,
        bootstrap: Option<&[BootstrapRow<f64>]>,
    ) -> Self {
        let rows = comparison
            .rows
            .iter()
            .map(|row| {
                let mut out = FitReportRow {
                    model: row.model.kind().name().to_string(),
                    sigma_db: row.model.sigma_db(),
                    ple: None,
                    d0_m: None,
                    alpha_db: None,
                    beta: None,
                    b: None,
                    f0_ghz: None,
                    abg_alpha: None,
                    abg_beta_db: None,
                    abg_gamma: None,
                    ple_bootstrap_std: None,
                };
                match row.model {
                    FittedModel::Ci(p) => {
                        out.ple = Some(p.ple);
                        out.d0_m = Some(p.d0_m);
                    }
                    FittedModel::Fi(p) => {
                        out.alpha_db = Some(p.alpha_db);
                        out.beta = Some(p.beta);
                    }
                    FittedModel::Cif(p) => {
                        out.ple = Some(p.ple_at_f0);
                        out.b = Some(p.b);
                        out.f0_ghz = Some(p.f0_hz / 1e9);
                    }
                    FittedModel::Abg(p) => {
                        out.abg_alpha = Some(p.alpha);
                        out.abg_beta_db = Some(p.beta_db);
                        out.abg_gamma = Some(p.gamma);
                    }
                }
                if let Some(rows) = bootstrap {
                    out.ple_bootstrap_std = rows
                        .iter()
                        .find(|b| b.model == row.model.kind())
                        .map(|b| b.ple_std);
                }
                out
            })
            .collect();
        let skipped = comparison
            .skipped
            .iter()
            .map(|(kind, reason)| SkippedModel {
                model: kind.name().to_string(),
                reason: reason.clone(),
            })
            .collect();
        Self {
            samples,
            rows,
            skipped,
        }
    }
}

impl Report for FitReport {
    fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,sigma_db,ple,d0_m,alpha_db,beta,b,f0_ghz,abg_alpha,abg_beta_db,abg_gamma,ple_bootstrap_std\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.model,
                fmt_db(r.sigma_db),
                fmt_opt(r.ple, 3),
                fmt_opt(r.d0_m, 3),
                fmt_opt_db(r.alpha_db),
                fmt_opt(r.beta, 3),
                fmt_opt(r.b, 4),
                fmt_opt(r.f0_ghz, 3),
                fmt_opt(r.abg_alpha, 3),
                fmt_opt_db(r.abg_beta_db),
                fmt_opt(r.abg_gamma, 3),
                fmt_opt(r.ple_bootstrap_std, 4),
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("# skipped {}: {}\n", s.model, s.reason));
        }
        out
    }
}

/// One row of a penetration report, with the embedded reference row for the
/// same material and frequency when one exists.
#[derive(Debug, Clone, Serialize)]
pub struct PenetrationReportRow {
    pub material: String,
    pub frequency_ghz: f64,
    pub thickness_cm: f64,
    pub measurements: usize,
    pub loss_db: f64,
    pub loss_per_cm: f64,
    pub split_thickness: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_db_per_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_db_per_cm: Option<f64>,
}

/// Material penetration report.
#[derive(Debug, Clone, Serialize)]
pub struct PenetrationReport {
    pub rows: Vec<PenetrationReportRow>,
}

impl PenetrationReport {
    pub fn from_aggregates(aggregates: &[MaterialAggregate<f64>]) -> Self {
        let reference = reference_table::<f64>();
        let rows = aggregates
            .iter()
            .map(|agg| {
                let r = &agg.result;
                let reference_db_per_cm = reference
                    .iter()
                    .find(|row| {
                        row.material == r.material
                            && row.frequency_ghz == r.frequency_ghz
                            && row.thickness_cm == r.thickness_cm
                    })
                    .map(|row| row.loss_per_cm);
                PenetrationReportRow {
                    material: r.material.clone(),
                    frequency_ghz: r.frequency_ghz,
                    thickness_cm: r.thickness_cm,
                    measurements: agg.count,
                    loss_db: r.loss_db,
                    loss_per_cm: r.loss_per_cm,
                    split_thickness: agg.split_thickness,
                    reference_db_per_cm,
                    delta_db_per_cm: reference_db_per_cm.map(|ref_v| r.loss_per_cm - ref_v),
                }
            })
            .collect();
        Self { rows }
    }
}

impl Report for PenetrationReport {
    fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::from(
            "material,frequency_ghz,thickness_cm,measurements,loss_db,loss_per_cm,split_thickness,reference_db_per_cm,delta_db_per_cm\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&r.material),
                r.frequency_ghz,
                r.thickness_cm,
                r.measurements,
                fmt_db(r.loss_db),
                fmt_db(r.loss_per_cm),
                r.split_thickness,
                fmt_opt_db(r.reference_db_per_cm),
                fmt_opt_db(r.delta_db_per_cm),
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
