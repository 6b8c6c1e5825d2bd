//! `mmprop` - command-line surface of the propagation toolkit.
//!
//! Subcommands: `fspl` (free-space tables), `budget` (dynamic range and
//! reach), `fit` (path-loss model comparison), `penetrate` (material
//! analysis against the embedded reference table), `sound` (sliding
//! correlator simulation), and `verify` (the embedded replication suite).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmprop::campaign::{
    emit_records, emit_report, parse_records, reference_replay_records,
    to_penetration_measurements, to_pl_samples, CampaignConfig, FitReport, PenetrationReport,
    Report, ReportFormat,
};
use mmprop::error::Error;
use mmprop::linkbudget::{calibrate_sensitivity, max_distance_m, max_measurable_pl};
use mmprop::penetration::{aggregate_by_material, frequency_trend, TrendVerdict};
use mmprop::plfit::{bootstrap_ple_std, compare_models, FitOptions, ModelKind};
use mmprop::rfmath::{atmospheric_excess_db, fspl_db};
use mmprop::sounder::{
    extract_multipath, generate_default_msequence, measured_path_loss, propagate,
    sliding_correlate, synth_channel,
};
use mmprop::{ChannelSpec, verify};

#[derive(Parser)]
#[command(
    name = "mmprop",
    version,
    about = "Millimeter-wave propagation toolkit: link budgets, path-loss fitting, \
             penetration analysis, and a sliding-correlator sounder simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free-space path loss over a frequency/distance grid.
    Fspl(FsplArgs),
    /// Maximum measurable path loss and reach of a sounder budget.
    Budget(BudgetArgs),
    /// Fit CI/FI/CIF/ABG path-loss models to a record file.
    Fit(FitArgs),
    /// Material penetration losses with reference-table comparison.
    Penetrate(PenetrateArgs),
    /// Simulate the sliding-correlator sounder over a channel.
    Sound(SoundArgs),
    /// Run the embedded replication suite and print pass/fail per check.
    Verify,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct FsplArgs {
    /// Frequencies in GHz (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    freq_ghz: Vec<f64>,
    /// Distances in m (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    dist_m: Vec<f64>,
    /// Add atmospheric excess columns from this anchor table
    /// (`frequency_ghz,excess_db_per_km` with header).
    #[arg(long, conflicts_with = "atmos_default")]
    atmos_table: Option<PathBuf>,
    /// Add atmospheric excess columns from the built-in anchor table.
    #[arg(long)]
    atmos_default: bool,
    /// Campaign configuration; its atmos_table entry is used when neither
    /// atmospheric flag is given.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BudgetArgs {
    /// Campaign configuration file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tx_power_dbm: Option<f64>,
    #[arg(long)]
    tx_gain_dbi: Option<f64>,
    #[arg(long)]
    rx_gain_dbi: Option<f64>,
    #[arg(long)]
    rx_sensitivity_dbm: Option<f64>,
    #[arg(long)]
    pn_order: Option<u32>,
    /// Calibrate the sensitivity so the budget closes at this path loss.
    #[arg(long)]
    calibrate_max_pl_db: Option<f64>,
    /// Path loss exponents to tabulate reach for.
    #[arg(long, value_delimiter = ',', default_value = "2.0")]
    ple: Vec<f64>,
    /// Carrier frequency in GHz for the reach table (default: RF center).
    #[arg(long)]
    freq_ghz: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct FitArgs {
    /// Measurement record file.
    #[arg(long, required = true)]
    records: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Models to fit (default from config, else CI,FI,CIF,ABG).
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// CI reference distance in m.
    #[arg(long)]
    d0_m: Option<f64>,
    /// CIF anchor frequency override in GHz.
    #[arg(long)]
    f0_ghz: Option<f64>,
    /// Bootstrap resamples for the PLE stability column (0 = off).
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the comparison report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format for --out.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PenetrateArgs {
    /// Measurement record file with mut_* columns populated.
    #[arg(long, required_unless_present = "export_reference")]
    records: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write the embedded reference table as a replayable record file.
    #[arg(long)]
    export_reference: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SoundArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel tap file (`delay_ns,gain_db,phase_rad,cluster_id` lines).
    #[arg(long, conflicts_with = "synth_seed")]
    channel: Option<PathBuf>,
    /// Synthesize a clustered channel from this seed instead.
    #[arg(long)]
    synth_seed: Option<u64>,
    /// Carrier path loss to inject, in dB.
    #[arg(long, conflicts_with = "distance_m")]
    path_loss_db: Option<f64>,
    /// Derive the injected path loss from free space at this distance.
    #[arg(long)]
    distance_m: Option<f64>,
    /// Receiver noise power in dBm (overrides config).
    #[arg(long)]
    noise_dbm: Option<f64>,
    /// Noise/synthesis seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multipath extraction threshold below the peak, in dB.
    #[arg(long, default_value_t = 25.0)]
    threshold_db: f64,
    /// Export the power delay profile here.
    #[arg(long)]
    out_pdp: Option<PathBuf>,
    /// Mean cluster count for synthesized channels.
    #[arg(long, default_value_t = 5.9)]
    mean_clusters: f64,
    /// Mean multipath components per cluster for synthesized channels.
    #[arg(long, default_value_t = 3.8)]
    mean_mpcs: f64,
    /// Cluster inter-arrival scale in ns for synthesized channels.
    #[arg(long, default_value_t = 15.0)]
    delay_scale_ns: f64,
    /// Tap gain decay in dB per ns of excess delay.
    #[arg(long, default_value_t = 0.15)]
    decay_db_per_ns: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fspl(args) => run_fspl(args),
        Command::Budget(args) => run_budget(args),
        Command::Fit(args) => run_fit(args),
        Command::Penetrate(args) => run_penetrate(args),
        Command::Sound(args) => run_sound(args),
        Command::Verify => run_verify(),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Module errors map to distinct nonzero exit codes: 3 schema/validation,
/// 4 degenerate fit, 5 below sensitivity/coverage, 6 I/O (2 is usage,
/// handled by the argument parser).
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_)
        | Error::Config(_)
        | Error::OutOfRange(_)
        | Error::InsufficientData(_)
        | Error::Aliasing(_)
        | Error::Schema(_) => 3,
        Error::DegenerateGeometry(_) => 4,
        Error::BelowSensitivity(_) | Error::NoCoverage(_) => 5,
        Error::Io(_) => 6,
    }
}

type CmdResult = Result<ExitCode, Error>;

fn load_config(path: &Option<PathBuf>) -> Result<CampaignConfig, Error> {
    let config = match path {
        Some(path) => CampaignConfig::from_path(path)?,
        None => CampaignConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

fn run_fspl(args: FsplArgs) -> CmdResult {
    let atmos = if let Some(path) = &args.atmos_table {
        Some(mmprop::AtmosTable::from_path(path)?)
    } else if args.atmos_default {
        Some(mmprop::AtmosTable::default_table())
    } else if let Some(config) = &args.config {
        let config = CampaignConfig::from_path(config)?;
        match &config.atmos_table_path {
            Some(path) => Some(mmprop::AtmosTable::from_path(path)?),
            None => None,
        }
    } else {
        None
    };
    match &atmos {
        None => println!("freq_ghz,distance_m,fspl_db"),
        Some(_) => println!("freq_ghz,distance_m,fspl_db,atmos_excess_db,total_db"),
    }
    for &f in &args.freq_ghz {
        for &d in &args.dist_m {
            let fspl = fspl_db(f * 1e9, d)?;
            match &atmos {
                None => println!("{f},{d},{fspl:.2}"),
                Some(table) => {
                    let excess = atmospheric_excess_db(f * 1e9, d / 1000.0, table)?;
                    println!("{f},{d},{fspl:.2},{excess:.2},{:.2}", fspl + excess);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_budget(args: BudgetArgs) -> CmdResult {
    let mut config = load_config(&args.config)?;
    let sounder = &mut config.sounder;
    if let Some(v) = args.tx_power_dbm {
        sounder.tx_power_dbm = v;
    }
    if let Some(v) = args.tx_gain_dbi {
        sounder.tx_gain_dbi = v;
    }
    if let Some(v) = args.rx_gain_dbi {
        sounder.rx_gain_dbi = v;
    }
    if let Some(v) = args.rx_sensitivity_dbm {
        sounder.rx_sensitivity_dbm = v;
    }
    if let Some(v) = args.pn_order {
        sounder.pn_order = v;
    }
    sounder.validate()?;
    let mut budget = sounder.budget();
    if let Some(target) = args.calibrate_max_pl_db {
        budget.rx_sensitivity_dbm = calibrate_sensitivity(target, &budget);
        println!("calibrated_sensitivity_dbm = {:.2}", budget.rx_sensitivity_dbm);
    }
    let max_pl = max_measurable_pl(&budget)?;
    println!("tx_power_dbm = {:.2}", budget.tx_power_dbm);
    println!("tx_gain_dbi = {:.2}", budget.tx_gain_dbi);
    println!("rx_gain_dbi = {:.2}", budget.rx_gain_dbi);
    println!("processing_gain_db = {:.2}", budget.processing_gain_db);
    println!("rx_sensitivity_dbm = {:.2}", budget.rx_sensitivity_dbm);
    println!("max_measurable_pl_db = {max_pl:.2}");

    let freq_hz = match args.freq_ghz {
        Some(f) => f * 1e9,
        None => config.sounder.rf_center_frequency_hz()?,
    };
    println!("reach_freq_ghz = {}", freq_hz / 1e9);
    println!("ple,max_distance_m");
    for &ple in &args.ple {
        let reach = max_distance_m(max_pl, freq_hz, ple, 1.0)?;
        println!("{ple},{reach:.1}");
    }
    Ok(ExitCode::SUCCESS)
}

fn ingest_records(path: &Path) -> Result<Vec<mmprop::MeasurementRecord>, Error> {
    let ingest = parse_records(path)?;
    if !ingest.is_clean() {
        for diagnostic in &ingest.diagnostics {
            eprintln!("{}: {diagnostic}", path.display());
        }
        return Err(Error::Schema(format!(
            "{} rejected line(s) in {}",
            ingest.diagnostics.len(),
            path.display()
        )));
    }
    Ok(ingest.records)
}

fn run_fit(args: FitArgs) -> CmdResult {
    let config = load_config(&args.config)?;
    let records = ingest_records(&args.records)?;
    let (samples, excluded) = to_pl_samples(&records)?;
    if excluded > 0 {
        println!("# {excluded} material-under-test record(s) routed to penetration analysis");
    }

    let models = match &args.models {
        Some(names) => names
            .iter()
            .map(|n| ModelKind::parse(n))
            .collect::<Result<Vec<_>, _>>()?,
        None => config.fit_models.clone(),
    };
    let options = FitOptions {
        d0_m: args.d0_m.unwrap_or(config.fit_d0_m),
        f0_override_hz: args.f0_ghz.map(|f| f * 1e9).or(config.fit_f0_override_hz),
    };
    let comparison = compare_models(&samples, &models, &options)?;
    let bootstrap = if args.bootstrap > 0 {
        Some(bootstrap_ple_std(
            &samples,
            &models,
            args.bootstrap,
            args.seed,
            &options,
        )?)
    } else {
        None
    };
    let report = FitReport::from_comparison(samples.len(), &comparison, bootstrap.as_deref());

    println!("# {} samples", samples.len());
    println!("model,sigma_db,parameters");
    for row in &comparison.rows {
        println!(
            "{},{:.2},{}",
            row.model.kind(),
            row.model.sigma_db(),
            row.model.describe()
        );
    }
    for (kind, reason) in &comparison.skipped {
        println!("# skipped {kind}: {reason}");
    }
    if let Some(rows) = &bootstrap {
        println!("model,bootstrap_fits,ple_std");
        for row in rows {
            println!("{},{},{:.4}", row.model, row.fitted, row.ple_std);
        }
    }
    if let Some(out) = &args.out {
        emit_report(&report, ReportFormat::parse(&args.format)?, out)?;
        println!("# report written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_penetrate(args: PenetrateArgs) -> CmdResult {
    if let Some(path) = &args.export_reference {
        std::fs::write(path, emit_records(&reference_replay_records()))?;
        println!("# reference replay records written to {}", path.display());
        if args.records.is_none() {
            return Ok(ExitCode::SUCCESS);
        }
    }
    let records = ingest_records(args.records.as_ref().expect("records required"))?;
    let (measurements, routing) = to_penetration_measurements(&records);
    if routing.non_mut > 0 {
        println!(
            "# {} record(s) without a material under test skipped",
            routing.non_mut
        );
    }
    if routing.cross_polarized > 0 {
        println!(
            "# {} cross-polarized record(s) skipped (only co-polarized loss is defined)",
            routing.cross_polarized
        );
    }
    if measurements.is_empty() {
        return Err(Error::InsufficientData(
            "no material-under-test records in the input".into(),
        ));
    }
    let aggregates = aggregate_by_material(&measurements)?;
    let report = PenetrationReport::from_aggregates(&aggregates);
    print!("{}", report.to_csv());

    let results: Vec<mmprop::MaterialResult> =
        aggregates.iter().map(|a| a.result.clone()).collect();
    println!("class,frequencies_ghz,db_per_cm,verdict");
    for trend in frequency_trend(&results) {
        let freqs: Vec<String> = trend.points.iter().map(|(f, _)| format!("{f}")).collect();
        let values: Vec<String> = trend.points.iter().map(|(_, v)| format!("{v:.2}")).collect();
        let verdict = match trend.verdict {
            TrendVerdict::MonotoneIncreasing => "monotone-increasing",
            TrendVerdict::NotMonotone => "not-monotone",
            TrendVerdict::Skipped => "skipped",
        };
        println!(
            "{},{},{},{verdict}",
            trend.class,
            freqs.join("|"),
            values.join("|")
        );
    }
    if let Some(out) = &args.out {
        emit_report(&report, ReportFormat::parse(&args.format)?, out)?;
        println!("# report written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_sound(args: SoundArgs) -> CmdResult {
    let config = load_config(&args.config)?;
    let cfg = config.sounder;
    cfg.validate()?;

    let channel: ChannelSpec = match (&args.channel, args.synth_seed) {
        (Some(path), None) => ChannelSpec::from_text(&std::fs::read_to_string(path)?)?,
        (None, seed) => synth_channel(
            seed.unwrap_or(args.seed),
            args.mean_clusters,
            args.mean_mpcs,
            args.delay_scale_ns * 1e-9,
            args.decay_db_per_ns,
        )?,
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let carrier_frequency = cfg.rf_center_frequency_hz()?;
    let path_loss_db = match (args.path_loss_db, args.distance_m) {
        (Some(pl), _) => pl,
        (None, Some(d)) => fspl_db(carrier_frequency, d)?,
        (None, None) => fspl_db(carrier_frequency, 5.0)?,
    };
    let noise_dbm = args.noise_dbm.unwrap_or(config.noise_power_dbm);

    let pn = generate_default_msequence(cfg.pn_order)?;
    let rx = propagate(&pn, &channel, &cfg, path_loss_db, noise_dbm, args.seed)?;
    let pdp = sliding_correlate(&rx, &pn, &cfg)?;

    println!("# injected_path_loss_db = {path_loss_db:.2}");
    println!("# channel_taps = {}", channel.taps().len());
    println!("# noise_power_dbm = {noise_dbm}");
    println!("# acquisition_period_ms = {:.2}", cfg.acquisition_period_s() * 1e3);
    println!("# noise_floor_db = {:.2}", pdp.noise_floor_db());

    let extracted = extract_multipath(&pdp, args.threshold_db)?;
    if extracted.noise_limited {
        println!("# extraction threshold is noise-limited");
    }
    println!("delay_ns,power_dbm");
    for tap in &extracted.taps {
        println!("{:.3},{:.2}", tap.delay_s * 1e9, tap.power_dbm);
    }

    if let Some(out) = &args.out_pdp {
        std::fs::write(out, pdp.export_text())?;
        println!("# pdp written to {}", out.display());
    }

    let recovered = measured_path_loss(&pdp, &cfg)?;
    println!("recovered_path_loss_db = {recovered:.2}");
    println!("max_measurable_pl_db = {:.2}", cfg.max_measurable_pl());
    Ok(ExitCode::SUCCESS)
}

fn run_verify() -> CmdResult {
    let results = verify::run_all();
    let mut all_ok = true;
    for check in &results {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<20} {}", check.name, check.detail);
        all_ok &= check.passed;
    }
    if all_ok {
        println!("all {} checks passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Error::Schema("verification checks failed".into()))
    }
}
