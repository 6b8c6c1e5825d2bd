//! Embedded replication suite behind the `verify` CLI subcommand.
//!
//! Each check replays one published figure of merit of the 140 GHz system
//! end to end: FSPL deltas, constant-aperture scaling, the 142 GHz frequency
//! plan, the 66 dB processing gain and tens-of-ms acquisition, the 145 dB
//! dynamic range, sounder loopback, the penetration table, per-material
//! frequency trends, fit recovery, channel statistics, and determinism of
//! the I/O surfaces.

use crate::campaign::{
    emit_records, parse_records_from_reader, reference_replay_records, to_penetration_measurements,
};
use crate::linkbudget::{calibrate_sensitivity, max_measurable_pl};
use crate::penetration::{
    aggregate_by_material, avg_loss_per_cm, frequency_trend, reference_table, TrendVerdict,
};
use crate::plfit::{fit_abg, fit_ci, fit_cif, PlSample};
use crate::rfmath::{
    aperture_received_power_dbm, atmospheric_excess_db, fspl_db, friis_received_power_dbm,
    gain_from_aperture_dbi, Aperture, AtmosTable,
};
use crate::sounder::{
    generate_default_msequence, measured_path_loss, processing_gain_db, propagate,
    sliding_correlate, synth_channel, ChannelSpec, ChannelTap, SounderConfig,
};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Run the full replication suite.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_fspl_deltas(),
        check_aperture_scaling(),
        check_frequency_plan(),
        check_processing_gain_and_timing(),
        check_atmospheric_window(),
        check_dynamic_range(),
        check_sounder_loopback(),
        check_penetration_table(),
        check_frequency_trend(),
        check_fit_recovery(),
        check_channel_statistics(),
        check_determinism(),
    ]
}

fn result(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn check_fspl_deltas() -> CheckResult {
    let fspl_1m = fspl_db(140e9_f64, 1.0).unwrap();
    let d_140_73 = fspl_db(140e9_f64, 3.0).unwrap() - fspl_db(73e9_f64, 3.0).unwrap();
    let d_73_28 = fspl_db(73e9_f64, 3.0).unwrap() - fspl_db(28e9_f64, 3.0).unwrap();
    let passed = (fspl_1m - 75.37).abs() < 0.005
        && (d_140_73 - 5.66).abs() < 0.005
        && (d_73_28 - 8.32).abs() < 0.005;
    result(
        "fspl-deltas",
        passed,
        format!(
            "FSPL(140 GHz, 1 m) = {fspl_1m:.2} dB; 140-73 delta {d_140_73:.3} dB (5.66); \
             73-28 delta {d_73_28:.3} dB (8.32)"
        ),
    )
}

fn check_aperture_scaling() -> CheckResult {
    let ae = Aperture::new(2.9_f64).unwrap();
    let p140 = aperture_received_power_dbm(0.0, ae, ae, 140e9, 10.0).unwrap();
    let p73 = aperture_received_power_dbm(0.0, ae, ae, 73e9, 10.0).unwrap();
    let p28 = aperture_received_power_dbm(0.0, ae, ae, 28e9, 10.0).unwrap();
    let d73 = p140 - p73;
    let d28 = p140 - p28;
    let gt = gain_from_aperture_dbi(ae, 140e9).unwrap();
    let equiv = (aperture_received_power_dbm(0.0, ae, ae, 140e9, 5.0).unwrap()
        - friis_received_power_dbm(0.0, gt, gt, 140e9, 5.0).unwrap())
    .abs();
    let passed = (d73 - 5.7).abs() < 0.1 && (d28 - 14.0).abs() < 0.1 && equiv < 1e-9;
    result(
        "aperture-scaling",
        passed,
        format!(
            "equal 2.9 cm2 apertures: 140 GHz beats 73 GHz by {d73:.2} dB (5.7) and \
             28 GHz by {d28:.2} dB (14); Friis equivalence gap {equiv:.1e} dB"
        ),
    )
}

fn check_frequency_plan() -> CheckResult {
    let cfg = SounderConfig::<f64>::default();
    match (cfg.validate(), cfg.rf_center_frequency_hz()) {
        (Ok(()), Ok(center)) => result(
            "frequency-plan",
            (center - 142e9).abs() < 1.0,
            format!(
                "11.25 GHz x 12 + 7 GHz = {} GHz, inside the {}-{} GHz passband",
                center / 1e9,
                cfg.passband_hz.0 / 1e9,
                cfg.passband_hz.1 / 1e9
            ),
        ),
        (err, _) => result("frequency-plan", false, format!("{err:?}")),
    }
}

fn check_processing_gain_and_timing() -> CheckResult {
    let pg = processing_gain_db::<f64>(11);
    let cfg = SounderConfig::<f64>::default();
    let period = cfg.acquisition_period_s();
    let passed = (pg - 66.0).abs() < 0.3 && (1e-3..=100e-3).contains(&period);
    result(
        "processing-gain",
        passed,
        format!(
            "11-bit PN: {pg:.2} dB autocorrelation gain (66); acquisition period \
             {:.2} ms (tens of ms)",
            period * 1e3
        ),
    )
}

fn check_atmospheric_window() -> CheckResult {
    let table = AtmosTable::<f64>::default_table();
    match atmospheric_excess_db(140e9, 1.0, &table) {
        Ok(excess) => result(
            "atmospheric-window",
            excess <= 1.0,
            format!("140 GHz excess attenuation {excess:.2} dB/km (at most 1)"),
        ),
        Err(e) => result("atmospheric-window", false, e.to_string()),
    }
}

fn check_dynamic_range() -> CheckResult {
    let cfg = SounderConfig::<f64>::default();
    let mut budget = cfg.budget();
    budget.rx_sensitivity_dbm = calibrate_sensitivity(145.0, &budget);
    let max_pl = max_measurable_pl(&budget).unwrap();
    let identity_ok = (max_pl - 145.0).abs() < 1e-12
        && (budget.rx_sensitivity_dbm - (-24.77)).abs() < 0.005;

    let pn = generate_default_msequence(cfg.pn_order).unwrap();
    let run = |pl: f64| {
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, -100.0, 7).unwrap();
        measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg)
    };
    let detected = run(142.0);
    let rejected = run(148.0);
    let passed = identity_ok && detected.is_ok() && rejected.is_err();
    result(
        "dynamic-range",
        passed,
        format!(
            "calibrated sensitivity {:.2} dBm closes the budget at {max_pl:.2} dB; \
             142 dB link {}, 148 dB link {}",
            budget.rx_sensitivity_dbm,
            if detected.is_ok() { "detected" } else { "missed" },
            if rejected.is_err() { "rejected" } else { "accepted" },
        ),
    )
}

fn check_sounder_loopback() -> CheckResult {
    let cfg = SounderConfig::<f64>::default();
    let pn = generate_default_msequence(cfg.pn_order).unwrap();
    let no_noise = f64::NEG_INFINITY;

    // Peak-to-sidelobe ratio of the noiseless identity channel.
    let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 75.37, no_noise, 0).unwrap();
    let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
    let q = cfg.oversampling as usize;
    let peak = pdp.powers_db()[0];
    let sidelobe = pdp
        .powers_db()
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i).min(pdp.len() - *i) > q)
        .map(|(_, &p)| p)
        .fold(f64::NEG_INFINITY, f64::max);
    let pslr = peak - sidelobe;

    // Injected-vs-recovered path loss sweep.
    let mut sweep_err = 0.0_f64;
    for pl in [60.0, 90.0, 120.0, 140.0] {
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, no_noise, 0).unwrap();
        let recovered = measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg);
        match recovered {
            Ok(r) => sweep_err = sweep_err.max((r - pl).abs()),
            Err(_) => sweep_err = f64::INFINITY,
        }
    }

    // Two-path recovery.
    let two_path = ChannelSpec::new(
        vec![
            ChannelTap {
                delay_s: 0.0,
                gain_db: 0.0,
                phase_rad: 0.0,
                cluster: 0,
            },
            ChannelTap {
                delay_s: 10e-9,
                gain_db: -6.0,
                phase_rad: 1.1,
                cluster: 1,
            },
        ],
        0.0,
    )
    .unwrap();
    let rx = propagate(&pn, &two_path, &cfg, 80.0, no_noise, 0).unwrap();
    let pdp2 = sliding_correlate(&rx, &pn, &cfg).unwrap();
    let taps = crate::sounder::extract_multipath(&pdp2, 20.0).unwrap().taps;
    let budget_db = cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi;
    let two_path_ok = taps.len() == 2
        && taps[0].delay_s.abs() < 0.25e-9
        && (taps[1].delay_s - 10e-9).abs() < 0.25e-9
        && (taps[0].power_dbm - (budget_db - 80.0)).abs() < 0.5
        && (taps[1].power_dbm - (budget_db - 86.0)).abs() < 0.5;

    let passed = pslr >= 65.7 && sweep_err <= 0.2 && two_path_ok;
    result(
        "sounder-loopback",
        passed,
        format!(
            "identity PSLR {pslr:.2} dB (>= 65.7); max |recovered - injected| \
             {sweep_err:.3} dB over 60-140 dB; two-path taps {}",
            if two_path_ok { "recovered" } else { "wrong" },
        ),
    )
}

fn check_penetration_table() -> CheckResult {
    let table = reference_table::<f64>();
    let mut consistent = 0usize;
    let mut misprints = Vec::new();
    for row in &table {
        let computed = avg_loss_per_cm(row.loss_db, row.thickness_cm).unwrap();
        if (computed - row.loss_per_cm).abs() <= 0.01 {
            consistent += 1;
        } else {
            misprints.push(format!(
                "{} @ {} GHz prints {} dB/cm, loss/thickness = {computed:.2}",
                row.material, row.frequency_ghz, row.loss_per_cm
            ));
        }
    }
    // The published table carries one internally inconsistent row (73 GHz
    // Drywall B); it is embedded verbatim and flagged here.
    let passed = table.len() == 11
        && consistent == 10
        && misprints.len() == 1
        && misprints[0].starts_with("Drywall B @ 73");
    result(
        "penetration-table",
        passed,
        format!(
            "11 rows embedded; {consistent} round-trip within 0.01 dB/cm; known \
             published misprint: {}",
            misprints.join("; ")
        ),
    )
}

fn check_frequency_trend() -> CheckResult {
    let reports = frequency_trend(&reference_table::<f64>());
    let verdict = |class: &str| {
        reports
            .iter()
            .find(|r| r.class == class)
            .map(|r| r.verdict)
    };
    let glass = verdict("Clear glass");
    let drywall = verdict("Drywall");
    let passed = glass == Some(TrendVerdict::MonotoneIncreasing)
        && drywall == Some(TrendVerdict::MonotoneIncreasing);
    let fmt_points = |class: &str| {
        reports
            .iter()
            .find(|r| r.class == class)
            .map(|r| {
                r.points
                    .iter()
                    .map(|(f, v)| format!("{f:.0} GHz: {v:.2}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_default()
    };
    result(
        "frequency-trend",
        passed,
        format!(
            "per-cm loss strictly increases with frequency; clear glass [{}], \
             drywall [{}]",
            fmt_points("Clear glass"),
            fmt_points("Drywall"),
        ),
    )
}

fn check_fit_recovery() -> CheckResult {
    let mut samples = Vec::new();
    for &f in &[28e9, 73e9, 140e9_f64] {
        for &d in &[1.0, 2.0, 3.0, 4.0, 5.0_f64] {
            samples.push(PlSample::new(f, d, fspl_db(f, d).unwrap()).unwrap());
        }
    }
    let ci = fit_ci(&samples).unwrap();
    let abg = fit_abg(&samples).unwrap();
    let cif = fit_cif(&samples, None).unwrap();
    let passed = (ci.ple - 2.0).abs() < 1e-9
        && ci.sigma_db < 1e-9
        && (abg.alpha - 2.0).abs() < 1e-9
        && (abg.gamma - 2.0).abs() < 1e-9
        && (abg.beta_db - 32.45).abs() < 0.005
        && (cif.ple_at_f0 - 2.0).abs() < 1e-9
        && cif.b.abs() < 1e-9;
    result(
        "fit-recovery",
        passed,
        format!(
            "free-space data: CI n = {:.3} sigma = {:.1e} dB; ABG (alpha, beta, gamma) = \
             ({:.3}, {:.2} dB, {:.3}); CIF b = {:.1e}",
            ci.ple, ci.sigma_db, abg.alpha, abg.beta_db, abg.gamma, cif.b
        ),
    )
}

fn check_channel_statistics() -> CheckResult {
    let seeds = 10_000u64;
    let mut clusters_total = 0usize;
    let mut taps_total = 0usize;
    for seed in 0..seeds {
        let ch = synth_channel::<f64>(seed, 5.9, 3.8, 20e-9, 0.1).unwrap();
        clusters_total += ch.cluster_count();
        taps_total += ch.taps().len();
    }
    let mean_clusters = clusters_total as f64 / seeds as f64;
    let mean_mpcs = taps_total as f64 / clusters_total as f64;
    let passed =
        (mean_clusters - 5.9).abs() / 5.9 < 0.02 && (mean_mpcs - 3.8).abs() / 3.8 < 0.02;
    result(
        "channel-statistics",
        passed,
        format!(
            "10000 seeds: mean clusters {mean_clusters:.3} (5.9 +/- 2%), mean multipath \
             components per cluster {mean_mpcs:.3} (3.8 +/- 2%)"
        ),
    )
}

fn check_determinism() -> CheckResult {
    // Seeded simulation reproduces bit-identical PDPs.
    let cfg = SounderConfig::<f64> {
        pn_order: 8,
        ..SounderConfig::default()
    };
    let pn = generate_default_msequence(cfg.pn_order).unwrap();
    let ch = synth_channel(3, 5.9, 3.8, 10e-9, 0.2).unwrap();
    let run = || {
        let rx = propagate(&pn, &ch, &cfg, 85.0, -95.0, 11).unwrap();
        sliding_correlate(&rx, &pn, &cfg).unwrap()
    };
    let pdp_identical = run() == run();

    // Record files round-trip exactly and re-emit byte-identically.
    let records = reference_replay_records();
    let text = emit_records(&records);
    let reparsed = parse_records_from_reader(text.as_bytes()).unwrap();
    let round_trip = reparsed.is_clean()
        && reparsed.records == records
        && emit_records(&reparsed.records) == text;

    // Replayed records land back on the published losses.
    let (measurements, _) = to_penetration_measurements(&records);
    let aggregates = aggregate_by_material(&measurements).unwrap();
    let replay_ok = aggregates.len() == 11
        && aggregates.iter().all(|agg| {
            reference_table::<f64>().iter().any(|r| {
                r.material == agg.result.material
                    && r.frequency_ghz == agg.result.frequency_ghz
                    && (r.loss_db - agg.result.loss_db).abs() < 1e-9
            })
        });

    let passed = pdp_identical && round_trip && replay_ok;
    result(
        "determinism",
        passed,
        format!(
            "seeded PDP bit-identical: {pdp_identical}; record round-trip exact: \
             {round_trip}; reference replay recovers published losses: {replay_ok}"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_replication_check_passes() {
        let results = run_all();
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert!(all_passed(&results));
        assert_eq!(results.len(), 12);
    }
}
