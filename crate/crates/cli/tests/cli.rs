//! End-to-end checks of the `mmprop` binary: subcommand output and the
//! exit-code contract (0 success, 2 usage, 3 schema/validation, 4 degenerate
//! fit, 5 below sensitivity, 6 I/O).

use std::path::PathBuf;
use std::process::{Command, Output};

fn mmprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmprop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn data(name: &str) -> String {
    let path: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "core",
        "tests",
        "data",
        name,
    ]
    .iter()
    .collect();
    path.to_string_lossy().into_owned()
}

fn write_temp(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("mmprop-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_passes_on_pristine_checkout() {
    let output = mmprop(&["verify"]);
    let text = stdout(&output);
    assert!(output.status.success(), "verify failed:\n{text}");
    assert_eq!(text.matches("PASS").count(), 12, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn fspl_grid_starts_at_75_37() {
    let output = mmprop(&["fspl", "--freq-ghz", "140", "--dist-m", "1,2,3,4,5"]);
    assert!(output.status.success());
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "freq_ghz,distance_m,fspl_db");
    assert_eq!(lines[1], "140,1,75.37");
    assert_eq!(lines[5], "140,5,89.35");
}

#[test]
fn fspl_with_atmospheric_excess() {
    let output = mmprop(&[
        "fspl",
        "--freq-ghz",
        "140",
        "--dist-m",
        "1000",
        "--atmos-default",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("freq_ghz,distance_m,fspl_db,atmos_excess_db,total_db"));
    // 1 km at 140 GHz: 135.37 dB free space plus at most 1 dB of air.
    assert!(text.contains("140,1000,135.37,1.00,136.37"), "{text}");

    let from_file = mmprop(&[
        "fspl",
        "--freq-ghz",
        "140",
        "--dist-m",
        "1000",
        "--atmos-table",
        &data("atmos_anchors.csv"),
    ]);
    assert_eq!(stdout(&from_file), text);
}

#[test]
fn fspl_reads_atmos_table_from_config() {
    let config = write_temp(
        "atmos.conf",
        &format!("atmos_table = {}\n", data("atmos_anchors.csv")),
    );
    let output = mmprop(&["fspl", "--freq-ghz", "140", "--dist-m", "1000", "--config", &config]);
    assert!(output.status.success(), "{}", stdout(&output));
    assert!(stdout(&output).contains("140,1000,135.37,1.00,136.37"));
}

#[test]
fn budget_accepts_config_file() {
    let output = mmprop(&["budget", "--config", &data("campaign.conf"), "--ple", "2"]);
    assert!(output.status.success(), "{}", stdout(&output));
    let text = stdout(&output);
    assert!(text.contains("max_measurable_pl_db = 145.00"), "{text}");
}

#[test]
fn budget_reports_145_db() {
    let output = mmprop(&["budget", "--ple", "2,4.3"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("max_measurable_pl_db = 145.00"), "{text}");
    assert!(text.contains("rx_sensitivity_dbm = -24.77"), "{text}");
}

#[test]
fn fit_on_single_frequency_file_skips_multiband_models() {
    let output = mmprop(&["fit", "--records", &data("freespace_140ghz.csv")]);
    assert!(output.status.success(), "exit {:?}", output.status);
    let text = stdout(&output);
    assert!(text.contains("# skipped CIF"), "{text}");
    assert!(text.contains("# skipped ABG"), "{text}");
    assert!(text.contains("CI,0.00"), "{text}");
}

#[test]
fn fit_emits_byte_identical_reports() {
    let out_a = write_temp("report-a.json", "");
    let out_b = write_temp("report-b.json", "");
    for out in [&out_a, &out_b] {
        let output = mmprop(&[
            "fit",
            "--records",
            &data("freespace_140ghz.csv"),
            "--out",
            out,
            "--format",
            "json",
        ]);
        assert!(output.status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn penetrate_replays_reference_table() {
    let output = mmprop(&["penetrate", "--records", &data("table2_replay.csv")]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("Drywall B,140,14.5,1,15.02,1.04"), "{text}");
    assert!(text.contains("Clear glass,28|73|140"), "{text}");
    assert!(text.contains("monotone-increasing"), "{text}");
}

#[test]
fn sound_loopback_reports_path_loss() {
    let pdp_path = write_temp("loopback.pdp", "");
    let channel = write_temp("identity.taps", "0,0,0,0\n");
    let output = mmprop(&[
        "sound",
        "--channel",
        &channel,
        "--distance-m",
        "3",
        "--noise-dbm",
        "-110",
        "--out-pdp",
        &pdp_path,
    ]);
    assert!(output.status.success(), "{}", stdout(&output));
    let text = stdout(&output);
    // FSPL at the 142 GHz RF center, 3 m: 85.04 dB.
    assert!(text.contains("# injected_path_loss_db = 85.04"), "{text}");
    assert!(text.contains("recovered_path_loss_db = 85.0"), "{text}");
    let pdp = std::fs::read_to_string(&pdp_path).unwrap();
    assert!(pdp.starts_with("# slide_factor = 8000\n"));
    assert!(pdp.contains("dilated_time_s,power_db"));
}

#[test]
fn usage_errors_exit_2() {
    let output = mmprop(&["warp-drive"]);
    assert_eq!(output.status.code(), Some(2));
    let output = mmprop(&["fspl", "--freq-ghz", "140"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn schema_errors_exit_3() {
    let bad = write_temp(
        "bad.csv",
        "freq_ghz,distance_m,pt_dbm,pr_dbm,gt_dbi,gr_dbi,env,mut_name,mut_thickness_cm,polarization\n140,nope,0,-21,27,27,LOS,,,V-V\n",
    );
    let output = mmprop(&["fit", "--records", &bad]);
    assert_eq!(output.status.code(), Some(3));
    let missing = write_temp("missing.csv", "freq_ghz,distance_m\n140,1\n");
    let output = mmprop(&["fit", "--records", &missing]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn degenerate_fit_exits_4() {
    let single_distance = write_temp(
        "single-distance.csv",
        "freq_ghz,distance_m,pt_dbm,pr_dbm,gt_dbi,gr_dbi,env,mut_name,mut_thickness_cm,polarization\n140,1,0,-21.4,27,27,LOS,,,V-V\n140,1,0,-21.5,27,27,LOS,,,V-V\n",
    );
    let output = mmprop(&["fit", "--records", &single_distance]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn below_sensitivity_exits_5() {
    let channel = write_temp("identity2.taps", "0,0,0,0\n");
    let output = mmprop(&[
        "sound",
        "--channel",
        &channel,
        "--path-loss-db",
        "150",
        "--noise-dbm",
        "-110",
    ]);
    assert_eq!(output.status.code(), Some(5), "{}", stdout(&output));
}

#[test]
fn unwritable_output_exits_6() {
    let output = mmprop(&[
        "fit",
        "--records",
        &data("freespace_140ghz.csv"),
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(output.status.code(), Some(6));
}

#[test]
fn export_reference_matches_fixture() {
    let out = write_temp("reference.csv", "");
    let output = mmprop(&["penetrate", "--export-reference", &out]);
    assert!(output.status.success());
    let exported = std::fs::read_to_string(&out).unwrap();
    let fixture = std::fs::read_to_string(data("table2_replay.csv")).unwrap();
    assert_eq!(exported, fixture);
}
