use std::path::Path;
use std::process::{Command, Output};

fn polymul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polymul")).args(args).output().expect("spawn polymul")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn gen_example_config() {
    let out = tempfile::tempdir().unwrap();
    let config = manifest_dir().join("../../configs/example.xml");
    let o = polymul(&["gen", "--config", config.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).ends_with("6 job(s) ok, 0 failed\n"));
    let manifest = std::fs::read_to_string(out.path().join("manifest.tsv")).unwrap();
    assert_eq!(manifest.lines().count(), 18);
    for line in manifest.lines() {
        let fields: Vec<_> = line.split('\t').collect();
        assert_eq!(fields.len(), 7, "{line}");
        assert!(out.path().join(fields[5]).is_file());
        assert_eq!(fields[6].len(), 64);
    }
    assert!(manifest.contains("wrapper/sbm\t1024\t64\tinteger\t1024\tvlog/mul_ds_1024_64_sbm.v\t"));
    assert!(manifest.contains("tc4\t192\t-\tinteger\t51\tvlog/mul_tc4_192.v\t"));
}

#[test]
fn failing_job_exits_1_and_others_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.xml");
    std::fs::write(&config, r#"<config version="1"><job method="sbm" width="3"/><job method="km2" width="32"/></config>"#).unwrap();
    let out = dir.path().join("out");
    let o = polymul(&["gen", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m=3"));
    assert!(out.join("vlog/mul_km2_32.v").is_file());
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.xml");
    std::fs::write(&config, "<config version=\"1\">\n  <job method=\"tc3\" width=\"64\" mode=\"gf2\"/>\n</config>\n").unwrap();
    let o = polymul(&["gen", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("c.xml:2:"), "{err}");
    assert!(!dir.path().join("manifest.tsv").exists());
}

#[test]
fn model_subcommand() {
    let o = polymul(&["model", "--method", "toom3", "--m", "18", "--a", "3FFFF", "--b", "3FFFF"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "FFFF80001\ncycles=8\n");
    let o = polymul(&["model", "--method", "wrapper", "--digit", "4", "--m", "8", "--mode", "gf2", "--a", "FF", "--b", "FF"]);
    assert_eq!(stdout(&o), "5555\ncycles=8\n");
}

#[test]
fn verify_subcommand() {
    let o = polymul(&["verify", "--method", "karatsuba", "--m", "40", "--vectors", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "mul_km2_40: 30 vectors match, latency 21 cycles\n");
}

#[test]
fn analyze_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.csv");
    let csv = manifest_dir().join("tests/fixtures/fpga_digit_serial.csv");
    let o = polymul(&["analyze", "--csv", csv.to_str().unwrap(), "--out", dest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&dest).unwrap();
    assert_eq!(written.lines().count(), 21);
    assert!(written.lines().next().unwrap().ends_with("latency_us,fom_area,fom_power,is_argmax_area,is_argmax_power"));
    let o = polymul(&["analyze", "--csv", csv.to_str().unwrap(), "--area-col", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_usage() {
    assert_eq!(polymul(&["--help"]).status.code(), Some(0));
    assert_eq!(polymul(&[]).status.code(), Some(2));
    assert_eq!(polymul(&["model", "--method", "sbm", "--m", "8", "--a", "1"]).status.code(), Some(2));
}
