//! Shared helpers for the integration and acceptance suites.
#![allow(dead_code)] // each test target uses a different subset

use std::path::Path;
use std::process::{Command, Output};

/// Run the mmwchan binary with arguments and optional extra env vars.
pub fn run_cli(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mmwchan"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn mmwchan binary")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Parse a delimiter-separated table: skips `#` comment lines, returns
/// (header, rows).
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .expect("table has a header")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

/// Extract one named table from concatenated CLI output by its header line.
pub fn section_with_header<'a>(text: &'a str, header: &str) -> &'a str {
    let start = text.find(header).expect("header present in output");
    &text[start..]
}

pub fn write_file(path: &Path, contents: &str) {
    std::fs::write(path, contents).expect("write test file");
}

/// The published beam-combining PLE table used by the acceptance gate:
/// (freq label, all-angles PLE, k=1 baseline,
///  coherent (k, ple, dee, d2 at 200 m) rows, non-coherent rows).
pub type PublishedGroup = (
    &'static str,
    f64,
    f64,
    [(usize, f64, f64, f64); 3],
    [(usize, f64, f64, f64); 3],
);

pub fn published_dee_table() -> [PublishedGroup; 2] {
    [
        (
            "28GHz",
            4.556,
            3.812,
            [
                (2, 3.548, 1.074, 296.0),
                (3, 3.406, 1.119, 376.0),
                (4, 3.307, 1.153, 450.0),
            ],
            [
                (2, 3.692, 1.033, 238.0),
                (3, 3.631, 1.050, 261.0),
                (4, 3.591, 1.062, 278.0),
            ],
        ),
        (
            "73GHz",
            4.687,
            3.728,
            [
                (2, 3.466, 1.076, 300.0),
                (3, 3.327, 1.121, 380.0),
                (4, 3.235, 1.152, 448.0),
            ],
            [
                (2, 3.613, 1.032, 237.0),
                (3, 3.557, 1.048, 258.0),
                (4, 3.523, 1.058, 272.0),
            ],
        ),
    ]
}

/// JSON text of the PLE input file carrying the published exponents.
pub fn published_ple_file_json() -> String {
    let mut groups = Vec::new();
    for (label, all_angles, baseline, coherent, noncoherent) in published_dee_table() {
        let entry = |rows: &[(usize, f64, f64, f64); 3]| {
            rows.iter()
                .map(|(k, ple, _, _)| format!("{{\"k\": {k}, \"ple\": {ple}}}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        groups.push(format!(
            "{{\"freq_label\": \"{label}\", \"baseline_ple\": {baseline}, \
             \"all_angles_ple\": {all_angles}, \
             \"coherent\": [{}], \"noncoherent\": [{}]}}",
            entry(&coherent),
            entry(&noncoherent)
        ));
    }
    format!("{{\"groups\": [{}]}}\n", groups.join(", "))
}
