//! Distance extension math for beam combining.
//!
//! With both path loss models anchored at the same 1 m free-space reference,
//! equal path loss between the single best beam (exponent `n1`, distance
//! `d1`) and a multibeam combination (exponent `n2`, distance `d2`) forces
//! `d2 = d1^(n1/n2)`. The ratio `n1/n2` is the distance extension exponent
//! (DEE); the coverage multiplier `d2/d1 = d1^(DEE-1)` is the distance
//! extension factor (DEF).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::combining::CombineMode;
use crate::pathloss::CloseInModel;
use crate::{Error, Result};

/// A distance extension exponent together with the exponents it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeeResult {
    pub n1: f64,
    pub n2: f64,
    pub dee: f64,
    pub mode: Option<CombineMode>,
    pub k_beams: Option<usize>,
}

/// DEE of a single-beam exponent `n1` against a multibeam exponent `n2`.
/// Requires `n1 >= n2 > 0` (combining more power can never steepen the
/// distance-vs-loss slope).
pub fn dee(n1: f64, n2: f64) -> Result<DeeResult> {
    if !(n2 > 0.0) || !n1.is_finite() || !n2.is_finite() {
        return Err(Error::Domain(format!(
            "exponents must be positive, got n1 = {n1}, n2 = {n2}"
        )));
    }
    if n1 < n2 {
        return Err(Error::Domain(format!(
            "n1 must be >= n2 (single-beam exponent below multibeam exponent: \
             n1 = {n1}, n2 = {n2})"
        )));
    }
    Ok(DeeResult {
        n1,
        n2,
        dee: n1 / n2,
        mode: None,
        k_beams: None,
    })
}

fn check_extension_args(d1_m: f64, dee: f64) -> Result<()> {
    if !(d1_m >= 1.0) {
        return Err(Error::Domain(format!(
            "d1 must be >= 1 m (the model anchor), got {d1_m}"
        )));
    }
    if !(dee >= 1.0) {
        return Err(Error::Domain(format!("DEE must be >= 1, got {dee}")));
    }
    Ok(())
}

/// Equal-path-loss multibeam distance: `d2 = d1^dee`.
pub fn extended_distance_m(d1_m: f64, dee: f64) -> Result<f64> {
    check_extension_args(d1_m, dee)?;
    Ok(d1_m.powf(dee))
}

/// Coverage multiplier `d2/d1 = d1^(dee - 1)`.
pub fn distance_extension_factor(d1_m: f64, dee: f64) -> Result<f64> {
    check_extension_args(d1_m, dee)?;
    Ok(d1_m.powf(dee - 1.0))
}

/// Sampled (d1, d2) extension curve from `d_min` to `d_max` inclusive.
pub fn extension_curve(
    dee: f64,
    d_min_m: f64,
    d_max_m: f64,
    step_m: f64,
) -> Result<Vec<(f64, f64)>> {
    check_extension_args(d_min_m, dee)?;
    if !(d_min_m < d_max_m) {
        return Err(Error::InvalidArgument(format!(
            "empty range: d_min {d_min_m} must be < d_max {d_max_m}"
        )));
    }
    if !(step_m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be > 0, got {step_m}"
        )));
    }
    if (d_max_m - d_min_m) / step_m > 1e7 {
        return Err(Error::InvalidArgument(format!(
            "curve would need {} points; shrink the range or grow the step",
            ((d_max_m - d_min_m) / step_m) as u64
        )));
    }
    let mut curve = Vec::new();
    let mut i = 0u64;
    loop {
        let d = d_min_m + i as f64 * step_m;
        if d >= d_max_m - 1e-9 * d_max_m {
            break;
        }
        curve.push((d, d.powf(dee)));
        i += 1;
    }
    curve.push((d_max_m, d_max_m.powf(dee)));
    Ok(curve)
}

/// Published or fitted PLEs for one frequency: the k = 1 baseline plus the
/// multibeam exponents per combining mode and beam count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PleGroup {
    pub freq_label: String,
    /// Single-best-beam (k = 1) exponent.
    pub baseline_ple: f64,
    /// Over-all-angles exponent; informational, not used in the DEE math.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_angles_ple: Option<f64>,
    #[serde(default)]
    pub coherent: Vec<PleEntry>,
    #[serde(default)]
    pub noncoherent: Vec<PleEntry>,
}

/// One (beam count, exponent) pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PleEntry {
    pub k: usize,
    pub ple: f64,
}

/// Top-level PLE file: `{"groups": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PleFile {
    pub groups: Vec<PleGroup>,
}

/// Parse a PLE input file (JSON).
pub fn load_ple_file(path: impl AsRef<Path>) -> Result<PleFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// One row of the beam-combining distance extension table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeeTableRow {
    pub freq_label: String,
    pub mode: CombineMode,
    pub k: usize,
    pub ple: f64,
    pub dee: f64,
    pub d2_m: f64,
}

/// Build the distance extension table: one row per (mode, k >= 2) entry,
/// DEE taken against the group's k = 1 baseline, d2 evaluated at `d1_m`.
pub fn build_dee_table(groups: &[PleGroup], d1_m: f64) -> Result<Vec<DeeTableRow>> {
    if !(d1_m >= 1.0) {
        return Err(Error::Domain(format!(
            "d1 must be >= 1 m (the model anchor), got {d1_m}"
        )));
    }
    let mut rows = Vec::new();
    for group in groups {
        if !(group.baseline_ple > 0.0) {
            return Err(Error::MissingBaseline(group.freq_label.clone()));
        }
        for (mode, entries) in [
            (CombineMode::Coherent, &group.coherent),
            (CombineMode::NonCoherent, &group.noncoherent),
        ] {
            let mut sorted = entries.clone();
            sorted.sort_by_key(|e| e.k);
            for entry in sorted {
                if entry.k < 2 {
                    continue; // the baseline row is implicit
                }
                let r = dee(group.baseline_ple, entry.ple)?;
                rows.push(DeeTableRow {
                    freq_label: group.freq_label.clone(),
                    mode,
                    k: entry.k,
                    ple: entry.ple,
                    dee: r.dee,
                    d2_m: extended_distance_m(d1_m, r.dee)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Assemble a PleGroup from fitted models keyed by (mode, k). Both modes
/// must carry a k = 1 baseline and the baselines must agree (k = 1 combining
/// is mode-independent by construction).
pub fn group_from_fits(
    freq_label: &str,
    fits: &BTreeMap<(CombineMode, usize), CloseInModel>,
    all_angles_ple: Option<f64>,
) -> Result<PleGroup> {
    let base_coh = fits
        .get(&(CombineMode::Coherent, 1))
        .ok_or_else(|| Error::MissingBaseline("coherent".to_string()))?;
    let base_non = fits
        .get(&(CombineMode::NonCoherent, 1))
        .ok_or_else(|| Error::MissingBaseline("noncoherent".to_string()))?;
    if (base_coh.ple - base_non.ple).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "k=1 baselines disagree between modes: {} vs {}",
            base_coh.ple, base_non.ple
        )));
    }
    let mut group = PleGroup {
        freq_label: freq_label.to_string(),
        baseline_ple: base_coh.ple,
        all_angles_ple,
        coherent: Vec::new(),
        noncoherent: Vec::new(),
    };
    for (&(mode, k), model) in fits {
        if k < 2 {
            continue;
        }
        let entry = PleEntry { k, ple: model.ple };
        match mode {
            CombineMode::Coherent => group.coherent.push(entry),
            CombineMode::NonCoherent => group.noncoherent.push(entry),
        }
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dee_matches_published_ratios() {
        // 28 GHz coherent 4 beams
        assert_relative_eq!(dee(3.812, 3.307).unwrap().dee, 1.153, epsilon = 1e-3);
        // 73 GHz coherent 4 beams
        assert_relative_eq!(dee(3.728, 3.235).unwrap().dee, 1.152, epsilon = 1e-3);
        assert_relative_eq!(dee(2.5, 2.5).unwrap().dee, 1.0);
        assert!(dee(3.0, 3.5).is_err());
        assert!(dee(3.0, 0.0).is_err());
    }

    #[test]
    fn extension_matches_published_distances() {
        assert_relative_eq!(extended_distance_m(200.0, 1.152).unwrap(), 448.0, epsilon = 1.0);
        assert_relative_eq!(extended_distance_m(77.0, 1.0).unwrap(), 77.0);
        let r = dee(3.812, 3.307).unwrap();
        assert_relative_eq!(extended_distance_m(200.0, r.dee).unwrap(), 450.0, epsilon = 1.0);
        assert!(extended_distance_m(0.5, 1.1).is_err());
    }

    #[test]
    fn def_matches_published_factor() {
        assert_relative_eq!(
            distance_extension_factor(200.0, 1.152).unwrap(),
            2.24,
            epsilon = 0.005
        );
        assert_relative_eq!(distance_extension_factor(123.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            distance_extension_factor(100.0, 1.1).unwrap(),
            100f64.powf(0.1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn def_equals_distance_ratio_form() {
        for &(d1, q) in &[(200.0, 1.152), (50.0, 1.3), (1.0, 2.0), (377.0, 1.0)] {
            let d2 = extended_distance_m(d1, q).unwrap();
            let def = distance_extension_factor(d1, q).unwrap();
            let ratio_form = (d2 - d1) / d1 + 1.0;
            assert_relative_eq!(def, ratio_form, max_relative = 1e-12);
        }
    }

    #[test]
    fn curve_contains_exact_endpoints_and_increases() {
        let curve = extension_curve(1.152, 10.0, 200.0, 7.0).unwrap();
        assert_eq!(curve.first().unwrap().0, 10.0);
        assert_eq!(curve.last().unwrap().0, 200.0);
        for w in curve.windows(2) {
            assert!(w[1].0 > w[0].0);
            assert!(w[1].1 > w[0].1);
        }
        // dee = 1 is the diagonal
        for (d1, d2) in extension_curve(1.0, 1.0, 50.0, 1.0).unwrap() {
            assert_relative_eq!(d1, d2);
        }
        assert!(extension_curve(1.1, 50.0, 50.0, 1.0).is_err());
        assert!(extension_curve(1.1, 10.0, 50.0, 0.0).is_err());
    }

    #[test]
    fn def_is_at_least_one_and_increases_in_distance() {
        let mut prev = 0.0;
        for &d1 in &[1.0, 2.0, 10.0, 50.0, 200.0, 400.0] {
            let def = distance_extension_factor(d1, 1.152).unwrap();
            assert!(def >= 1.0);
            assert!(def > prev, "DEF must strictly increase in d1 when dee > 1");
            prev = def;
        }
        // dee = 1: flat at 1.0
        for &d1 in &[1.0, 100.0, 400.0] {
            assert_relative_eq!(distance_extension_factor(d1, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn dee_round_trips_through_log_ratio() {
        for &(n1, n2) in &[(3.812, 3.307), (4.0, 2.0), (3.1, 3.1)] {
            let q = dee(n1, n2).unwrap().dee;
            for &d1 in &[2.0, 50.0, 200.0] {
                let d2 = extended_distance_m(d1, q).unwrap();
                let recovered = d2.ln() / d1.ln();
                assert_relative_eq!(recovered, q, max_relative = 1e-12);
            }
        }
    }

    fn table4_73ghz() -> PleGroup {
        PleGroup {
            freq_label: "73GHz".into(),
            baseline_ple: 3.728,
            all_angles_ple: Some(4.687),
            coherent: vec![
                PleEntry { k: 2, ple: 3.466 },
                PleEntry { k: 3, ple: 3.327 },
                PleEntry { k: 4, ple: 3.235 },
            ],
            noncoherent: vec![
                PleEntry { k: 2, ple: 3.613 },
                PleEntry { k: 3, ple: 3.557 },
                PleEntry { k: 4, ple: 3.523 },
            ],
        }
    }

    #[test]
    fn dee_table_reproduces_published_73ghz_distances() {
        let rows = build_dee_table(&[table4_73ghz()], 200.0).unwrap();
        assert_eq!(rows.len(), 6);
        let expected = [
            (CombineMode::Coherent, 2, 300.0),
            (CombineMode::Coherent, 3, 380.0),
            (CombineMode::Coherent, 4, 448.0),
            (CombineMode::NonCoherent, 2, 237.0),
            (CombineMode::NonCoherent, 3, 258.0),
            (CombineMode::NonCoherent, 4, 272.0),
        ];
        for (mode, k, d2) in expected {
            let row = rows.iter().find(|r| r.mode == mode && r.k == k).unwrap();
            assert!(
                (row.d2_m - d2).abs() <= 0.01 * d2,
                "{mode} k={k}: got {} want {d2}",
                row.d2_m
            );
        }
    }

    #[test]
    fn equal_ples_give_unit_dee() {
        let group = PleGroup {
            freq_label: "x".into(),
            baseline_ple: 3.0,
            all_angles_ple: None,
            coherent: vec![PleEntry { k: 2, ple: 3.0 }, PleEntry { k: 3, ple: 3.0 }],
            noncoherent: vec![PleEntry { k: 2, ple: 3.0 }],
        };
        for row in build_dee_table(&[group], 200.0).unwrap() {
            assert_relative_eq!(row.dee, 1.0);
            assert_relative_eq!(row.d2_m, 200.0);
        }
    }

    proptest::proptest! {
        #[test]
        fn extension_equalizes_the_two_anchored_models(
            n2 in 1.5..5.0f64,
            ratio in 1.0..1.6f64,
            d1 in 1.0..500.0f64,
            freq in 1e9..1e11f64,
        ) {
            use crate::pathloss::{predict_path_loss_db, CloseInModel};
            let n1 = n2 * ratio;
            let q = dee(n1, n2).unwrap().dee;
            let d2 = extended_distance_m(d1, q).unwrap();
            let m1 = CloseInModel::new(freq, n1, 0.0).unwrap();
            let m2 = CloseInModel::new(freq, n2, 0.0).unwrap();
            let pl1 = predict_path_loss_db(&m1, d1).unwrap();
            let pl2 = predict_path_loss_db(&m2, d2).unwrap();
            proptest::prop_assert!((pl1 - pl2).abs() <= 1e-9, "{pl1} vs {pl2}");
        }
    }

    #[test]
    fn group_from_fits_requires_both_baselines() {
        let mut fits = BTreeMap::new();
        fits.insert(
            (CombineMode::Coherent, 1),
            CloseInModel::new(73e9, 3.7, 0.0).unwrap(),
        );
        fits.insert(
            (CombineMode::Coherent, 2),
            CloseInModel::new(73e9, 3.5, 0.0).unwrap(),
        );
        assert!(matches!(
            group_from_fits("73GHz", &fits, None),
            Err(Error::MissingBaseline(_))
        ));
        fits.insert(
            (CombineMode::NonCoherent, 1),
            CloseInModel::new(73e9, 3.7, 0.0).unwrap(),
        );
        let group = group_from_fits("73GHz", &fits, None).unwrap();
        assert_relative_eq!(group.baseline_ple, 3.7);
        assert_eq!(group.coherent.len(), 1);
    }
}
