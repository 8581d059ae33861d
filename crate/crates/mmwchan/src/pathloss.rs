//! Close-in free-space-reference path loss models.
//!
//! The model family is anchored at the 1 m free-space path loss: the only
//! fitted parameter is the path loss exponent `n` in
//! `PL(d) = PL_FS(1 m) + 10 n log10(d)`, with the shadow sigma taken as the
//! RMS residual in dB. Antenna gains are removed when converting received
//! power to path loss, per the directional-measurement convention, so
//! combined-beam powers are compared gain-free.

use serde::Serialize;

use crate::campaign::{Campaign, LocationMeasurement};
use crate::combining::CombineMode;
use crate::{Error, Result, SPEED_OF_LIGHT_M_PER_S};

/// Close-in reference distance, meters. Fixed; the whole model family is
/// anchored here.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Free-space path loss at the 1 m reference distance, dB.
pub fn fspl_at_ref_db(freq_hz: f64) -> Result<f64> {
    if !(freq_hz > 0.0) || !freq_hz.is_finite() {
        return Err(Error::Domain(format!(
            "carrier frequency must be > 0 Hz, got {freq_hz}"
        )));
    }
    let ratio = 4.0 * std::f64::consts::PI * REFERENCE_DISTANCE_M * freq_hz
        / SPEED_OF_LIGHT_M_PER_S;
    Ok(20.0 * ratio.log10())
}

/// How a path loss sample was produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SampleTag {
    /// Strongest single beam at the location.
    SingleBestBeam,
    /// k strongest beams combined.
    Multibeam { mode: CombineMode, k: usize },
    /// One sample per valid pointing angle.
    AllAngles,
}

impl std::fmt::Display for SampleTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleTag::SingleBestBeam => write!(f, "single-best-beam"),
            SampleTag::Multibeam { mode, k } => write!(f, "multibeam-{mode}-{k}"),
            SampleTag::AllAngles => write!(f, "all-angles"),
        }
    }
}

/// One distance / path loss observation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathLossSample {
    pub location_id: String,
    pub distance_m: f64,
    pub path_loss_db: f64,
    pub tag: SampleTag,
    /// Set when the link-budget path loss exceeds the sounder's maximum
    /// measurable path loss; such samples are excluded from fits.
    pub beyond_measurable: bool,
}

/// Link-budget path loss of a received power at a location:
/// `PL = Pt + Gt + Gr - Pr`, gains removed.
pub fn path_loss_from_record(
    campaign: &Campaign,
    location: &LocationMeasurement,
    received_power_dbm: f64,
    tag: SampleTag,
) -> PathLossSample {
    let path_loss_db = campaign.tx_power_dbm + campaign.tx_gain_dbi + campaign.rx_gain_dbi
        - received_power_dbm;
    PathLossSample {
        location_id: location.id.clone(),
        distance_m: location.tr_distance_m,
        path_loss_db,
        tag,
        beyond_measurable: path_loss_db > campaign.max_path_loss_db,
    }
}

/// A fitted (or published) close-in path loss model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CloseInModel {
    /// Always 1 m.
    pub d0_m: f64,
    pub carrier_freq_hz: f64,
    /// Path loss exponent.
    pub ple: f64,
    /// RMS shadowing residual, dB.
    pub shadow_sigma_db: f64,
}

impl CloseInModel {
    pub fn new(carrier_freq_hz: f64, ple: f64, shadow_sigma_db: f64) -> Result<Self> {
        if !(ple > 0.0) {
            return Err(Error::Domain(format!("PLE must be > 0, got {ple}")));
        }
        fspl_at_ref_db(carrier_freq_hz)?;
        Ok(CloseInModel {
            d0_m: REFERENCE_DISTANCE_M,
            carrier_freq_hz,
            ple,
            shadow_sigma_db,
        })
    }
}

/// Anchored least-squares PLE fit.
///
/// Minimizes the squared dB residual of `PL_i - anchor - 10 n log10(d_i)`
/// over `n` alone (the intercept is pinned to the 1 m free-space anchor):
/// `n = sum((PL_i - anchor) * 10 log10 d_i) / sum((10 log10 d_i)^2)`.
/// Samples flagged beyond-measurable are skipped.
pub fn fit_ple(samples: &[PathLossSample], freq_hz: f64) -> Result<CloseInModel> {
    let anchor = fspl_at_ref_db(freq_hz)?;
    let usable: Vec<&PathLossSample> =
        samples.iter().filter(|s| !s.beyond_measurable).collect();
    if usable.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 usable samples, have {}",
            usable.len()
        )));
    }
    if let Some(s) = usable
        .iter()
        .find(|s| s.distance_m < REFERENCE_DISTANCE_M)
    {
        return Err(Error::Domain(format!(
            "sample at {} m lies below the 1 m reference distance",
            s.distance_m
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for s in &usable {
        let l = 10.0 * s.distance_m.log10();
        num += (s.path_loss_db - anchor) * l;
        den += l * l;
    }
    if den == 0.0 {
        return Err(Error::DegenerateFit(
            "all samples at the 1 m reference distance".to_string(),
        ));
    }
    let ple = num / den;
    if !(ple > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "fitted PLE {ple} is not positive"
        )));
    }
    let mut ss = 0.0;
    for s in &usable {
        let r = s.path_loss_db - anchor - 10.0 * ple * s.distance_m.log10();
        ss += r * r;
    }
    Ok(CloseInModel {
        d0_m: REFERENCE_DISTANCE_M,
        carrier_freq_hz: freq_hz,
        ple,
        shadow_sigma_db: (ss / usable.len() as f64).sqrt(),
    })
}

/// Mean path loss predicted by a close-in model at distance `d_m >= 1 m`.
pub fn predict_path_loss_db(model: &CloseInModel, d_m: f64) -> Result<f64> {
    if !(d_m >= REFERENCE_DISTANCE_M) {
        return Err(Error::Domain(format!(
            "distance {d_m} m lies below the 1 m reference distance"
        )));
    }
    let anchor = fspl_at_ref_db(model.carrier_freq_hz)?;
    Ok(anchor + 10.0 * model.ple * (d_m / model.d0_m).log10())
}

/// One path loss sample per valid pointing angle in the campaign
/// (records thresholded at `threshold_db`; angles with no signal dropped).
pub fn all_angle_path_loss_samples(
    campaign: &Campaign,
    threshold_db: f64,
) -> Result<Vec<PathLossSample>> {
    let mut out = Vec::new();
    let mut locs: Vec<&LocationMeasurement> = campaign.locations.iter().collect();
    locs.sort_by(|a, b| a.id.cmp(&b.id));
    for loc in locs {
        if loc.outage {
            continue;
        }
        for rec in &loc.records {
            let t = rec.pdp.thresholded(threshold_db)?;
            let p_mw = t.total_power_mw();
            if p_mw > 0.0 {
                let dbm = 10.0 * p_mw.log10();
                out.push(path_loss_from_record(campaign, loc, dbm, SampleTag::AllAngles));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::tests::test_campaign;
    use crate::campaign::{LocationMeasurement, LosClass};
    use approx::assert_relative_eq;

    #[test]
    fn reference_fspl_matches_friis() {
        assert_relative_eq!(fspl_at_ref_db(28e9).unwrap(), 61.39, epsilon = 0.005);
        assert_relative_eq!(fspl_at_ref_db(73e9).unwrap(), 69.71, epsilon = 0.005);
        let f = SPEED_OF_LIGHT_M_PER_S / (4.0 * std::f64::consts::PI);
        assert_relative_eq!(fspl_at_ref_db(f).unwrap(), 0.0, epsilon = 1e-12);
        assert!(fspl_at_ref_db(0.0).is_err());
    }

    fn loc(distance: f64) -> LocationMeasurement {
        LocationMeasurement {
            id: "L".into(),
            tx_pos: None,
            rx_pos: None,
            tr_distance_m: distance,
            los_class: LosClass::Nlos,
            outage: true,
            records: vec![],
        }
    }

    #[test]
    fn link_budget_identity() {
        let c = test_campaign(vec![]);
        let s = path_loss_from_record(&c, &loc(100.0), -70.0, SampleTag::SingleBestBeam);
        assert_relative_eq!(s.path_loss_db, 149.0);
        assert!(!s.beyond_measurable);

        let s = path_loss_from_record(&c, &loc(100.0), 79.0, SampleTag::SingleBestBeam);
        assert_relative_eq!(s.path_loss_db, 0.0);
    }

    #[test]
    fn beyond_measurable_is_flagged_and_skipped_by_fit() {
        let c = test_campaign(vec![]); // max path loss 178 dB
        let s = path_loss_from_record(&c, &loc(100.0), -106.0, SampleTag::SingleBestBeam);
        assert_relative_eq!(s.path_loss_db, 185.0);
        assert!(s.beyond_measurable);

        let anchor = fspl_at_ref_db(28e9).unwrap();
        let mk = |d: f64, pl: f64, flagged: bool| PathLossSample {
            location_id: "L".into(),
            distance_m: d,
            path_loss_db: pl,
            tag: SampleTag::SingleBestBeam,
            beyond_measurable: flagged,
        };
        let samples = vec![
            mk(10.0, anchor + 20.0, false),
            mk(100.0, anchor + 40.0, false),
            mk(50.0, anchor + 500.0, true), // would wreck the fit if not skipped
        ];
        let model = fit_ple(&samples, 28e9).unwrap();
        assert_relative_eq!(model.ple, 2.0, epsilon = 1e-12);
        assert_relative_eq!(model.shadow_sigma_db, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn fit_recovers_exact_lines_and_hand_value() {
        let anchor = fspl_at_ref_db(73e9).unwrap();
        let mk = |d: f64, pl: f64| PathLossSample {
            location_id: "L".into(),
            distance_m: d,
            path_loss_db: pl,
            tag: SampleTag::AllAngles,
            beyond_measurable: false,
        };
        // two points by hand: n = (30*10 + 60*20) / (100 + 400) = 3
        let samples = vec![mk(10.0, anchor + 30.0), mk(100.0, anchor + 60.0)];
        assert_relative_eq!(fit_ple(&samples, 73e9).unwrap().ple, 3.0, epsilon = 1e-12);

        for n in [2.0, 4.556, 4.687] {
            let samples: Vec<_> = (0..40)
                .map(|i| {
                    let d = 10.0 + 5.0 * i as f64;
                    mk(d, anchor + 10.0 * n * d.log10())
                })
                .collect();
            let m = fit_ple(&samples, 73e9).unwrap();
            assert_relative_eq!(m.ple, n, epsilon = 1e-12);
            assert!(m.shadow_sigma_db < 1e-9);
        }
    }

    #[test]
    fn degenerate_fits_error() {
        let mk = |d: f64| PathLossSample {
            location_id: "L".into(),
            distance_m: d,
            path_loss_db: 100.0,
            tag: SampleTag::AllAngles,
            beyond_measurable: false,
        };
        assert!(matches!(fit_ple(&[mk(10.0)], 28e9), Err(Error::DegenerateFit(_))));
        assert!(matches!(
            fit_ple(&[mk(1.0), mk(1.0)], 28e9),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(fit_ple(&[mk(0.5), mk(10.0)], 28e9), Err(Error::Domain(_))));
    }

    #[test]
    fn prediction_matches_published_example() {
        let m = CloseInModel::new(73e9, 3.728, 0.0).unwrap();
        // anchor 69.71 + 85.78 = 155.49 dB at 200 m
        assert_relative_eq!(predict_path_loss_db(&m, 200.0).unwrap(), 155.49, epsilon = 0.01);
        let m2 = CloseInModel::new(73e9, 2.0, 0.0).unwrap();
        let anchor = fspl_at_ref_db(73e9).unwrap();
        assert_relative_eq!(predict_path_loss_db(&m2, 1.0).unwrap(), anchor);
        assert_relative_eq!(predict_path_loss_db(&m2, 10.0).unwrap(), anchor + 20.0);
        assert!(predict_path_loss_db(&m2, 0.5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn fit_recovers_any_exponent_exactly(n in 1.001..7.999f64, seed_d in 2.0..50.0f64) {
            let anchor = fspl_at_ref_db(60e9).unwrap();
            let samples: Vec<_> = (0..12)
                .map(|i| {
                    let d = seed_d + 13.0 * i as f64;
                    PathLossSample {
                        location_id: "L".into(),
                        distance_m: d,
                        path_loss_db: anchor + 10.0 * n * d.log10(),
                        tag: SampleTag::AllAngles,
                        beyond_measurable: false,
                    }
                })
                .collect();
            let model = fit_ple(&samples, 60e9).unwrap();
            proptest::prop_assert!((model.ple - n).abs() <= 1e-12 * n);
            proptest::prop_assert!(model.shadow_sigma_db < 1e-9);
        }
    }

    #[test]
    fn fit_then_predict_round_trips_noise_free_data() {
        let anchor = fspl_at_ref_db(28e9).unwrap();
        let n = 3.3;
        let samples: Vec<_> = [5.0, 20.0, 80.0, 160.0]
            .iter()
            .map(|&d| PathLossSample {
                location_id: "L".into(),
                distance_m: d,
                path_loss_db: anchor + 10.0 * n * d.log10(),
                tag: SampleTag::AllAngles,
                beyond_measurable: false,
            })
            .collect();
        let model = fit_ple(&samples, 28e9).unwrap();
        for s in &samples {
            assert_relative_eq!(
                predict_path_loss_db(&model, s.distance_m).unwrap(),
                s.path_loss_db,
                epsilon = 1e-9
            );
        }
    }
}
