//! Absolute-timing omnidirectional PDP synthesis.
//!
//! The strongest measured pointing angles at a location are paired with
//! ray-traced arrival predictions inside an angular gate; each matched
//! record's excess-delay PDP is then shifted so its first arriving bin lands
//! at the predicted absolute propagation delay, and the shifted profiles are
//! summed bin-wise in power on a common absolute time axis. RMS delay
//! spreads of the synthesized profiles give the omnidirectional statistics.

use rayon::prelude::*;
use serde::Serialize;

use crate::campaign::{AngleRecord, Campaign, LocationMeasurement, LosClass, Pdp};
use crate::delay::{rms_delay_spread_ns, DelaySample, DelaySpreadStats};
use crate::geom::angular_separation_deg;
use crate::raytrace::{predict_strongest_aoas, trace_paths, PredictedAoa, Scene};
use crate::{Error, Result};

/// At most this many strongest measured angles participate in matching,
/// mirroring the up-to-four strongest predicted arrivals.
pub const MAX_MATCHED_ANGLES: usize = 4;

/// One matched (measured angle, predicted arrival) pair. The record carries
/// its thresholded PDP.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairMatch {
    pub record: AngleRecord,
    pub predicted: PredictedAoa,
    pub separation_deg: f64,
}

/// Outcome of matching a location's strongest angles to predicted arrivals.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AnglePathPairing {
    pub matches: Vec<PairMatch>,
    /// Considered (strongest, thresholded) records that found no prediction
    /// inside the gate.
    pub unmatched_records: Vec<AngleRecord>,
    pub unmatched_paths: Vec<PredictedAoa>,
}

/// Greedily match a location's strongest measured angles to predicted
/// arrival angles.
///
/// Records are thresholded at `threshold_db`, ranked by received power, and
/// the top [`MAX_MATCHED_ANGLES`] each take the nearest unused prediction
/// within `gate_deg` (great-circle distance over azimuth/elevation);
/// equidistant candidates go to the shortest predicted path. An empty
/// pairing is legal — synthesis then skips the location.
pub fn match_angles_to_paths(
    location: &LocationMeasurement,
    predicted: &[PredictedAoa],
    gate_deg: f64,
    threshold_db: f64,
) -> Result<AnglePathPairing> {
    if !(gate_deg > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gate_deg must be > 0, got {gate_deg}"
        )));
    }
    let mut ranked: Vec<(f64, AngleRecord)> = Vec::new();
    for rec in &location.records {
        let t = rec.pdp.thresholded(threshold_db)?;
        if t.has_signal() {
            let mut rec = rec.clone();
            rec.pdp = t;
            ranked.push((rec.pdp.total_power_mw(), rec));
        }
    }
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.azimuth_deg.partial_cmp(&b.1.azimuth_deg).unwrap())
            .then(a.1.elevation_deg.partial_cmp(&b.1.elevation_deg).unwrap())
    });
    ranked.truncate(MAX_MATCHED_ANGLES);

    let mut used = vec![false; predicted.len()];
    let mut pairing = AnglePathPairing::default();
    for (_, rec) in ranked {
        let candidate = predicted
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                !used[*i]
                    && angular_separation_deg(
                        rec.azimuth_deg,
                        rec.elevation_deg,
                        p.aoa_az_deg,
                        p.aoa_el_deg,
                    ) <= gate_deg
            })
            .min_by(|(_, a), (_, b)| {
                let sa = angular_separation_deg(
                    rec.azimuth_deg,
                    rec.elevation_deg,
                    a.aoa_az_deg,
                    a.aoa_el_deg,
                );
                let sb = angular_separation_deg(
                    rec.azimuth_deg,
                    rec.elevation_deg,
                    b.aoa_az_deg,
                    b.aoa_el_deg,
                );
                sa.partial_cmp(&sb)
                    .unwrap()
                    .then(a.length_m.partial_cmp(&b.length_m).unwrap())
            });
        match candidate {
            Some((i, p)) => {
                used[i] = true;
                pairing.matches.push(PairMatch {
                    separation_deg: angular_separation_deg(
                        rec.azimuth_deg,
                        rec.elevation_deg,
                        p.aoa_az_deg,
                        p.aoa_el_deg,
                    ),
                    record: rec,
                    predicted: *p,
                });
            }
            None => pairing.unmatched_records.push(rec),
        }
    }
    pairing.unmatched_paths = predicted
        .iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(_, p)| *p)
        .collect();
    Ok(pairing)
}

/// A PDP whose `start_delay_ns` sits on the absolute propagation-time axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmniPdp {
    pub pdp: Pdp,
}

impl OmniPdp {
    /// Absolute delay of the first arriving (nonzero) bin, ns.
    pub fn first_arrival_ns(&self) -> Option<f64> {
        self.pdp.first_nonzero_bin().map(|k| self.pdp.delay_ns(k))
    }
}

/// Superimpose the matched excess-delay PDPs on a common absolute axis.
///
/// Each record is shifted so its first nonzero bin lands at its predicted
/// path delay (sub-bin residue rounds to the nearest bin — an absolute-time
/// quantization of at most half a bin width), then profiles are added
/// bin-wise in power. Energy is conserved exactly: the synthesized total
/// power is the sum of the matched records' total power.
pub fn synthesize_omni_pdp(pairing: &AnglePathPairing) -> Result<OmniPdp> {
    if pairing.matches.is_empty() {
        return Err(Error::EmptyPairing);
    }
    let w = pairing.matches[0].record.pdp.bin_width_ns;
    for m in &pairing.matches {
        if m.record.pdp.bin_width_ns != w {
            return Err(Error::MixedBinWidths(w, m.record.pdp.bin_width_ns));
        }
    }
    // absolute time of each record's bin 0 once its first arrival is pinned
    // to the predicted delay
    let mut placements = Vec::with_capacity(pairing.matches.len());
    for m in &pairing.matches {
        let k0 = m
            .record
            .pdp
            .first_nonzero_bin()
            .ok_or(Error::UndefinedMoment)?;
        placements.push((m.predicted.delay_ns - k0 as f64 * w, &m.record.pdp));
    }
    let grid_start = placements
        .iter()
        .map(|(t, _)| *t)
        .fold(f64::INFINITY, f64::min);
    // 4M bins is ~10 ms of profile at the 2.5 ns resolution
    const MAX_GRID_BINS: usize = 1 << 22;
    let mut n_bins = 0usize;
    let mut offsets = Vec::with_capacity(placements.len());
    for (t, pdp) in &placements {
        let off = ((t - grid_start) / w).round();
        if !(0.0..MAX_GRID_BINS as f64).contains(&off) {
            return Err(Error::InvalidArgument(format!(
                "matched path delays span {off} bins, beyond the {MAX_GRID_BINS} bin grid limit"
            )));
        }
        let off = off as usize;
        n_bins = n_bins.max(off + pdp.powers.len());
        offsets.push(off);
    }
    if n_bins > MAX_GRID_BINS {
        return Err(Error::InvalidArgument(format!(
            "synthesized grid needs {n_bins} bins, beyond the {MAX_GRID_BINS} bin limit"
        )));
    }
    let mut powers = vec![0.0; n_bins];
    for ((_, pdp), off) in placements.iter().zip(offsets) {
        for (k, &p) in pdp.powers.iter().enumerate() {
            powers[off + k] += p;
        }
    }
    let noise_floor = pairing
        .matches
        .iter()
        .map(|m| m.record.pdp.noise_floor)
        .fold(0.0, f64::max);
    Ok(OmniPdp {
        pdp: Pdp {
            bin_width_ns: w,
            start_delay_ns: grid_start,
            noise_floor,
            powers,
        },
    })
}

/// Why a location did or did not get a synthesized profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SynthStatus {
    Synthesized,
    Outage,
    MissingPositions,
    NoValidRecords,
    NoPaths,
    NoMatches,
}

impl std::fmt::Display for SynthStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SynthStatus::Synthesized => "synthesized",
            SynthStatus::Outage => "outage",
            SynthStatus::MissingPositions => "missing-positions",
            SynthStatus::NoValidRecords => "no-valid-records",
            SynthStatus::NoPaths => "no-paths",
            SynthStatus::NoMatches => "no-matches",
        };
        write!(f, "{s}")
    }
}

/// Per-location synthesis outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmniOutcome {
    pub location_id: String,
    pub los_class: LosClass,
    pub status: SynthStatus,
    pub sigma_tau_ns: Option<f64>,
    pub omni: Option<OmniPdp>,
}

/// Synthesized-vs-measured bookkeeping and statistics for one LOS class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmniClassStats {
    pub los_class: LosClass,
    pub synthesized: usize,
    /// Non-outage locations of the class.
    pub measured: usize,
    pub stats: Option<DelaySpreadStats>,
}

/// Full omnidirectional synthesis report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmniReport {
    pub classes: Vec<OmniClassStats>,
    /// Per-location outcomes, ordered by location id (the failure manifest).
    pub outcomes: Vec<OmniOutcome>,
}

/// Knobs for the trace -> match -> synthesize pipeline.
#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    pub gate_deg: f64,
    pub threshold_db: f64,
    pub max_order: usize,
    pub max_predicted: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            gate_deg: 20.0,
            threshold_db: crate::DEFAULT_THRESHOLD_DB,
            max_order: 2,
            max_predicted: MAX_MATCHED_ANGLES,
        }
    }
}

fn synthesize_location(
    scene: &Scene,
    loc: &LocationMeasurement,
    opts: &SynthesisOptions,
) -> Result<OmniOutcome> {
    let mut outcome = OmniOutcome {
        location_id: loc.id.clone(),
        los_class: loc.los_class,
        status: SynthStatus::Synthesized,
        sigma_tau_ns: None,
        omni: None,
    };
    if loc.outage {
        outcome.status = SynthStatus::Outage;
        return Ok(outcome);
    }
    let (Some(tx), Some(rx)) = (loc.tx_pos, loc.rx_pos) else {
        outcome.status = SynthStatus::MissingPositions;
        return Ok(outcome);
    };
    if !loc.records.iter().any(|r| {
        r.pdp
            .thresholded(opts.threshold_db)
            .map(|t| t.has_signal())
            .unwrap_or(false)
    }) {
        outcome.status = SynthStatus::NoValidRecords;
        return Ok(outcome);
    }
    let paths = trace_paths(scene, tx, rx, opts.max_order)?;
    if paths.is_empty() {
        outcome.status = SynthStatus::NoPaths;
        return Ok(outcome);
    }
    let predicted = predict_strongest_aoas(&paths, opts.max_predicted);
    let pairing = match_angles_to_paths(loc, &predicted, opts.gate_deg, opts.threshold_db)?;
    if pairing.matches.is_empty() {
        outcome.status = SynthStatus::NoMatches;
        return Ok(outcome);
    }
    let omni = synthesize_omni_pdp(&pairing)?;
    outcome.sigma_tau_ns = Some(rms_delay_spread_ns(&omni.pdp)?);
    outcome.omni = Some(omni);
    Ok(outcome)
}

/// Trace, match, and synthesize every location of the campaign against the
/// scene, then compute per-class omnidirectional delay-spread statistics.
///
/// Per-location failures are recorded in the outcome list, never fatal.
/// Outcomes are sorted by location id, so results are independent of any
/// parallel evaluation schedule.
pub fn omni_stats(
    campaign: &Campaign,
    scene: &Scene,
    opts: &SynthesisOptions,
) -> Result<OmniReport> {
    let mut outcomes = campaign
        .locations
        .par_iter()
        .map(|loc| synthesize_location(scene, loc, opts))
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by(|a, b| a.location_id.cmp(&b.location_id));

    let mut classes = Vec::new();
    for class in LosClass::ALL {
        let of_class: Vec<&OmniOutcome> =
            outcomes.iter().filter(|o| o.los_class == class).collect();
        let measured = of_class
            .iter()
            .filter(|o| o.status != SynthStatus::Outage)
            .count();
        let samples: Vec<DelaySample> = of_class
            .iter()
            .filter(|o| o.status == SynthStatus::Synthesized)
            .map(|o| DelaySample {
                location_id: o.location_id.clone(),
                azimuth_deg: None,
                elevation_deg: None,
                sigma_tau_ns: o.sigma_tau_ns.expect("synthesized outcome has sigma"),
            })
            .collect();
        classes.push(OmniClassStats {
            los_class: class,
            synthesized: samples.len(),
            measured,
            stats: if samples.is_empty() {
                None
            } else {
                Some(DelaySpreadStats::from_samples(samples)?)
            },
        });
    }
    Ok(OmniReport { classes, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::tests::test_campaign;
    use crate::geom::Point3;
    use crate::path_delay_ns;
    use crate::raytrace::Facet;
    use approx::assert_relative_eq;

    fn aoa(az: f64, el: f64, length_m: f64) -> PredictedAoa {
        PredictedAoa {
            aoa_az_deg: az,
            aoa_el_deg: el,
            delay_ns: path_delay_ns(length_m),
            length_m,
            order: 0,
        }
    }

    fn record(az: f64, powers: &[f64]) -> AngleRecord {
        let pdp = Pdp::new(2.5, 0.0, powers.to_vec(), 1e-9).unwrap();
        AngleRecord::new(az, 0.0, pdp, false).unwrap()
    }

    fn location(records: Vec<AngleRecord>) -> LocationMeasurement {
        LocationMeasurement {
            id: "L1".into(),
            tx_pos: None,
            rx_pos: None,
            tr_distance_m: 100.0,
            los_class: LosClass::Nlos,
            outage: false,
            records,
        }
    }

    #[test]
    fn gate_includes_and_excludes() {
        let loc = location(vec![record(100.0, &[1.0])]);
        // 10 degrees away: inside the 20 degree gate
        let p = match_angles_to_paths(&loc, &[aoa(90.0, 0.0, 50.0)], 20.0, 5.0).unwrap();
        assert_eq!(p.matches.len(), 1);
        assert_relative_eq!(p.matches[0].separation_deg, 10.0, epsilon = 1e-9);

        // 40 degrees away: outside
        let loc = location(vec![record(130.0, &[1.0])]);
        let p = match_angles_to_paths(&loc, &[aoa(90.0, 0.0, 50.0)], 20.0, 5.0).unwrap();
        assert!(p.matches.is_empty());
        assert_eq!(p.unmatched_records.len(), 1);
        assert_eq!(p.unmatched_paths.len(), 1);
    }

    #[test]
    fn stronger_record_wins_the_only_prediction() {
        let strong = record(95.0, &[4.0]);
        let weak = record(85.0, &[1.0]);
        let loc = location(vec![weak, strong]);
        let p = match_angles_to_paths(&loc, &[aoa(90.0, 0.0, 50.0)], 20.0, 5.0).unwrap();
        assert_eq!(p.matches.len(), 1);
        assert_eq!(p.matches[0].record.azimuth_deg, 95.0);
        assert_eq!(p.unmatched_records.len(), 1);
    }

    #[test]
    fn nearest_prediction_wins_with_length_tiebreak() {
        let loc = location(vec![record(100.0, &[1.0])]);
        let preds = [aoa(112.0, 0.0, 50.0), aoa(105.0, 0.0, 80.0)];
        let p = match_angles_to_paths(&loc, &preds, 20.0, 5.0).unwrap();
        assert_eq!(p.matches[0].predicted.aoa_az_deg, 105.0);

        // equidistant: shortest path wins
        let preds = [aoa(110.0, 0.0, 80.0), aoa(90.0, 0.0, 50.0)];
        let p = match_angles_to_paths(&loc, &preds, 20.0, 5.0).unwrap();
        assert_eq!(p.matches[0].predicted.length_m, 50.0);
    }

    #[test]
    fn single_match_shifts_first_arrival_to_path_delay() {
        // 30 m path: first bin lands at ~100.07 ns
        let loc = location(vec![record(90.0, &[2.0, 1.0])]);
        let p = match_angles_to_paths(&loc, &[aoa(90.0, 0.0, 30.0)], 20.0, 5.0).unwrap();
        let omni = synthesize_omni_pdp(&p).unwrap();
        assert_relative_eq!(omni.first_arrival_ns().unwrap(), 100.07, epsilon = 0.005);
        assert_relative_eq!(
            omni.pdp.total_power_mw(),
            p.matches[0].record.pdp.total_power_mw(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn single_match_preserves_sigma_bit_for_bit() {
        let loc = location(vec![record(90.0, &[0.0, 2.0, 0.7, 0.0, 1.3])]);
        let p = match_angles_to_paths(&loc, &[aoa(90.0, 0.0, 42.0)], 20.0, 5.0).unwrap();
        let sigma_dir = rms_delay_spread_ns(&p.matches[0].record.pdp).unwrap();
        let omni = synthesize_omni_pdp(&p).unwrap();
        let sigma_omni = rms_delay_spread_ns(&omni.pdp).unwrap();
        assert_eq!(sigma_dir.to_bits(), sigma_omni.to_bits());
    }

    #[test]
    fn disjoint_supports_concatenate_and_powers_add() {
        let loc = location(vec![record(90.0, &[4.0]), record(180.0, &[2.0])]);
        // 0 m apart in angle from the two records; delays 10 and 100 bins
        let preds = [
            aoa(90.0, 0.0, 10.0 * 2.5 * 0.299792458),
            aoa(180.0, 0.0, 100.0 * 2.5 * 0.299792458),
        ];
        let p = match_angles_to_paths(&loc, &preds, 20.0, 5.0).unwrap();
        assert_eq!(p.matches.len(), 2);
        let omni = synthesize_omni_pdp(&p).unwrap();
        let total: f64 = p.matches.iter().map(|m| m.record.pdp.total_power_mw()).sum();
        assert_relative_eq!(omni.pdp.total_power_mw(), total, max_relative = 1e-12);
        assert_eq!(omni.pdp.powers.iter().filter(|&&x| x > 0.0).count(), 2);
        // 90 bins apart
        let k0 = omni.pdp.first_nonzero_bin().unwrap();
        let k1 = omni.pdp.powers.iter().rposition(|&x| x > 0.0).unwrap();
        assert_eq!(k1 - k0, 90);
    }

    #[test]
    fn overlapping_bins_sum_in_power() {
        let loc = location(vec![record(90.0, &[4.0]), record(180.0, &[2.0])]);
        let same_len = 40.0 * 2.5 * 0.299792458;
        let preds = [aoa(90.0, 0.0, same_len), aoa(180.0, 0.0, same_len)];
        let p = match_angles_to_paths(&loc, &preds, 20.0, 5.0).unwrap();
        let omni = synthesize_omni_pdp(&p).unwrap();
        assert_eq!(omni.pdp.powers.len(), 1);
        assert_relative_eq!(omni.pdp.powers[0], 6.0);
    }

    #[test]
    fn empty_pairing_and_mixed_widths_error() {
        assert!(matches!(
            synthesize_omni_pdp(&AnglePathPairing::default()),
            Err(Error::EmptyPairing)
        ));
        let mut rec_a = record(90.0, &[1.0]);
        rec_a.pdp.bin_width_ns = 2.5;
        let mut rec_b = record(180.0, &[1.0]);
        rec_b.pdp.bin_width_ns = 5.0;
        let pairing = AnglePathPairing {
            matches: vec![
                PairMatch {
                    record: rec_a,
                    predicted: aoa(90.0, 0.0, 10.0),
                    separation_deg: 0.0,
                },
                PairMatch {
                    record: rec_b,
                    predicted: aoa(180.0, 0.0, 10.0),
                    separation_deg: 0.0,
                },
            ],
            unmatched_records: vec![],
            unmatched_paths: vec![],
        };
        assert!(matches!(
            synthesize_omni_pdp(&pairing),
            Err(Error::MixedBinWidths(_, _))
        ));
    }

    #[test]
    fn shift_consistency_moves_mean_not_spread() {
        let loc = location(vec![record(90.0, &[2.0, 1.0]), record(180.0, &[1.0, 3.0])]);
        let mk = |extra: f64| {
            let preds = [
                aoa(90.0, 0.0, 30.0 + extra),
                aoa(180.0, 0.0, 60.0 + extra),
            ];
            let p = match_angles_to_paths(&loc, &preds, 20.0, 5.0).unwrap();
            synthesize_omni_pdp(&p).unwrap()
        };
        let base = mk(0.0);
        // shift both path delays by an exact number of bins
        let bin_m = 2.5 * 0.299792458;
        let shifted = mk(40.0 * bin_m);
        let s0 = rms_delay_spread_ns(&base.pdp).unwrap();
        let s1 = rms_delay_spread_ns(&shifted.pdp).unwrap();
        assert_eq!(s0.to_bits(), s1.to_bits());
        let m0 = crate::delay::mean_excess_delay_ns(&base.pdp).unwrap();
        let m1 = crate::delay::mean_excess_delay_ns(&shifted.pdp).unwrap();
        assert_relative_eq!(m1 - m0, 40.0 * 2.5, epsilon = 1e-9);
    }

    #[test]
    fn omni_stats_end_to_end_on_a_wall_scene() {
        // TX at origin-ish, RX 60 m away, one lateral wall: LOS + one bounce
        let tx = Point3::new(0.0, 0.0, 7.0);
        let rx = Point3::new(60.0, 0.0, 2.0);
        let scene = Scene::new(vec![Facet::new([
            Point3::new(10.0, 20.0, 0.0),
            Point3::new(50.0, 20.0, 0.0),
            Point3::new(50.0, 20.0, 15.0),
            Point3::new(10.0, 20.0, 15.0),
        ])
        .unwrap()]);
        let los_dir = (tx - rx).normalized();
        let (los_az, los_el) = crate::geom::direction_angles_deg(los_dir);
        let wall_point = Point3::new(30.0, 20.0, 4.5);
        let (wall_az, wall_el) =
            crate::geom::direction_angles_deg((wall_point - rx).normalized());

        let mut rec_los = record(0.0, &[5.0, 1.0]);
        rec_los.azimuth_deg = los_az;
        rec_los.elevation_deg = los_el;
        let mut rec_wall = record(1.0, &[2.0]);
        rec_wall.azimuth_deg = wall_az;
        rec_wall.elevation_deg = wall_el;

        let mut loc = location(vec![rec_los, rec_wall]);
        loc.los_class = LosClass::Los;
        loc.tx_pos = Some(tx);
        loc.rx_pos = Some(rx);
        loc.tr_distance_m = tx.distance(rx);
        let mut campaign = test_campaign(vec![loc]);
        campaign.locations[0].los_class = LosClass::Los;

        let report = omni_stats(&campaign, &scene, &SynthesisOptions::default()).unwrap();
        let los = &report.classes[0];
        assert_eq!(los.synthesized, 1);
        assert_eq!(los.measured, 1);
        assert!(los.stats.is_some());
        let outcome = &report.outcomes[0];
        assert_eq!(outcome.status, SynthStatus::Synthesized);
        let omni = outcome.omni.as_ref().unwrap();
        // first arrival at the LOS delay
        let los_delay = path_delay_ns(tx.distance(rx));
        assert_relative_eq!(omni.first_arrival_ns().unwrap(), los_delay, epsilon = 1e-9);
        // energy conserved across both matched records
        assert_relative_eq!(
            omni.pdp.total_power_mw(),
            (5.0 + 1.0 + 2.0) * 2.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn all_noise_records_report_no_valid_records() {
        let mut rec = record(90.0, &[1e-12, 2e-12]);
        rec.pdp.noise_floor = 1e-9; // everything below the 5 dB cutoff
        let mut loc = location(vec![rec]);
        loc.tx_pos = Some(Point3::new(0.0, 0.0, 2.0));
        loc.rx_pos = Some(Point3::new(100.0, 0.0, 2.0));
        loc.tr_distance_m = 100.0;
        let campaign = test_campaign(vec![loc]);
        let report =
            omni_stats(&campaign, &Scene::default(), &SynthesisOptions::default()).unwrap();
        assert_eq!(report.outcomes[0].status, SynthStatus::NoValidRecords);
    }

    #[test]
    fn out_of_gate_records_report_no_matches() {
        // LOS path arrives from azimuth 270 (toward the TX); the record
        // points 90 degrees away
        let mut loc = location(vec![record(0.0, &[1.0])]);
        loc.tx_pos = Some(Point3::new(0.0, 0.0, 2.0));
        loc.rx_pos = Some(Point3::new(100.0, 0.0, 2.0));
        loc.tr_distance_m = 100.0;
        let campaign = test_campaign(vec![loc]);
        let report =
            omni_stats(&campaign, &Scene::default(), &SynthesisOptions::default()).unwrap();
        assert_eq!(report.outcomes[0].status, SynthStatus::NoMatches);
        assert_eq!(report.classes[1].synthesized, 0);
        assert_eq!(report.classes[1].measured, 1);
    }

    #[test]
    fn no_matching_location_reports_zero_synthesized() {
        // empty scene, no positions -> missing-positions status
        let loc = location(vec![record(90.0, &[1.0])]);
        let campaign = test_campaign(vec![loc]);
        let report =
            omni_stats(&campaign, &Scene::default(), &SynthesisOptions::default()).unwrap();
        let nlos = &report.classes[1];
        assert_eq!(nlos.synthesized, 0);
        assert_eq!(nlos.measured, 1);
        assert!(nlos.stats.is_none());
        assert_eq!(report.outcomes[0].status, SynthStatus::MissingPositions);
    }
}
