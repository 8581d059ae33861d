//! Combining the k strongest beams per location.
//!
//! Non-coherent combining adds the strongest received powers in linear
//! units; coherent combining adds their square-root amplitudes and squares
//! the sum. Both are post-detection power arithmetic; no phase model. The
//! combined powers feed multibeam path loss samples whose fitted PLE drives
//! the distance extension table.

use serde::{Deserialize, Serialize};

use crate::campaign::{Campaign, LocationMeasurement};
use crate::pathloss::{path_loss_from_record, PathLossSample, SampleTag};
use crate::{Error, Result};

/// Post-detection combining method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMode {
    Coherent,
    NonCoherent,
}

impl std::fmt::Display for CombineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CombineMode::Coherent => write!(f, "coherent"),
            CombineMode::NonCoherent => write!(f, "noncoherent"),
        }
    }
}

impl std::str::FromStr for CombineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coherent" => Ok(CombineMode::Coherent),
            "noncoherent" | "non-coherent" => Ok(CombineMode::NonCoherent),
            other => Err(Error::InvalidArgument(format!(
                "unknown combining mode `{other}` (expected coherent or noncoherent)"
            ))),
        }
    }
}

/// Result of combining the k strongest beams.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CombinedPower {
    pub power_mw: f64,
    /// Beams actually summed; less than `requested_k` when the location has
    /// fewer detected beams (flagged, not an error).
    pub beams_used: usize,
    pub requested_k: usize,
}

impl CombinedPower {
    pub fn fewer_than_requested(&self) -> bool {
        self.beams_used < self.requested_k
    }
}

fn k_strongest(powers_mw: &[f64], k: usize) -> Result<Vec<f64>> {
    if powers_mw.is_empty() {
        return Err(Error::EmptySamples);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".to_string()));
    }
    if let Some(&bad) = powers_mw.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beam powers must be finite and >= 0, got {bad}"
        )));
    }
    let mut sorted = powers_mw.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sorted.truncate(k);
    Ok(sorted)
}

/// Sum of the k strongest powers, mW.
pub fn combine_non_coherent(powers_mw: &[f64], k: usize) -> Result<CombinedPower> {
    let top = k_strongest(powers_mw, k)?;
    Ok(CombinedPower {
        power_mw: top.iter().sum(),
        beams_used: top.len(),
        requested_k: k,
    })
}

/// Squared sum of the k strongest square-root powers, mW.
pub fn combine_coherent(powers_mw: &[f64], k: usize) -> Result<CombinedPower> {
    let top = k_strongest(powers_mw, k)?;
    let amp: f64 = top.iter().map(|p| p.sqrt()).sum();
    Ok(CombinedPower {
        power_mw: amp * amp,
        beams_used: top.len(),
        requested_k: k,
    })
}

/// Per-beam received powers of a location after thresholding, strongest
/// first; ties broken toward the lower (azimuth, elevation). Zero-power
/// angles are dropped.
pub fn beam_powers_mw(
    location: &LocationMeasurement,
    threshold_db: f64,
) -> Result<Vec<f64>> {
    let mut beams: Vec<(f64, f64, f64)> = Vec::new();
    for rec in &location.records {
        let t = rec.pdp.thresholded(threshold_db)?;
        let p = t.total_power_mw();
        if p > 0.0 {
            beams.push((p, rec.azimuth_deg, rec.elevation_deg));
        }
    }
    beams.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.partial_cmp(&b.2).unwrap())
    });
    Ok(beams.into_iter().map(|(p, _, _)| p).collect())
}

/// One multibeam path loss sample per non-outage location, ordered by
/// location id. `k = 1` reproduces the single-best-beam sample list exactly
/// (and is tagged as such). Locations where no angle survives thresholding
/// are skipped.
pub fn multibeam_path_loss_samples(
    campaign: &Campaign,
    k: usize,
    mode: CombineMode,
    threshold_db: f64,
) -> Result<Vec<PathLossSample>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".to_string()));
    }
    let mut locs: Vec<&LocationMeasurement> =
        campaign.locations.iter().filter(|l| !l.outage).collect();
    locs.sort_by(|a, b| a.id.cmp(&b.id));
    let tag = if k == 1 {
        SampleTag::SingleBestBeam
    } else {
        SampleTag::Multibeam { mode, k }
    };
    let mut out = Vec::new();
    for loc in locs {
        let beams = beam_powers_mw(loc, threshold_db)?;
        if beams.is_empty() {
            continue;
        }
        let combined = match mode {
            CombineMode::Coherent => combine_coherent(&beams, k)?,
            CombineMode::NonCoherent => combine_non_coherent(&beams, k)?,
        };
        let dbm = 10.0 * combined.power_mw.log10();
        out.push(path_loss_from_record(campaign, loc, dbm, tag));
    }
    Ok(out)
}
