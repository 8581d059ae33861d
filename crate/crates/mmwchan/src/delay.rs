//! RMS delay spread statistics and empirical CDFs.
//!
//! The mean excess delay is the power-weighted first moment of a thresholded
//! PDP's delay axis and the RMS delay spread is the square root of the
//! power-weighted second central moment. Moments are accumulated with delays
//! measured from the first nonzero bin, which keeps the spread exactly
//! invariant under time-axis translation (the mean is offset back onto the
//! profile's own axis afterwards).

use serde::Serialize;

use crate::campaign::{Campaign, LosClass, Pdp};
use crate::{Error, Result};

/// Radicand magnitudes below this (ns^2) are floating-point dust and clamp
/// to zero; anything more negative is an internal error.
const RADICAND_CLAMP_NS2: f64 = 1e-9;

/// Power-weighted moments of a profile, relative to its first nonzero bin.
fn relative_moments(pdp: &Pdp) -> Result<(usize, f64, f64)> {
    let k0 = pdp.first_nonzero_bin().ok_or(Error::UndefinedMoment)?;
    let w = pdp.bin_width_ns;
    let mut sum_p = 0.0;
    let mut sum_pt = 0.0;
    let mut sum_pt2 = 0.0;
    for (k, &p) in pdp.powers.iter().enumerate().skip(k0) {
        let t = (k - k0) as f64 * w;
        sum_p += p;
        sum_pt += p * t;
        sum_pt2 += p * t * t;
    }
    Ok((k0, sum_pt / sum_p, sum_pt2 / sum_p))
}

/// Power-weighted mean delay of a thresholded PDP, on its own delay axis, ns.
pub fn mean_excess_delay_ns(pdp: &Pdp) -> Result<f64> {
    let (k0, m1, _) = relative_moments(pdp)?;
    Ok(pdp.delay_ns(k0) + m1)
}

/// RMS delay spread of a thresholded PDP, ns.
pub fn rms_delay_spread_ns(pdp: &Pdp) -> Result<f64> {
    let (_, m1, m2) = relative_moments(pdp)?;
    let radicand = m2 - m1 * m1;
    if radicand < 0.0 {
        if radicand > -RADICAND_CLAMP_NS2 {
            return Ok(0.0);
        }
        return Err(Error::Internal(format!(
            "negative delay-spread radicand {radicand} ns^2"
        )));
    }
    Ok(radicand.sqrt())
}

/// One delay-spread sample. Pointing angles are present for directional
/// samples and absent for synthesized omnidirectional profiles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelaySample {
    pub location_id: String,
    pub azimuth_deg: Option<f64>,
    pub elevation_deg: Option<f64>,
    pub sigma_tau_ns: f64,
}

/// Mean and population standard deviation over a set of sigma_tau samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelaySpreadStats {
    pub mean_ns: f64,
    pub std_ns: f64,
    pub samples: Vec<DelaySample>,
}

impl DelaySpreadStats {
    /// Population (not sample) standard deviation; the convention is load
    /// bearing for the hand-checkable micro-examples.
    pub fn from_samples(samples: Vec<DelaySample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().map(|s| s.sigma_tau_ns).sum::<f64>() / n;
        let var = samples
            .iter()
            .map(|s| (s.sigma_tau_ns - mean).powi(2))
            .sum::<f64>()
            / n;
        Ok(DelaySpreadStats {
            mean_ns: mean,
            std_ns: var.sqrt(),
            samples,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sigma_tau_ns).collect()
    }
}

/// Which samples feed the per-class statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsFilter {
    /// One sample per valid pointing angle.
    AllAngles,
    /// One sample per location, at the angle with the strongest received
    /// power (ties broken toward the lower (azimuth, elevation)).
    StrongestBeam,
}

impl std::fmt::Display for StatsFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatsFilter::AllAngles => write!(f, "all-angles"),
            StatsFilter::StrongestBeam => write!(f, "strongest-beam"),
        }
    }
}

/// Per-angle or strongest-beam delay-spread statistics for one LOS class.
///
/// Records are thresholded at `threshold_db` first; angles with no bin above
/// the cutoff are dropped (a location with none is skipped entirely).
/// Samples are ordered by (location id, azimuth, elevation) so the result is
/// independent of record order and of any parallel evaluation schedule.
pub fn directional_stats(
    campaign: &Campaign,
    class: LosClass,
    filter: StatsFilter,
    threshold_db: f64,
) -> Result<DelaySpreadStats> {
    let mut samples = Vec::new();
    for loc in campaign.locations_in_class(class) {
        if loc.outage {
            continue;
        }
        let mut valid: Vec<(f64, f64, f64, Pdp)> = Vec::new(); // (power, az, el, pdp)
        for rec in &loc.records {
            let t = rec.pdp.thresholded(threshold_db)?;
            if t.has_signal() {
                valid.push((t.total_power_mw(), rec.azimuth_deg, rec.elevation_deg, t));
            }
        }
        match filter {
            StatsFilter::AllAngles => {
                for (_, az, el, pdp) in &valid {
                    samples.push(DelaySample {
                        location_id: loc.id.clone(),
                        azimuth_deg: Some(*az),
                        elevation_deg: Some(*el),
                        sigma_tau_ns: rms_delay_spread_ns(pdp)?,
                    });
                }
            }
            StatsFilter::StrongestBeam => {
                // strongest power first; ties go to the lower (azimuth, elevation)
                let best = valid.iter().min_by(|a, b| {
                    b.0.partial_cmp(&a.0)
                        .unwrap()
                        .then(a.1.partial_cmp(&b.1).unwrap())
                        .then(a.2.partial_cmp(&b.2).unwrap())
                });
                if let Some((_, az, el, pdp)) = best {
                    samples.push(DelaySample {
                        location_id: loc.id.clone(),
                        azimuth_deg: Some(*az),
                        elevation_deg: Some(*el),
                        sigma_tau_ns: rms_delay_spread_ns(pdp)?,
                    });
                }
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyClass(class.to_string()));
    }
    samples.sort_by(|a, b| {
        (&a.location_id, a.azimuth_deg, a.elevation_deg)
            .partial_cmp(&(&b.location_id, b.azimuth_deg, b.elevation_deg))
            .unwrap()
    });
    DelaySpreadStats::from_samples(samples)
}

/// An empirical distribution: sorted distinct values with cumulative
/// probabilities k/N.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cdf {
    values: Vec<f64>,
    cum_probs: Vec<f64>,
}

impl Cdf {
    /// The (value, cumulative probability) steps; probabilities are strictly
    /// increasing and end at 1.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.cum_probs.iter().copied())
    }

    /// F(x) = (#samples <= x) / N.
    pub fn prob_at(&self, x: f64) -> f64 {
        match self.values.partition_point(|&v| v <= x) {
            0 => 0.0,
            i => self.cum_probs[i - 1],
        }
    }

    /// Smallest sample value whose cumulative probability reaches `p`.
    pub fn percentile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "percentile probability must lie in (0, 1], got {p}"
            )));
        }
        let i = self.cum_probs.partition_point(|&q| q < p);
        Ok(self.values[i.min(self.values.len() - 1)])
    }
}

/// Build the empirical CDF of a non-empty sample set.
pub fn empirical_cdf(samples: &[f64]) -> Result<Cdf> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "CDF samples must be finite".to_string(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut values = Vec::new();
    let mut cum_probs = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        // last occurrence of each distinct value carries the cumulative count
        if i + 1 == sorted.len() || sorted[i + 1] > v {
            values.push(v);
            cum_probs.push((i + 1) as f64 / n);
        }
    }
    Ok(Cdf { values, cum_probs })
}

/// Smallest sample value with F >= p.
pub fn percentile(cdf: &Cdf, p: f64) -> Result<f64> {
    cdf.percentile(p)
}
