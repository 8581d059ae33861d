//! Measurement-campaign domain model, file ingestion, and noise thresholding.
//!
//! A campaign file is a single UTF-8 JSON document whose top-level object
//! carries the sounder constants plus a `locations` array; each location has
//! its TX/RX geometry, LOS class, outage flag, and directional `records`,
//! and each record holds a pointing angle plus its power delay profile.
//! Everything is validated on load; all types are immutable value data
//! afterwards and safe to share across threads.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::{normalize_azimuth_deg, Point3};
use crate::{Error, Result, DEFAULT_BIN_WIDTH_NS};

fn default_bin_width() -> f64 {
    DEFAULT_BIN_WIDTH_NS
}

/// A time-binned power delay profile.
///
/// `powers[k]` is the received power density in mW/ns of the bin whose delay
/// is `start_delay_ns + k * bin_width_ns`. The delay axis is excess delay for
/// directional measurements and absolute propagation time for synthesized
/// omnidirectional profiles. `noise_floor` is the mean thermal noise density
/// in mW/ns used for thresholding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pdp {
    #[serde(default = "default_bin_width")]
    pub bin_width_ns: f64,
    #[serde(default)]
    pub start_delay_ns: f64,
    /// 0.0 in a freshly parsed file means "not given"; `load_campaign` fills
    /// it from the campaign-level default before validation.
    #[serde(default)]
    pub noise_floor: f64,
    pub powers: Vec<f64>,
}

impl Pdp {
    pub fn new(
        bin_width_ns: f64,
        start_delay_ns: f64,
        powers: Vec<f64>,
        noise_floor: f64,
    ) -> Result<Self> {
        let pdp = Pdp {
            bin_width_ns,
            start_delay_ns,
            noise_floor,
            powers,
        };
        pdp.validate("pdp")?;
        Ok(pdp)
    }

    pub(crate) fn validate(&self, locus: &str) -> Result<()> {
        if !(self.bin_width_ns > 0.0) || !self.bin_width_ns.is_finite() {
            return Err(Error::validation(
                locus,
                "bin_width_ns",
                format!("must be > 0, got {}", self.bin_width_ns),
            ));
        }
        if !self.start_delay_ns.is_finite() {
            return Err(Error::validation(locus, "start_delay_ns", "must be finite"));
        }
        if !(self.noise_floor > 0.0) || !self.noise_floor.is_finite() {
            return Err(Error::validation(
                locus,
                "noise_floor",
                format!("must be > 0, got {}", self.noise_floor),
            ));
        }
        if let Some(k) = self
            .powers
            .iter()
            .position(|p| !(*p >= 0.0) || !p.is_finite())
        {
            return Err(Error::validation(
                locus,
                "powers",
                format!("bin {k} must be a finite power >= 0, got {}", self.powers[k]),
            ));
        }
        Ok(())
    }

    /// Delay of bin `k` on this profile's own axis, ns.
    pub fn delay_ns(&self, k: usize) -> f64 {
        self.start_delay_ns + k as f64 * self.bin_width_ns
    }

    /// Zero every bin whose power density lies below
    /// `noise_floor * 10^(threshold_db/10)`; bins at or above the cutoff and
    /// all metadata are untouched, so bin indices stay stable.
    pub fn thresholded(&self, threshold_db: f64) -> Result<Pdp> {
        if !(threshold_db >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold_db must be >= 0, got {threshold_db}"
            )));
        }
        let cutoff = self.noise_floor * 10f64.powf(threshold_db / 10.0);
        let powers = self
            .powers
            .iter()
            .map(|&p| if p < cutoff { 0.0 } else { p })
            .collect();
        Ok(Pdp {
            bin_width_ns: self.bin_width_ns,
            start_delay_ns: self.start_delay_ns,
            noise_floor: self.noise_floor,
            powers,
        })
    }

    /// Total received power in mW: sum of density times bin width.
    pub fn total_power_mw(&self) -> f64 {
        self.powers.iter().sum::<f64>() * self.bin_width_ns
    }

    /// Index of the first bin with nonzero power.
    pub fn first_nonzero_bin(&self) -> Option<usize> {
        self.powers.iter().position(|&p| p > 0.0)
    }

    /// A profile is valid for statistics once at least one bin survives
    /// thresholding.
    pub fn has_signal(&self) -> bool {
        self.first_nonzero_bin().is_some()
    }
}

/// One directional measurement: a pointing angle and its PDP.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    /// Bearing in [0, 360) referenced to true north.
    pub azimuth_deg: f64,
    /// Elevation in [-90, 90].
    pub elevation_deg: f64,
    #[serde(default)]
    pub boresight: bool,
    pub pdp: Pdp,
}

impl AngleRecord {
    pub fn new(azimuth_deg: f64, elevation_deg: f64, pdp: Pdp, boresight: bool) -> Result<Self> {
        let rec = AngleRecord {
            azimuth_deg: normalize_azimuth_deg(azimuth_deg),
            elevation_deg,
            boresight,
            pdp,
        };
        rec.validate("record")?;
        Ok(rec)
    }

    pub(crate) fn validate(&self, locus: &str) -> Result<()> {
        if !self.azimuth_deg.is_finite() || !(0.0..360.0).contains(&self.azimuth_deg) {
            return Err(Error::validation(
                locus,
                "azimuth_deg",
                format!("must lie in [0, 360), got {}", self.azimuth_deg),
            ));
        }
        if !self.elevation_deg.is_finite() || !(-90.0..=90.0).contains(&self.elevation_deg) {
            return Err(Error::validation(
                locus,
                "elevation_deg",
                format!("must lie in [-90, 90], got {}", self.elevation_deg),
            ));
        }
        self.pdp.validate(locus)
    }
}

/// Line-of-sight classification of a TX-RX location combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LosClass {
    Los,
    Nlos,
}

impl LosClass {
    pub const ALL: [LosClass; 2] = [LosClass::Los, LosClass::Nlos];
}

impl fmt::Display for LosClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LosClass::Los => write!(f, "LOS"),
            LosClass::Nlos => write!(f, "NLOS"),
        }
    }
}

impl FromStr for LosClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "los" => Ok(LosClass::Los),
            "nlos" => Ok(LosClass::Nlos),
            other => Err(Error::InvalidArgument(format!(
                "unknown LOS class `{other}` (expected los or nlos)"
            ))),
        }
    }
}

/// One TX-RX location combination and everything measured there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationMeasurement {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_pos: Option<Point3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_pos: Option<Point3>,
    pub tr_distance_m: f64,
    pub los_class: LosClass,
    #[serde(default)]
    pub outage: bool,
    #[serde(default)]
    pub records: Vec<AngleRecord>,
}

impl LocationMeasurement {
    pub(crate) fn validate(&self, index: usize) -> Result<()> {
        let locus = format!("locations[{index}] (id `{}`)", self.id);
        if self.id.is_empty() {
            return Err(Error::validation(&locus, "id", "must be non-empty"));
        }
        if !(self.tr_distance_m > 0.0) || !self.tr_distance_m.is_finite() {
            return Err(Error::validation(
                &locus,
                "tr_distance_m",
                format!("must be > 0, got {}", self.tr_distance_m),
            ));
        }
        if self.outage != self.records.is_empty() {
            return Err(Error::validation(
                &locus,
                "outage",
                if self.outage {
                    "marked outage but records are present"
                } else {
                    "not marked outage but records are empty"
                },
            ));
        }
        if let (Some(tx), Some(rx)) = (self.tx_pos, self.rx_pos) {
            if !tx.is_finite() || !rx.is_finite() {
                return Err(Error::validation(&locus, "tx_pos", "must be finite"));
            }
            let d = tx.distance(rx);
            if (d - self.tr_distance_m).abs() > 0.01 * self.tr_distance_m {
                return Err(Error::validation(
                    &locus,
                    "tr_distance_m",
                    format!(
                        "disagrees with |tx_pos - rx_pos| = {d:.3} m by more than 1% \
                         (got {} m)",
                        self.tr_distance_m
                    ),
                ));
            }
        }
        let mut seen = HashSet::new();
        for (r, rec) in self.records.iter().enumerate() {
            rec.validate(&format!("{locus} records[{r}]"))?;
            let key = (rec.azimuth_deg.to_bits(), rec.elevation_deg.to_bits());
            if !seen.insert(key) {
                return Err(Error::validation(
                    format!("{locus} records[{r}]"),
                    "azimuth_deg",
                    format!(
                        "duplicate pointing angle ({}, {})",
                        rec.azimuth_deg, rec.elevation_deg
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// A full measurement campaign: sounder constants plus all locations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub carrier_freq_hz: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub max_path_loss_db: f64,
    /// Fills any record PDP that does not carry its own noise floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_noise_floor: Option<f64>,
    #[serde(default)]
    pub locations: Vec<LocationMeasurement>,
}

impl Campaign {
    /// Validate every invariant, filling missing per-PDP noise floors from
    /// the campaign default. Azimuths are assumed already normalized (the
    /// loader normalizes before calling this).
    pub fn validate(&mut self) -> Result<()> {
        for (field, value) in [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("hpbw_az_deg", self.hpbw_az_deg),
            ("hpbw_el_deg", self.hpbw_el_deg),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::validation(
                    "campaign",
                    field,
                    format!("must be > 0, got {value}"),
                ));
            }
        }
        if !(self.tx_gain_dbi > 0.0) || !(self.rx_gain_dbi > 0.0) {
            return Err(Error::validation(
                "campaign",
                "tx_gain_dbi",
                "antenna gains must be > 0 dBi",
            ));
        }
        for (i, loc) in self.locations.iter_mut().enumerate() {
            for rec in &mut loc.records {
                if rec.pdp.noise_floor == 0.0 {
                    match self.default_noise_floor {
                        Some(nf) => rec.pdp.noise_floor = nf,
                        None => {
                            return Err(Error::validation(
                                format!("locations[{i}] (id `{}`)", loc.id),
                                "noise_floor",
                                "missing and campaign has no default_noise_floor",
                            ))
                        }
                    }
                }
            }
            loc.validate(i)?;
        }
        Ok(())
    }

    /// Locations of one class, outages included.
    pub fn locations_in_class(&self, class: LosClass) -> impl Iterator<Item = &LocationMeasurement> {
        self.locations.iter().filter(move |l| l.los_class == class)
    }

    /// Copy of the campaign without the named locations (explicit exclusion
    /// lists; silent data exclusion is not done anywhere).
    pub fn excluding(&self, ids: &[String]) -> Campaign {
        let mut out = self.clone();
        out.locations.retain(|l| !ids.contains(&l.id));
        out
    }
}

/// Parse and fully validate a campaign file.
pub fn load_campaign(path: impl AsRef<Path>) -> Result<Campaign> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut campaign: Campaign =
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    for loc in &mut campaign.locations {
        for rec in &mut loc.records {
            let az = normalize_azimuth_deg(rec.azimuth_deg);
            if az != rec.azimuth_deg {
                log::warn!(
                    "location `{}`: azimuth {} normalized to {az}",
                    loc.id,
                    rec.azimuth_deg
                );
                rec.azimuth_deg = az;
            }
        }
    }
    campaign.validate()?;
    Ok(campaign)
}

/// Deterministic pretty JSON for a campaign (the writer half of the file
/// format round trip).
pub fn campaign_to_json(campaign: &Campaign) -> String {
    let mut s = serde_json::to_string_pretty(campaign).expect("campaign serializes");
    s.push('\n');
    s
}

/// Write a campaign file.
pub fn save_campaign(path: impl AsRef<Path>, campaign: &Campaign) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, campaign_to_json(campaign)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Counts and distance range of one group of locations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupStat {
    pub count: usize,
    pub min_distance_m: Option<f64>,
    pub max_distance_m: Option<f64>,
}

impl GroupStat {
    fn from_distances(mut distances: Vec<f64>) -> Self {
        distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
        GroupStat {
            count: distances.len(),
            min_distance_m: distances.first().copied(),
            max_distance_m: distances.last().copied(),
        }
    }
}

/// Measured / with-signal / outage bookkeeping for one LOS class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSummary {
    pub los_class: LosClass,
    pub measured: GroupStat,
    pub signal: GroupStat,
    pub outage: GroupStat,
}

/// Campaign summary: one block restricted to `d <= d_max_m`, one over all
/// distances, each split by LOS class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub d_max_m: f64,
    pub within_d_max: Vec<ClassSummary>,
    pub all_distances: Vec<ClassSummary>,
}

fn summarize_group<'a>(
    locs: impl Iterator<Item = &'a LocationMeasurement>,
    class: LosClass,
) -> ClassSummary {
    let mut measured = Vec::new();
    let mut signal = Vec::new();
    let mut outage = Vec::new();
    for loc in locs.filter(|l| l.los_class == class) {
        measured.push(loc.tr_distance_m);
        if loc.outage {
            outage.push(loc.tr_distance_m);
        } else {
            signal.push(loc.tr_distance_m);
        }
    }
    ClassSummary {
        los_class: class,
        measured: GroupStat::from_distances(measured),
        signal: GroupStat::from_distances(signal),
        outage: GroupStat::from_distances(outage),
    }
}

/// Per-class location counts with and without the distance cap.
///
/// A location counts as "with signal" iff it is not flagged outage, so
/// signal + outage = measured in every group.
pub fn summarize_campaign(campaign: &Campaign, d_max_m: f64) -> Result<CampaignSummary> {
    if !(d_max_m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "d_max_m must be > 0, got {d_max_m}"
        )));
    }
    let within = |class| {
        summarize_group(
            campaign
                .locations
                .iter()
                .filter(|l| l.tr_distance_m <= d_max_m),
            class,
        )
    };
    let all = |class| summarize_group(campaign.locations.iter(), class);
    Ok(CampaignSummary {
        d_max_m,
        within_d_max: LosClass::ALL.iter().map(|&c| within(c)).collect(),
        all_distances: LosClass::ALL.iter().map(|&c| all(c)).collect(),
    })
}
