//! Seeded synthetic campaign generator with known ground truth.
//!
//! The generator lays out TX-RX location combinations far apart along x and
//! builds each location's multipath from explicit geometry: an optional LOS
//! cluster, specular wall reflections at lateral offsets, an optional back
//! wall behind the RX, and an occluding facet between TX and RX for NLOS
//! locations. Cluster powers follow a configured close-in path loss law
//! (plus optional log-normal shadowing), intra-cluster excess profiles are
//! random decaying taps, and sub-threshold noise bins are injected so noise
//! thresholding is exercised end to end. Directional records are the result
//! of sampling those clusters through an idealized boxcar beam: cluster
//! angular separations always exceed the beamwidth, so each record sees
//! exactly one cluster.
//!
//! Every quantity a pipeline is supposed to recover is recorded in the
//! [`GroundTruth`] sidecar, computed analytically from the construction and
//! independent of the pipelines under test. Wall placements are chosen so
//! cluster path lengths differ from the first arrival by whole PDP bins,
//! which keeps the ideal omnidirectional superposition representable on the
//! synthesis grid.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::campaign::{
    AngleRecord, Campaign, LocationMeasurement, LosClass, Pdp,
};
use crate::combining::CombineMode;
use crate::geom::{direction_angles_deg, Point3};
use crate::pathloss::fspl_at_ref_db;
use crate::raytrace::{Facet, Scene};
use crate::{path_delay_ns, Error, Result, SPEED_OF_LIGHT_M_PER_S};

/// Generator parameters. The defaults mimic the 73 GHz sounder constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_locations: usize,
    pub carrier_freq_hz: f64,
    /// True path loss exponent of every directional sample.
    pub ple: f64,
    /// Log-normal shadowing standard deviation, dB (0 = exactly on the line).
    pub shadow_sigma_db: f64,
    pub los_fraction: f64,
    pub outage_fraction: f64,
    /// Ground-plane TX-RX distance range, m.
    pub d_min_m: f64,
    pub d_max_m: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
    pub max_path_loss_db: f64,
    pub bin_width_ns: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_locations: 25,
            carrier_freq_hz: 73e9,
            ple: 3.2,
            shadow_sigma_db: 0.0,
            los_fraction: 0.35,
            outage_fraction: 0.1,
            d_min_m: 30.0,
            d_max_m: 200.0,
            tx_power_dbm: 14.6,
            tx_gain_dbi: 27.0,
            rx_gain_dbi: 27.0,
            hpbw_az_deg: 7.0,
            hpbw_el_deg: 7.0,
            max_path_loss_db: 181.0,
            bin_width_ns: 2.5,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.n_locations == 0 {
            return Err(Error::validation("generator", "n_locations", "must be >= 1"));
        }
        if !(self.d_min_m >= 15.0 && self.d_min_m < self.d_max_m && self.d_max_m <= 1000.0) {
            return Err(Error::validation(
                "generator",
                "d_min_m",
                format!(
                    "need 15 <= d_min < d_max <= 1000, got [{}, {}]",
                    self.d_min_m, self.d_max_m
                ),
            ));
        }
        for (field, v) in [
            ("los_fraction", self.los_fraction),
            ("outage_fraction", self.outage_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(
                    "generator",
                    field,
                    format!("must lie in [0, 1], got {v}"),
                ));
            }
        }
        if !(self.ple > 0.5 && self.ple < 10.0) {
            return Err(Error::validation(
                "generator",
                "ple",
                format!("must lie in (0.5, 10), got {}", self.ple),
            ));
        }
        if !(self.shadow_sigma_db >= 0.0) {
            return Err(Error::validation("generator", "shadow_sigma_db", "must be >= 0"));
        }
        if !(self.carrier_freq_hz > 0.0) || !(self.bin_width_ns > 0.0) {
            return Err(Error::validation("generator", "carrier_freq_hz", "must be > 0"));
        }
        Ok(())
    }
}

/// One ground-truth multipath cluster as constructed by the generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTruth {
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub path_length_m: f64,
    pub delay_ns: f64,
    /// Received power of the cluster (= of its directional record), mW.
    pub power_mw: f64,
    /// Intra-cluster excess-delay tap densities, mW/ns, one per bin.
    pub excess_profile_mw_per_ns: Vec<f64>,
    /// RMS delay spread of the tap profile (generator's own moment loop).
    pub sigma_tau_ns: f64,
}

/// Ground truth for one location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationTruth {
    pub id: String,
    pub los_class: LosClass,
    pub outage: bool,
    pub distance_m: f64,
    /// Earliest cluster delay (ns); what omni synthesis must hit.
    pub first_arrival_ns: Option<f64>,
    /// RMS delay spread of the ideal absolute-time superposition of all
    /// clusters (generator's own moment loop).
    pub omni_sigma_tau_ns: Option<f64>,
    pub total_power_mw: Option<f64>,
    pub clusters: Vec<ClusterTruth>,
}

/// Expected anchored-fit PLE for one combining configuration, computed by
/// the generator's own closed form over the exact combined powers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModePle {
    pub mode: CombineMode,
    pub k: usize,
    pub ple: f64,
}

/// Everything the pipelines are expected to recover from a generated
/// campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub ple: f64,
    pub shadow_sigma_db: f64,
    pub mode_ples: Vec<ModePle>,
    pub locations: Vec<LocationTruth>,
}

/// Weighted delay moments by a plain loop; the generator's own oracle,
/// deliberately separate from the delay-stats implementation.
fn naive_sigma_ns(pairs: &[(f64, f64)]) -> f64 {
    let sum_p: f64 = pairs.iter().map(|(_, p)| p).sum();
    let m1: f64 = pairs.iter().map(|(t, p)| p * t).sum::<f64>() / sum_p;
    let m2: f64 = pairs.iter().map(|(t, p)| p * t * t).sum::<f64>() / sum_p;
    (m2 - m1 * m1).max(0.0).sqrt()
}

struct ClusterGeometry {
    aoa_az_deg: f64,
    aoa_el_deg: f64,
    path_length_m: f64,
    boresight: bool,
    facet: Option<Facet>,
}

const TX_HEIGHT_M: f64 = 7.0;
const RX_HEIGHT_M: f64 = 2.0;
const WALL_HALF_WIDTH_M: f64 = 25.0;
const WALL_HEIGHT_M: f64 = 20.0;
const LOCATION_SPACING_M: f64 = 2500.0;

/// Smallest integer bin count whose side-wall offset reaches `y_target`.
fn side_wall_bins_for_offset(y_target: f64, l_los: f64, bin_len_m: f64) -> u64 {
    let excess = (l_los * l_los + 4.0 * y_target * y_target).sqrt() - l_los;
    (excess / bin_len_m).ceil().max(1.0) as u64
}

fn side_wall_offset(m_bins: u64, l_los: f64, bin_len_m: f64) -> f64 {
    let e = m_bins as f64 * bin_len_m;
    (e * (2.0 * l_los + e)).sqrt() / 2.0
}

/// Generate a campaign, its ground truth, and the matching facet scene.
/// The same (config, seed) always produces identical output.
pub fn generate_campaign(
    config: &GeneratorConfig,
    seed: u64,
) -> Result<(Campaign, GroundTruth, Scene)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchor_db = fspl_at_ref_db(config.carrier_freq_hz)?;
    let shadow = if config.shadow_sigma_db > 0.0 {
        Some(Normal::new(0.0, config.shadow_sigma_db).expect("valid normal"))
    } else {
        None
    };
    let bin_len_m = SPEED_OF_LIGHT_M_PER_S * config.bin_width_ns * 1e-9;
    let w = config.bin_width_ns;
    let link_budget_dbm = config.tx_power_dbm + config.tx_gain_dbi + config.rx_gain_dbi;

    let mut locations = Vec::with_capacity(config.n_locations);
    let mut truths = Vec::with_capacity(config.n_locations);
    let mut facets = Vec::new();

    for i in 0..config.n_locations {
        let id = format!("loc{i:04}");
        let g = rng.random_range(config.d_min_m..config.d_max_m);
        let outage = rng.random_bool(config.outage_fraction);
        let los = !outage && rng.random_bool(config.los_fraction);
        let class = if los { LosClass::Los } else { LosClass::Nlos };

        let x0 = i as f64 * LOCATION_SPACING_M;
        let tx = Point3::new(x0, 0.0, TX_HEIGHT_M);
        let rx = Point3::new(x0 + g, 0.0, RX_HEIGHT_M);
        let d_tr = tx.distance(rx);
        let l_los = d_tr;

        if outage {
            locations.push(LocationMeasurement {
                id: id.clone(),
                tx_pos: Some(tx),
                rx_pos: Some(rx),
                tr_distance_m: d_tr,
                los_class: class,
                outage: true,
                records: vec![],
            });
            truths.push(LocationTruth {
                id,
                los_class: class,
                outage: true,
                distance_m: d_tr,
                first_arrival_ns: None,
                omni_sigma_tau_ns: None,
                total_power_mw: None,
                clusters: vec![],
            });
            continue;
        }

        // cluster geometry: LOS + up to 3 extra reflectors for LOS class,
        // 1..=2 wall reflections for NLOS
        let mut geoms: Vec<ClusterGeometry> = Vec::new();
        let n_side_walls;
        let use_back_wall;
        if los {
            let extras = rng.random_range(0..=3u32);
            n_side_walls = extras.min(2) as usize;
            use_back_wall = extras == 3;
            let los_dir = tx - rx;
            let (az, el) = direction_angles_deg(los_dir);
            geoms.push(ClusterGeometry {
                aoa_az_deg: az,
                aoa_el_deg: el,
                path_length_m: l_los,
                boresight: true,
                facet: None,
            });
        } else {
            n_side_walls = rng.random_range(1..=2u32) as usize;
            use_back_wall = false;
        }

        for side in 0..n_side_walls {
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let m_min = side_wall_bins_for_offset(0.15 * g, l_los, bin_len_m);
            let m_max = {
                let excess = (l_los * l_los + 4.0 * (0.8 * g) * (0.8 * g)).sqrt() - l_los;
                (excess / bin_len_m).floor() as u64
            };
            let m = rng.random_range(m_min..=m_max.max(m_min));
            let y = sign * side_wall_offset(m, l_los, bin_len_m);
            let p = Point3::new(x0 + g / 2.0, y, (TX_HEIGHT_M + RX_HEIGHT_M) / 2.0);
            let dir = p - rx;
            let (az, el) = direction_angles_deg(dir);
            let xc = x0 + g / 2.0;
            geoms.push(ClusterGeometry {
                aoa_az_deg: az,
                aoa_el_deg: el,
                path_length_m: l_los + m as f64 * bin_len_m,
                boresight: false,
                facet: Some(
                    Facet::new(if y > 0.0 {
                        [
                            Point3::new(xc - WALL_HALF_WIDTH_M, y, 0.0),
                            Point3::new(xc + WALL_HALF_WIDTH_M, y, 0.0),
                            Point3::new(xc + WALL_HALF_WIDTH_M, y, WALL_HEIGHT_M),
                            Point3::new(xc - WALL_HALF_WIDTH_M, y, WALL_HEIGHT_M),
                        ]
                    } else {
                        [
                            Point3::new(xc - WALL_HALF_WIDTH_M, y, 0.0),
                            Point3::new(xc - WALL_HALF_WIDTH_M, y, WALL_HEIGHT_M),
                            Point3::new(xc + WALL_HALF_WIDTH_M, y, WALL_HEIGHT_M),
                            Point3::new(xc + WALL_HALF_WIDTH_M, y, 0.0),
                        ]
                    })
                    .expect("side wall facet"),
                ),
            });
        }

        if use_back_wall {
            // distance behind the RX such that the path is a whole number of
            // bins longer than LOS
            let dh2 = (TX_HEIGHT_M - RX_HEIGHT_M).powi(2);
            let m_min = {
                let target = ((g + 10.0) * (g + 10.0) + dh2).sqrt() - l_los;
                (target / bin_len_m).ceil().max(1.0) as u64
            };
            let m_max = {
                let target = ((g + 80.0) * (g + 80.0) + dh2).sqrt() - l_los;
                (target / bin_len_m).floor() as u64
            };
            let m = rng.random_range(m_min..=m_max.max(m_min));
            let length = l_los + m as f64 * bin_len_m;
            let s = ((length * length - dh2).sqrt() - g) / 2.0;
            let xw = x0 + g + s;
            let z_p = TX_HEIGHT_M - (TX_HEIGHT_M - RX_HEIGHT_M) * (g + s) / (g + 2.0 * s);
            let dir = Point3::new(s, 0.0, z_p - RX_HEIGHT_M);
            let (az, el) = direction_angles_deg(dir);
            geoms.push(ClusterGeometry {
                aoa_az_deg: az,
                aoa_el_deg: el,
                path_length_m: length,
                boresight: false,
                facet: Some(
                    Facet::new([
                        Point3::new(xw, -WALL_HALF_WIDTH_M, 0.0),
                        Point3::new(xw, -WALL_HALF_WIDTH_M, WALL_HEIGHT_M),
                        Point3::new(xw, WALL_HALF_WIDTH_M, WALL_HEIGHT_M),
                        Point3::new(xw, WALL_HALF_WIDTH_M, 0.0),
                    ])
                    .expect("back wall facet"),
                ),
            });
        }

        if !los {
            // occluder kills the optical LOS path; its half width stays
            // below the y where reflection legs cross its plane (0.8 * 0.15g)
            let xo = x0 + 0.4 * g;
            let wy = 0.09 * g;
            facets.push(
                Facet::new([
                    Point3::new(xo, -wy, 0.0),
                    Point3::new(xo, -wy, 30.0),
                    Point3::new(xo, wy, 30.0),
                    Point3::new(xo, wy, 0.0),
                ])
                .expect("occluder facet"),
            );
        }

        // cluster powers: every directional record sits on the configured
        // path loss line (plus its own shadowing draw)
        let mut records = Vec::with_capacity(geoms.len());
        let mut clusters = Vec::with_capacity(geoms.len());
        for geom in &geoms {
            let x_db = shadow.as_ref().map(|n| n.sample(&mut rng)).unwrap_or(0.0);
            let pl_db = anchor_db + 10.0 * config.ple * d_tr.log10() + x_db;
            let power_mw = 10f64.powf((link_budget_dbm - pl_db) / 10.0);

            let n_lead = rng.random_range(0..=3usize);
            let n_taps = rng.random_range(1..=6usize);
            let n_trail = rng.random_range(1..=4usize);
            let mut raw: Vec<f64> = (0..n_taps)
                .map(|j| rng.random_range(0.2..1.0) * 0.5f64.powi(j as i32))
                .collect();
            let scale = power_mw / (raw.iter().sum::<f64>() * w);
            for t in raw.iter_mut() {
                *t *= scale;
            }
            let min_tap = raw.iter().cloned().fold(f64::INFINITY, f64::min);
            let cutoff_margin = 10.0;
            let noise_floor = min_tap / (10f64.powf(0.5) * cutoff_margin);
            let cutoff = noise_floor * 10f64.powf(0.5);
            let mut powers = Vec::with_capacity(n_lead + n_taps + n_trail);
            for _ in 0..n_lead {
                powers.push(rng.random_range(0.1..0.9) * cutoff);
            }
            powers.extend_from_slice(&raw);
            for _ in 0..n_trail {
                powers.push(rng.random_range(0.1..0.9) * cutoff);
            }

            records.push(AngleRecord {
                azimuth_deg: crate::geom::normalize_azimuth_deg(geom.aoa_az_deg),
                elevation_deg: geom.aoa_el_deg,
                boresight: geom.boresight,
                pdp: Pdp {
                    bin_width_ns: w,
                    start_delay_ns: 0.0,
                    noise_floor,
                    powers,
                },
            });
            let pairs: Vec<(f64, f64)> = raw
                .iter()
                .enumerate()
                .map(|(j, &p)| (j as f64 * w, p))
                .collect();
            clusters.push(ClusterTruth {
                aoa_az_deg: crate::geom::normalize_azimuth_deg(geom.aoa_az_deg),
                aoa_el_deg: geom.aoa_el_deg,
                path_length_m: geom.path_length_m,
                delay_ns: path_delay_ns(geom.path_length_m),
                power_mw: raw.iter().sum::<f64>() * w,
                excess_profile_mw_per_ns: raw,
                sigma_tau_ns: naive_sigma_ns(&pairs),
            });
            if let Some(f) = &geom.facet {
                facets.push(f.clone());
            }
        }

        // ideal absolute-time superposition of all clusters
        let omni_pairs: Vec<(f64, f64)> = clusters
            .iter()
            .flat_map(|c| {
                c.excess_profile_mw_per_ns
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| (c.delay_ns + j as f64 * w, p))
                    .collect::<Vec<_>>()
            })
            .collect();
        let first_arrival = clusters
            .iter()
            .map(|c| c.delay_ns)
            .fold(f64::INFINITY, f64::min);

        truths.push(LocationTruth {
            id: id.clone(),
            los_class: class,
            outage: false,
            distance_m: d_tr,
            first_arrival_ns: Some(first_arrival),
            omni_sigma_tau_ns: Some(naive_sigma_ns(&omni_pairs)),
            total_power_mw: Some(clusters.iter().map(|c| c.power_mw).sum()),
            clusters,
        });
        locations.push(LocationMeasurement {
            id,
            tx_pos: Some(tx),
            rx_pos: Some(rx),
            tr_distance_m: d_tr,
            los_class: class,
            outage: false,
            records,
        });
    }

    // expected fitted PLE per combining configuration, via the generator's
    // own closed form over its exact cluster powers
    let mut mode_ples = Vec::new();
    for mode in [CombineMode::Coherent, CombineMode::NonCoherent] {
        for k in 1..=4usize {
            let mut num = 0.0;
            let mut den = 0.0;
            let mut n_used = 0;
            for t in &truths {
                if t.outage || t.clusters.is_empty() {
                    continue;
                }
                let mut powers: Vec<f64> = t.clusters.iter().map(|c| c.power_mw).collect();
                powers.sort_by(|a, b| b.partial_cmp(a).unwrap());
                powers.truncate(k);
                let combined = match mode {
                    CombineMode::NonCoherent => powers.iter().sum::<f64>(),
                    CombineMode::Coherent => {
                        let amp: f64 = powers.iter().map(|p| p.sqrt()).sum();
                        amp * amp
                    }
                };
                let pl = link_budget_dbm - 10.0 * combined.log10();
                if pl > config.max_path_loss_db {
                    continue;
                }
                let l = 10.0 * t.distance_m.log10();
                num += (pl - anchor_db) * l;
                den += l * l;
                n_used += 1;
            }
            if n_used >= 2 && den > 0.0 {
                mode_ples.push(ModePle {
                    mode,
                    k,
                    ple: num / den,
                });
            }
        }
    }

    let mut campaign = Campaign {
        carrier_freq_hz: config.carrier_freq_hz,
        hpbw_az_deg: config.hpbw_az_deg,
        hpbw_el_deg: config.hpbw_el_deg,
        tx_power_dbm: config.tx_power_dbm,
        tx_gain_dbi: config.tx_gain_dbi,
        rx_gain_dbi: config.rx_gain_dbi,
        max_path_loss_db: config.max_path_loss_db,
        default_noise_floor: None,
        locations,
    };
    campaign.validate()?;
    let truth = GroundTruth {
        seed,
        ple: config.ple,
        shadow_sigma_db: config.shadow_sigma_db,
        mode_ples,
        locations: truths,
    };
    Ok((campaign, truth, Scene::new(facets)))
}

/// Deterministic pretty JSON for the ground-truth sidecar.
pub fn ground_truth_to_json(truth: &GroundTruth) -> String {
    let mut s = serde_json::to_string_pretty(truth).expect("ground truth serializes");
    s.push('\n');
    s
}

/// Write campaign.json, ground_truth.json, and scene.txt into a directory;
/// returns the paths written.
pub fn write_generated(
    dir: impl AsRef<Path>,
    campaign: &Campaign,
    truth: &GroundTruth,
    scene: &Scene,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let campaign_path = dir.join("campaign.json");
    crate::campaign::save_campaign(&campaign_path, campaign)?;
    let truth_path = dir.join("ground_truth.json");
    std::fs::write(&truth_path, ground_truth_to_json(truth)).map_err(|source| Error::Io {
        path: truth_path.clone(),
        source,
    })?;
    let scene_path = dir.join("scene.txt");
    scene.save(&scene_path)?;
    Ok(vec![campaign_path, truth_path, scene_path])
}
