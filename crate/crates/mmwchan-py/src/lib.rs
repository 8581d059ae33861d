//! Python bindings for the main mmwchan types and operations.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use mmwchan::campaign;
use mmwchan::combining;
use mmwchan::delay;
use mmwchan::extension;
use mmwchan::geom::Point3;
use mmwchan::pathloss;
use mmwchan::raytrace;
use mmwchan::synth;
use mmwchan::synthesis;
use mmwchan::tables;

fn to_py_err(e: mmwchan::Error) -> PyErr {
    match e {
        mmwchan::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_class(s: &str) -> PyResult<campaign::LosClass> {
    s.parse().map_err(to_py_err)
}

fn parse_mode(s: &str) -> PyResult<combining::CombineMode> {
    s.parse().map_err(to_py_err)
}

/// A time-binned power delay profile.
#[pyclass(name = "Pdp", skip_from_py_object)]
#[derive(Clone)]
struct PyPdp {
    inner: campaign::Pdp,
}

#[pymethods]
impl PyPdp {
    #[new]
    #[pyo3(signature = (powers, bin_width_ns=2.5, start_delay_ns=0.0, noise_floor=1e-9))]
    fn new(
        powers: Vec<f64>,
        bin_width_ns: f64,
        start_delay_ns: f64,
        noise_floor: f64,
    ) -> PyResult<Self> {
        campaign::Pdp::new(bin_width_ns, start_delay_ns, powers, noise_floor)
            .map(|inner| PyPdp { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn powers(&self) -> Vec<f64> {
        self.inner.powers.clone()
    }

    #[getter]
    fn bin_width_ns(&self) -> f64 {
        self.inner.bin_width_ns
    }

    #[getter]
    fn start_delay_ns(&self) -> f64 {
        self.inner.start_delay_ns
    }

    #[getter]
    fn noise_floor(&self) -> f64 {
        self.inner.noise_floor
    }

    /// Zero every bin below noise_floor * 10^(threshold_db/10).
    #[pyo3(signature = (threshold_db=5.0))]
    fn thresholded(&self, threshold_db: f64) -> PyResult<PyPdp> {
        self.inner
            .thresholded(threshold_db)
            .map(|inner| PyPdp { inner })
            .map_err(to_py_err)
    }

    fn total_power_mw(&self) -> f64 {
        self.inner.total_power_mw()
    }

    fn mean_excess_delay_ns(&self) -> PyResult<f64> {
        delay::mean_excess_delay_ns(&self.inner).map_err(to_py_err)
    }

    fn rms_delay_spread_ns(&self) -> PyResult<f64> {
        delay::rms_delay_spread_ns(&self.inner).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.powers.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Pdp(bins={}, bin_width_ns={}, start_delay_ns={})",
            self.inner.powers.len(),
            self.inner.bin_width_ns,
            self.inner.start_delay_ns
        )
    }
}

/// A measurement campaign loaded from (or saved to) the campaign file
/// format.
#[pyclass(name = "Campaign", skip_from_py_object)]
#[derive(Clone)]
struct PyCampaign {
    inner: campaign::Campaign,
}

#[pymethods]
impl PyCampaign {
    /// Load and validate a campaign file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        campaign::load_campaign(path)
            .map(|inner| PyCampaign { inner })
            .map_err(to_py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        campaign::save_campaign(path, &self.inner).map_err(to_py_err)
    }

    fn to_json(&self) -> String {
        campaign::campaign_to_json(&self.inner)
    }

    #[getter]
    fn carrier_freq_hz(&self) -> f64 {
        self.inner.carrier_freq_hz
    }

    #[getter]
    fn n_locations(&self) -> usize {
        self.inner.locations.len()
    }

    fn location_ids(&self) -> Vec<String> {
        self.inner.locations.iter().map(|l| l.id.clone()).collect()
    }

    /// Campaign copy without the named locations.
    fn excluding(&self, ids: Vec<String>) -> PyCampaign {
        PyCampaign {
            inner: self.inner.excluding(&ids),
        }
    }

    /// Summary table (CSV) of measured / with-signal / outage counts.
    #[pyo3(signature = (d_max_m=200.0))]
    fn summary_csv(&self, d_max_m: f64) -> PyResult<String> {
        campaign::summarize_campaign(&self.inner, d_max_m)
            .map(|s| tables::summary_csv(&s))
            .map_err(to_py_err)
    }

    /// (mean_ns, std_ns, n_samples) of the RMS delay spreads of one class.
    #[pyo3(signature = (los_class, filter="all-angles", threshold_db=5.0))]
    fn delay_stats(
        &self,
        los_class: &str,
        filter: &str,
        threshold_db: f64,
    ) -> PyResult<(f64, f64, usize)> {
        let class = parse_class(los_class)?;
        let filter = match filter {
            "all-angles" => delay::StatsFilter::AllAngles,
            "strongest-beam" => delay::StatsFilter::StrongestBeam,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown filter `{other}` (expected all-angles or strongest-beam)"
                )))
            }
        };
        let stats = delay::directional_stats(&self.inner, class, filter, threshold_db)
            .map_err(to_py_err)?;
        Ok((stats.mean_ns, stats.std_ns, stats.samples.len()))
    }

    /// Per-sample sigma_tau values of one class.
    #[pyo3(signature = (los_class, filter="all-angles", threshold_db=5.0))]
    fn delay_samples(
        &self,
        los_class: &str,
        filter: &str,
        threshold_db: f64,
    ) -> PyResult<Vec<f64>> {
        self.delay_stats(los_class, filter, threshold_db)?;
        let class = parse_class(los_class)?;
        let f = if filter == "all-angles" {
            delay::StatsFilter::AllAngles
        } else {
            delay::StatsFilter::StrongestBeam
        };
        Ok(delay::directional_stats(&self.inner, class, f, threshold_db)
            .map_err(to_py_err)?
            .values())
    }

    /// Anchored PLE fit of the k-strongest-beam combined powers:
    /// returns (ple, shadow_sigma_db, n_samples).
    #[pyo3(signature = (k=1, mode="noncoherent", threshold_db=5.0))]
    fn fit_multibeam_ple(
        &self,
        k: usize,
        mode: &str,
        threshold_db: f64,
    ) -> PyResult<(f64, f64, usize)> {
        let mode = parse_mode(mode)?;
        let samples =
            combining::multibeam_path_loss_samples(&self.inner, k, mode, threshold_db)
                .map_err(to_py_err)?;
        let model =
            pathloss::fit_ple(&samples, self.inner.carrier_freq_hz).map_err(to_py_err)?;
        Ok((model.ple, model.shadow_sigma_db, samples.len()))
    }

    /// Anchored PLE fit over every valid pointing angle:
    /// returns (ple, shadow_sigma_db, n_samples).
    #[pyo3(signature = (threshold_db=5.0))]
    fn fit_all_angles_ple(&self, threshold_db: f64) -> PyResult<(f64, f64, usize)> {
        let samples = pathloss::all_angle_path_loss_samples(&self.inner, threshold_db)
            .map_err(to_py_err)?;
        let model =
            pathloss::fit_ple(&samples, self.inner.carrier_freq_hz).map_err(to_py_err)?;
        Ok((model.ple, model.shadow_sigma_db, samples.len()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Campaign(carrier_freq_hz={}, locations={})",
            self.inner.carrier_freq_hz,
            self.inner.locations.len()
        )
    }
}

/// A facet scene for the specular ray tracer.
#[pyclass(name = "Scene", skip_from_py_object)]
#[derive(Clone)]
struct PyScene {
    inner: raytrace::Scene,
}

#[pymethods]
impl PyScene {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        raytrace::Scene::load(path)
            .map(|inner| PyScene { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        raytrace::Scene::parse(text)
            .map(|inner| PyScene { inner })
            .map_err(to_py_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n_facets(&self) -> usize {
        self.inner.facets.len()
    }

    /// Trace paths; each result is a dict with order, length_m, delay_ns,
    /// aoa_az_deg, aoa_el_deg, aod_az_deg, aod_el_deg.
    #[pyo3(signature = (tx, rx, max_order=2))]
    fn trace(
        &self,
        py: Python<'_>,
        tx: (f64, f64, f64),
        rx: (f64, f64, f64),
        max_order: usize,
    ) -> PyResult<Vec<Py<PyAny>>> {
        let paths = raytrace::trace_paths(
            &self.inner,
            Point3::new(tx.0, tx.1, tx.2),
            Point3::new(rx.0, rx.1, rx.2),
            max_order,
        )
        .map_err(to_py_err)?;
        let mut out = Vec::with_capacity(paths.len());
        for p in paths {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("order", p.order)?;
            d.set_item("length_m", p.total_length_m)?;
            d.set_item("delay_ns", p.delay_ns)?;
            d.set_item("aoa_az_deg", p.aoa_az_deg)?;
            d.set_item("aoa_el_deg", p.aoa_el_deg)?;
            d.set_item("aod_az_deg", p.aod_az_deg)?;
            d.set_item("aod_el_deg", p.aod_el_deg)?;
            out.push(d.into_any().unbind());
        }
        Ok(out)
    }
}

/// Free-space path loss at the 1 m reference distance, dB.
#[pyfunction]
fn fspl_at_ref_db(freq_hz: f64) -> PyResult<f64> {
    pathloss::fspl_at_ref_db(freq_hz).map_err(to_py_err)
}

/// Distance extension exponent n1/n2 (requires n1 >= n2 > 0).
#[pyfunction]
fn dee(n1: f64, n2: f64) -> PyResult<f64> {
    extension::dee(n1, n2).map(|r| r.dee).map_err(to_py_err)
}

/// Equal-path-loss extended distance d1^dee.
#[pyfunction]
fn extended_distance_m(d1_m: f64, dee: f64) -> PyResult<f64> {
    extension::extended_distance_m(d1_m, dee).map_err(to_py_err)
}

/// Coverage multiplier d1^(dee - 1).
#[pyfunction]
fn distance_extension_factor(d1_m: f64, dee: f64) -> PyResult<f64> {
    extension::distance_extension_factor(d1_m, dee).map_err(to_py_err)
}

/// Sum of the k strongest powers, mW.
#[pyfunction]
#[pyo3(signature = (powers_mw, k=1))]
fn combine_non_coherent(powers_mw: Vec<f64>, k: usize) -> PyResult<f64> {
    combining::combine_non_coherent(&powers_mw, k)
        .map(|c| c.power_mw)
        .map_err(to_py_err)
}

/// Squared sum of the k strongest sqrt-powers, mW.
#[pyfunction]
#[pyo3(signature = (powers_mw, k=1))]
fn combine_coherent(powers_mw: Vec<f64>, k: usize) -> PyResult<f64> {
    combining::combine_coherent(&powers_mw, k)
        .map(|c| c.power_mw)
        .map_err(to_py_err)
}

/// Anchored least-squares PLE fit over (distance_m, path_loss_db) pairs;
/// returns (ple, shadow_sigma_db).
#[pyfunction]
fn fit_ple(distances_m: Vec<f64>, path_losses_db: Vec<f64>, freq_hz: f64) -> PyResult<(f64, f64)> {
    if distances_m.len() != path_losses_db.len() {
        return Err(PyValueError::new_err(
            "distances and path losses must have equal length",
        ));
    }
    let samples: Vec<pathloss::PathLossSample> = distances_m
        .iter()
        .zip(path_losses_db.iter())
        .map(|(&d, &pl)| pathloss::PathLossSample {
            location_id: String::new(),
            distance_m: d,
            path_loss_db: pl,
            tag: pathloss::SampleTag::AllAngles,
            beyond_measurable: false,
        })
        .collect();
    let model = pathloss::fit_ple(&samples, freq_hz).map_err(to_py_err)?;
    Ok((model.ple, model.shadow_sigma_db))
}

/// Smallest sample value whose empirical CDF reaches p.
#[pyfunction]
fn percentile(samples: Vec<f64>, p: f64) -> PyResult<f64> {
    let cdf = delay::empirical_cdf(&samples).map_err(to_py_err)?;
    cdf.percentile(p).map_err(to_py_err)
}

/// Generate a seeded synthetic campaign; writes campaign.json,
/// ground_truth.json, and scene.txt into out_dir and returns the campaign.
#[pyfunction]
#[pyo3(signature = (seed, out_dir=None, n_locations=25, ple=3.2, shadow_sigma_db=0.0, carrier_freq_hz=73e9))]
fn generate_campaign(
    seed: u64,
    out_dir: Option<&str>,
    n_locations: usize,
    ple: f64,
    shadow_sigma_db: f64,
    carrier_freq_hz: f64,
) -> PyResult<(PyCampaign, PyScene)> {
    let config = synth::GeneratorConfig {
        n_locations,
        ple,
        shadow_sigma_db,
        carrier_freq_hz,
        ..synth::GeneratorConfig::default()
    };
    let (campaign, truth, scene) = synth::generate_campaign(&config, seed).map_err(to_py_err)?;
    if let Some(dir) = out_dir {
        synth::write_generated(dir, &campaign, &truth, &scene).map_err(to_py_err)?;
    }
    Ok((PyCampaign { inner: campaign }, PyScene { inner: scene }))
}

/// Synthesize omnidirectional PDPs for a campaign against a scene; returns
/// the stats, counts, and manifest tables as CSV strings.
#[pyfunction]
#[pyo3(signature = (campaign, scene, gate_deg=20.0, threshold_db=5.0))]
fn synth_omni_csv(
    campaign: &PyCampaign,
    scene: &PyScene,
    gate_deg: f64,
    threshold_db: f64,
) -> PyResult<(String, String, String)> {
    let opts = synthesis::SynthesisOptions {
        gate_deg,
        threshold_db,
        ..synthesis::SynthesisOptions::default()
    };
    let report =
        synthesis::omni_stats(&campaign.inner, &scene.inner, &opts).map_err(to_py_err)?;
    Ok((
        tables::omni_stats_csv(&report),
        tables::omni_counts_csv(&report),
        tables::omni_manifest_csv(&report),
    ))
}

#[pymodule]
fn mmwchan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPdp>()?;
    m.add_class::<PyCampaign>()?;
    m.add_class::<PyScene>()?;
    m.add_function(wrap_pyfunction!(fspl_at_ref_db, m)?)?;
    m.add_function(wrap_pyfunction!(dee, m)?)?;
    m.add_function(wrap_pyfunction!(extended_distance_m, m)?)?;
    m.add_function(wrap_pyfunction!(distance_extension_factor, m)?)?;
    m.add_function(wrap_pyfunction!(combine_non_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(combine_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ple, m)?)?;
    m.add_function(wrap_pyfunction!(percentile, m)?)?;
    m.add_function(wrap_pyfunction!(generate_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(synth_omni_csv, m)?)?;
    m.add("SPEED_OF_LIGHT_M_PER_S", mmwchan::SPEED_OF_LIGHT_M_PER_S)?;
    m.add("DEFAULT_BIN_WIDTH_NS", mmwchan::DEFAULT_BIN_WIDTH_NS)?;
    m.add("DEFAULT_THRESHOLD_DB", mmwchan::DEFAULT_THRESHOLD_DB)?;
    Ok(())
}
