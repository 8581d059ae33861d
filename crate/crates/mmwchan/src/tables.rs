//! Delimiter-separated output tables.
//!
//! Every pipeline's table lives here so the CLI and tests share one
//! formatting path. Numbers are printed with 6 significant digits and
//! tables are byte-deterministic for fixed inputs.

use crate::campaign::{CampaignSummary, ClassSummary, LosClass};
use crate::delay::{Cdf, DelaySpreadStats};
use crate::extension::{build_dee_table, PleGroup};
use crate::pathloss::CloseInModel;
use crate::raytrace::RayPath;
use crate::synthesis::{OmniPdp, OmniReport, SynthStatus};
use crate::Result;

/// Fixed-width-free formatting with 6 significant digits.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 6)
}

pub fn fmt_sig_digits(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if mag >= sig as i32 || mag < -5 {
        return format!("{:.*e}", sig - 1, x);
    }
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Campaign summary table mirroring the outage-bookkeeping row structure:
/// measured / with-signal / outage per LOS class, once within the distance
/// cap and once over all distances.
pub fn summary_csv(summary: &CampaignSummary) -> String {
    let mut out = format!("# d_max_m = {}\n", fmt_sig(summary.d_max_m));
    out.push_str("scope,group,los_class,count,min_distance_m,max_distance_m\n");
    let mut push = |scope: &str, group: &str, cs: &ClassSummary| {
        let g = match group {
            "measured" => &cs.measured,
            "signal" => &cs.signal,
            _ => &cs.outage,
        };
        out.push_str(&format!(
            "{scope},{group},{},{},{},{}\n",
            cs.los_class,
            g.count,
            opt(g.min_distance_m),
            opt(g.max_distance_m),
        ));
    };
    for group in ["measured", "signal", "outage"] {
        for cs in &summary.within_d_max {
            push("within_d_max", group, cs);
        }
    }
    for group in ["measured", "signal", "outage"] {
        for cs in &summary.all_distances {
            push("all_distances", group, cs);
        }
    }
    out
}

/// One row of the delay-spread statistics table.
pub struct StatsRow {
    pub label: String,
    pub stats: Option<DelaySpreadStats>,
}

/// Delay-spread statistics table: (class, n_samples, mean_ns, std_ns).
pub fn stats_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from("class,n_samples,mean_ns,std_ns\n");
    for row in rows {
        match &row.stats {
            Some(s) => out.push_str(&format!(
                "{},{},{},{}\n",
                row.label,
                s.samples.len(),
                fmt_sig(s.mean_ns),
                fmt_sig(s.std_ns)
            )),
            None => out.push_str(&format!("{},0,,\n", row.label)),
        }
    }
    out
}

/// Empirical CDF table: (value_ns, cum_prob).
pub fn cdf_csv(cdf: &Cdf) -> String {
    let mut out = String::from("value_ns,cum_prob\n");
    for (v, p) in cdf.points() {
        out.push_str(&format!("{},{}\n", fmt_sig(v), fmt_sig(p)));
    }
    out
}

/// One row of the PLE fit report.
pub struct FitRow {
    pub tag: String,
    pub k_beams: usize,
    pub model: CloseInModel,
    pub n_samples: usize,
}

/// Fit report table: (tag, k_beams, n, sigma_db, n_samples).
pub fn fit_report_csv(rows: &[FitRow]) -> String {
    let mut out = String::from("tag,k_beams,n,sigma_db,n_samples\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.tag,
            r.k_beams,
            fmt_sig(r.model.ple),
            fmt_sig(r.model.shadow_sigma_db),
            r.n_samples
        ));
    }
    out
}

/// Beam-combining distance extension table with one row per (freq, mode,
/// k >= 2): (freq_label, mode, k, ple, dee, d2).
pub fn dee_table_csv(groups: &[PleGroup], d1_m: f64) -> Result<String> {
    let rows = build_dee_table(groups, d1_m)?;
    let mut out = format!("# d1_m = {}\n", fmt_sig(d1_m));
    for g in groups {
        out.push_str(&format!(
            "# {} baseline_ple(k=1) = {}",
            g.freq_label,
            fmt_sig(g.baseline_ple)
        ));
        if let Some(a) = g.all_angles_ple {
            out.push_str(&format!(", all_angles_ple = {}", fmt_sig(a)));
        }
        out.push('\n');
    }
    out.push_str("freq_label,mode,k,ple,dee,d2_m\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.freq_label,
            r.mode,
            r.k,
            fmt_sig(r.ple),
            fmt_sig(r.dee),
            fmt_sig(r.d2_m)
        ));
    }
    Ok(out)
}

/// Single extension evaluation: (d1_m, dee, d2_m, def).
pub fn extend_csv(d1_m: f64, dee: f64, d2_m: f64, def: f64) -> String {
    format!(
        "d1_m,dee,d2_m,def\n{},{},{},{}\n",
        fmt_sig(d1_m),
        fmt_sig(dee),
        fmt_sig(d2_m),
        fmt_sig(def)
    )
}

/// Extension curve table: (d1_m, d2_m).
pub fn curve_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("d1_m,d2_m\n");
    for (d1, d2) in points {
        out.push_str(&format!("{},{}\n", fmt_sig(*d1), fmt_sig(*d2)));
    }
    out
}

/// Traced path table: (order, length_m, delay_ns, aoa_az, aoa_el).
pub fn trace_csv(paths: &[RayPath]) -> String {
    let mut out = String::from("order,length_m,delay_ns,aoa_az_deg,aoa_el_deg\n");
    for p in paths {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.order,
            fmt_sig(p.total_length_m),
            fmt_sig(p.delay_ns),
            fmt_sig(p.aoa_az_deg),
            fmt_sig(p.aoa_el_deg)
        ));
    }
    out
}

/// Omnidirectional delay-spread statistics per class.
pub fn omni_stats_csv(report: &OmniReport) -> String {
    let rows: Vec<StatsRow> = report
        .classes
        .iter()
        .map(|c| StatsRow {
            label: c.los_class.to_string(),
            stats: c.stats.clone(),
        })
        .collect();
    stats_csv(&rows)
}

/// Synthesized-vs-measured counts per class.
pub fn omni_counts_csv(report: &OmniReport) -> String {
    let mut out = String::from("class,synthesized,measured\n");
    for c in &report.classes {
        out.push_str(&format!("{},{},{}\n", c.los_class, c.synthesized, c.measured));
    }
    out
}

/// Per-location synthesis manifest (includes the failures).
pub fn omni_manifest_csv(report: &OmniReport) -> String {
    let mut out = String::from("location_id,los_class,status,sigma_tau_ns\n");
    for o in &report.outcomes {
        out.push_str(&format!(
            "{},{},{},{}\n",
            o.location_id,
            o.los_class,
            o.status,
            opt(o.sigma_tau_ns)
        ));
    }
    out
}

/// One synthesized profile: (absolute_delay_ns, power_mw_per_ns).
pub fn omni_pdp_csv(omni: &OmniPdp) -> String {
    let mut out = String::from("absolute_delay_ns,power_mw_per_ns\n");
    for (k, &p) in omni.pdp.powers.iter().enumerate() {
        out.push_str(&format!("{},{}\n", fmt_sig(omni.pdp.delay_ns(k)), fmt_sig(p)));
    }
    out
}

/// IDs of locations that failed synthesis, with reasons.
pub fn failure_lines(report: &OmniReport) -> Vec<String> {
    report
        .outcomes
        .iter()
        .filter(|o| o.status != SynthStatus::Synthesized && o.status != SynthStatus::Outage)
        .map(|o| format!("{}: {}", o.location_id, o.status))
        .collect()
}

/// Stable label for a class row.
pub fn class_label(class: LosClass) -> String {
    class.to_string()
}
