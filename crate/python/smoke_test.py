#!/usr/bin/env python3
"""Smoke test for the mmwchan_py extension module.

Build the module first:

    cargo build --release -p mmwchan-py

then run

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_mmwchan_py():
    """Locate the built cdylib and import it as mmwchan_py."""
    candidates = [
        REPO / "target" / "release" / "libmmwchan_py.so",
        REPO / "target" / "debug" / "libmmwchan_py.so",
        REPO / "target" / "release" / "libmmwchan_py.dylib",
        REPO / "target" / "debug" / "libmmwchan_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build --release -p mmwchan-py")
    stage = Path(tempfile.mkdtemp(prefix="mmwchan_py_"))
    suffix = ".so" if built.suffix == ".so" else ".so"
    shutil.copy2(built, stage / f"mmwchan_py{suffix}")
    sys.path.insert(0, str(stage))
    import mmwchan_py

    return mmwchan_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol * max(1.0, abs(b)), f"{a} != {b} (tol {tol})"


def main():
    m = import_mmwchan_py()

    # scalar operations against hand-checked values
    approx(m.fspl_at_ref_db(28e9), 61.39, 1e-4)
    approx(m.fspl_at_ref_db(73e9), 69.71, 1e-4)
    approx(m.dee(3.812, 3.307), 1.153, 1e-3)
    approx(m.extended_distance_m(200.0, 1.152), 448.0, 0.01)
    approx(m.distance_extension_factor(200.0, 1.152), 2.24, 0.005)
    approx(m.combine_non_coherent([4.0, 1.0, 0.5], 2), 5.0)
    approx(m.combine_coherent([4.0, 1.0], 2), 9.0)
    approx(m.percentile([5.0, 1.0, 3.0], 0.9), 5.0)

    # error paths raise ValueError
    for call in (
        lambda: m.dee(3.0, 3.5),
        lambda: m.extended_distance_m(0.5, 1.1),
        lambda: m.combine_coherent([], 1),
    ):
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    # PDP moments
    pdp = m.Pdp([3.0, 1.0], bin_width_ns=20.0)
    approx(pdp.mean_excess_delay_ns(), 5.0)
    approx(pdp.rms_delay_spread_ns(), math.sqrt(75.0))
    approx(pdp.total_power_mw(), (3.0 + 1.0) * 20.0)
    noisy = m.Pdp([1e-5, 2e-6], noise_floor=1e-6)
    assert noisy.thresholded(5.0).powers == [1e-5, 0.0]

    # anchored PLE fit on a synthetic n = 3 line
    anchor = m.fspl_at_ref_db(73e9)
    ds = [10.0, 40.0, 90.0, 160.0]
    pls = [anchor + 10.0 * 3.0 * math.log10(d) for d in ds]
    ple, sigma = m.fit_ple(ds, pls, 73e9)
    approx(ple, 3.0, 1e-9)
    assert sigma < 1e-9

    # ray tracing: classic single-wall image geometry
    scene = m.Scene.parse("-100 5 -100  100 5 -100  100 5 100  -100 5 100\n")
    paths = scene.trace((0.0, 0.0, 2.0), (10.0, 0.0, 2.0), max_order=1)
    assert [p["order"] for p in paths] == [0, 1]
    approx(paths[0]["length_m"], 10.0)
    approx(paths[1]["length_m"], math.sqrt(200.0), 1e-9)

    # generated campaign: deterministic, stats and omni pipelines run
    with tempfile.TemporaryDirectory() as tmp:
        campaign, gen_scene = m.generate_campaign(42, out_dir=tmp, n_locations=12)
        again, _ = m.generate_campaign(42, n_locations=12)
        assert campaign.to_json() == again.to_json()
        loaded = m.Campaign.load(str(Path(tmp) / "campaign.json"))
        assert loaded.to_json() == campaign.to_json()

        mean, std, n = campaign.delay_stats("nlos")
        assert n > 0 and std >= 0.0 and mean > 0.0
        ple, _, n_fit = campaign.fit_all_angles_ple()
        approx(ple, 3.2, 1e-6)  # generator default, zero shadowing
        assert n_fit >= n

        stats_csv, counts_csv, manifest_csv = m.synth_omni_csv(campaign, gen_scene)
        assert stats_csv.startswith("class,n_samples,mean_ns,std_ns\n")
        assert counts_csv.startswith("class,synthesized,measured\n")
        assert manifest_csv.count("\n") == 12 + 1  # header + one row per location

        summary = campaign.summary_csv(200.0)
        assert "within_d_max,measured,LOS" in summary

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
