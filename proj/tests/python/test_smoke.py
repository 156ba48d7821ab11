import json
import math

import pytest

import carpetdim


def test_presets_listed():
    names = carpetdim.preset_names()
    assert "pu-golden" in names
    assert "cantor-third" in names


def test_golden_class_at_length_three():
    t = carpetdim.equivalence_classes("pu-golden", 3)
    assert t["max_class_size"] == 2
    assert ["(1,2,2)", "(2,1,1)"] in t["members"]
    h = carpetdim.h_lower_bound("pu-golden", 3)
    assert h["H_lower"] == pytest.approx(math.log(2) / 3)


def test_lebesgue_bins_are_uniform():
    masses = carpetdim.bin_projected_measure("lebesgue-half", 8, 256)
    assert masses == [1 / 256] * 256


def test_convolution_bound_and_multinacci():
    assert carpetdim.convolution_lower_bound("2^(-1/2)") == 1.0
    assert carpetdim.convolution_lower_bound("3/5") == pytest.approx(0.6784, abs=1e-4)
    beta, s = carpetdim.hu_s_multinacci(2)
    assert beta == pytest.approx(0.618034, abs=1e-6)
    assert s == pytest.approx(0.9404, abs=1e-4)


def test_box_counts():
    assert carpetdim.box_count("pu-golden", "2^-8", target="pif") == 256
    assert carpetdim.box_count("cantor-third", "1/27", target="pif") == 8


def test_bounds_collapse_for_garsia():
    b = carpetdim.assouad_bounds(2, 1 / 3, 2 ** -0.5, 1.0, 0.0, 1.0, 1.0)
    assert b["lower"] == pytest.approx(b["upper"])
    assert b["upper"] == pytest.approx(1.3155, abs=1e-4)


def test_report_for_garsia():
    r = carpetdim.report("pu-garsia-sqrt2", estimate_s=False)
    assert r["case"] == 1
    assert r["ad_F"] == pytest.approx(r["bd_F"])


def test_invalid_carpet_raises_with_kind():
    bad = {
        "alpha": {"rat": [1, 2]},
        "beta": {"rat": [1, 3]},
        "maps": [
            {"tx": {"rat": [0, 1]}, "ty": {"rat": [0, 1]}},
            {"tx": {"rat": [2, 3]}, "ty": {"rat": [1, 2]}},
        ],
    }
    with pytest.raises(carpetdim.CarpetdimError) as info:
        carpetdim.carpet(bad)
    assert carpetdim.error_kind(info.value) == "OrderViolation"


def test_run_writes_manifest(tmp_path):
    code, manifest, _ = carpetdim.run(["validate", "h"], tmp_path, preset="cantor-third", kmax=5)
    assert code == 0
    assert manifest["complete"] is True
    paths = {f["path"] for f in manifest["files"]}
    assert {"validate.json", "h.csv"} <= paths
    with open(tmp_path / "validate.json", encoding="utf-8") as fh:
        assert json.load(fh)


def test_run_reports_bad_config(tmp_path):
    code, _, error = carpetdim.run(["sweep"], tmp_path, betas=[])
    assert code == 2
    assert "ConfigParse" in error
