import json

import numpy as np
import pytest

from pcal.errors import ValidationError
from pcal.grid import GridSignal, GridSpec
from pcal.io import (decomposition_csv, decomposition_rows, dump_binary, load_binary,
                     read_signal_csv, report_json, signal_csv, write_text)
from pcal.littlewood_paley import build_partition


def test_csv_roundtrip(tmp_path, spec, rng):
    f = GridSignal(spec, rng.standard_normal(spec.N))
    p = tmp_path / "f.csv"
    write_text(p, signal_csv(f))
    g = read_signal_csv(p)
    assert g.spec == spec
    assert np.array_equal(g.values, f.values)


def test_csv_roundtrip_channels(tmp_path, spec, rng):
    f = GridSignal(spec, rng.standard_normal((2, spec.N)))
    p = tmp_path / "f.csv"
    write_text(p, signal_csv(f))
    assert signal_csv(f).splitlines()[0] == "x,channel_0,channel_1"
    assert np.array_equal(read_signal_csv(p, spec.L).values, f.values)


def test_csv_wrong_grid(tmp_path, spec):
    p = tmp_path / "f.csv"
    write_text(p, signal_csv(GridSignal.zeros(spec)))
    with pytest.raises(ValidationError):
        read_signal_csv(p, 4.0)


def test_binary_roundtrip(spec, rng):
    f = GridSignal(spec, rng.standard_normal((3, spec.N)))
    blob = dump_binary(f)
    assert blob[:4] == b"PCAL"
    g = load_binary(blob)
    assert g.spec == spec and np.array_equal(g.values, f.values)
    s = GridSignal(spec, rng.standard_normal(spec.N))
    assert load_binary(dump_binary(s)).shape == ()


def test_binary_corruption(spec):
    blob = dump_binary(GridSignal.zeros(spec))
    with pytest.raises(ValidationError):
        load_binary(blob[:10])
    with pytest.raises(ValidationError):
        load_binary(b"XXXX" + blob[4:])
    with pytest.raises(ValidationError):
        load_binary(blob[:-8])


def test_decomposition_rows(spec):
    f = GridSignal(spec, np.cos(64 * np.pi * spec.x / spec.L))
    part = build_partition(spec)
    rows = decomposition_rows(f, 2.0, 0.5, part)
    assert [r[0] for r in rows] == list(part.levels)
    l2 = np.array([r[1] for r in rows])
    assert np.sum(l2**2) == pytest.approx(np.sum(f.values**2) * spec.dx, rel=0.2)
    for j, _, lp, w in rows:
        assert w == pytest.approx(2.0 ** (0.5 * j) * lp)
    assert decomposition_csv(f, 2.0, 0.5).startswith("j,l2_norm,lp_norm,weighted_norm\n")


def test_report_json_is_deterministic_and_strict():
    rep = {"b": np.float64(np.inf), "a": [np.int64(3), np.nan], "c": np.array([1.0, 2.0]),
           "d": np.bool_(True)}
    text = report_json(rep)
    assert text == report_json(dict(reversed(list(rep.items()))))
    back = json.loads(text)
    assert back == {"a": [3, "nan"], "b": "inf", "c": [1.0, 2.0], "d": True}
