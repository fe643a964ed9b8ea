import json

import numpy as np
import pytest

from qpbo.fields import random_field
from qpbo.storage import (
    field_from_json,
    field_to_json,
    format_float,
    load_field,
    load_trajectory_data,
    save_field,
    save_trajectory,
    sha256_file,
    write_csv,
)


class TestFieldContainer:
    def test_round_trip(self, tmp_path, lat8, rng):
        f = random_field(lat8, rng, 1.0, real=True)
        path = tmp_path / "field.qpf"
        save_field(path, f, metadata={"label": "demo"})
        g = load_field(path)
        assert g.lattice == f.lattice
        assert np.array_equal(g.coeffs, f.coeffs)
        assert g.is_real == f.is_real

    def test_sidecar_digest_matches(self, tmp_path, lat4, rng):
        f = random_field(lat4, rng, 1.0)
        path = tmp_path / "f.qpf"
        save_field(path, f)
        doc = json.loads((tmp_path / "f.qpf.json").read_text())
        assert doc["payload_sha256"] == sha256_file(path)
        assert doc["nmax"] == 4

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.qpf"
        path.write_bytes(b"NOPE" + b"\0" * 64)
        with pytest.raises(ValueError):
            load_field(path)

    def test_json_form_round_trip(self, lat4, rng):
        f = random_field(lat4, rng, 1.0, real=True)
        g = field_from_json(field_to_json(f))
        assert np.array_equal(g.coeffs, f.coeffs)
        assert g.lattice == f.lattice


class TestTrajectoryContainer:
    def test_round_trip(self, tmp_path, lat4, rng):
        fields = [random_field(lat4, rng, 1.0, real=True) for _ in range(4)]
        times = np.array([0.0, 0.1, 0.2, 0.3])
        path = tmp_path / "traj.qpt"
        save_trajectory(path, times, fields, metadata={"model": "BO"})
        t2, s2 = load_trajectory_data(path)
        assert np.array_equal(t2, times)
        for a, b in zip(fields, s2):
            assert np.array_equal(a.coeffs, b.coeffs)

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            save_trajectory(tmp_path / "x.qpt", np.array([]), [])


class TestCsv:
    def test_fixed_format_and_lf(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["a", "b"], [[1.0 / 3.0, 1], [float("0.1"), -2]])
        raw = path.read_bytes()
        assert b"\r" not in raw
        text = raw.decode()
        assert text.splitlines()[0] == "a,b"
        assert "0.33333333333333331" in text
        assert "0.10000000000000001" in text

    def test_format_float_round_trips(self):
        for x in (1 / 3, 1e-17, 2 ** 0.5, -0.0, 6.02e23):
            assert float(format_float(x)) == x

    def test_deterministic_bytes(self, tmp_path):
        rows = [[0.1 * k, k] for k in range(20)]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, ["x", "k"], rows)
        write_csv(p2, ["x", "k"], rows)
        assert p1.read_bytes() == p2.read_bytes()
