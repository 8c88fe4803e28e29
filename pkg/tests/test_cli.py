import json
from fractions import Fraction as F

import pytest

from fracergo.cli import main
from fracergo.fracpoly import Family, family_to_json, rexp_poly
from fracergo.primes import count_prime_tuples, sieve


def write_family(path, exponent_maps):
    fam = Family(tuple(rexp_poly(0, m) for m in exponent_maps))
    path.write_text(json.dumps(family_to_json(fam)))
    return str(path)


def write_functions(path, descriptors):
    path.write_text(json.dumps({"functions": descriptors}))
    return str(path)


def read_rows(out_dir, name):
    lines = (out_dir / f"{name}.csv").read_text().strip().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def read_sidecar(out_dir, name):
    return json.loads((out_dir / f"{name}.json").read_text())


# ---------------------------------------------------------------------------
# pet

def test_pet_trace_outputs(tmp_path, capsys):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main(["pet", "--family", fam, "--out", str(tmp_path)])
    assert rc == 0
    assert "step 1" in capsys.readouterr().out
    header, rows = read_rows(tmp_path, "pet")
    assert header == "N,value"
    assert rows == [["0", "1"], ["1", "1"]]
    side = read_sidecar(tmp_path, "pet")
    assert side["schema_version"] == 1
    assert side["checks"] == [{"name": "type_descent", "passed": True}]
    assert len(side["metadata"]["trace"]["steps"]) == 1


def test_pet_trivial_family(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(1, 2): 1}, {F(1, 10): 1}])
    rc = main(["pet", "--family", fam, "--out", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path, "pet")
    assert rows == [["0", "2"]]


# ---------------------------------------------------------------------------
# equidist

def test_equidist_quadratic_quarter(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{2: 1}])
    rc = main([
        "equidist", "--family", fam, "--t", "1/4",
        "--N", "128,10000", "--out", str(tmp_path),
    ])
    assert rc == 0
    header, rows = read_rows(tmp_path, "equidist")
    assert header == "N,value_re,value_im"
    z = complex(float(rows[-1][1]), float(rows[-1][2]))
    assert abs(z) == pytest.approx(2**-0.5, abs=1e-12)
    side = read_sidecar(tmp_path, "equidist")
    assert side["checks"][0] == {"name": "modulus_bound", "passed": True}
    assert side["metadata"]["moduli"][-1] == pytest.approx(2**-0.5, abs=1e-12)


def test_equidist_floored_integer_frequency_is_flat(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main(["equidist", "--family", fam, "--N", "200", "--out", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path, "equidist")
    assert rows == [["200", "1.0", "0.0"]]


def test_equidist_no_floor_decays(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main([
        "equidist", "--family", fam, "--no-floor",
        "--N", "200", "--out", str(tmp_path),
    ])
    assert rc == 0
    _, rows = read_rows(tmp_path, "equidist")
    z = complex(float(rows[0][1]), float(rows[0][2]))
    assert abs(z) < 0.2


def test_equidist_primes_mode(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(1, 2): 1}])
    rc = main([
        "equidist", "--family", fam, "--mode", "primes", "--t", "0.37",
        "--N", "50,100", "--out", str(tmp_path),
    ])
    assert rc == 0
    _, rows = read_rows(tmp_path, "equidist")
    assert [r[0] for r in rows] == ["50", "100"]


# ---------------------------------------------------------------------------
# jointavg

def test_jointavg_cyclic_prime_squares(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{2: 1}])
    fn = write_functions(
        tmp_path / "fn.json",
        [{"kind": "cyclic", "values": [[1, 0], [0, 1], [-1, 0], [0, -1]]}],
    )
    rc = main([
        "jointavg", "--system", "cyclic:4", "--family", fam, "--functions", fn,
        "--mode", "primes", "--N", "200,400", "--out", str(tmp_path),
    ])
    assert rc == 0
    header, rows = read_rows(tmp_path, "jointavg")
    assert header == "N,value"
    side = read_sidecar(tmp_path, "jointavg")
    assert side["metadata"]["weight"] == "none"
    assert side["metadata"]["benchmark_re"] == pytest.approx(0.0)
    # odd prime squares are 1 mod 4, so the character average locks onto
    # a rotated copy of the function instead of washing out
    assert float(rows[-1][1]) > 0.9


def test_jointavg_delta_weight(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(1, 2): 1}])
    rc = main([
        "jointavg", "--system", "cyclic:3", "--family", fam,
        "--weight", "delta:2", "--N", "100,200", "--out", str(tmp_path),
    ])
    assert rc == 0
    side = read_sidecar(tmp_path, "jointavg")
    assert side["metadata"]["weight"] == "delta:2"
    assert side["metadata"]["benchmark_re"] == 0.0


def test_jointavg_certificate_run(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main([
        "jointavg", "--system", "skew", "--family", fam,
        "--cert-degree", "2", "--N", "100,200", "--out", str(tmp_path),
    ])
    assert rc == 0
    side = read_sidecar(tmp_path, "jointavg")
    assert side["metadata"]["kind"] == "prime_weighted_norms"
    assert side["metadata"]["seminorm_value"] == pytest.approx(0.001**0.25)
    assert side["metadata"]["seminorm_schedule"] == [1000]


def test_jointavg_custom_functions(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    fn = write_functions(
        tmp_path / "fn.json",
        [{"kind": "fourier", "terms": [{"freq": [1], "re": 1.0}]}],
    )
    rc = main([
        "jointavg", "--system", "rotation", "--family", fam,
        "--functions", fn, "--N", "100,200", "--out", str(tmp_path),
    ])
    assert rc == 0


# ---------------------------------------------------------------------------
# recurrence

def test_recurrence_cyclic_profile(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(1, 2): 1}, {F(1, 10): 1}])
    rc = main([
        "recurrence", "--system", "cyclic:5", "--family", fam,
        "--mode", "primes", "--N", "100,200", "--out", str(tmp_path),
    ])
    assert rc == 0
    side = read_sidecar(tmp_path, "recurrence")
    assert side["metadata"]["benchmark"] == pytest.approx((1 / 5) ** 3)
    assert side["checks"] == [{"name": "profile_range", "passed": True}]


def test_recurrence_rotation_arc(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main([
        "recurrence", "--system", "rotation", "--g", "arc:0.3:10",
        "--family", fam, "--N", "100,200", "--out", str(tmp_path),
    ])
    assert rc == 0
    _, rows = read_rows(tmp_path, "recurrence")
    assert all(float(r[1]) > 0 for r in rows)


def test_recurrence_rejects_mismatched_set(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1}])
    rc = main([
        "recurrence", "--system", "rotation", "--g", "indicator:0",
        "--family", fam, "--N", "100", "--out", str(tmp_path),
    ])
    assert rc == 1


# ---------------------------------------------------------------------------
# seminorm

def test_seminorm_cyclic_degrees(tmp_path):
    fn = write_functions(
        tmp_path / "fn.json",
        [{"kind": "cyclic", "values": [[1, 0], [0.5, 0.2], [-1, 0], [0, 0], [0.3, -0.1], [1, 1]]}],
    )
    rc = main([
        "seminorm", "--system", "cyclic:6", "--functions", fn,
        "--s", "1,2,3", "--out", str(tmp_path), "--N", "1",
    ])
    assert rc == 0
    header, rows = read_rows(tmp_path, "seminorm")
    assert header == "N,value"
    assert [r[0] for r in rows] == ["1", "2", "3"]
    vals = [float(r[1]) for r in rows]
    assert vals[0] <= vals[1] <= vals[2]
    side = read_sidecar(tmp_path, "seminorm")
    assert {"name": "cyclic_monotone", "passed": True} in side["checks"]


def test_seminorm_rotation_oracle(tmp_path):
    fn = write_functions(
        tmp_path / "fn.json",
        [{"kind": "fourier", "terms": [
            {"freq": [1], "re": 0.8, "im": 0.1},
            {"freq": [-3], "re": -0.4},
        ]}],
    )
    rc = main([
        "seminorm", "--system", "rotation", "--functions", fn,
        "--s", "2", "--oracle", "--N", "1000", "--tol", "0.01",
        "--out", str(tmp_path),
    ])
    assert rc == 0
    side = read_sidecar(tmp_path, "seminorm")
    assert {"name": "fourier_oracle_s2", "passed": True} in side["checks"]
    assert "2" in side["metadata"]["oracle"]


def test_seminorm_skew_default_observable(tmp_path):
    rc = main([
        "seminorm", "--system", "skew", "--s", "2",
        "--N", "100", "--out", str(tmp_path),
    ])
    assert rc == 0
    _, rows = read_rows(tmp_path, "seminorm")
    assert float(rows[0][1]) == pytest.approx(0.01**0.25)


# ---------------------------------------------------------------------------
# sieve

def test_sieve_prime_count(tmp_path):
    rc = main(["sieve", "--limit", "10000", "--out", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path, "sieve")
    assert rows == [["10000", "1229"]]
    side = read_sidecar(tmp_path, "sieve")
    assert {"name": "prime_count_lower", "passed": True} in side["checks"]


def test_sieve_tuple_counts(tmp_path):
    rc = main([
        "sieve", "--shifts", "0,2", "--N", "100,1000",
        "--cutoff", "10000", "--out", str(tmp_path),
    ])
    assert rc == 0
    _, rows = read_rows(tmp_path, "sieve")
    t = sieve(1002)
    assert int(rows[0][1]) == count_prime_tuples(t, 100, (0, 2))
    assert int(rows[1][1]) == count_prime_tuples(t, 1000, (0, 2))
    side = read_sidecar(tmp_path, "sieve")
    assert side["metadata"]["singular_series"]["value"] == pytest.approx(1.3204, abs=1e-3)
    assert {"name": "counts_monotone", "passed": True} in side["checks"]


def test_sieve_cache_file(tmp_path):
    cache = tmp_path / "primes.bin"
    rc = main([
        "sieve", "--limit", "5000", "--cache", str(cache), "--out", str(tmp_path)
    ])
    assert rc == 0
    assert cache.exists()


# ---------------------------------------------------------------------------
# cross-cutting behaviour

def test_runs_are_byte_deterministic(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{F(3, 2): 1, F(11, 10): 1}])
    configs = [
        ("equidist", ["equidist", "--family", fam, "--t", "0.3", "--N", "100,400"]),
        ("jointavg", ["jointavg", "--system", "rotation", "--family", fam,
                      "--mode", "primes", "--N", "100,400"]),
        ("sieve", ["sieve", "--limit", "2000"]),
    ]
    for name, argv in configs:
        d1, d2 = tmp_path / f"{name}1", tmp_path / f"{name}2"
        assert main(argv + ["--out", str(d1)]) == 0
        assert main(argv + ["--out", str(d2)]) == 0
        b1 = (d1 / f"{name}.csv").read_bytes()
        b2 = (d2 / f"{name}.csv").read_bytes()
        assert b1 == b2


def test_svg_output(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{2: 1}])
    rc = main([
        "equidist", "--family", fam, "--t", "0.25", "--N", "50,100",
        "--svg", "--out", str(tmp_path),
    ])
    assert rc == 0
    svg = (tmp_path / "equidist.svg").read_text()
    assert svg.startswith("<svg")
    assert "polyline" in svg


def test_seed_recorded_in_sidecar(tmp_path):
    fam = write_family(tmp_path / "fam.json", [{2: 1}])
    rc = main([
        "equidist", "--family", fam, "--N", "50",
        "--seed", "7", "--out", str(tmp_path),
    ])
    assert rc == 0
    assert read_sidecar(tmp_path, "equidist")["config"]["seed"] == 7


def test_error_paths_exit_one(tmp_path, capsys):
    fam = write_family(tmp_path / "fam.json", [{2: 1}])
    assert main(["jointavg", "--system", "galois:7", "--family", fam,
                 "--N", "10", "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["pet", "--family", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path)]) == 1
    assert main(["equidist", "--family", fam, "--N", "100,50",
                 "--out", str(tmp_path)]) == 1


def test_parameterized_family_rejected(tmp_path):
    fam = Family((rexp_poly(1, {F(3, 2): {(1,): 1}}),))
    p = tmp_path / "fam.json"
    p.write_text(json.dumps(family_to_json(fam)))
    rc = main(["equidist", "--family", str(p), "--N", "10", "--out", str(tmp_path)])
    assert rc == 1
