import json

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from irrper.report import SCHEMA_VERSION, Check, Report, cjson, from_cjson, parse_report

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_round_trip(z):
    obj = json.loads(json.dumps(cjson(z)))
    assert from_cjson(obj) == z + 0  # -0.0 is normalised


@given(finite)
def test_real_stays_real(x):
    assert isinstance(cjson(x), float)
    assert cjson(mpmath.mpf(x)) == x


def test_mpc_serialises():
    mp = mpmath.MPContext()
    mp.dps = 40
    assert cjson(mp.mpc(1, -2)) == {"re": 1.0, "im": -2.0}
    assert cjson(-0.0) == 0.0 and str(cjson(-0.0)) == "0.0"


@given(st.lists(st.tuples(st.text(min_size=1, max_size=8), st.complex_numbers(allow_nan=False, allow_infinity=False),
                          finite.map(abs)), max_size=6))
def test_report_round_trip(items):
    rep = Report("0.0", {"mode": "period"})
    for name, v, e in items:
        rep.add(name, v, e, "closed form")
    rep.checks.append(Check("x", "t", True, {"v": 1j}))
    text = rep.to_json(timings=False)
    data = parse_report(text)
    assert data == json.loads(json.dumps(rep.as_dict(timings=False)))
    assert json.dumps(data, indent=2, sort_keys=True) + "\n" == text
    assert data["schema_version"] == SCHEMA_VERSION
    for r in data["results"]:
        assert r["error"] is not None and r["ref"]


def test_timings_excluded():
    rep = Report("0.0", {})
    rep.timings["total"] = 1.234
    rep.checks.append(Check("a", "b", False, seconds=3.0))
    d = rep.as_dict(timings=False)
    assert "timings" not in d and "seconds" not in d["checks"][0]
    assert not d["passed"]


def test_default_ref_is_plumbing():
    rep = Report("0.0", {})
    assert rep.add("n", 1, 0.0).ref == "plumbing"


def test_schema_version_checked():
    with pytest.raises(ValueError):
        parse_report(json.dumps({"schema_version": "0.1"}))


def test_csv_tables():
    rep = Report("0.0", {})
    rep.tables["approx"] = [{"m": 10, "P": 1 + 2j}, {"m": 20, "P": 3j}]
    rep.add("limit", 1j, 1e-6, "r")
    text = rep.to_csv()
    assert "m,P_re,P_im" in text
    assert "limit,0.0,1.0,1e-06,r" in text
