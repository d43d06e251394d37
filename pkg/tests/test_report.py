import csv
import io
import json
import math

from qfreq.report import CSV_COLUMNS, VerificationReport


def sample_report():
    rep = VerificationReport("demo", grid_meta={"angular": 8, "radial": 8})
    rep.add("a", "height bound lower", 1.0, 0.5, 0.5, True)
    rep.add("b", "height bound upper", math.nan, math.inf, None, False, "nan row")
    return rep


def test_pass_and_failures():
    rep = sample_report()
    assert not rep.passed
    assert [r.check_id for r in rep.failures()] == ["b"]
    assert rep.anchors() == {"height bound lower", "height bound upper"}
    assert rep.min_slack("height bound lower") == 0.5


def test_json_round_trip_with_non_finite_values():
    rep = sample_report()
    text = rep.to_json()
    data = json.loads(text)
    assert data["rows"][1]["measured"] == "nan"
    again = VerificationReport.from_dict(data)
    assert again.to_json() == text
    assert math.isinf(again.rows[1].bound)


def test_csv_columns():
    rows = list(csv.reader(io.StringIO(sample_report().to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 3


def test_extend_merges_rows():
    rep = VerificationReport("outer")
    rep.extend(sample_report())
    assert len(rep.rows) == 2
    assert rep.grid_meta["angular"] == 8
