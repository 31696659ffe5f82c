import json

import numpy as np
import pytest

from surfinterp.analytic import DiscDomain
from surfinterp.curves import (
    builtin_curve,
    curve_from_json,
    curve_to_json,
    load_curve_file,
    parse_curve_spec,
)
from surfinterp.errors import ParseError, ValidationFailed

DOM = DiscDomain(0.0, 1.2, 1.0)


def test_circle_builtin_matches_trig():
    c = parse_curve_spec("circle(1)", DOM)
    u = DOM.interval_samples(50)
    np.testing.assert_allclose(c(u).real, np.stack([np.cos(u), np.sin(u), 0 * u], -1), atol=1e-14)
    assert c.degree == 48
    assert parse_curve_spec("circle(2)", DOM, degree=20).degree == 20


def test_perturbed_circle_builtin():
    c = parse_curve_spec("perturbed-circle(1, 0.05)", DOM)
    u = DOM.interval_samples(50)
    want = np.stack([1.05 * np.cos(u), 1.05 * np.sin(u), 0.05 * np.sin(u)], -1)
    np.testing.assert_allclose(c(u).real, want, atol=1e-14)


def test_helix_and_line():
    u = DOM.interval_samples(9)
    np.testing.assert_allclose(builtin_curve("helix(2,0.5)", DOM)(u).real,
                               np.stack([2 * np.cos(u), 2 * np.sin(u), 0.5 * u], -1), atol=1e-14)
    np.testing.assert_allclose(builtin_curve("line(1,2,3)", DOM)(u).real, np.outer(u, [1, 2, 3]))


def test_constant_json_curve_is_rejected(tmp_path):
    path = tmp_path / "const.json"
    path.write_text(json.dumps({"center": 0, "radius": 1.2, "interval_half_width": 1.0,
                                "components": [[[1, 0]], [[1, 0]], [[1, 0]]]}))
    with pytest.raises(ValidationFailed) as info:
        parse_curve_spec(str(path))
    assert [v.kind for v in info.value.violations] == ["degenerate-tangent"]


def test_json_roundtrip(tmp_path):
    c = builtin_curve("helix(1,0.3)", DOM)
    path = tmp_path / "h.json"
    path.write_text(json.dumps(curve_to_json(c)))
    back = load_curve_file(path)
    np.testing.assert_array_equal(back.coeffs, c.coeffs)
    assert back.domain == c.domain


@pytest.mark.parametrize("obj, field", [
    ({"radius": 1, "interval_half_width": 0.5, "components": []}, "center"),
    ({"center": 0, "radius": 1, "interval_half_width": 0.5, "components": [[["x", 0]]]}, "components[0]"),
    ({"center": 0, "radius": 1, "interval_half_width": 0.5, "components": [[], [], []]}, "components[0]"),
])
def test_json_errors_name_the_field(obj, field):
    with pytest.raises(ParseError, match=field.replace("[", r"\[").replace("]", r"\]")):
        curve_from_json(obj)


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "center": 0,\n oops\n}')
    with pytest.raises(ParseError, match="line 3"):
        load_curve_file(path)


def test_unknown_builtin_and_missing_file():
    with pytest.raises(ParseError):
        parse_curve_spec("squircle(1)", DOM)
    with pytest.raises(ParseError):
        parse_curve_spec("circle(1,2,3,4)", DOM)
    with pytest.raises(FileNotFoundError):
        parse_curve_spec("no/such/file.json", DOM)


def test_non_real_curve_flagged():
    c = builtin_curve("circle(1)", DOM) * (1 + 1e-3j)
    from surfinterp.curves import curve_violations
    kinds = [v.kind for v in curve_violations(c)]
    assert "not-real-on-interval" in kinds
