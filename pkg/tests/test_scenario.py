import copy

import numpy as np
import pytest

from angqudit.errors import InvalidParameterError
from angqudit.scenario import PRESETS, parse_angle, parse_scenario, preset


@pytest.mark.parametrize("text, value", [
    ("pi/10", np.pi / 10),
    ("3*pi/4", 3 * np.pi / 4),
    ("3pi/4", 3 * np.pi / 4),
    ("-pi", -np.pi),
    ("pi", np.pi),
    ("0.5", 0.5),
    (0.25, 0.25),
    (2, 2.0),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("bad", ["pie/2", "pi/0", "", True, None, "2*"])
def test_parse_angle_rejects(bad):
    with pytest.raises(InvalidParameterError):
        parse_angle(bad, "mask.beta")


def test_every_preset_parses():
    for name in PRESETS:
        scen = preset(name)
        assert scen.name == name


def test_fig6a_parameters():
    s = preset("fig6a")
    assert (s.N, s.V, s.L, s.l_i) == (2, 0.875, 10, (2,))
    assert s.alpha == pytest.approx(np.pi / 10)
    assert s.beta == pytest.approx(np.pi / 4)


def test_fig8_is_asymmetric():
    s = preset("fig8")
    assert s.asymmetric and (s.N, s.M) == (6, 3)
    assert [tag for tag, _ in s.betas()] == ["beta_pi_4", "beta_pi_7"]


def _doc(**changes):
    doc = copy.deepcopy(PRESETS["fig6a"])
    for path, value in changes.items():
        section, key = path.split("__")
        doc[section][key] = value
    return doc


@pytest.mark.parametrize("changes, message", [
    ({"state__V": 1.2}, "state.V"),
    ({"mask__N": 0}, "mask.N"),
    ({"mask__beta": "pi/40"}, "mask.beta"),
    ({"mask__alpha": "half"}, "mask.alpha"),
    ({"spectrum__L": -1}, "spectrum.L"),
    ({"spectrum__kind": "lorentz"}, "spectrum.kind"),
    ({"scan__l_s": [5, -5]}, "scan.l_s"),
    ({"scan__normalization": "max"}, "scan.normalization"),
    ({"state__weights": [1.0]}, "state.weights"),
])
def test_validation_names_parameter(changes, message):
    with pytest.raises(InvalidParameterError, match=message):
        parse_scenario(_doc(**changes))


def test_schema_version_checked():
    doc = _doc()
    doc["schema_version"] = 2
    with pytest.raises(InvalidParameterError, match="schema_version"):
        parse_scenario(doc)


def test_sweep_validated_before_running():
    doc = _doc()
    doc["sweep"] = {"beta": ["pi/4", "pi"]}
    with pytest.raises(InvalidParameterError, match="sweep.beta"):
        parse_scenario(doc)


def test_non_positive_state_rejected_up_front():
    doc = _doc()
    doc["mask"]["N"] = 4
    doc["mask"]["beta"] = "pi/4"
    doc["state"].update(V=1.0, theta="pi/4", phase_convention="uniform")
    with pytest.raises(InvalidParameterError, match="state"):
        parse_scenario(doc)


def test_witness_budget():
    doc = copy.deepcopy(PRESETS["witness-bell-complete"])
    doc["mask"]["N"] = 7
    with pytest.raises(InvalidParameterError, match="budget"):
        parse_scenario(doc)


def test_unknown_preset():
    with pytest.raises(InvalidParameterError, match="unknown preset"):
        preset("fig99")
