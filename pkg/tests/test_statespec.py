"""State-descriptor grammar: parsing, canonical form, construction."""

import numpy as np
import pytest

from cqm import (
    Grid1D,
    StateSpecError,
    build_state,
    build_state_2d,
    density,
    format_state_spec,
    parse_state_spec,
    parse_theta,
    parse_theta_list,
    sho_eigenstate,
)
from cqm.statespec import is_two_particle

ROUND_TRIPS = [
    ("sho:1", "sho:n=1"),
    ("sho:n=0", "sho:n=0"),
    ("gauss:1,2,0.8", "gauss:x0=1.0,p0=2.0,sigma=0.8"),
    ("gauss:x0=0,p0=-2,sigma=0.707", "gauss:x0=0.0,p0=-2.0,sigma=0.707"),
    ("super:sho:0*1;sho:1*1i",
     "super:sho:n=0*1.0+0.0i;sho:n=1*0.0+1.0i"),
    ("super:sho:0*0.5-0.5i;gauss:0,0,1*-1",
     "super:sho:n=0*0.5-0.5i;gauss:x0=0.0,p0=0.0,sigma=1.0*-1.0+0.0i"),
    ("prod2d:sho:1,sho:0", "prod2d:sho:n=1,sho:n=0"),
    ("super:prod2d:sho:0,sho:1*1;prod2d:sho:1,sho:0*1",
     "super:prod2d:sho:n=0,sho:n=1*1.0+0.0i;"
     "prod2d:sho:n=1,sho:n=0*1.0+0.0i"),
]


class TestGrammar:
    @pytest.mark.parametrize("text,canonical", ROUND_TRIPS)
    def test_canonical_form(self, text, canonical):
        assert format_state_spec(parse_state_spec(text)) == canonical

    @pytest.mark.parametrize("text,canonical", ROUND_TRIPS)
    def test_canonical_is_fixed_point(self, text, canonical):
        again = format_state_spec(parse_state_spec(canonical))
        assert again == canonical

    @pytest.mark.parametrize("bad", [
        "", "sho:", "sho:x", "gauss:1,2", "gauss:1,2,3,4",
        "super:sho:0*1;", "super:sho:0", "prod2d:sho:0",
        "blah:3", "sho:n=1 trailing",
    ])
    def test_rejects_malformed(self, bad):
        with pytest.raises(StateSpecError):
            parse_state_spec(bad)

    def test_error_carries_position(self):
        with pytest.raises(StateSpecError, match="position"):
            parse_state_spec("gauss:1,2")


class TestTwoParticle:
    def test_classification(self):
        assert not is_two_particle(parse_state_spec("sho:1"))
        assert is_two_particle(parse_state_spec("prod2d:sho:0,sho:1"))
        assert is_two_particle(parse_state_spec(
            "super:prod2d:sho:0,sho:1*1;prod2d:sho:1,sho:0*1"))

    def test_mixed_superposition_rejected(self):
        with pytest.raises(StateSpecError):
            is_two_particle(parse_state_spec(
                "super:sho:0*1;prod2d:sho:0,sho:0*1"))


class TestBuild:
    def test_builds_match_direct_construction(self):
        g = Grid1D(-10.0, 10.0, 512)
        psi = build_state(parse_state_spec("sho:1"), g)
        direct = sho_eigenstate(1, g)
        assert np.max(np.abs(psi.amplitudes - direct.amplitudes)) < 1e-12

    def test_build_2d_normalized(self):
        g = Grid1D(-8.0, 8.0, 128)
        psi = build_state_2d(parse_state_spec(
            "super:prod2d:sho:0,sho:1*1;prod2d:sho:1,sho:0*1"), g)
        mass = float(g.weights @ np.abs(psi.amplitudes) ** 2 @ g.weights)
        assert abs(mass - 1.0) < 1e-10

    def test_particle_count_enforced(self):
        g = Grid1D(-10.0, 10.0, 512)
        with pytest.raises(StateSpecError):
            build_state(parse_state_spec("prod2d:sho:0,sho:0"), g)
        with pytest.raises(StateSpecError):
            build_state_2d(parse_state_spec("sho:0"), g)

    def test_physical_limits_reported_as_spec_errors(self):
        g = Grid1D(-10.0, 10.0, 512)
        with pytest.raises(StateSpecError):
            build_state(parse_state_spec("sho:n=40"), g)
        with pytest.raises(StateSpecError):
            build_state(parse_state_spec("gauss:0,0,-1"), g)


class TestTheta:
    @pytest.mark.parametrize("token,value", [
        ("0", 0.0),
        ("pi", np.pi),
        ("-pi/2", -np.pi / 2),
        ("3pi/4", 3 * np.pi / 4),
        ("3*pi/4", 3 * np.pi / 4),
        ("0.5pi", np.pi / 2),
        ("1.25", 1.25),
    ])
    def test_tokens(self, token, value):
        assert abs(parse_theta(token) - value) < 1e-12

    def test_list(self):
        got = parse_theta_list("0, pi/4 ,pi/2")
        assert len(got) == 3
        assert abs(got[1] - np.pi / 4) < 1e-12

    def test_bad_token(self):
        with pytest.raises(StateSpecError):
            parse_theta("bogus")
