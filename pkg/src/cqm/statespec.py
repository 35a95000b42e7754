"""Textual state descriptors and angle tokens for the CLI.

Grammar (no whitespace, case-sensitive keywords):

    spec   := sho | gauss | super | prod2d
    sho    := "sho:" ["n="] int
    gauss  := "gauss:" ["x0="] real "," ["p0="] real "," ["sigma="] real
    super  := "super:" spec "*" coef (";" spec "*" coef)*
    coef   := real | real ("+"|"-") real "i" | real "i"
    prod2d := "prod2d:" spec "," spec

Nesting is resolved by recursive descent, so a superposition of 2D
product states (the entangled fixtures) parses without brackets.
Canonical form writes every number as its shortest exact float repr
and every coefficient as re+im·i, making format(parse(s)) idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import (Grid1D, UnitsParams, WaveFunction, gaussian_packet,
                   sho_eigenstate, superpose)
from .errors import StateSpecError
from .multidim import WaveFunction2D, product_state_2d, superpose_2d

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_INT = re.compile(r"[+-]?\d+")
_PI_FORM = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/((?:\d+\.?\d*|\.\d+)))?$")


@dataclass(frozen=True)
class ShoSpec:
    """Harmonic-oscillator eigenstate ψₙ."""

    n: int


@dataclass(frozen=True)
class GaussSpec:
    """Gaussian packet with mean position x0, mean momentum p0, width σ."""

    x0: float
    p0: float
    sigma: float


@dataclass(frozen=True)
class SuperSpec:
    """Linear combination Σ cᵢ·specᵢ (normalized on construction)."""

    parts: tuple  # of (spec, complex)


@dataclass(frozen=True)
class Prod2DSpec:
    """Two-particle product state spec₁ ⊗ spec₂."""

    first: object
    second: object


class _Cursor:
    """Position-tracking reader so parse errors can point at the spot."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def fail(self, message: str) -> StateSpecError:
        return StateSpecError(
            f"{message} at position {self.pos} in {self.text!r}")

    def literal(self, token: str) -> bool:
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.literal(token):
            raise self.fail(f"expected {token!r}")

    def regex(self, pattern: re.Pattern, what: str) -> str:
        m = pattern.match(self.text, self.pos)
        if m is None:
            raise self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def number(self, what: str = "a number") -> float:
        return float(self.regex(_NUMBER, what))


def _parse_coefficient(cur: _Cursor) -> complex:
    first = cur.number("a coefficient")
    if cur.literal("i"):
        return complex(0.0, first)
    save = cur.pos
    if cur.pos < len(cur.text) and cur.text[cur.pos] in "+-":
        m = _NUMBER.match(cur.text, cur.pos)
        if m is not None and cur.text.startswith("i", m.end()):
            cur.pos = m.end() + 1
            return complex(first, float(m.group(0)))
        cur.pos = save
    return complex(first, 0.0)


def _parse_spec(cur: _Cursor):
    if cur.literal("sho:"):
        cur.literal("n=")
        return ShoSpec(int(cur.regex(_INT, "an integer index")))
    if cur.literal("gauss:"):
        cur.literal("x0=")
        x0 = cur.number("x0")
        cur.expect(",")
        cur.literal("p0=")
        p0 = cur.number("p0")
        cur.expect(",")
        cur.literal("sigma=")
        sigma = cur.number("sigma")
        return GaussSpec(x0, p0, sigma)
    if cur.literal("super:"):
        parts = []
        while True:
            part = _parse_spec(cur)
            cur.expect("*")
            parts.append((part, _parse_coefficient(cur)))
            if not cur.literal(";"):
                break
        return SuperSpec(tuple(parts))
    if cur.literal("prod2d:"):
        first = _parse_spec(cur)
        cur.expect(",")
        return Prod2DSpec(first, _parse_spec(cur))
    raise cur.fail("expected one of sho:, gauss:, super:, prod2d:")


def parse_state_spec(text: str):
    """Parse a state descriptor; StateSpecError points at any bad token."""
    cur = _Cursor(text.strip())
    spec = _parse_spec(cur)
    if cur.pos != len(cur.text):
        raise cur.fail("unparsed trailing input")
    return spec


def format_state_spec(spec) -> str:
    """Canonical descriptor text: parse ∘ format is the identity."""
    if isinstance(spec, ShoSpec):
        return f"sho:n={spec.n}"
    if isinstance(spec, GaussSpec):
        return (f"gauss:x0={spec.x0!r},p0={spec.p0!r},"
                f"sigma={spec.sigma!r}")
    if isinstance(spec, SuperSpec):
        return "super:" + ";".join(
            f"{format_state_spec(s)}*{c.real!r}{c.imag:+}i"
            for s, c in spec.parts)
    if isinstance(spec, Prod2DSpec):
        return (f"prod2d:{format_state_spec(spec.first)},"
                f"{format_state_spec(spec.second)}")
    raise StateSpecError(f"not a state spec: {spec!r}")


def is_two_particle(spec) -> bool:
    if isinstance(spec, Prod2DSpec):
        return True
    if isinstance(spec, SuperSpec):
        flags = {is_two_particle(s) for s, _ in spec.parts}
        if len(flags) > 1:
            raise StateSpecError(
                "superposition mixes one- and two-particle parts")
        return flags.pop()
    return False


def build_state(spec, grid: Grid1D,
                units: UnitsParams | None = None) -> WaveFunction:
    """Construct the single-particle state a descriptor names."""
    units = units or UnitsParams()
    try:
        if isinstance(spec, ShoSpec):
            return sho_eigenstate(spec.n, grid, units)
        if isinstance(spec, GaussSpec):
            return gaussian_packet(spec.x0, spec.p0, spec.sigma, grid,
                                   units)
    except ValueError as exc:
        # out-of-range n or nonpositive sigma: report as a spec problem
        raise StateSpecError(str(exc)) from exc
    if isinstance(spec, SuperSpec):
        states = [build_state(s, grid, units) for s, _ in spec.parts]
        return superpose(states, [c for _, c in spec.parts])
    if isinstance(spec, Prod2DSpec):
        raise StateSpecError("two-particle spec where a single-particle "
                             "state is required")
    raise StateSpecError(f"not a state spec: {spec!r}")


def build_state_2d(spec, grid: Grid1D,
                   units: UnitsParams | None = None) -> WaveFunction2D:
    """Construct the two-particle state a descriptor names."""
    units = units or UnitsParams()
    if isinstance(spec, Prod2DSpec):
        return product_state_2d(build_state(spec.first, grid, units),
                                build_state(spec.second, grid, units))
    if isinstance(spec, SuperSpec):
        states = [build_state_2d(s, grid, units) for s, _ in spec.parts]
        return superpose_2d(states, [c for _, c in spec.parts])
    raise StateSpecError("single-particle spec where a two-particle "
                         "state is required")


def parse_theta(token: str) -> float:
    """Angle token: rational multiple of π ("3pi/4", "pi") or radians."""
    text = token.strip().replace(" ", "")
    m = _PI_FORM.match(text)
    if m is not None:
        head = m.group(1)
        coef = -1.0 if head == "-" else 1.0 if head in ("", "+") \
            else float(head)
        value = coef * np.pi
        if m.group(2):
            value /= float(m.group(2))
        return value
    try:
        return float(text)
    except ValueError:
        raise StateSpecError(f"cannot parse angle {token!r}: expected "
                             "radians or a multiple of pi like 3pi/4")


def parse_theta_list(text: str) -> tuple:
    """Comma-separated list of angle tokens."""
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise StateSpecError("empty angle list")
    return tuple(parse_theta(t) for t in tokens)
