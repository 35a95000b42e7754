"""Value-assignment contradiction for two spin-½ particles.

Nine ±1 observables — the four single-particle spin components σ₁ₓ,
σ₁ᵧ, σ₂ₓ, σ₂ᵧ, their four cross products σ₁ₐσ₂ᵦ (a, b ∈ {x, y}), and
σ₁zσ₂z — support six value constraints, each tied to a mutually
commuting family:

    v(σ₁ₐσ₂ᵦ) = v(σ₁ₐ) v(σ₂ᵦ)            (four factorizations)
    v(σ₁ₓσ₂ᵧ) v(σ₁ᵧσ₂ₓ) = +v(σ₁zσ₂z)
    v(σ₁ₓσ₂ₓ) v(σ₁ᵧσ₂ᵧ) = −v(σ₁zσ₂z)

Multiplying all six, every value appears an even number of times while
the signs multiply to −1: no assignment of ±1 to the nine observables
satisfies the whole set, although every five-constraint subset is
satisfiable.  Exhaustive search over the 2⁹ = 512 assignments verifies
both claims, and the operator identities behind each constraint are
checked to machine precision on dense 4×4 matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintIllFormed

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}
_ID2 = np.eye(2, dtype=np.complex128)

LABELS = ("s1x*s2x", "s1x*s2y", "s1y*s2x", "s1y*s2y", "s1z*s2z",
          "s1x", "s1y", "s2x", "s2y")

COMMUTATOR_TOL = 1e-12


@dataclass(frozen=True)
class PauliObservable:
    """A ±1 observable of the two-spin system as a dense 4×4 matrix."""

    label: str
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise ValueError("observable must be a 4×4 matrix")
        if np.linalg.norm(m - m.conj().T) > COMMUTATOR_TOL:
            raise ValueError(f"{self.label} is not Hermitian")
        if np.linalg.norm(m @ m - np.eye(4)) > COMMUTATOR_TOL:
            raise ValueError(f"{self.label} is not an involution")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class Assignment:
    """Candidate valuation: one ±1 value per observable label."""

    values: dict

    def __post_init__(self) -> None:
        if set(self.values) != set(LABELS):
            raise ValueError("assignment must cover exactly the nine labels")
        for label, v in self.values.items():
            if v not in (-1, 1):
                raise ValueError(f"value of {label} must be ±1, got {v!r}")
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, label: str) -> int:
        return self.values[label]


@dataclass(frozen=True)
class ValueConstraint:
    """One multiplicative constraint: ∏ v(factors) = sign · v(target).

    ``target`` may also be a ±1 constant.  ``kind`` is "product" for
    the single-product factorizations and "signed-product" for the
    constraints carrying an operator identity with a sign.
    """

    kind: str
    factors: tuple
    target: object
    sign: int

    def satisfied_by(self, assignment: Assignment) -> bool:
        lhs = 1
        for f in self.factors:
            lhs *= assignment[f]
        rhs = self.target if isinstance(self.target, int) \
            else assignment[self.target]
        return lhs == self.sign * rhs


def _tensor_label(label: str) -> np.ndarray:
    """4×4 matrix for a label like "s1x", "s2y" or "s1x*s2y"."""
    first, second = _ID2, _ID2
    for part in label.split("*"):
        axis = part[2]
        if part[1] == "1":
            first = _SIGMA[axis]
        else:
            second = _SIGMA[axis]
    return np.kron(first, second)


def build_observables() -> dict:
    """The nine observables, keyed by label in canonical order."""
    return {lab: PauliObservable(lab, _tensor_label(lab)) for lab in LABELS}


def commutes(a: PauliObservable, b: PauliObservable) -> bool:
    """True iff the Frobenius norm of [A, B] is below 1e-12."""
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.linalg.norm(comm)) < COMMUTATOR_TOL


def verify_identity() -> float:
    """Residual of the operator identities the contradiction rests on.

    Checks, in the Frobenius norm,

        (σ₁ₓσ₂ᵧ)(σ₁ᵧσ₂ₓ) + (σ₁ₓσ₂ₓ)(σ₁ᵧσ₂ᵧ) = 0
        (σ₁ₓσ₂ᵧ)(σ₁ᵧσ₂ₓ) − σ₁zσ₂z = 0
        (σ₁ₓσ₂ₓ)(σ₁ᵧσ₂ᵧ) + σ₁zσ₂z = 0

    and returns the largest residual (exactly zero in exact arithmetic;
    below 1e-12 in floating point).
    """
    obs = build_observables()
    xy = obs["s1x*s2y"].matrix
    yx = obs["s1y*s2x"].matrix
    xx = obs["s1x*s2x"].matrix
    yy = obs["s1y*s2y"].matrix
    zz = obs["s1z*s2z"].matrix
    residuals = (
        np.linalg.norm(xy @ yx + xx @ yy),
        np.linalg.norm(xy @ yx - zz),
        np.linalg.norm(xx @ yy + zz),
    )
    return float(max(residuals))


def constraint_set() -> tuple:
    """The six value constraints, each over a commuting family.

    Order: the four factorizations (xx, xy, yx, yy), then the two
    signed products fixing v(σ₁zσ₂z) both ways.  Commutativity of every
    referenced family is machine-verified; ConstraintIllFormed would
    flag a miscoded constraint.
    """
    obs = build_observables()
    spec = [
        ("product", ("s1x", "s2x"), "s1x*s2x", 1),
        ("product", ("s1x", "s2y"), "s1x*s2y", 1),
        ("product", ("s1y", "s2x"), "s1y*s2x", 1),
        ("product", ("s1y", "s2y"), "s1y*s2y", 1),
        ("signed-product", ("s1x*s2y", "s1y*s2x"), "s1z*s2z", 1),
        ("signed-product", ("s1x*s2x", "s1y*s2y"), "s1z*s2z", -1),
    ]
    constraints = []
    for kind, factors, target, sign in spec:
        family = list(factors) + ([target] if isinstance(target, str) else [])
        for a, b in itertools.combinations(family, 2):
            if not commutes(obs[a], obs[b]):
                raise ConstraintIllFormed(
                    f"operators {a} and {b} do not commute")
        constraints.append(ValueConstraint(kind, tuple(factors), target,
                                           sign))
    return tuple(constraints)


@dataclass(frozen=True)
class SearchReport:
    """Outcome of the exhaustive ±1 assignment search.

    prefix_counts[k] is the number of the 512 assignments satisfying
    the first k constraints (k = 0 … 6); deletion_counts[i] the number
    satisfying all constraints except the i-th.  The contradiction is
    prefix_counts[-1] == 0 with every deletion count positive.
    """

    prefix_counts: tuple
    deletion_counts: tuple

    @property
    def full_count(self) -> int:
        return self.prefix_counts[-1]


def enumerate_assignments() -> SearchReport:
    """Exhaust all 2⁹ assignments against the six constraints."""
    constraints = constraint_set()
    n = len(constraints)
    prefix = [0] * (n + 1)
    deletion = [0] * n
    for values in itertools.product((1, -1), repeat=len(LABELS)):
        a = Assignment(dict(zip(LABELS, values)))
        sat = [c.satisfied_by(a) for c in constraints]
        prefix[0] += 1
        for k in range(n):
            if not sat[k]:
                break
            prefix[k + 1] += 1
        misses = [i for i, ok in enumerate(sat) if not ok]
        if not misses:
            for i in range(n):
                deletion[i] += 1
        elif len(misses) == 1:
            deletion[misses[0]] += 1
    return SearchReport(tuple(prefix), tuple(deletion))


def joint_eigenvalues(labels) -> np.ndarray:
    """Simultaneous ±1 eigenvalues of a commuting family.

    Diagonalizes Σᵢ 3ⁱ Oᵢ (the ternary weights keep all ±1 sign
    patterns spectrally separated) and reads each operator's eigenvalue
    as a Rayleigh quotient, rounded to ±1 after checking the quotient
    is within 1e-9 of an integer.  Returns an array of shape (4, k)
    whose rows are the joint value tuples realized by the family.
    """
    obs = build_observables()
    mats = [obs[lab].matrix for lab in labels]
    combo = sum((3.0 ** i) * m for i, m in enumerate(mats))
    _, vecs = np.linalg.eigh(combo)
    out = np.zeros((4, len(labels)), dtype=np.int64)
    for col in range(4):
        v = vecs[:, col]
        for i, m in enumerate(mats):
            q = float(np.real(v.conj() @ (m @ v)))
            r = round(q)
            if abs(q - r) > 1e-9 or r not in (-1, 1):
                raise ConstraintIllFormed(
                    f"family {tuple(labels)!r} has a non-±1 joint value")
            out[col, i] = r
    return out
