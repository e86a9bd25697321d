"""Two-qubit state vectors, basis changes and the Born rule.

Amplitudes are always ordered ``(++, +-, -+, --)`` with the first sign for
qubit A. A :class:`Basis` is ``z``, ``x`` or a real rotation angle in the x-z
plane; ``angle(0)`` is the z basis and ``angle(pi/2)`` the x basis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .observable_algebra import MINUS, PLUS, Outcome
from .toy_states import ObservableId, Proposition

ATOL = 1e-12
SIGNS = ((PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS), (MINUS, MINUS))


@dataclass(frozen=True)
class Basis:
    kind: str  # "z", "x" or "angle"
    theta: float = 0.0

    def __post_init__(self):
        if self.kind == "z":
            object.__setattr__(self, "theta", 0.0)
        elif self.kind == "x":
            object.__setattr__(self, "theta", math.pi / 2)
        elif self.kind == "angle":
            t = math.remainder(float(self.theta), 2 * math.pi)
            # canonical names for the two named bases
            if abs(t) < 1e-15:
                object.__setattr__(self, "kind", "z")
                t = 0.0
            elif abs(t - math.pi / 2) < 1e-15:
                object.__setattr__(self, "kind", "x")
                t = math.pi / 2
            object.__setattr__(self, "theta", t)
        else:
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @classmethod
    def angle(cls, theta: float) -> "Basis":
        return cls("angle", theta)

    @classmethod
    def parse(cls, text: str) -> "Basis":
        s = text.strip().lower()
        if s in ("z", "x"):
            return cls(s)
        if s.startswith("angle:"):
            s = s[len("angle:"):]
        try:
            return cls.angle(float(s))
        except ValueError:
            raise ValueError(f"cannot parse basis {text!r}; use z, x or an angle in radians") from None

    @property
    def vectors(self) -> np.ndarray:
        """Columns are the +1 and -1 basis kets in z coordinates."""
        if self.kind == "z":
            return np.eye(2, dtype=complex)
        if self.kind == "x":
            r = 1 / math.sqrt(2)
            return np.array([[r, r], [r, -r]], dtype=complex)
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        return np.array([[c, s], [s, -c]], dtype=complex)

    @property
    def axis(self) -> str | None:
        return self.kind if self.kind in ("z", "x") else None

    def __str__(self) -> str:
        return self.kind if self.kind != "angle" else f"angle({self.theta:.6g})"

    def to_json(self):
        return self.kind if self.kind != "angle" else self.theta


Z = Basis("z")
X = Basis("x")


def _basis_pair(pair) -> tuple[Basis, Basis]:
    if isinstance(pair, str):
        pair = pair.split(",")
    a, b = pair
    return (a if isinstance(a, Basis) else Basis.parse(str(a)),
            b if isinstance(b, Basis) else Basis.parse(str(b)))


@dataclass(frozen=True, eq=False)
class QubitPairState:
    amplitudes: np.ndarray
    basis: tuple[Basis, Basis] = (Z, Z)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(4)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"state norm^2 is {norm}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis", _basis_pair(self.basis))

    @classmethod
    def normalized(cls, amplitudes, basis=(Z, Z)) -> "QubitPairState":
        a = np.asarray(amplitudes, dtype=complex).reshape(4)
        return cls(a / np.linalg.norm(a), basis)

    def z_amplitudes(self) -> np.ndarray:
        u = np.kron(self.basis[0].vectors, self.basis[1].vectors)
        return u @ self.amplitudes

    def equals(self, other: "QubitPairState", atol: float = ATOL) -> bool:
        """Equality of the physical state (global phase ignored)."""
        a, b = self.z_amplitudes(), other.z_amplitudes()
        overlap = abs(np.vdot(a, b))
        return abs(overlap - 1) <= atol

    def to_dict(self) -> dict:
        return {"basis": [b.to_json() for b in self.basis],
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes]}

    @classmethod
    def from_dict(cls, d: dict) -> "QubitPairState":
        basis = [Basis.angle(b) if isinstance(b, (int, float)) else Basis.parse(b)
                 for b in d.get("basis", ["z", "z"])]
        amps = d["amplitudes"]
        if len(amps) != 4:
            raise ValueError("state needs four amplitudes")
        return cls([complex(re, im) for re, im in amps], tuple(basis))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class OutcomeDistribution:
    probabilities: tuple[float, float, float, float]  # (++, +-, -+, --)
    settings: tuple[Basis, Basis] = field(default=(Z, Z))

    def __post_init__(self):
        p = tuple(float(v) for v in self.probabilities)
        if any(v < -ATOL for v in p) or abs(sum(p) - 1) > ATOL:
            raise ValueError(f"not a distribution: {p}")
        object.__setattr__(self, "probabilities", p)

    def p(self, a, b) -> float:
        return self.probabilities[SIGNS.index((Outcome.of(a), Outcome.of(b)))]

    def marginal_a(self) -> tuple[float, float]:
        p = self.probabilities
        return (p[0] + p[1], p[2] + p[3])

    def marginal_b(self) -> tuple[float, float]:
        p = self.probabilities
        return (p[0] + p[2], p[1] + p[3])

    def correlation(self) -> float:
        p = self.probabilities
        return p[0] - p[1] - p[2] + p[3]


# --- operations -------------------------------------------------------------

def hardy_state() -> QubitPairState:
    r = 1 / math.sqrt(3)
    return QubitPairState([r, r, r, 0.0], (Z, Z))


def singlet_state() -> QubitPairState:
    r = 1 / math.sqrt(2)
    return QubitPairState([0.0, r, -r, 0.0], (Z, Z))


def product_state(a: Basis, va, b: Basis, vb) -> QubitPairState:
    ia = 0 if Outcome.of(va) is PLUS else 1
    ib = 0 if Outcome.of(vb) is PLUS else 1
    amps = np.zeros(4, dtype=complex)
    amps[2 * ia + ib] = 1
    return QubitPairState(amps, (a, b))


def change_basis(s: QubitPairState, target) -> QubitPairState:
    target = _basis_pair(target)
    if target == s.basis:
        return s
    w = np.kron(target[0].vectors, target[1].vectors)
    amps = w.conj().T @ s.z_amplitudes()
    return QubitPairState(amps, target)


def born(s: QubitPairState, settings) -> OutcomeDistribution:
    settings = _basis_pair(settings)
    amps = change_basis(s, settings).amplitudes
    p = np.abs(amps) ** 2
    return OutcomeDistribution(tuple(p / p.sum()), settings)


def certain_conditionals(s: QubitPairState, settings) -> list[Proposition]:
    """Conditionals certain because a joint outcome has zero probability.

    For a value ``a`` of one side with non-zero marginal and a value ``b`` of
    the other side with ``P(a, b) = 0``, the other side must show ``-b``.
    """
    settings = _basis_pair(settings)
    if settings[0].axis is None or settings[1].axis is None:
        raise ValueError("conditionals are expressed for the named x and z bases only")
    dist = born(s, settings)
    oa = ObservableId(settings[0].axis, "A")
    ob = ObservableId(settings[1].axis, "B")
    out = []
    for a in (PLUS, MINUS):
        if sum(dist.p(a, b) for b in (PLUS, MINUS)) <= ATOL:
            continue
        for b in (PLUS, MINUS):
            if dist.p(a, b) <= ATOL:
                out.append(Proposition(ob, b.flip(), (oa, a)))
    for b in (PLUS, MINUS):
        if sum(dist.p(a, b) for a in (PLUS, MINUS)) <= ATOL:
            continue
        for a in (PLUS, MINUS):
            if dist.p(a, b) <= ATOL:
                out.append(Proposition(oa, a.flip(), (ob, b)))
    return out


@dataclass(frozen=True)
class UNotReport:
    basis_swapped: bool
    plus_superposition_fixed: bool
    minus_superposition_phase: complex
    probabilities_invariant: bool

    @property
    def ok(self) -> bool:
        return self.basis_swapped and self.plus_superposition_fixed and self.probabilities_invariant


U_NOT = np.array([[0, 1], [1, 0]], dtype=complex)


def u_not_fixed_point_check() -> UNotReport:
    """Check the quantum NOT on |1>, |-1> and their two superpositions.

    Component order is (|1>, |-1>).
    """
    one, mone = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    swapped = (np.allclose(U_NOT @ one, mone, atol=ATOL, rtol=0)
               and np.allclose(U_NOT @ mone, one, atol=ATOL, rtol=0))
    plus = (one + mone) / math.sqrt(2)
    minus = (one - mone) / math.sqrt(2)
    fixed = bool(np.allclose(U_NOT @ plus, plus, atol=ATOL, rtol=0))
    image = U_NOT @ minus
    phase = complex(np.vdot(minus, image))
    invariant = (abs(abs(phase) - 1) <= ATOL
                 and np.allclose(np.abs(image) ** 2, np.abs(minus) ** 2, atol=ATOL, rtol=0))
    return UNotReport(bool(swapped), fixed, phase, bool(invariant))


def correlation(s: QubitPairState, a: Basis, b: Basis) -> float:
    return born(s, (a, b)).correlation()


def chsh_quantum(s: QubitPairState, a1: Basis, a2: Basis, b1: Basis, b2: Basis) -> float:
    """<a1 b1> + <a1 b2> + <a2 b1> - <a2 b2> from Born probabilities."""
    return (correlation(s, a1, b1) + correlation(s, a1, b2)
            + correlation(s, a2, b1) - correlation(s, a2, b2))


def correlations_for(s: QubitPairState, a1: Basis, a2: Basis, b1: Basis, b2: Basis
                     ) -> tuple[float, float, float, float]:
    """The four correlators in the order (a1b1, a1b2, a2b1, a2b2)."""
    return (correlation(s, a1, b1), correlation(s, a1, b2),
            correlation(s, a2, b1), correlation(s, a2, b2))


@dataclass(frozen=True)
class ChshScan:
    value: float
    a1: Basis
    a2: Basis
    b1: Basis
    b2: Basis
    resolution: float


def scan_chsh(s: QubitPairState, a1: Basis = Z, a2: Basis = X, resolution: float = 1e-3) -> ChshScan:
    """Exhaustive scan of B's two settings over a grid of angles in [0, 2 pi)."""
    n = int(math.ceil(2 * math.pi / resolution))
    grid = np.arange(n) * (2 * math.pi / n)
    value, i, j = kernels.chsh_grid_max(s.z_amplitudes(), a1.theta, a2.theta, grid)
    return ChshScan(value, a1, a2, Basis.angle(grid[i]), Basis.angle(grid[j]), 2 * math.pi / n)


def random_state(rng: np.random.Generator) -> QubitPairState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return QubitPairState.normalized(v)
