"""Outcome statistics: the process-matrix probability rule, Shannon
entropies of the output distribution, and the guess-your-neighbour game
score.

Probabilities are p(a,b|x,y) = Tr[(M_{a|x} (x) M_{b|y}) W]; the joint output
distribution folds in an input distribution p(x,y) (uniform by default), and
all entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from io import StringIO

import numpy as np

from .instruments import Instrument
from .operators import HermitianOperator
from .process import ProcessMatrix

NEGATIVITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-10
IMAG_TOL = 1e-12
ZERO_PROB = 1e-15


@dataclass(frozen=True)
class CondProbTable:
    """Conditional outcome probabilities indexed (a, b, x, y).

    Entries in [-1e-12, 0) are clamped to zero (eigensolver/trace roundoff);
    anything more negative, or a per-(x,y) sum off unity by more than 1e-10,
    signals an invalid process or instrument and is rejected.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 4:
            raise ValueError(f"table must be indexed (a, b, x, y); got shape {probs.shape}")
        low = probs.min()
        if low < -NEGATIVITY_TOL:
            raise ValueError(f"probability {low:.3e} below -{NEGATIVITY_TOL}: invalid inputs")
        probs = np.maximum(probs, 0.0)
        sums = probs.sum(axis=(0, 1))
        worst = np.abs(sums - 1.0).max()
        if worst > NORMALIZATION_TOL:
            raise ValueError(f"conditional sums deviate from 1 by {worst:.3e}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.probs.shape


@dataclass(frozen=True)
class InputDist:
    """Distribution p(x, y) over the classical inputs."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 2:
            raise ValueError(f"input distribution must be indexed (x, y); got {probs.shape}")
        if probs.min() < 0.0:
            raise ValueError("input probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"input probabilities sum to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n_x: int = 2, n_y: int = 2) -> "InputDist":
        return cls(np.full((n_x, n_y), 1.0 / (n_x * n_y)))


@dataclass(frozen=True)
class EntropyReport:
    """Shannon quantities (bits) of a joint output distribution."""

    h_ab: float
    h_a: float
    h_b: float
    h_a_given_b: float
    i_ab: float


def _as_operator(process: ProcessMatrix | HermitianOperator) -> HermitianOperator:
    return process.op if isinstance(process, ProcessMatrix) else process


def cond_probs(
    process: ProcessMatrix | HermitianOperator,
    instrument_a: Instrument,
    instrument_b: Instrument,
) -> CondProbTable:
    """Evaluate p(a,b|x,y) for every input/outcome combination.

    The two instruments must live on the A and B factor pairs of the process.
    Each trace must be real up to 1e-12.
    """
    w = _as_operator(process)
    names = w.label_names()
    expected = instrument_a.labels + instrument_b.labels
    if names != tuple(s.name for s in expected):
        raise ValueError(
            f"process factors {names} do not match instruments "
            f"{tuple(s.name for s in expected)}"
        )
    side_a = instrument_a.labels[0].dim * instrument_a.labels[1].dim
    side_b = instrument_b.labels[0].dim * instrument_b.labels[1].dim
    if side_a * side_b != w.side:
        raise ValueError("instrument and process dimensions do not match")

    xs, ys = instrument_a.inputs, instrument_b.inputs
    outs_a = {x: instrument_a.outcomes(x) for x in xs}
    outs_b = {y: instrument_b.outcomes(y) for y in ys}
    n_a = max(len(v) for v in outs_a.values())
    n_b = max(len(v) for v in outs_b.values())
    table = np.zeros((n_a, n_b, len(xs), len(ys)))
    for ix, x in enumerate(xs):
        for ia, a in enumerate(outs_a[x]):
            m_a = instrument_a.operators[(x, a)].matrix
            for iy, y in enumerate(ys):
                for ib, b in enumerate(outs_b[y]):
                    m_b = instrument_b.operators[(y, b)].matrix
                    value = np.einsum("ij,ji->", np.kron(m_a, m_b), w.matrix)
                    if abs(value.imag) > IMAG_TOL:
                        raise ValueError(
                            f"p({a},{b}|{x},{y}) has imaginary residue {value.imag:.3e}"
                        )
                    table[ia, ib, ix, iy] = value.real
    return CondProbTable(table)


def joint_dist(table: CondProbTable, inputs: InputDist | None = None) -> np.ndarray:
    """Joint output distribution p(a,b) = sum_{x,y} p(x,y) p(a,b|x,y)."""
    n_a, n_b, n_x, n_y = table.shape
    if inputs is None:
        inputs = InputDist.uniform(n_x, n_y)
    if inputs.probs.shape != (n_x, n_y):
        raise ValueError(
            f"input distribution shape {inputs.probs.shape} does not match table {(n_x, n_y)}"
        )
    joint = np.einsum("abxy,xy->ab", table.probs, inputs.probs)
    total = joint.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"joint distribution sums to {total!r}")
    return joint


def _entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    live = p > ZERO_PROB
    return float(-(p[live] * np.log2(p[live])).sum())


def entropies(joint: np.ndarray) -> EntropyReport:
    """All five Shannon quantities of a joint (a, b) distribution, in bits.

    Uses the convention 0 log 0 = 0; entries below 1e-15 count as exact zeros.
    """
    joint = np.asarray(joint, dtype=float)
    h_ab = _entropy(joint)
    h_a = _entropy(joint.sum(axis=1))
    h_b = _entropy(joint.sum(axis=0))
    return EntropyReport(
        h_ab=h_ab,
        h_a=h_a,
        h_b=h_b,
        h_a_given_b=h_ab - h_b,
        i_ab=h_a + h_b - h_ab,
    )


def game_success(table: CondProbTable) -> float:
    """Guess-your-neighbour success rate (1/4) sum_{x,y} p(a=y, b=x | x, y).

    Requires binary inputs and outputs; causally separable processes are
    bounded by 1/2.
    """
    if table.shape != (2, 2, 2, 2):
        raise ValueError(f"game needs binary alphabets; table shape {table.shape}")
    p = table.probs
    return float(sum(p[y, x, x, y] for x in range(2) for y in range(2)) / 4.0)


def table_to_csv(table: CondProbTable) -> str:
    """Flat CSV with columns a,b,x,y,p."""
    buf = StringIO()
    buf.write("a,b,x,y,p\n")
    n_a, n_b, n_x, n_y = table.shape
    for a in range(n_a):
        for b in range(n_b):
            for x in range(n_x):
                for y in range(n_y):
                    buf.write(f"{a},{b},{x},{y},{float(table.probs[a, b, x, y])!r}\n")
    return buf.getvalue()


def joint_to_csv(joint: np.ndarray) -> str:
    """Flat CSV with columns a,b,p."""
    joint = np.asarray(joint, dtype=float)
    buf = StringIO()
    buf.write("a,b,p\n")
    for a in range(joint.shape[0]):
        for b in range(joint.shape[1]):
            buf.write(f"{a},{b},{float(joint[a, b])!r}\n")
    return buf.getvalue()
