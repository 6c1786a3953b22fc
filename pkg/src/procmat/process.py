"""Two-party process matrices: construction, validation, and the built-in
families (the OCB process, the 72-parameter separable family, the Feix
family).

A process matrix W on A_I (x) A_O (x) B_I (x) B_O is valid when it is
positive semidefinite, has trace d_{A_O} d_{B_O}, and satisfies three linear
conditions expressed through the trace-and-replace map _X W:

    _{B_I B_O} W = _{A_O B_I B_O} W
    _{A_I A_O} W = _{A_I A_O B_O} W
    W = _{B_O} W + _{A_O} W - _{A_O B_O} W

These make the probability rule non-negative and normalized for all local
instruments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .operators import (
    A_OUT,
    B_OUT,
    CANONICAL_LABELS,
    HermitianOperator,
    identity,
    min_eigenvalue,
    pauli_term,
    trace_replace,
)
from .validation import CheckResult, ValidityReport

VALIDITY_TOL = 1e-10
PSD_TOL = 1e-10

#: axis letters for the separable-family coefficient tables
AXIS_FULL = "0xyz"
AXIS_SPATIAL = "xyz"

_PAULI_OF_AXIS = {"0": "I", "x": "X", "y": "Y", "z": "Z"}


class InfeasibleParamsError(ValueError):
    """Separable parameters whose fixed-order block is not PSD."""

    def __init__(self, block: str, min_eig: float):
        self.block = block
        self.min_eig = min_eig
        super().__init__(
            f"block {block} is not positive semidefinite: min eigenvalue {min_eig:.3e}"
        )


@dataclass(frozen=True)
class ProcessMatrix:
    """A Hermitian operator on the canonical four factors plus its validity report."""

    op: HermitianOperator
    report: ValidityReport

    @property
    def valid(self) -> bool:
        return self.report.valid

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


def _require_canonical(op: HermitianOperator):
    if op.label_names() != tuple(s.name for s in CANONICAL_LABELS):
        raise ValueError(
            f"process matrices live on A_I,A_O,B_I,B_O; got {op.label_names()}"
        )


def validate_process(op: HermitianOperator, tol: float = VALIDITY_TOL) -> ValidityReport:
    """Run the five validity checks and report residuals.

    Equality residuals are max-abs deviations; the positivity residual is the
    most-negative eigenvalue with its sign flipped.
    """
    _require_canonical(op)
    d_out = A_OUT.dim * B_OUT.dim
    checks = [
        CheckResult("positive semidefinite", -min_eigenvalue(op), tol),
        CheckResult("trace equals d_AO*d_BO", abs(op.trace - d_out), tol),
    ]

    def deviation(left: HermitianOperator, right: HermitianOperator) -> float:
        return float(np.abs(left.matrix - right.matrix).max())

    checks.append(
        CheckResult(
            "B-side marginal ignores A_O",
            deviation(trace_replace(op, ["B_I", "B_O"]), trace_replace(op, ["A_O", "B_I", "B_O"])),
            tol,
        )
    )
    checks.append(
        CheckResult(
            "A-side marginal ignores B_O",
            deviation(trace_replace(op, ["A_I", "A_O"]), trace_replace(op, ["A_I", "A_O", "B_O"])),
            tol,
        )
    )
    recombined = (
        trace_replace(op, ["B_O"]) + trace_replace(op, ["A_O"]) - trace_replace(op, ["A_O", "B_O"])
    )
    checks.append(CheckResult("no joint output-output terms", deviation(op, recombined), tol))
    return ValidityReport(tuple(checks))


def as_process(op: HermitianOperator, tol: float = VALIDITY_TOL) -> ProcessMatrix:
    """Wrap an operator with its validity report (invalid ones are not rejected)."""
    return ProcessMatrix(op, validate_process(op, tol))


def nonsignalling_part(op: HermitianOperator) -> HermitianOperator:
    """The component of W insensitive to what either party sends out: _{A_O B_O} W."""
    _require_canonical(op)
    return trace_replace(op, ["A_O", "B_O"])


def maximally_mixed() -> ProcessMatrix:
    """The process with trivial correlations, I/4 on the canonical factors."""
    return as_process(identity(CANONICAL_LABELS) * 0.25)


def ocb_process() -> ProcessMatrix:
    """The nonseparable process violating the guess-your-neighbour bound.

    W = (I + (ZZZI + ZIXX)/sqrt(2)) / 4; its only nonzero Pauli coefficients
    are IIII -> 1/4 and ZZZI, ZIXX -> 1/(4 sqrt 2).
    """
    w = identity(CANONICAL_LABELS) + (1 / np.sqrt(2)) * (
        pauli_term("ZZZI") + pauli_term("ZIXX")
    )
    return as_process(0.25 * w)


# ---------------------------------------------------------------------------
# Separable family: W_sep = q W^{A<B} + (1-q) W^{B<A}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SepParams:
    """Mixing weight q plus the 72 coefficients of the two fixed-order blocks.

    ``c[alpha, i, j]`` multiplies sigma_alpha^{A_I} sigma_i^{A_O} sigma_j^{B_I} I^{B_O}
    with alpha over (0, x, y, z) and i, j over (x, y, z); ``c_prime[i, alpha, j]``
    multiplies sigma_i^{A_I} I^{A_O} sigma_alpha^{B_I} sigma_j^{B_O}.
    """

    q: float
    c: np.ndarray
    c_prime: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        c = np.array(self.c, dtype=float)
        cp = np.array(self.c_prime, dtype=float)
        if c.shape != (4, 3, 3):
            raise ValueError(f"c must have shape (4, 3, 3), got {c.shape}")
        if cp.shape != (3, 4, 3):
            raise ValueError(f"c_prime must have shape (3, 4, 3), got {cp.shape}")
        c.setflags(write=False)
        cp.setflags(write=False)
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c_prime", cp)

    @classmethod
    def zeros(cls, q: float = 0.5) -> "SepParams":
        return cls(q, np.zeros((4, 3, 3)), np.zeros((3, 4, 3)))

    def to_flat_map(self) -> dict[str, float]:
        """Flat keyed form: q plus keys like ``c_0xz`` and ``cp_x0y``."""
        out = {"q": self.q}
        for ia, a in enumerate(AXIS_FULL):
            for ii, i in enumerate(AXIS_SPATIAL):
                for ij, j in enumerate(AXIS_SPATIAL):
                    out[f"c_{a}{i}{j}"] = float(self.c[ia, ii, ij])
        for ii, i in enumerate(AXIS_SPATIAL):
            for ia, a in enumerate(AXIS_FULL):
                for ij, j in enumerate(AXIS_SPATIAL):
                    out[f"cp_{i}{a}{j}"] = float(self.c_prime[ii, ia, ij])
        return out

    @classmethod
    def from_flat_map(cls, data: Mapping[str, float]) -> "SepParams":
        """Inverse of :func:`to_flat_map`; missing keys default to zero."""
        c = np.zeros((4, 3, 3))
        cp = np.zeros((3, 4, 3))
        q = 0.5
        for key, raw in data.items():
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise ValueError(f"bad value for key {key!r}: {raw!r}") from None
            if key == "q":
                q = value
                continue
            try:
                prefix, idx = key.split("_")
            except ValueError:
                raise ValueError(f"bad parameter key {key!r}") from None
            if prefix == "c" and len(idx) == 3 and idx[0] in AXIS_FULL and \
                    idx[1] in AXIS_SPATIAL and idx[2] in AXIS_SPATIAL:
                c[AXIS_FULL.index(idx[0]), AXIS_SPATIAL.index(idx[1]), AXIS_SPATIAL.index(idx[2])] = value
            elif prefix == "cp" and len(idx) == 3 and idx[0] in AXIS_SPATIAL and \
                    idx[1] in AXIS_FULL and idx[2] in AXIS_SPATIAL:
                cp[AXIS_SPATIAL.index(idx[0]), AXIS_FULL.index(idx[1]), AXIS_SPATIAL.index(idx[2])] = value
            else:
                raise ValueError(f"bad parameter key {key!r}")
        return cls(q, c, cp)


def _sep_word_ab(alpha: str, i: str, j: str) -> str:
    return _PAULI_OF_AXIS[alpha] + _PAULI_OF_AXIS[i] + _PAULI_OF_AXIS[j] + "I"


def _sep_word_ba(i: str, alpha: str, j: str) -> str:
    return _PAULI_OF_AXIS[i] + "I" + _PAULI_OF_AXIS[alpha] + _PAULI_OF_AXIS[j]


#: 4-letter Pauli words of the A<B block, in c-array (alpha, i, j) order.
SEP_WORDS_AB = tuple(
    _sep_word_ab(a, i, j) for a in AXIS_FULL for i in AXIS_SPATIAL for j in AXIS_SPATIAL
)
#: 4-letter Pauli words of the B<A block, in c_prime-array (i, alpha, j) order.
SEP_WORDS_BA = tuple(
    _sep_word_ba(i, a, j) for i in AXIS_SPATIAL for a in AXIS_FULL for j in AXIS_SPATIAL
)


def _block_operator(words: tuple[str, ...], coeffs: np.ndarray) -> HermitianOperator:
    op = identity(CANONICAL_LABELS) * 0.25
    for word, value in zip(words, coeffs.ravel()):
        if value != 0.0:
            op = op + float(value) * pauli_term(word)
    return op


def ordered_block_ab(p: SepParams) -> HermitianOperator:
    """W^{A<B}: identity on B_O, so Bob cannot signal to Alice."""
    return _block_operator(SEP_WORDS_AB, p.c)


def ordered_block_ba(p: SepParams) -> HermitianOperator:
    """W^{B<A}: identity on A_O, so Alice cannot signal to Bob."""
    return _block_operator(SEP_WORDS_BA, p.c_prime)


def sep_feasibility(p: SepParams) -> tuple[float, float]:
    """Minimum eigenvalues of the two fixed-order blocks."""
    return (
        min_eigenvalue(ordered_block_ab(p)),
        min_eigenvalue(ordered_block_ba(p)),
    )


@dataclass(frozen=True)
class SeparableTriple:
    ordered_ab: ProcessMatrix
    ordered_ba: ProcessMatrix
    mixture: ProcessMatrix


def separable_from_params(p: SepParams, psd_tol: float = PSD_TOL) -> SeparableTriple:
    """Build W^{A<B}, W^{B<A}, and their q-mixture; reject infeasible params.

    Rejection names the offending block and its most-negative eigenvalue.
    """
    block_ab = ordered_block_ab(p)
    block_ba = ordered_block_ba(p)
    eig_ab = min_eigenvalue(block_ab)
    if eig_ab < -psd_tol:
        raise InfeasibleParamsError("A<B", eig_ab)
    eig_ba = min_eigenvalue(block_ba)
    if eig_ba < -psd_tol:
        raise InfeasibleParamsError("B<A", eig_ba)
    mixture = p.q * block_ab + (1.0 - p.q) * block_ba
    return SeparableTriple(as_process(block_ab), as_process(block_ba), as_process(mixture))


# ---------------------------------------------------------------------------
# Feix family: W = q W^{A<B} + (1-q+eps) W^{B<A} - eps I/4
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeixParams:
    """Mixing weight q in [0, 1] and the nonseparability offset eps >= 0."""

    q: float
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")


def feix_block_ab() -> HermitianOperator:
    """(I + (XX + YY + ZZ on A_O,B_I)/3) / 4: a channel-like A<B process."""
    coupling = pauli_term("IXXI") + pauli_term("IYYI") + pauli_term("IZZI")
    return 0.25 * (identity(CANONICAL_LABELS) + (1.0 / 3.0) * coupling)


def feix_block_ba() -> HermitianOperator:
    """(I + ZIXZ) / 4: a B<A process."""
    return 0.25 * (identity(CANONICAL_LABELS) + pauli_term("ZIXZ"))


def feix_process(p: FeixParams) -> ProcessMatrix:
    """The affine Feix combination; PSD exactly when the parameters allow it.

    The linear validity conditions hold identically (the combination is
    affine with unit coefficient sum over operators that satisfy them), so
    only positivity can fail; the validity report carries that status.
    """
    op = (
        p.q * feix_block_ab()
        + (1.0 - p.q + p.eps) * feix_block_ba()
        - p.eps * (identity(CANONICAL_LABELS) * 0.25)
    )
    return as_process(op)
