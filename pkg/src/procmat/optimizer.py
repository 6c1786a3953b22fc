"""Random-restart coordinate ascent over the causally separable family, and
grid-plus-refinement maximization over the two-parameter Feix family.

The search space is the mixing weight q plus the 72 block coefficients; the
objective is a Shannon quantity of the joint output distribution under fixed
instruments and input distribution.  Because the distribution is affine in
every coordinate, entropy objectives are concave along coordinate lines, and
the set of feasible values of one coordinate (both fixed-order blocks PSD) is
a closed interval: a line step is an exact one-dimensional concave
maximization over an interval located by bisection.

Coordinate lines along which the distribution is exactly constant cannot be
ranked by the objective.  Before the ascent proper, such coordinates are
moved to the point maximizing the block's smallest eigenvalue (also concave
along a line), so unranked directions do not consume feasibility slack that
the ranked ones need; during the ascent a coordinate moves only on strict
improvement.

Restarts are independent: restart i draws its start from a generator seeded
with seed + i, so results are reproducible and independent of execution
order.  The generator is numpy's default PCG64.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .instruments import Instrument, gyni_strategy
from .operators import PAULI_MATRICES
from .process import (
    AXIS_FULL,
    AXIS_SPATIAL,
    FeixParams,
    InfeasibleParamsError,
    SepParams,
)
from .stats import InputDist

GENERATOR_NAME = "numpy PCG64 (default_rng)"

DEFAULT_SEED = 200

OBJECTIVES = ("H_AB", "H_A", "H_B", "H_A_given_B", "I_AB")
_CONCAVE_OBJECTIVES = frozenset({"H_AB", "H_A", "H_B"})

N_COORDS = 73  # q plus 36 + 36 block coefficients

#: any feasible block coefficient obeys |c| <= 1/4 (trace pairing bound),
#: so this value brackets the infeasible side of every bisection
_COEFF_BRACKET = 0.2501
_BISECTION_STEPS = 31  # 0.51 / 2^31 < 5e-10: endpoint accuracy ~1e-9

_INIT_SCALE = 0.05
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def coord_name(coord: int) -> str:
    """Human name of a coordinate: ``q``, ``c_0xy``, ``cp_z0x``, ..."""
    if coord == 0:
        return "q"
    if 1 <= coord <= 36:
        k = coord - 1
        a, rest = divmod(k, 9)
        i, j = divmod(rest, 3)
        return f"c_{AXIS_FULL[a]}{AXIS_SPATIAL[i]}{AXIS_SPATIAL[j]}"
    if 37 <= coord <= 72:
        k = coord - 37
        i, rest = divmod(k, 12)
        a, j = divmod(rest, 3)
        return f"cp_{AXIS_SPATIAL[i]}{AXIS_FULL[a]}{AXIS_SPATIAL[j]}"
    raise ValueError(f"coordinate index out of range: {coord}")


def _single_qubit(axis: str) -> np.ndarray:
    return PAULI_MATRICES["I" if axis == "0" else axis.upper()]


def _kron3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(a, b), c)


def _block_word_stacks() -> tuple[np.ndarray, np.ndarray]:
    # block A lives on A_I (x) A_O (x) B_I (the B_O identity factor is dropped);
    # block B lives on A_I (x) B_I (x) B_O (the A_O identity factor is dropped)
    words_a = [
        _kron3(_single_qubit(a), _single_qubit(i), _single_qubit(j))
        for a in AXIS_FULL
        for i in AXIS_SPATIAL
        for j in AXIS_SPATIAL
    ]
    words_b = [
        _kron3(_single_qubit(i), _single_qubit(a), _single_qubit(j))
        for i in AXIS_SPATIAL
        for a in AXIS_FULL
        for j in AXIS_SPATIAL
    ]
    return np.stack(words_a), np.stack(words_b)

_WORDS_A, _WORDS_B = _block_word_stacks()
_EYE8 = np.eye(8, dtype=complex)


def _block_a_matrix(c_flat: np.ndarray) -> np.ndarray:
    return _EYE8 / 4.0 + np.tensordot(c_flat, _WORDS_A, axes=(0, 0))


def _block_b_matrix(cp_flat: np.ndarray) -> np.ndarray:
    return _EYE8 / 4.0 + np.tensordot(cp_flat, _WORDS_B, axes=(0, 0))


def _min_eig(matrix: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(matrix)[0])


@dataclass(frozen=True)
class OptimizerConfig:
    """Free constants of the search procedure.

    ``coords`` restricts the search to a subset of coordinate indices
    (0 is q, 1-36 the first block's coefficients in lexicographic order,
    37-72 the second block's); ``None`` searches all 73.  With restricted
    coordinates, ``base_params`` fixes the inactive ones (default zeros with
    q = 1/2) and restarts randomize only the active coordinates.
    """

    restarts: int = 100
    sweep_tol: float = 1e-6
    max_sweeps: int = 500
    line_tol: float = 1e-7
    psd_tol: float = 1e-10
    seed: int = DEFAULT_SEED
    objective: str = "H_AB"
    instrument_a: Instrument = field(default_factory=lambda: gyni_strategy("A"))
    instrument_b: Instrument = field(default_factory=lambda: gyni_strategy("B"))
    inputs: InputDist = field(default_factory=InputDist.uniform)
    coords: tuple[int, ...] | None = None
    base_params: SepParams | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        for name in ("sweep_tol", "line_tol", "psd_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.coords is not None:
            coords = tuple(sorted(set(int(k) for k in self.coords)))
            if not coords or coords[0] < 0 or coords[-1] >= N_COORDS:
                raise ValueError(f"coords must be a nonempty subset of 0..{N_COORDS - 1}")
            object.__setattr__(self, "coords", coords)

    def active_coords(self) -> tuple[int, ...]:
        return self.coords if self.coords is not None else tuple(range(N_COORDS))


@dataclass(frozen=True)
class RestartRecord:
    restart: int
    seed: int
    value: float
    sweeps: int


@dataclass(frozen=True)
class OptimizerResult:
    best_params: SepParams
    best_value: float
    best_restart: int
    records: tuple[RestartRecord, ...]
    traces: tuple[tuple[float, ...], ...] | None = None


class _Engine:
    """Precomputed affine map from parameters to the joint output distribution.

    For product words the trace in the probability rule factorizes per party,
    so each of the 72 coefficients contributes a fixed per-unit increment to
    the joint table; evaluating the objective at a parameter point is then two
    36-element dot products.
    """

    def __init__(self, instrument_a: Instrument, instrument_b: Instrument, inputs: InputDist):
        for ins in (instrument_a, instrument_b):
            if any(s.dim != 2 for s in ins.labels):
                raise ValueError("the separable-family search is qubit-specific")
        self.inputs = inputs
        t_a, self.n_a = self._party_tables(instrument_a)
        t_b, self.n_b = self._party_tables(instrument_b)
        p_xy = inputs.probs
        if p_xy.shape != (t_a.shape[3], t_b.shape[3]):
            raise ValueError("input distribution shape does not match instrument inputs")
        # fold the input distribution: u_a[m,n,a] paired with u_b[m,n,b]
        # gives the joint contribution of the product word (m,n) (x) (m',n')
        self._wa = np.einsum("mnax,xy->mnay", t_a, p_xy)
        self._tb = t_b
        base = np.einsum("ay,by->ab", self._wa[0, 0], t_b[0, 0]) / 4.0
        self.base_joint = base
        self.inc_a = np.stack(
            [self._word_increment(a, i, j) for a in range(4) for i in range(1, 4) for j in range(1, 4)]
        ).reshape(36, -1)
        self.inc_b = np.stack(
            [self._word_increment_b(i, a, j) for i in range(1, 4) for a in range(4) for j in range(1, 4)]
        ).reshape(36, -1)
        self._base_flat = base.reshape(-1)

    @staticmethod
    def _party_tables(ins: Instrument) -> tuple[np.ndarray, int]:
        """t[m, n, a, x] = Tr[M_{a|x} (sigma_m (x) sigma_n)]."""
        xs = ins.inputs
        n_a = max(len(ins.outcomes(x)) for x in xs)
        table = np.zeros((4, 4, n_a, len(xs)))
        paulis = [PAULI_MATRICES[ch] for ch in "IXYZ"]
        for m in range(4):
            for n in range(4):
                word = np.kron(paulis[m], paulis[n])
                for ix, x in enumerate(xs):
                    for ia, a in enumerate(ins.outcomes(x)):
                        value = np.einsum("ij,ji->", ins.operators[(x, a)].matrix, word)
                        if abs(value.imag) > 1e-12:
                            raise ValueError("instrument traces must be real")
                        table[m, n, ia, ix] = value.real
        return table, n_a

    def _word_increment(self, a: int, i: int, j: int) -> np.ndarray:
        # first-block word sigma_a^{A_I} sigma_i^{A_O} sigma_j^{B_I} I^{B_O}
        return np.einsum("ay,by->ab", self._wa[a, i], self._tb[j, 0])

    def _word_increment_b(self, i: int, a: int, j: int) -> np.ndarray:
        # second-block word sigma_i^{A_I} I^{A_O} sigma_a^{B_I} sigma_j^{B_O}
        return np.einsum("ay,by->ab", self._wa[i, 0], self._tb[a, j])

    def word_increment_full(self, word: str) -> np.ndarray:
        """Joint increment of an arbitrary 4-letter product word."""
        idx = ["IXYZ".index(ch) for ch in word.upper()]
        return np.einsum("ay,by->ab", self._wa[idx[0], idx[1]], self._tb[idx[2], idx[3]])

    def joint_flat(self, q: float, c_flat: np.ndarray, cp_flat: np.ndarray) -> np.ndarray:
        return self._base_flat + q * (c_flat @ self.inc_a) + (1.0 - q) * (cp_flat @ self.inc_b)

    def joint_of(self, flat: np.ndarray) -> np.ndarray:
        return flat.reshape(self.n_a, self.n_b)


def _objective_fn(name: str) -> Callable[[np.ndarray], float]:
    def shannon(p: np.ndarray) -> float:
        p = p[p > 1e-15]
        return float(-(p * np.log2(p)).sum())

    def value(joint2d: np.ndarray) -> float:
        joint2d = np.maximum(joint2d, 0.0)
        if name == "H_AB":
            return shannon(joint2d.ravel())
        if name == "H_A":
            return shannon(joint2d.sum(axis=1))
        if name == "H_B":
            return shannon(joint2d.sum(axis=0))
        if name == "H_A_given_B":
            return shannon(joint2d.ravel()) - shannon(joint2d.sum(axis=0))
        return (
            shannon(joint2d.sum(axis=1))
            + shannon(joint2d.sum(axis=0))
            - shannon(joint2d.ravel())
        )

    return value


class _State:
    """Mutable unpacked parameters used inside one ascent run."""

    __slots__ = ("q", "c", "cp")

    def __init__(self, params: SepParams):
        self.q = float(params.q)
        self.c = params.c.ravel().copy()
        self.cp = params.c_prime.ravel().copy()

    def to_params(self) -> SepParams:
        return SepParams(self.q, self.c.reshape(4, 3, 3), self.cp.reshape(3, 4, 3))

    def get(self, coord: int) -> float:
        if coord == 0:
            return self.q
        if coord <= 36:
            return float(self.c[coord - 1])
        return float(self.cp[coord - 37])

    def set(self, coord: int, value: float):
        if coord == 0:
            self.q = float(value)
        elif coord <= 36:
            self.c[coord - 1] = value
        else:
            self.cp[coord - 37] = value


def _coord_block(state: _State, coord: int):
    """(coefficient array, word stack, index) of the block a coordinate acts on."""
    if coord == 0:
        return None
    if coord <= 36:
        return state.c, _WORDS_A, coord - 1
    return state.cp, _WORDS_B, coord - 37


def _block_min_eig_at(coeffs: np.ndarray, words: np.ndarray, idx: int, value: float) -> float:
    trial = coeffs.copy()
    trial[idx] = value
    return _min_eig(_EYE8 / 4.0 + np.tensordot(trial, words, axes=(0, 0)))


def _interval_of(state: _State, coord: int, psd_tol: float) -> tuple[float, float]:
    if coord == 0:
        return (0.0, 1.0)
    coeffs, words, idx = _coord_block(state, coord)
    t0 = float(coeffs[idx])
    if _block_min_eig_at(coeffs, words, idx, t0) < -psd_tol:
        raise InfeasibleParamsError(
            "A<B" if coord <= 36 else "B<A",
            _block_min_eig_at(coeffs, words, idx, t0),
        )
    ends = []
    for sign in (-1.0, 1.0):
        lo, hi = t0, sign * _COEFF_BRACKET
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if _block_min_eig_at(coeffs, words, idx, mid) >= -psd_tol:
                lo = mid
            else:
                hi = mid
        ends.append(lo)
    return (ends[0], ends[1])


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    if b - a <= tol:
        mid = 0.5 * (a + b)
        return mid, f(mid)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def _line_max(
    f: Callable[[float], float], t0: float, lo: float, hi: float, tol: float, concave: bool
) -> tuple[float, float]:
    """Best point on [lo, hi]: candidates are the incumbent, the golden-section
    argmax (seeded by a coarse grid when the objective is not concave), and
    the endpoints.  Ties keep the incumbent."""
    v0 = f(t0)
    if concave:
        xm, vm = _golden_max(f, lo, hi, tol)
    else:
        grid = np.linspace(lo, hi, 33)
        values = [f(t) for t in grid]
        k = int(np.argmax(values))
        xm, vm = _golden_max(f, grid[max(0, k - 1)], grid[min(32, k + 1)], tol)
    best_t, best_v = t0, v0
    for t, v in ((xm, vm), (lo, f(lo)), (hi, f(hi))):
        if v > best_v:
            best_t, best_v = t, v
    return best_t, best_v


def random_feasible_init(seed: int, psd_tol: float = 1e-10) -> SepParams:
    """Feasible random start: q uniform, coefficients Gaussian (scale 0.05)
    halved together until both blocks are PSD.

    Zero coefficients give the maximally mixed blocks (smallest eigenvalue
    1/4), so the halving loop terminates.  Deterministic function of seed.
    """
    rng = np.random.default_rng(seed)
    q = float(rng.uniform())
    c = rng.normal(scale=_INIT_SCALE, size=36)
    cp = rng.normal(scale=_INIT_SCALE, size=36)
    while (
        _min_eig(_block_a_matrix(c)) < -psd_tol or _min_eig(_block_b_matrix(cp)) < -psd_tol
    ):
        c *= 0.5
        cp *= 0.5
    return SepParams(q, c.reshape(4, 3, 3), cp.reshape(3, 4, 3))


def feasible_interval(
    params: SepParams, coord: int, psd_tol: float = 1e-10
) -> tuple[float, float]:
    """The closed interval of values of one coordinate keeping the search
    point feasible (its block PSD; q confined to [0, 1]).

    Endpoints are located by bisection on the block's smallest eigenvalue to
    about 1e-9 absolute accuracy.
    """
    if not 0 <= coord < N_COORDS:
        raise ValueError(f"coordinate index out of range: {coord}")
    return _interval_of(_State(params), coord, psd_tol)


def line_maximize(
    params: SepParams,
    coord: int,
    interval: tuple[float, float],
    cfg: OptimizerConfig | None = None,
) -> tuple[float, float]:
    """Maximize the objective along one coordinate over ``interval``.

    Returns ``(value_at_max, argmax)``.  For entropy objectives the line
    function is concave (the distribution is affine in the coordinate), so
    golden-section search is exact to ``line_tol``; for the mutual-information
    and conditional-entropy objectives a coarse grid seeds the golden stage
    and no global-optimality guarantee is made.
    """
    cfg = cfg or OptimizerConfig()
    lo, hi = interval
    if hi < lo:
        raise ValueError(f"empty interval: {interval}")
    engine = _Engine(cfg.instrument_a, cfg.instrument_b, cfg.inputs)
    value = _objective_fn(cfg.objective)
    state = _State(params)

    def f(t: float) -> float:
        old = state.get(coord)
        state.set(coord, t)
        out = value(engine.joint_of(engine.joint_flat(state.q, state.c, state.cp)))
        state.set(coord, old)
        return out

    best_t, best_v = _line_max(
        f, state.get(coord), lo, hi, cfg.line_tol, cfg.objective in _CONCAVE_OBJECTIVES
    )
    return best_v, best_t


def _center_unranked(state: _State, engine: _Engine, value, cfg: OptimizerConfig):
    """Move objective-flat coordinates to their maximum-slack points.

    Iterated until the flat set stops moving; each accepted move strictly
    increases the block's smallest eigenvalue, and the objective value is
    unchanged by construction.
    """
    coords = [k for k in cfg.active_coords() if k != 0]
    for _ in range(50):
        moved = 0.0
        for coord in coords:
            lo, hi = _interval_of(state, coord, cfg.psd_tol)
            t0 = state.get(coord)

            def f(t: float) -> float:
                old = state.get(coord)
                state.set(coord, t)
                out = value(engine.joint_of(engine.joint_flat(state.q, state.c, state.cp)))
                state.set(coord, old)
                return out

            v0 = f(t0)
            if not (f(lo) == v0 and f(hi) == v0 and f(0.5 * (lo + hi)) == v0):
                continue
            coeffs, words, idx = _coord_block(state, coord)

            def slack(t: float) -> float:
                return _block_min_eig_at(coeffs, words, idx, t)

            ts, vs = _golden_max(slack, lo, hi, cfg.line_tol)
            if vs > slack(t0):
                moved = max(moved, abs(ts - t0))
                state.set(coord, ts)
        if moved < cfg.sweep_tol:
            break


def _ascend(init: SepParams, cfg: OptimizerConfig) -> tuple[SepParams, float, int, tuple[float, ...]]:
    engine = _Engine(cfg.instrument_a, cfg.instrument_b, cfg.inputs)
    value = _objective_fn(cfg.objective)
    state = _State(init)
    eig_a = _min_eig(_block_a_matrix(state.c))
    eig_b = _min_eig(_block_b_matrix(state.cp))
    if eig_a < -cfg.psd_tol:
        raise InfeasibleParamsError("A<B", eig_a)
    if eig_b < -cfg.psd_tol:
        raise InfeasibleParamsError("B<A", eig_b)

    concave = cfg.objective in _CONCAVE_OBJECTIVES
    _center_unranked(state, engine, value, cfg)
    current = value(engine.joint_of(engine.joint_flat(state.q, state.c, state.cp)))
    trace = [current]
    sweeps = 0
    for _ in range(cfg.max_sweeps):
        sweeps += 1
        delta = 0.0
        for coord in cfg.active_coords():
            lo, hi = _interval_of(state, coord, cfg.psd_tol)
            t0 = state.get(coord)

            def f(t: float) -> float:
                old = state.get(coord)
                state.set(coord, t)
                out = value(engine.joint_of(engine.joint_flat(state.q, state.c, state.cp)))
                state.set(coord, old)
                return out

            best_t, best_v = _line_max(f, t0, lo, hi, cfg.line_tol, concave)
            if best_t != t0 and best_v > current:
                state.set(coord, best_t)
                delta = max(delta, abs(best_t - t0))
                current = best_v
        trace.append(current)
        if delta < cfg.sweep_tol:
            break
    return state.to_params(), current, sweeps, tuple(trace)


def coordinate_ascent(
    init: SepParams, cfg: OptimizerConfig | None = None
) -> tuple[SepParams, float, int]:
    """Sweep the coordinates in fixed order (q, first block lexicographic,
    second block lexicographic), maximizing along one coordinate at a time.

    The objective is nondecreasing across sweeps; iteration stops when the
    largest parameter change in a sweep falls below ``sweep_tol`` or after
    ``max_sweeps`` sweeps.  Returns (final params, final value, sweeps used).
    """
    params, value, sweeps, _ = _ascend(init, cfg or OptimizerConfig())
    return params, value, sweeps


def _restricted_init(seed: int, cfg: OptimizerConfig) -> SepParams:
    """Random start over the active coordinates only, others held at base."""
    base = cfg.base_params if cfg.base_params is not None else SepParams.zeros()
    state = _State(base)
    eig_a = _min_eig(_block_a_matrix(state.c))
    eig_b = _min_eig(_block_b_matrix(state.cp))
    if eig_a < -cfg.psd_tol:
        raise InfeasibleParamsError("A<B", eig_a)
    if eig_b < -cfg.psd_tol:
        raise InfeasibleParamsError("B<A", eig_b)
    rng = np.random.default_rng(seed)
    active = cfg.active_coords()
    if 0 in active:
        state.q = float(rng.uniform())
    coeff_coords = [k for k in active if k != 0]
    draws = rng.normal(scale=_INIT_SCALE, size=len(coeff_coords))
    while True:
        for k, value in zip(coeff_coords, draws):
            state.set(k, value)
        if (
            _min_eig(_block_a_matrix(state.c)) >= -cfg.psd_tol
            and _min_eig(_block_b_matrix(state.cp)) >= -cfg.psd_tol
        ):
            return state.to_params()
        draws = draws * 0.5


def _run_restart(args) -> tuple[int, float, SepParams, int, tuple[float, ...] | None]:
    cfg, restart = args
    seed = cfg.seed + restart
    if cfg.coords is None and cfg.base_params is None:
        init = random_feasible_init(seed, cfg.psd_tol)
    else:
        init = _restricted_init(seed, cfg)
    params, val, sweeps, trace = _ascend(init, cfg)
    return restart, val, params, sweeps, trace if cfg.record_trace else None


def multistart(cfg: OptimizerConfig | None = None, jobs: int = 1) -> OptimizerResult:
    """Best of ``cfg.restarts`` independent ascent runs, seeds seed, seed+1, ...

    Restarts may execute in parallel (``jobs`` processes); the reduction is
    order-independent, with ties broken by the lowest restart index, so the
    result is a deterministic function of the configuration alone.
    """
    cfg = cfg or OptimizerConfig()
    work = [(cfg, r) for r in range(cfg.restarts)]
    if jobs > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_restart, work))
    else:
        outcomes = [_run_restart(item) for item in work]
    outcomes.sort(key=lambda item: item[0])
    records = tuple(
        RestartRecord(restart=r, seed=cfg.seed + r, value=v, sweeps=s)
        for r, v, _, s, _ in outcomes
    )
    best_restart, best_value, best_params = None, -math.inf, None
    for r, v, params, _, _ in outcomes:
        if v > best_value:
            best_restart, best_value, best_params = r, v, params
    traces = tuple(t for _, _, _, _, t in outcomes) if cfg.record_trace else None
    return OptimizerResult(
        best_params=best_params,
        best_value=best_value,
        best_restart=best_restart,
        records=records,
        traces=traces,
    )


# ---------------------------------------------------------------------------
# Feix-family maximization over (q, eps)
# ---------------------------------------------------------------------------

_FEIX_GRID_STEP = 0.01


class _FeixEngine:
    """Joint distribution and feasibility over the (q, eps) plane."""

    def __init__(self, instrument_a: Instrument, instrument_b: Instrument, inputs: InputDist):
        self._engine = _Engine(instrument_a, instrument_b, inputs)
        coupling = ["IXXI", "IYYI", "IZZI"]
        self._inc_sym = sum(self._engine.word_increment_full(w) for w in coupling) / 12.0
        self._inc_ba = self._engine.word_increment_full("ZIXZ") / 4.0
        paulis = {w: self._word16(w) for w in coupling + ["ZIXZ"]}
        self._m_sym = sum(paulis[w] for w in coupling) / 12.0
        self._m_ba = paulis["ZIXZ"] / 4.0
        self._eye16 = np.eye(16, dtype=complex)

    @staticmethod
    def _word16(word: str) -> np.ndarray:
        mat = PAULI_MATRICES[word[0]]
        for ch in word[1:]:
            mat = np.kron(mat, PAULI_MATRICES[ch])
        return mat

    def joint(self, q: float, eps: float) -> np.ndarray:
        flat = (
            self._engine.base_joint
            + q * self._inc_sym
            + (1.0 - q + eps) * self._inc_ba
        )
        return flat

    def min_eig(self, q: float | np.ndarray, eps: float | np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        eps = np.asarray(eps, dtype=float)
        mats = (
            self._eye16 * 0.25
            + q[..., None, None] * self._m_sym
            + (1.0 - q + eps)[..., None, None] * self._m_ba
        )
        return np.linalg.eigvalsh(mats)[..., 0]


def feix_maximize(
    cfg: OptimizerConfig | None = None,
) -> tuple[FeixParams, float]:
    """Maximize the objective over the PSD region of the Feix family.

    A coarse grid (step 0.01 in q and eps) locates the basin; coordinate
    golden-section refinement with PSD-interval bisection polishes it.
    """
    cfg = cfg or OptimizerConfig()
    value = _objective_fn(cfg.objective)
    eng = _FeixEngine(cfg.instrument_a, cfg.instrument_b, cfg.inputs)

    qs = np.arange(0.0, 1.0 + 1e-12, _FEIX_GRID_STEP)
    eps = np.arange(0.0, 1.0 + 1e-12, _FEIX_GRID_STEP)
    qq, ee = np.meshgrid(qs, eps, indexing="ij")
    feasible = eng.min_eig(qq, ee) >= -cfg.psd_tol
    best_q, best_e, best_v = 0.0, 0.0, -math.inf
    for iq in range(qq.shape[0]):
        for ie in range(qq.shape[1]):
            if not feasible[iq, ie]:
                continue
            v = value(eng.joint(qq[iq, ie], ee[iq, ie]))
            if v > best_v:
                best_q, best_e, best_v = float(qq[iq, ie]), float(ee[iq, ie]), v

    def eps_bound(q: float) -> float:
        # largest feasible eps at fixed q, by bisection on the smallest eigenvalue
        lo, hi = 0.0, 1.0001
        if eng.min_eig(q, lo) < -cfg.psd_tol:
            return -1.0
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if eng.min_eig(q, mid) >= -cfg.psd_tol:
                lo = mid
            else:
                hi = mid
        return lo

    def q_interval(e: float) -> tuple[float, float]:
        ends = []
        for sign in (-1.0, 1.0):
            lo, hi = best_q, 0.5 + sign * 0.5001
            for _ in range(_BISECTION_STEPS):
                mid = 0.5 * (lo + hi)
                if 0.0 <= mid <= 1.0 and eng.min_eig(mid, e) >= -cfg.psd_tol:
                    lo = mid
                else:
                    hi = mid
            ends.append(lo)
        return min(ends[0], best_q), max(ends[1], best_q)

    for _ in range(60):
        moved = 0.0
        lo_q, hi_q = q_interval(best_e)
        tq, vq = _golden_max(lambda t: value(eng.joint(t, best_e)), lo_q, hi_q, cfg.line_tol)
        if vq > best_v:
            moved = max(moved, abs(tq - best_q))
            best_q, best_v = tq, vq
        top = eps_bound(best_q)
        if top >= 0.0:
            te, ve = _golden_max(lambda t: value(eng.joint(best_q, t)), 0.0, top, cfg.line_tol)
            if ve > best_v:
                moved = max(moved, abs(te - best_e))
                best_e, best_v = te, ve
        if moved < cfg.line_tol * 10:
            break
    return FeixParams(best_q, best_e), best_v
