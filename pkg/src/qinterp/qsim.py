"""Dense statevector simulation of the interpolation query algorithms.

States live on m registers of dimension q each, stored as complex
arrays of shape (q,) * m with row-major index <-> tuple mapping.  The
simulated pipelines are:

* optimal: uniform superposition over one representative pair per
  fiber, k phase queries, in-place relabeling of pairs by their power
  sums, measurement in the character basis;
* pgm: k independent queries on uniform superpositions, fiber states
  collapsed onto their labels, same measurement;
* superposed: fiber-uniform superpositions over good pairs in place of
  single representatives (the route used when one power-sum entry must
  be guessed).

Measurement results are exact probability distributions, never samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .fields import Field
from .prony import invert_z
from .zmap import (
    Budget,
    DEFAULT_BUDGET,
    ProblemParams,
    cached_census,
    fiber_representatives,
    tuple_to_index,
    z_index_array,
)

DEFAULT_AMP_CAP = 1 << 22


@dataclass
class StateVector:
    """Complex amplitudes on m registers of dimension q."""

    field: Field
    amps: np.ndarray

    @property
    def num_registers(self) -> int:
        return self.amps.ndim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def to_json_dict(self, threshold: float = 1e-15) -> dict:
        flat = self.amps.reshape(-1)
        entries = [[int(i), float(flat[i].real), float(flat[i].imag)]
                   for i in np.nonzero(np.abs(flat) > threshold)[0]]
        return {"q": self.field.q, "shape": list(self.amps.shape),
                "amplitudes": entries}


@dataclass
class MeasurementResult:
    """Full outcome distribution of a character-basis measurement and the
    probability of the true coefficient vector."""

    c: tuple[int, ...]
    distribution: np.ndarray
    success_probability: float

    def probability_of(self, outcome, q: int) -> float:
        return float(self.distribution[tuple_to_index(outcome, q)])


def fourier_matrix(field: Field) -> np.ndarray:
    """F[a, b] = e(a*b)/sqrt(q); symmetric and unitary."""
    idx = np.arange(field.q, dtype=np.int64)
    prod = field.mul_arr(idx[:, None], idx[None, :])
    return field.char_table[prod] / math.sqrt(field.q)


def _apply_matrix(amps: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(amps, axis, -1)
    return np.moveaxis(moved @ mat, -1, axis)


def fourier_on_registers(state: StateVector, registers,
                         inverse: bool = False) -> StateVector:
    """Apply the character-basis transform |x> -> q^(-1/2) sum_y e(xy)|y>
    to the given registers (its inverse if requested)."""
    regs = list(registers)
    if len(set(regs)) != len(regs) or any(
            not (0 <= r < state.num_registers) for r in regs):
        raise ValidationError(f"bad register indices {regs} for "
                              f"{state.num_registers} registers")
    mat = fourier_matrix(state.field)
    if inverse:
        mat = mat.conj().T
    amps = state.amps
    for r in regs:
        amps = _apply_matrix(amps, mat, r)
    return StateVector(state.field, amps)


def _split_pairs(state: StateVector) -> int:
    if state.num_registers % 2:
        raise ValidationError("query states need paired (x, y) registers")
    return state.num_registers // 2


def _f_values(field: Field, c) -> np.ndarray:
    tbl = field.pow_table(len(c) - 1)
    acc = np.zeros(field.q, dtype=np.int64)
    for j, cj in enumerate(c):
        acc = field.add_arr(acc, field.mul_arr(np.int64(cj), tbl[j]))
    return acc


def phase_query(state: StateVector, c) -> StateVector:
    """Multiply each pair register (x_i, y_i) by the phase e(y_i f(x_i))."""
    field = state.field
    k = _split_pairs(state)
    q = field.q
    fv = _f_values(field, c)
    idx = np.arange(q, dtype=np.int64)
    phase = field.char_table[field.mul_arr(fv[:, None], idx[None, :])]
    amps = state.amps
    for i in range(k):
        shape = [1] * (2 * k)
        shape[i] = q
        shape[k + i] = q
        amps = amps * phase.reshape(shape)
    return StateVector(field, amps)


def standard_query(state: StateVector, c) -> StateVector:
    """Shift each y_i register by f(x_i): |x, y> -> |x, y + f(x)>."""
    field = state.field
    k = _split_pairs(state)
    q = field.q
    fv = _f_values(field, c)
    idx = np.arange(q, dtype=np.int64)
    amps = state.amps
    for i in range(k):
        src = np.moveaxis(amps, (i, k + i), (0, 1))
        out = np.empty_like(src)
        for xv in range(q):
            pull = field.sub_arr(idx, np.int64(fv[xv]))
            out[xv] = src[xv][pull]
        amps = np.moveaxis(out, (0, 1), (i, k + i))
    return StateVector(field, amps)


# ---------------------------------------------------------------------------
# Algorithm pipelines.


def _check_amp_budget(params: ProblemParams, amp_cap: int) -> None:
    if params.pair_count > amp_cap or params.cell_count > amp_cap:
        raise BudgetExceededError(
            f"statevector needs max({params.pair_count}, {params.cell_count}) "
            f"amplitudes, cap is {amp_cap}")


def good_representatives(params: ProblemParams, source: str = "auto",
                         budget: Budget = DEFAULT_BUDGET) -> np.ndarray:
    """Pair ids of one good pair per good fiber.

    The canonical inverter supplies them when d is odd and k = (d+1)/2;
    otherwise (or on request) a census pass picks the smallest pair id
    in each fiber.  Either choice yields the same success probability.
    """
    if source not in ("auto", "prony", "census"):
        raise ValidationError(f"unknown representative source {source!r}")
    use_prony = (source == "prony") or (
        source == "auto" and params.n == 1 and params.d % 2 == 1
        and params.k == (params.d + 1) // 2)
    if not use_prony:
        return fiber_representatives(params, "good", budget)
    counts_good = _good_fiber_counts(params, budget)
    q, k = params.q, params.k
    ids = []
    for zflat in np.nonzero(counts_good)[0]:
        z = []
        rem = int(zflat)
        for _ in range(params.d + 1):
            rem, v = divmod(rem, q)
            z.append(v)
        pair = invert_z(tuple(reversed(z)), params)
        xb = tuple_to_index(pair.x, q)
        yb = tuple_to_index(pair.y, q)
        ids.append(xb * q**k + yb)
    return np.array(ids, dtype=np.int64)


def _good_fiber_counts(params: ProblemParams, budget: Budget) -> np.ndarray:
    zidx, good = z_index_array(params, budget)
    return np.bincount(zidx[good], minlength=params.cell_count)


def _measure(field: Field, pre: np.ndarray, c, length: int) -> MeasurementResult:
    """Inverse character transform on every register, then read index weights."""
    state = StateVector(field, pre.reshape((field.q,) * length))
    state = fourier_on_registers(state, range(length), inverse=True)
    dist = np.abs(state.amps.reshape(-1)) ** 2
    total = dist.sum()
    assert abs(total - 1.0) < 1e-9, f"probabilities sum to {total}"
    return MeasurementResult(
        c=tuple(c), distribution=dist,
        success_probability=float(dist[tuple_to_index(c, field.q)]))


def run_interpolation(params: ProblemParams, c, scope: str = "good",
                      budget: Budget = DEFAULT_BUDGET,
                      amp_cap: int = DEFAULT_AMP_CAP,
                      rep_source: str = "auto") -> MeasurementResult:
    """Simulate the representative-superposition algorithm.

    Success equals |range| / q^(d+1) for the chosen scope, independently
    of c.
    """
    if params.n != 1:
        raise ValidationError("simulation covers the univariate map")
    if len(c) != params.d + 1:
        raise ValidationError(f"c must have length d+1 = {params.d + 1}")
    _check_amp_budget(params, amp_cap)
    field, q, k = params.field, params.q, params.k
    if scope == "good":
        reps = good_representatives(params, rep_source, budget)
    elif scope == "all":
        reps = fiber_representatives(params, "all", budget)
    else:
        raise ValidationError(f"scope must be 'all' or 'good', got {scope!r}")
    if len(reps) == 0:
        raise ValidationError("empty representative set: nothing to superpose")

    amps = np.zeros(params.pair_count, dtype=complex)
    amps[reps] = 1.0 / math.sqrt(len(reps))
    state = StateVector(field, amps.reshape((q,) * (2 * k)))
    state = phase_query(state, c)

    zidx, _ = z_index_array(params, budget)
    flat = state.amps.reshape(-1)
    pre = np.zeros(params.cell_count, dtype=complex)
    pre[zidx[reps]] = flat[reps]
    assert abs(np.linalg.norm(pre) - 1.0) < 1e-9, "relabeling must preserve norm"
    return _measure(field, pre, c, params.d + 1)


def run_pgm(params: ProblemParams, c, budget: Budget = DEFAULT_BUDGET,
            amp_cap: int = DEFAULT_AMP_CAP) -> MeasurementResult:
    """Simulate the independent-query variant: uniform superpositions in,
    fiber states collapsed onto their labels before measurement.

    Success equals (sum_z sqrt(|fiber(z)|))^2 / q^(2k + d + 1).
    """
    if params.n != 1:
        raise ValidationError("simulation covers the univariate map")
    if len(c) != params.d + 1:
        raise ValidationError(f"c must have length d+1 = {params.d + 1}")
    _check_amp_budget(params, amp_cap)
    field, q, k = params.field, params.q, params.k
    amps = np.full(params.pair_count, 1.0 / q**k, dtype=complex)
    state = phase_query(StateVector(field, amps.reshape((q,) * (2 * k))), c)

    zidx, _ = z_index_array(params, budget)
    flat = state.amps.reshape(-1)
    cells = params.cell_count
    counts = np.bincount(zidx, minlength=cells)
    sums = (np.bincount(zidx, weights=flat.real, minlength=cells)
            + 1j * np.bincount(zidx, weights=flat.imag, minlength=cells))
    pre = np.zeros(cells, dtype=complex)
    nz = counts > 0
    pre[nz] = sums[nz] / np.sqrt(counts[nz])
    assert abs(np.linalg.norm(pre) - 1.0) < 1e-9, "fiber collapse must preserve norm"
    return _measure(field, pre, c, params.d + 1)


def pgm_success_formula(params: ProblemParams, budget: Budget = DEFAULT_BUDGET) -> float:
    """Closed form for the independent-query success probability, from the
    census fiber histogram."""
    census = cached_census(params, budget)
    total = sum(math.sqrt(size) * mult for size, mult in census.histogram.items())
    return total**2 / params.q ** (2 * params.k + params.d + 1)


def run_superposed_rep(params: ProblemParams, c, budget: Budget = DEFAULT_BUDGET,
                       amp_cap: int = DEFAULT_AMP_CAP) -> MeasurementResult:
    """Simulate the fiber-superposition algorithm for even d, k = d/2 + 1.

    Good fibers replace single representatives; success equals
    |good range| / q^(d+1).
    """
    if params.n != 1:
        raise ValidationError("simulation covers the univariate map")
    if params.d % 2 != 0 or params.k != params.d // 2 + 1:
        raise ValidationError(
            f"fiber superposition needs even d with k = d/2 + 1, got "
            f"d={params.d}, k={params.k}")
    if len(c) != params.d + 1:
        raise ValidationError(f"c must have length d+1 = {params.d + 1}")
    _check_amp_budget(params, amp_cap)
    field, q, k = params.field, params.q, params.k
    zidx, good = z_index_array(params, budget)
    cells = params.cell_count
    counts_good = np.bincount(zidx[good], minlength=cells)
    good_range = int(np.count_nonzero(counts_good))
    if good_range == 0:
        raise ValidationError("empty good range: nothing to superpose")

    amps = np.zeros(params.pair_count, dtype=complex)
    gids = np.nonzero(good)[0]
    amps[gids] = 1.0 / np.sqrt(good_range * counts_good[zidx[gids]])
    state = phase_query(StateVector(field, amps.reshape((q,) * (2 * k))), c)

    flat = state.amps.reshape(-1)
    sums = (np.bincount(zidx[gids], weights=flat[gids].real, minlength=cells)
            + 1j * np.bincount(zidx[gids], weights=flat[gids].imag, minlength=cells))
    pre = np.zeros(cells, dtype=complex)
    nz = counts_good > 0
    # inverse isometry: project onto the normalized fiber superpositions
    pre[nz] = sums[nz] / np.sqrt(counts_good[nz])
    assert abs(np.linalg.norm(pre) - 1.0) < 1e-9, "inverse isometry must preserve norm"
    return _measure(field, pre, c, params.d + 1)


def span_rank(params: ProblemParams, k: int, budget: Budget = DEFAULT_BUDGET,
              tol_factor: float = 1e-8) -> int:
    """Numerical rank of the matrix of final states over all coefficient
    vectors, for the k-query pipeline; bounded by the range size."""
    if k < 0:
        raise ValidationError(f"query count must be >= 0, got {k}")
    cells = params.cell_count
    if cells * cells > budget.cells:
        raise BudgetExceededError(
            f"state matrix needs {cells}^2 cells, cap is {budget.cells}")
    field, q = params.field, params.q
    length = params.d + 1
    if k == 0:
        pre = np.zeros(cells, dtype=complex)
        pre[0] = 1.0
        rows = [_final_row(field, pre, length)] * cells
    else:
        run = replace(params, k=k)
        reps = fiber_representatives(run, "all", budget)
        zidx, _ = z_index_array(run, budget)
        rows = []
        for cflat in range(cells):
            c = _unpack(cflat, q, length)
            amps = np.zeros(run.pair_count, dtype=complex)
            amps[reps] = 1.0 / math.sqrt(len(reps))
            state = phase_query(StateVector(field, amps.reshape((q,) * (2 * k))), c)
            flat = state.amps.reshape(-1)
            pre = np.zeros(cells, dtype=complex)
            pre[zidx[reps]] = flat[reps]
            rows.append(_final_row(field, pre, length))
    matrix = np.stack(rows)
    svals = np.linalg.svd(matrix, compute_uv=False)
    return int(np.count_nonzero(svals > tol_factor * svals[0]))


def _final_row(field: Field, pre: np.ndarray, length: int) -> np.ndarray:
    state = StateVector(field, pre.reshape((field.q,) * length))
    return fourier_on_registers(state, range(length), inverse=True).amps.reshape(-1)


def _unpack(idx: int, q: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        idx, v = divmod(idx, q)
        out.append(v)
    return tuple(reversed(out))
