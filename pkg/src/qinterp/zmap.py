"""The power-sum map Z(x, y)_j = sum_i y_i x_i^j over GF(q).

Exact enumeration of its range and fiber-size statistics, for both the
full pair space and the "good" pairs (distinct x entries, nonzero y
entries), plus the multivariate generalization where x_i are points in
GF(q)^n and j runs over monomial exponents of total degree <= d.

Enumeration walks the pair space in canonical row-major order,
accumulating into flat count arrays of q^J cells; workers split the
pair space into contiguous ranges and merge by elementwise addition,
so results never depend on scheduling.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import BudgetExceededError, InsufficientSamplesError, ValidationError
from .fields import Field

DEFAULT_CELL_CAP = 1 << 28
DEFAULT_PAIR_CAP = 1 << 28
_CHUNK = 1 << 18


@dataclass(frozen=True)
class Budget:
    """Caps on census size: count-array cells and pair-space iterations."""

    cells: int = DEFAULT_CELL_CAP
    pairs: int = DEFAULT_PAIR_CAP


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class ProblemParams:
    """A problem instance: degree-d polynomials over field, k queries,
    n variables (n = 1 unless stated otherwise)."""

    field: Field
    d: int
    k: int
    n: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError(f"degree must be >= 1, got {self.d}")
        if self.k < 1:
            raise ValidationError(f"query count must be >= 1, got {self.k}")
        if self.n < 1:
            raise ValidationError(f"variable count must be >= 1, got {self.n}")
        if self.field.q <= self.d:
            raise ValidationError(
                f"q = {self.field.q} must exceed d = {self.d} so coefficient "
                "vectors correspond to distinct functions")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def num_coeffs(self) -> int:
        """Length J of coefficient and power-sum vectors: C(n+d, d)."""
        return math.comb(self.n + self.d, self.d)

    @property
    def point_count(self) -> int:
        return self.q**self.n

    @property
    def pair_count(self) -> int:
        return self.q ** ((self.n + 1) * self.k)

    @property
    def cell_count(self) -> int:
        return self.q**self.num_coeffs


class PairXY(NamedTuple):
    """A query-point/weight pair; x entries are element indices (n = 1)
    or n-tuples of indices (n > 1)."""

    x: tuple
    y: tuple


def is_good_x(x) -> bool:
    """All query points pairwise distinct."""
    return len(set(x)) == len(x)


def is_good_y(y) -> bool:
    """All weights nonzero."""
    return all(v != 0 for v in y)


def tuple_to_index(tup, q: int) -> int:
    """Row-major index of a tuple of element indices."""
    idx = 0
    for v in tup:
        idx = idx * q + v
    return idx


def index_to_tuple(idx: int, q: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        idx, rem = divmod(idx, q)
        out.append(rem)
    return tuple(reversed(out))


def exponent_tuples(n: int, d: int) -> list[tuple[int, ...]]:
    """Monomial exponents of total degree <= d in n variables, graded
    lexicographic; for n = 1 this is (0,), (1,), ..., (d,)."""
    tuples = [t for t in itertools.product(range(d + 1), repeat=n) if sum(t) <= d]
    tuples.sort(key=lambda t: (sum(t), t))
    return tuples


def poly_eval(field: Field, c, x: int) -> int:
    """Horner evaluation of c_0 + c_1 X + ... + c_d X^d at x."""
    acc = 0
    for cj in reversed(tuple(c)):
        acc = field.add(field.mul(acc, x), cj)
    return acc


def poly_eval_multi(field: Field, c, point, exponents) -> int:
    """Evaluate sum_j c_j * prod_t point_t^(j_t)."""
    if len(c) != len(exponents):
        raise ValidationError("coefficient vector length must match exponent count")
    acc = 0
    for cj, exps in zip(c, exponents):
        mon = 1
        for xt, jt in zip(point, exps):
            mon = field.mul(mon, field.pow(xt, jt))
        acc = field.add(acc, field.mul(cj, mon))
    return acc


def check_indices(vals, q: int, what: str) -> None:
    """Reject anything that is not a canonical element index."""
    if any(not (0 <= int(v) < q) for v in vals):
        raise ValidationError(f"{what} entries must be element indices in [0, {q})")


def z_eval(params: ProblemParams, x, y) -> tuple[int, ...]:
    """The power sums Z(x, y)_j = sum_i y_i x_i^j, j over all monomial
    exponents (j in 0..d for n = 1)."""
    f = params.field
    if len(x) != params.k or len(y) != params.k:
        raise ValidationError(f"x and y must have length k = {params.k}")
    check_indices(y, f.q, "y")
    if params.n == 1:
        check_indices(x, f.q, "x")
        out = []
        for j in range(params.d + 1):
            acc = 0
            for xi, yi in zip(x, y):
                acc = f.add(acc, f.mul(yi, f.pow(xi, j)))
            out.append(acc)
        return tuple(out)
    for pt in x:
        check_indices(pt, f.q, "x")
    exps = exponent_tuples(params.n, params.d)
    out = []
    for exps_j in exps:
        acc = 0
        for pt, yi in zip(x, y):
            mon = 1
            for xt, jt in zip(pt, exps_j):
                mon = f.mul(mon, f.pow(xt, jt))
            acc = f.add(acc, f.mul(yi, mon))
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# Vectorized enumeration engine.
#
# Pair id layout (row-major): id = x_block * q^k + y_block, where x_block
# packs the k point indices (each in [0, q^n)) and y_block the k weight
# indices, most significant first.


def _monomial_table(params: ProblemParams) -> np.ndarray:
    """Table M[j, point] = point^exponent_j, shape (J, q^n)."""
    f = params.field
    if params.n == 1:
        return f.pow_table(params.d)
    exps = exponent_tuples(params.n, params.d)
    pts = np.arange(params.point_count, dtype=np.int64)
    coords = [(pts // f.q ** (params.n - 1 - t)) % f.q for t in range(params.n)]
    ptbl = f.pow_table(params.d)
    mono = np.zeros((len(exps), params.point_count), dtype=np.int64)
    for row, exps_j in enumerate(exps):
        acc = np.ones(params.point_count, dtype=np.int64)
        for t, jt in enumerate(exps_j):
            if jt:
                acc = f.mul_arr(acc, ptbl[jt][coords[t]])
        mono[row] = acc
    return mono


def _z_and_good(params: ProblemParams, ids: np.ndarray, mono: np.ndarray):
    """Z indices (row-major in q^J) and goodness mask for an array of pair ids."""
    f, q, k, J = params.field, params.q, params.k, params.num_coeffs
    pn = params.point_count
    ys = [(ids // q ** (k - 1 - i)) % q for i in range(k)]
    yspan = q**k
    pts = [(ids // (yspan * pn ** (k - 1 - i))) % pn for i in range(k)]

    zidx = np.zeros(len(ids), dtype=np.int64)
    for j in range(J):
        acc = np.zeros(len(ids), dtype=np.int64)
        for i in range(k):
            acc = f.add_arr(acc, f.mul_arr(ys[i], mono[j][pts[i]]))
        zidx = zidx * q + acc

    good = np.ones(len(ids), dtype=bool)
    for i in range(k):
        good &= ys[i] != 0
        for i2 in range(i + 1, k):
            good &= pts[i] != pts[i2]
    return zidx, good


def _check_budget(params: ProblemParams, budget: Budget) -> None:
    if params.cell_count > budget.cells:
        raise BudgetExceededError(
            f"census needs q^J = {params.cell_count} cells, cap is {budget.cells}")
    if params.pair_count > budget.pairs:
        raise BudgetExceededError(
            f"census needs {params.pair_count} pair evaluations, cap is {budget.pairs}")


def _count_range(params: ProblemParams, lo: int, hi: int):
    """Fiber counts (all and good) for pair ids in [lo, hi)."""
    cells = params.cell_count
    mono = _monomial_table(params)
    counts = np.zeros(cells, dtype=np.int64)
    counts_good = np.zeros(cells, dtype=np.int64)
    for start in range(lo, hi, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, hi), dtype=np.int64)
        zidx, good = _z_and_good(params, ids, mono)
        counts += np.bincount(zidx, minlength=cells)
        counts_good += np.bincount(zidx[good], minlength=cells)
    return counts, counts_good


@dataclass
class RangeCensus:
    """Exact range sizes and fiber-size histograms for one instance.

    Histograms map fiber size -> number of z values with that size,
    including size 0, so totals over z always equal q^J.
    """

    params: ProblemParams
    range_size: int
    good_range_size: int
    histogram: dict[int, int]
    good_histogram: dict[int, int]
    duration: float = 0.0

    def _hist(self, scope: str) -> dict[int, int]:
        if scope == "all":
            return self.histogram
        if scope == "good":
            return self.good_histogram
        raise ValidationError(f"scope must be 'all' or 'good', got {scope!r}")

    def size(self, scope: str) -> int:
        return self.range_size if scope == "all" else self.good_range_size

    def success_probability(self, scope: str = "all") -> Fraction:
        """|range| / q^J, the best achievable identification probability."""
        self._hist(scope)
        return Fraction(self.size(scope), self.params.cell_count)

    def pair_total(self, scope: str = "all") -> int:
        return sum(size * mult for size, mult in self._hist(scope).items())

    def mean(self, scope: str = "all") -> Fraction:
        return Fraction(self.pair_total(scope), self.params.cell_count)

    def variance(self, scope: str = "all") -> Fraction:
        sq = sum(size * size * mult for size, mult in self._hist(scope).items())
        mu = self.mean(scope)
        return Fraction(sq, self.params.cell_count) - mu * mu

    def moment_stats(self, scope: str = "all") -> tuple[Fraction, Fraction]:
        return self.mean(scope), self.variance(scope)

    def to_json_dict(self) -> dict:
        p = self.params
        out = {
            "params": {"p": p.field.p, "r": p.field.r, "q": p.q,
                       "d": p.d, "k": p.k, "n": p.n},
            "range_size": self.range_size,
            "good_range_size": self.good_range_size,
            "histogram": sorted([s, m] for s, m in self.histogram.items()),
            "good_histogram": sorted([s, m] for s, m in self.good_histogram.items()),
            "duration_seconds": self.duration,
        }
        for scope in ("all", "good"):
            mu, var = self.moment_stats(scope)
            out[f"mean_{scope}"] = _fraction_dict(mu)
            out[f"variance_{scope}"] = _fraction_dict(var)
            out[f"success_{scope}"] = _fraction_dict(self.success_probability(scope))
        return out


def _fraction_dict(fr: Fraction) -> dict:
    return {"exact": f"{fr.numerator}/{fr.denominator}", "float": float(fr)}


def _census_job(args):
    params, lo, hi = args
    return _count_range(params, lo, hi)


def enumerate_census(params: ProblemParams, budget: Budget = DEFAULT_BUDGET,
                     workers: int = 1) -> RangeCensus:
    """Exact census of the Z map by full pair-space enumeration."""
    _check_budget(params, budget)
    start = time.perf_counter()
    total = params.pair_count
    if workers <= 1 or total < 4 * _CHUNK:
        counts, counts_good = _count_range(params, 0, total)
    else:
        bounds = np.linspace(0, total, workers + 1, dtype=np.int64)
        jobs = [(params, int(bounds[i]), int(bounds[i + 1])) for i in range(workers)]
        counts = np.zeros(params.cell_count, dtype=np.int64)
        counts_good = np.zeros(params.cell_count, dtype=np.int64)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for c, cg in pool.map(_census_job, jobs):
                counts += c
                counts_good += cg
    census = RangeCensus(
        params=params,
        range_size=int(np.count_nonzero(counts)),
        good_range_size=int(np.count_nonzero(counts_good)),
        histogram=_histogram(counts),
        good_histogram=_histogram(counts_good),
        duration=time.perf_counter() - start,
    )
    return census


def _histogram(counts: np.ndarray) -> dict[int, int]:
    sizes, mults = np.unique(counts, return_counts=True)
    return {int(s): int(m) for s, m in zip(sizes, mults)}


_census_cache: dict = {}


def cached_census(params: ProblemParams, budget: Budget = DEFAULT_BUDGET) -> RangeCensus:
    """Memoized enumerate_census; censuses are deterministic, so reuse is safe."""
    key = (params, budget)
    if key not in _census_cache:
        _census_cache[key] = enumerate_census(params, budget)
    return _census_cache[key]


def preimage_count(z, params: ProblemParams, scope: str = "all",
                   budget: Budget = DEFAULT_BUDGET) -> int:
    """|Z^-1(z)| (or its good-pair restriction) by direct scan."""
    if scope not in ("all", "good"):
        raise ValidationError(f"scope must be 'all' or 'good', got {scope!r}")
    if len(z) != params.num_coeffs:
        raise ValidationError(f"z must have length {params.num_coeffs}")
    check_indices(z, params.q, "z")
    if params.pair_count > budget.pairs:
        raise BudgetExceededError(
            f"fiber scan needs {params.pair_count} pair evaluations, cap is {budget.pairs}")
    target = tuple_to_index(z, params.q)
    mono = _monomial_table(params)
    total = params.pair_count
    hits = 0
    for start in range(0, total, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        zidx, good = _z_and_good(params, ids, mono)
        match = zidx == target
        if scope == "good":
            match &= good
        hits += int(match.sum())
    return hits


def success_probability(params: ProblemParams, scope: str = "all",
                        budget: Budget = DEFAULT_BUDGET) -> Fraction:
    return cached_census(params, budget).success_probability(scope)


def moment_stats(params: ProblemParams, scope: str = "all",
                 budget: Budget = DEFAULT_BUDGET) -> tuple[Fraction, Fraction]:
    return cached_census(params, budget).moment_stats(scope)


def z_index_array(params: ProblemParams, budget: Budget = DEFAULT_BUDGET):
    """Z index and goodness mask for every pair id, in canonical order."""
    if params.pair_count > budget.pairs:
        raise BudgetExceededError(
            f"pair table needs {params.pair_count} entries, cap is {budget.pairs}")
    mono = _monomial_table(params)
    ids = np.arange(params.pair_count, dtype=np.int64)
    return _z_and_good(params, ids, mono)


def fiber_representatives(params: ProblemParams, scope: str = "all",
                          budget: Budget = DEFAULT_BUDGET) -> np.ndarray:
    """Smallest pair id in each nonempty fiber, ordered by z index."""
    if scope not in ("all", "good"):
        raise ValidationError(f"scope must be 'all' or 'good', got {scope!r}")
    _check_budget(params, budget)
    mono = _monomial_table(params)
    total = params.pair_count
    sentinel = total
    reps = np.full(params.cell_count, sentinel, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        zidx, good = _z_and_good(params, ids, mono)
        if scope == "good":
            zidx, ids = zidx[good], ids[good]
        np.minimum.at(reps, zidx, ids)
    return reps[reps < sentinel]


def pair_from_id(params: ProblemParams, pair_id: int) -> PairXY:
    """Decode a canonical pair id into (x, y) tuples."""
    q, k, pn = params.q, params.k, params.point_count
    x_block, y_block = divmod(pair_id, q**k)
    y = index_to_tuple(y_block, q, k)
    pts = index_to_tuple(x_block, pn, k)
    if params.n == 1:
        return PairXY(pts, y)
    return PairXY(tuple(index_to_tuple(pt, q, params.n) for pt in pts), y)


# ---------------------------------------------------------------------------
# Multivariate range exploration.


@dataclass
class MultivariateCensus:
    """Range size of the multivariate Z map, exact or estimated.

    mode is "exact", "membership" (hit fraction of uniformly drawn z,
    unbiased) or "distinct_images" (distinct images of sampled pairs, a
    lower bound on the range size)."""

    params: ProblemParams
    mode: str
    range_size: int | None
    ratio: float
    ratio_exact: Fraction | None = None
    samples: int | None = None
    hits: int | None = None
    stderr: float | None = None
    ci95: tuple[float, float] | None = None
    duration: float = 0.0

    def to_json_dict(self) -> dict:
        p = self.params
        out = {
            "params": {"p": p.field.p, "r": p.field.r, "q": p.q,
                       "d": p.d, "k": p.k, "n": p.n, "J": p.num_coeffs},
            "mode": self.mode,
            "range_size": self.range_size,
            "ratio": self.ratio,
            "duration_seconds": self.duration,
        }
        if self.ratio_exact is not None:
            out["ratio_exact"] = f"{self.ratio_exact.numerator}/{self.ratio_exact.denominator}"
        if self.samples is not None:
            out.update(samples=self.samples, hits=self.hits,
                       stderr=self.stderr, ci95=list(self.ci95))
        return out


def _fiber_nonempty(params: ProblemParams, target: int, mono: np.ndarray) -> bool:
    total = params.pair_count
    for start in range(0, total, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        zidx, _ = _z_and_good(params, ids, mono)
        if np.any(zidx == target):
            return True
    return False


def multivariate_census(params: ProblemParams, mode: str = "exact",
                        samples: int = 2000, rng=None,
                        budget: Budget = DEFAULT_BUDGET) -> MultivariateCensus:
    """Exact or sampled size of the multivariate range in F_q^J.

    Sampling prefers the unbiased membership estimator when the pair
    space fits the budget; otherwise it counts distinct images of
    sampled pairs and reports a lower bound.
    """
    start = time.perf_counter()
    if mode == "exact":
        census = enumerate_census(params, budget)
        ratio = census.success_probability("all")
        return MultivariateCensus(
            params=params, mode="exact", range_size=census.range_size,
            ratio=float(ratio), ratio_exact=ratio,
            duration=time.perf_counter() - start)
    if mode != "sample":
        raise ValidationError(f"mode must be 'exact' or 'sample', got {mode!r}")
    if samples < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {samples}")
    if rng is None:
        rng = np.random.default_rng()
    mono = _monomial_table(params)
    if params.pair_count <= budget.pairs:
        hits = 0
        for _ in range(samples):
            target = int(rng.integers(0, params.cell_count))
            hits += _fiber_nonempty(params, target, mono)
        phat = hits / samples
        stderr = math.sqrt(phat * (1 - phat) / samples)
        ci = (max(phat - 1.96 * stderr, 0.0), min(phat + 1.96 * stderr, 1.0))
        return MultivariateCensus(
            params=params, mode="membership", range_size=None, ratio=phat,
            samples=samples, hits=hits, stderr=stderr, ci95=ci,
            duration=time.perf_counter() - start)
    if params.pair_count >= 1 << 62:
        raise BudgetExceededError("pair space too large even to sample pair ids")
    ids = rng.integers(0, params.pair_count, size=samples, dtype=np.int64)
    zidx, _ = _z_and_good(params, ids, mono)
    distinct = int(np.unique(zidx).size)
    return MultivariateCensus(
        params=params, mode="distinct_images", range_size=distinct,
        ratio=distinct / params.cell_count, samples=samples, hits=distinct,
        stderr=None, ci95=None, duration=time.perf_counter() - start)
