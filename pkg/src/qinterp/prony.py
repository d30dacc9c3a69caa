"""Classical inversion of power-sum vectors over GF(q).

Given z with z_j = sum_i y_i x_i^j for distinct x_i and nonzero y_i,
the x_i are recovered as the roots of the characteristic polynomial of
the k-th order linear recurrence the z_j satisfy; the recurrence
coefficients come from a k x k Hankel solve, and the weights y from a
transposed-Vandermonde solve.  When only z_0..z_d with d = 2k - 2 are
known, the missing entry z_{d+1} is guessed uniformly at random and the
pipeline retried.

All inputs and outputs use canonical element indices.  Failures signal
that z has no suitable preimage: every error below is a
NotInGoodRangeError except AttemptsExhaustedError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AttemptsExhaustedError,
    SingularHankelError,
    ValidationError,
    WrongRootCountError,
    ZeroWeightError,
)
from .fields import Field, FqPolynomial, poly_roots
from .zmap import ProblemParams, check_indices

DEFAULT_ATTEMPT_FACTOR = 40


@dataclass(frozen=True)
class CanonicalPair:
    """The sorted representative of a fiber: x strictly increasing by
    canonical index, all y nonzero; extension records the extra
    power-sum entry used when one had to be guessed."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    extension: int | None = None
    attempts: int = 1


def elementary_symmetric_all(field: Field, xs) -> list[int]:
    """e_0(xs), ..., e_k(xs) by the standard prefix recurrence."""
    e = [1] + [0] * len(xs)
    for m, x in enumerate(xs, start=1):
        for j in range(m, 0, -1):
            e[j] = field.add(e[j], field.mul(x, e[j - 1]))
    return e


def elementary_symmetric(field: Field, xs, j: int) -> int:
    """The j-th elementary symmetric polynomial of xs; e_0 = 1."""
    if not (0 <= j <= len(xs)):
        raise ValidationError(f"j must lie in [0, {len(xs)}], got {j}")
    return elementary_symmetric_all(field, xs)[j]


def _sign(field: Field, m: int) -> int:
    """(-1)^m as a field element."""
    return 1 if m % 2 == 0 else field.neg(1)


def check_sympoly_identity(field: Field, xs, i: int) -> bool:
    """x_i^k == -sum_{j=1..k} x_i^(k-j) (-1)^j e_j(xs); always true."""
    k = len(xs)
    if not (1 <= i <= k):
        raise ValidationError(f"i must lie in [1, {k}], got {i}")
    e = elementary_symmetric_all(field, xs)
    xi = xs[i - 1]
    acc = 0
    for j in range(1, k + 1):
        term = field.mul(field.pow(xi, k - j), field.mul(_sign(field, j), e[j]))
        acc = field.add(acc, term)
    return field.pow(xi, k) == field.neg(acc)


def power_sums(field: Field, xs, ys, j_max: int) -> list[int]:
    """z_j = sum_i y_i x_i^j for j = 0..j_max."""
    out = []
    for j in range(j_max + 1):
        acc = 0
        for x, y in zip(xs, ys):
            acc = field.add(acc, field.mul(y, field.pow(x, j)))
        out.append(acc)
    return out


def recurrence_coeffs_from_roots(field: Field, xs) -> list[int]:
    """a_j = -(-1)^(k-j) e_{k-j}(xs) for j = 0..k-1."""
    k = len(xs)
    e = elementary_symmetric_all(field, xs)
    return [field.neg(field.mul(_sign(field, k - j), e[k - j])) for j in range(k)]


def check_recurrence(field: Field, xs, ys, n_max: int) -> bool:
    """Extended power sums satisfy z_{n+k} = sum_j a_j z_{n+j} for n <= n_max."""
    k = len(xs)
    z = power_sums(field, xs, ys, n_max + k)
    a = recurrence_coeffs_from_roots(field, xs)
    for n in range(n_max + 1):
        acc = 0
        for j in range(k):
            acc = field.add(acc, field.mul(a[j], z[n + j]))
        if z[n + k] != acc:
            return False
    return True


def _solve_linear(field: Field, rows, rhs) -> list[int]:
    """Gauss-Jordan over F_q on a small dense system; raises ValueError
    on a singular matrix."""
    n = len(rows)
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = field.inv(aug[col][col])
        aug[col] = [field.mul(v, inv_p) for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [field.sub(v, field.mul(factor, w))
                          for v, w in zip(aug[i], aug[col])]
    return [aug[i][n] for i in range(n)]


def char_poly_from_z(field: Field, z, k: int) -> list[int]:
    """Recurrence coefficients (a_0, ..., a_{k-1}) from z_0..z_{2k-1}:
    solves the Hankel system H[i][j] = z_{i+j} against (z_k..z_{2k-1})."""
    if len(z) < 2 * k:
        raise ValidationError(f"need z_0..z_{2 * k - 1}, got {len(z)} entries")
    rows = [[z[i + j] for j in range(k)] for i in range(k)]
    rhs = [z[k + i] for i in range(k)]
    try:
        return _solve_linear(field, rows, rhs)
    except ValueError:
        raise SingularHankelError(
            "Hankel system is singular: no good preimage with these power sums"
        ) from None


def characteristic_poly(field: Field, a) -> FqPolynomial:
    """chi(X) = X^k - sum_j a_j X^j from recurrence coefficients a."""
    return FqPolynomial(field, [field.neg(v) for v in a] + [1])


def _invert_core(field: Field, z, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Recover the sorted good pair with power sums z_0..z_{2k-1}."""
    a = char_poly_from_z(field, z, k)
    chi = characteristic_poly(field, a)
    roots = poly_roots(chi, strategy="exhaustive")
    if len(roots) != k or any(m != 1 for m in roots.values()):
        raise WrongRootCountError(
            f"characteristic polynomial has {len(roots)} distinct roots, need {k}")
    xs = tuple(sorted(roots))
    rows = [[field.pow(x, i) for x in xs] for i in range(k)]
    ys = tuple(_solve_linear(field, rows, list(z[:k])))
    if any(y == 0 for y in ys):
        raise ZeroWeightError("recovered weights contain zero")
    assert power_sums(field, xs, ys, 2 * k - 1) == list(z[: 2 * k]), \
        "inversion postcondition violated"
    return xs, ys


def invert_z(z, params: ProblemParams) -> CanonicalPair:
    """Unique sorted good preimage of z for odd d with k = (d+1)/2.

    All 2k power sums are then available, so the recovery is
    deterministic.  Raises a NotInGoodRangeError subclass when z has no
    good preimage.
    """
    d, k = params.d, params.k
    if params.n != 1:
        raise ValidationError("inversion is defined for the univariate map")
    if d % 2 == 0 or k != (d + 1) // 2:
        raise ValidationError(f"need odd d with k = (d+1)/2, got d={d}, k={k}")
    if len(z) != d + 1:
        raise ValidationError(f"z must have length d+1 = {d + 1}")
    check_indices(z, params.q, "z")
    xs, ys = _invert_core(params.field, tuple(z), k)
    return CanonicalPair(xs, ys)


def invert_z_with_extension(z, params: ProblemParams, extension: int) -> CanonicalPair:
    """Deterministic pipeline for even d with k = d/2 + 1, using a given
    value for the unknown entry z_{d+1}."""
    d, k = params.d, params.k
    if params.n != 1:
        raise ValidationError("inversion is defined for the univariate map")
    if d % 2 != 0 or k != d // 2 + 1:
        raise ValidationError(f"need even d with k = d/2 + 1, got d={d}, k={k}")
    if len(z) != d + 1:
        raise ValidationError(f"z must have length d+1 = {d + 1}")
    check_indices(z, params.q, "z")
    if not (0 <= extension < params.q):
        raise ValidationError(f"extension must be an element index in [0, {params.q})")
    xs, ys = _invert_core(params.field, tuple(z) + (extension,), k)
    return CanonicalPair(xs, ys, extension=extension)


def invert_z_extended(z, params: ProblemParams, rng=None,
                      attempt_cap: int | None = None) -> CanonicalPair:
    """Random-extension inversion for even d with k = d/2 + 1.

    Draws z_{d+1} uniformly until the deterministic pipeline succeeds;
    each valid extension produces its unique sorted pair, so the result
    is uniform over valid extensions.  The default cap of 40 * k! draws
    makes a spurious AttemptsExhaustedError vanishingly unlikely for z
    in the good range.
    """
    if rng is None:
        rng = np.random.default_rng()
    cap = attempt_cap if attempt_cap is not None else DEFAULT_ATTEMPT_FACTOR * math.factorial(params.k)
    if cap < 1:
        raise ValidationError(f"attempt cap must be >= 1, got {cap}")
    for attempt in range(1, cap + 1):
        ext = int(rng.integers(0, params.q))
        try:
            pair = invert_z_with_extension(z, params, ext)
        except (SingularHankelError, WrongRootCountError, ZeroWeightError):
            continue
        return CanonicalPair(pair.x, pair.y, extension=ext, attempts=attempt)
    raise AttemptsExhaustedError(
        f"no valid extension found in {cap} draws; z may have no good preimage")


def count_valid_extensions(z, params: ProblemParams) -> int:
    """Number of z_{d+1} values for which the extension pipeline succeeds.

    Equals |Z^-1(z)^good| / k! because each valid extension owns one
    sorted pair.
    """
    hits = 0
    for ext in range(params.q):
        try:
            invert_z_with_extension(z, params, ext)
        except (SingularHankelError, WrongRootCountError, ZeroWeightError):
            continue
        hits += 1
    return hits
