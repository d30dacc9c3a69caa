"""Exact arithmetic in the finite field GF(p^r).

An element is addressed by its canonical index in [0, q): the base-p
digits of the index are its polynomial-basis coefficients, constant
term first.  Index 0 is zero, index 1 is one, and the order induced by
the index is the lexicographic order used wherever a canonical
representative has to be picked.

A Field owns all arithmetic plus precomputed trace/character tables
and, for r > 1, discrete exp/log tables, so both scalar and
numpy-vectorized operations cost O(1) per element.  FieldElement is a
thin operator-overloading wrapper around an index.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import (
    BudgetExceededError,
    FieldMismatchError,
    NotPrimeError,
    ValidationError,
)

DEFAULT_FIELD_CAP = 1 << 20


def is_prime(n: int) -> bool:
    """Trial-division primality check; adequate for desk-scale q."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# Polynomial helpers over F_p (plain int lists, constant term first).  Only
# used to find and verify the field modulus.

def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_sub(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    return _fp_trim(out)


def _fp_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _fp_trim(out)


def _fp_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        _fp_trim(a)
    return a


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _fp_mod(a, b, p)
    if a:
        inv_lead = pow(a[-1], p - 2, p)
        a = [(c * inv_lead) % p for c in a]
    return a


def _fp_powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _fp_mod(base, m, p)
    while e:
        if e & 1:
            result = _fp_mod(_fp_mul(result, base, p), m, p)
        base = _fp_mod(_fp_mul(base, base, p), m, p)
        e >>= 1
    return result


def _fp_is_irreducible(f: list[int], p: int) -> bool:
    """Monic f of degree >= 1 has no irreducible factor of degree <= deg/2."""
    r = len(f) - 1
    if r == 1:
        return True
    x = [0, 1]
    frob = x
    for _ in range(r // 2):
        frob = _fp_powmod(frob, p, f, p)
        if len(_fp_gcd(f, _fp_sub(frob, x, p), p)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------


class Field:
    """The finite field GF(p^r) with q = p^r elements.

    Extension fields (r > 1) build O(q) exp/log tables at construction,
    so keep q small for them; prime fields are table-free and only pay
    for what they use.
    """

    def __init__(self, p: int, r: int = 1, *, cap: int = DEFAULT_FIELD_CAP):
        if r < 1:
            raise ValidationError(f"extension degree must be >= 1, got {r}")
        if not is_prime(p):
            raise NotPrimeError(f"characteristic {p} is not prime")
        q = p**r
        if q > cap:
            raise BudgetExceededError(f"q = {p}^{r} = {q} exceeds the field cap {cap}")
        self.p = p
        self.r = r
        self.q = q
        self.modulus = self._find_modulus()
        if r > 1:
            self._build_exp_log()

    # -- construction ------------------------------------------------------

    def _find_modulus(self) -> tuple[int, ...]:
        """Smallest (by canonical index of its low coefficients) monic
        irreducible polynomial of degree r over F_p."""
        p, r = self.p, self.r
        for m in range(p**r):
            f = list(self._digits(m)) + [1]
            if _fp_is_irreducible(f, p):
                return tuple(f)
        raise AssertionError("unreachable: irreducible polynomials exist in every degree")

    def _build_exp_log(self) -> None:
        g = self._find_generator()
        exp = np.zeros(self.q - 1, dtype=np.int64)
        cur = 1
        for i in range(self.q - 1):
            exp[i] = cur
            cur = self._mul_slow(cur, g)
        assert cur == 1
        log = np.zeros(self.q, dtype=np.int64)
        log[exp] = np.arange(self.q - 1)
        self._exp = exp
        self._log = log
        self.generator = g

    def _find_generator(self) -> int:
        n = self.q - 1
        factors = []
        m, f = n, 2
        while f * f <= m:
            if m % f == 0:
                factors.append(f)
                while m % f == 0:
                    m //= f
            f += 1
        if m > 1:
            factors.append(m)
        for cand in range(2, self.q):
            if all(self._pow_slow(cand, n // ell) != 1 for ell in factors):
                return cand
        raise AssertionError("unreachable: the multiplicative group is cyclic")

    def _digits(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.r):
            a, rem = divmod(a, self.p)
            out.append(rem)
        return tuple(out)

    def _mul_slow(self, a: int, b: int) -> int:
        """Table-free product, used only while bootstrapping the tables."""
        prod = _fp_mul(list(self._digits(a)), list(self._digits(b)), self.p)
        prod = _fp_mod(prod, list(self.modulus), self.p)
        out = 0
        for c in reversed(prod):
            out = out * self.p + c
        return out

    def _pow_slow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return result

    # -- scalar arithmetic on canonical indices -----------------------------

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        p, out, mult = self.p, 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.r == 1:
            return (-a) % self.p
        p, out, mult = self.p, 0, 1
        while a:
            out += ((p - a % p) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        """a^e for e >= 0, with 0^0 = 1."""
        if e < 0:
            raise ValidationError("negative exponents: invert first")
        if self.r == 1:
            return pow(a, e, self.p) if e else 1
        if a == 0:
            return 0 if e else 1
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    def inv(self, a: int) -> int:
        """Multiplicative inverse, computed as a^(q-2)."""
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # -- vectorized arithmetic on int64 arrays ------------------------------

    def add_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pt = 1
        for _ in range(self.r):
            out += (((a // pt) % self.p + (b // pt) % self.p) % self.p) * pt
            pt *= self.p
        return out

    def neg_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return (-a) % self.p
        out = np.zeros_like(a)
        pt = 1
        for _ in range(self.r):
            out += ((self.p - (a // pt) % self.p) % self.p) * pt
            pt *= self.p
        return out

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a * b) % self.p
        prod = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, prod)

    def pow_table(self, max_exp: int) -> np.ndarray:
        """Table t[j, a] = a^j for 0 <= j <= max_exp, with 0^0 = 1."""
        tbl = np.zeros((max_exp + 1, self.q), dtype=np.int64)
        tbl[0] = 1
        base = np.arange(self.q, dtype=np.int64)
        for j in range(1, max_exp + 1):
            tbl[j] = self.mul_arr(tbl[j - 1], base)
        return tbl

    # -- trace and additive character ---------------------------------------

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr(a) = a + a^p + ... + a^(p^(r-1)), an integer in [0, p)."""
        idx = np.arange(self.q, dtype=np.int64)
        if self.r == 1:
            return idx
        acc = idx
        t = idx
        for _ in range(1, self.r):
            t = self._pow_arr(t, self.p)
            acc = self.add_arr(acc, t)
        assert np.all(acc < self.p), "trace must land in the prime subfield"
        return acc

    def _pow_arr(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            # not used on hot paths; elementwise pow mod p
            return np.array([pow(int(v), e, self.p) for v in a.ravel()],
                            dtype=np.int64).reshape(a.shape)
        res = self._exp[(self._log[a] * e) % (self.q - 1)]
        return np.where(a == 0, 0, res)

    @cached_property
    def char_table(self) -> np.ndarray:
        """e(a) = exp(2*pi*i*Tr(a)/p) for every canonical index a."""
        return np.exp(2j * np.pi * self.trace_table / self.p)

    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def character(self, a: int) -> complex:
        return complex(self.char_table[a])

    # -- elements ------------------------------------------------------------

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, index)

    def from_coeffs(self, coeffs) -> "FieldElement":
        cs = list(coeffs)
        if len(cs) > self.r or any(not (0 <= c < self.p) for c in cs):
            raise ValidationError(f"coefficients must be {self.r} residues mod {self.p}")
        idx = 0
        for c in reversed(cs):
            idx = idx * self.p + c
        return FieldElement(self, idx)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return self._digits(a)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        return (FieldElement(self, i) for i in range(self.q))

    def random_index(self, rng) -> int:
        return int(rng.integers(0, self.q))

    def random_element(self, rng) -> "FieldElement":
        return FieldElement(self, self.random_index(rng))

    # -- identity ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.r, self.modulus))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, r={self.r})"


class FieldElement:
    """An element of a Field, identified by its canonical index."""

    __slots__ = ("field", "index")

    def __init__(self, field: Field, index: int):
        if not (0 <= index < field.q):
            raise ValidationError(f"index {index} out of range for q={field.q}")
        self.field = field
        self.index = int(index)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.index)

    def _other_index(self, other) -> int:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError("operands belong to different fields")
        return other.index

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.index, self._other_index(other)))

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.index, self._other_index(other)))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.index, self._other_index(other)))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.index, self._other_index(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field, self.field.pow(self.field.inv(self.index), -e))
        return FieldElement(self.field, self.field.pow(self.index, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.index))

    def trace(self) -> int:
        return self.field.trace(self.index)

    def character(self) -> complex:
        return self.field.character(self.index)

    def is_zero(self) -> bool:
        return self.index == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.index == other.index

    def __hash__(self) -> int:
        return hash((self.field, self.index))

    def __int__(self) -> int:
        return self.index

    __index__ = __int__

    def __repr__(self) -> str:
        return f"F{self.field.q}({self.index})"


# ---------------------------------------------------------------------------
# Univariate polynomials over F_q


class FqPolynomial:
    """Dense polynomial over a Field; coefficients are canonical indices,
    constant term first.  The zero polynomial has degree -1."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if any(not (0 <= c < field.q) for c in cs):
            raise ValidationError("coefficients must be canonical indices")
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x: int) -> int:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, FqPolynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"FqPolynomial(q={self.field.q}, coeffs={self.coeffs})"


def _ptrim(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _padd(f: Field, a: list[int], b: list[int]) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = f.add(out[i], v)
    return _ptrim(out)


def _psub(f: Field, a: list[int], b: list[int]) -> list[int]:
    return _padd(f, a, [f.neg(v) for v in b])


def _pmul(f: Field, a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = f.add(out[i + j], f.mul(ai, bj))
    return _ptrim(out)


def _pdivmod(f: Field, a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv_lead = f.inv(b[-1])
    quot = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        coef = f.mul(a[-1], inv_lead)
        shift = len(a) - 1 - db
        quot[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] = f.sub(a[shift + i], f.mul(coef, bi))
        _ptrim(a)
    return _ptrim(quot), a


def _pmod(f: Field, a: list[int], b: list[int]) -> list[int]:
    return _pdivmod(f, a, b)[1]


def _pgcd(f: Field, a: list[int], b: list[int]) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(f, a, b)
    if a:
        inv_lead = f.inv(a[-1])
        a = [f.mul(c, inv_lead) for c in a]
    return a


def _ppowmod(f: Field, base: list[int], e: int, m: list[int]) -> list[int]:
    result = [1]
    base = _pmod(f, base, m)
    while e:
        if e & 1:
            result = _pmod(f, _pmul(f, result, base), m)
        base = _pmod(f, _pmul(f, base, base), m)
        e >>= 1
    return result


def _pdiv_linear(f: Field, cs: list[int], a: int) -> tuple[list[int], int]:
    """Synthetic division by (X - a): returns (quotient, remainder)."""
    quot = [0] * (len(cs) - 1)
    acc = 0
    for i in range(len(cs) - 1, 0, -1):
        acc = f.add(f.mul(acc, a), cs[i])
        quot[i - 1] = acc
    rem = f.add(f.mul(acc, a), cs[0])
    return quot, rem


def _distinct_roots_randomized(f: Field, cs: list[int], rng) -> list[int]:
    """Distinct roots of cs via gcd with X^q - X and random splitting.

    Falls back to scanning a stuck factor after 8*deg failed splits, so
    termination never depends on luck.
    """
    xq = _ppowmod(f, [0, 1], f.q, cs)
    g = _pgcd(f, _psub(f, xq, [0, 1]), cs)
    roots: list[int] = []
    stack = [g]
    attempts = 8 * max(len(cs) - 1, 1)
    while stack:
        h = stack.pop()
        if len(h) <= 1:
            continue
        if len(h) == 2:
            # monic X + h0
            roots.append(f.neg(h[0]))
            continue
        split = None
        while attempts > 0 and split is None:
            attempts -= 1
            if f.p == 2:
                c = f.random_index(rng) or 1
                t = _pmod(f, [0, c], h)
                acc = t
                for _ in range(1, f.r):
                    t = _pmod(f, _pmul(f, t, t), h)
                    acc = _padd(f, acc, t)
                cand = _pgcd(f, acc, h)
            else:
                b = f.random_index(rng)
                s = _ppowmod(f, [b, 1], (f.q - 1) // 2, h)
                cand = _pgcd(f, _psub(f, s, [1]), h)
            if 1 < len(cand) < len(h):
                split = cand
        if split is None:
            roots.extend(x for x in range(f.q) if FqPolynomial(f, h)(x) == 0)
            continue
        stack.append(split)
        stack.append(_pdivmod(f, h, split)[0])
    return roots


def poly_roots(poly: FqPolynomial, strategy: str = "exhaustive", rng=None) -> dict[int, int]:
    """All roots of poly in its field, as {root index: multiplicity}.

    "exhaustive" evaluates at every field element; "randomized" takes the
    gcd with X^q - X and splits by random powering.  Both agree.
    """
    if poly.degree < 1:
        raise ValidationError("root finding needs a polynomial of degree >= 1")
    f = poly.field
    if strategy == "exhaustive":
        distinct = [x for x in range(f.q) if poly(x) == 0]
    elif strategy == "randomized":
        if rng is None:
            rng = np.random.default_rng()
        distinct = _distinct_roots_randomized(f, list(poly.coeffs), rng)
    else:
        raise ValidationError(f"unknown root-finding strategy {strategy!r}")
    out = {}
    for root in distinct:
        cs = list(poly.coeffs)
        mult = 0
        while len(cs) > 1:
            quot, rem = _pdiv_linear(f, cs, root)
            if rem != 0:
                break
            mult += 1
            cs = quot
        out[root] = mult
    return out
