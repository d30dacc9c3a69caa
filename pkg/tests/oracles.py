"""Independent brute-force references used to cross-check the library.

TinyField reimplements GF(p^r) arithmetic directly on coefficient
tuples.  It shares only the modulus data with the production Field, so
values computed here exercise a genuinely different code path.
"""

import itertools


class TinyField:
    """Minimal GF(p^r) arithmetic on canonical indices, coefficient-based."""

    def __init__(self, p, r, modulus):
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = tuple(modulus)

    @classmethod
    def of(cls, field):
        return cls(field.p, field.r, field.modulus)

    def to_coeffs(self, idx):
        out = []
        for _ in range(self.r):
            idx, rem = divmod(idx, self.p)
            out.append(rem)
        return out

    def to_index(self, coeffs):
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        return idx

    def add(self, a, b):
        ca, cb = self.to_coeffs(a), self.to_coeffs(b)
        return self.to_index([(x + y) % self.p for x, y in zip(ca, cb)])

    def neg(self, a):
        return self.to_index([(-x) % self.p for x in self.to_coeffs(a)])

    def mul(self, a, b):
        ca, cb = self.to_coeffs(a), self.to_coeffs(b)
        prod = [0] * (2 * self.r - 1)
        for i, x in enumerate(ca):
            for j, y in enumerate(cb):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        # reduce by the monic modulus
        for top in range(len(prod) - 1, self.r - 1, -1):
            coef = prod[top]
            if coef:
                prod[top] = 0
                shift = top - self.r
                for t in range(self.r + 1):
                    prod[shift + t] = (prod[shift + t] - coef * self.modulus[t]) % self.p
        return self.to_index(prod[: self.r])

    def pow(self, a, e):
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result


def poly_ext_gcd_inverse(tf, a_idx):
    """Inverse of a nonzero element via extended Euclid on coefficient
    polynomials over F_p (independent of the exponentiation route)."""
    p = tf.p

    def trim(f):
        while f and f[-1] == 0:
            f.pop()
        return f

    def divmod_poly(a, b):
        a = list(a)
        inv_lead = pow(b[-1], p - 2, p)
        quot = [0] * max(len(a) - len(b) + 1, 0)
        while len(a) >= len(b) and a:
            coef = (a[-1] * inv_lead) % p
            shift = len(a) - len(b)
            quot[shift] = coef
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - coef * bi) % p
            trim(a)
        return trim(quot), a

    def sub_mul(a, q, b):
        out = list(a) + [0] * max(len(q) + len(b) - 1 - len(a), 0)
        for i, qi in enumerate(q):
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] - qi * bj) % p
        return trim(out)

    r0, r1 = trim(list(tf.modulus)), trim(tf.to_coeffs(a_idx))
    s0, s1 = [], [1]
    while r1:
        q, rem = divmod_poly(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub_mul(s0, q, s1)
    assert len(r0) == 1, "element must be a unit"
    scale = pow(r0[0], p - 2, p)
    inv = [(c * scale) % p for c in s0]
    inv = inv + [0] * (tf.r - len(inv))
    return tf.to_index(inv[: tf.r])


def oracle_z(tf, x, y, d):
    """Power sums sum_i y_i x_i^j for j = 0..d."""
    out = []
    for j in range(d + 1):
        acc = 0
        for xi, yi in zip(x, y):
            acc = tf.add(acc, tf.mul(yi, tf.pow(xi, j)))
        out.append(acc)
    return tuple(out)


def oracle_census(tf, d, k):
    """Fiber sizes over the full pair space: (all, good) dicts z -> count."""
    counts, good_counts = {}, {}
    for x in itertools.product(range(tf.q), repeat=k):
        x_good = len(set(x)) == len(x)
        for y in itertools.product(range(tf.q), repeat=k):
            z = oracle_z(tf, x, y, d)
            counts[z] = counts.get(z, 0) + 1
            if x_good and all(y):
                good_counts[z] = good_counts.get(z, 0) + 1
    return counts, good_counts


def oracle_multivariate_range(tf, n, d, k, exponents):
    """Distinct images of the multivariate map, by full enumeration."""
    points = list(itertools.product(range(tf.q), repeat=n))
    images = set()
    for pts in itertools.product(points, repeat=k):
        monomials = [[_monomial(tf, pt, e) for e in exponents] for pt in pts]
        for y in itertools.product(range(tf.q), repeat=k):
            z = []
            for jcol in range(len(exponents)):
                acc = 0
                for i in range(k):
                    acc = tf.add(acc, tf.mul(y[i], monomials[i][jcol]))
                z.append(acc)
            images.add(tuple(z))
    return images


def _monomial(tf, point, exps):
    acc = 1
    for xt, jt in zip(point, exps):
        acc = tf.mul(acc, tf.pow(xt, jt))
    return acc


def oracle_distinct_roots(tf, coeffs):
    """Roots by evaluating at every field element."""
    roots = []
    for x in range(tf.q):
        acc = 0
        for c in reversed(coeffs):
            acc = tf.add(tf.mul(acc, x), c)
        if acc == 0:
            roots.append(x)
    return roots
