"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored in the reduced power basis 1, z, ..., z^(phi(N)-1) modulo
the N-th cyclotomic polynomial, as an integer coefficient vector over a common
positive denominator.  Mixed-conductor operands are lifted to the lcm
conductor automatically, so zeta_3 and zeta_7 can be combined freely.
"""

from fractions import Fraction
from math import gcd

from .errors import StructureError

# ---------------------------------------------------------------------------
# conductor tables


def divisors(n):
    small, big = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                big.append(n // d)
        d += 1
    return small + big[::-1]


def euler_phi(n):
    count = 0
    for k in range(1, n + 1):
        if gcd(k, n) == 1:
            count += 1
    return count


def _poly_divexact_int(num, den):
    # exact division of integer polynomials, coefficient lists low-to-high
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c, r = divmod(num[i + len(den) - 1], den[-1])
        assert r == 0
        q[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert all(c == 0 for c in num)
    return q


_CYCLO_CACHE = {}


def cyclotomic_polynomial(n):
    """Integer coefficient list (low degree first) of the n-th cyclotomic
    polynomial, computed by dividing x^n - 1 by the lower-order factors."""
    if n in _CYCLO_CACHE:
        return _CYCLO_CACHE[n]
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in divisors(n)[:-1]:
        poly = _poly_divexact_int(poly, cyclotomic_polynomial(d))
    _CYCLO_CACHE[n] = poly
    return poly


_POWER_CACHE = {}


def _power_table(n):
    """Coordinates of zeta_n^j in the reduced power basis, for 0 <= j < max(n, 2*phi-1)."""
    if n in _POWER_CACHE:
        return _POWER_CACHE[n]
    phi = len(cyclotomic_polynomial(n)) - 1
    size = max(n, 2 * phi - 1)
    cyclo = cyclotomic_polynomial(n)
    table = []
    for j in range(size):
        if j < phi:
            vec = [0] * phi
            vec[j] = 1
        else:
            # zeta * previous, reduced via zeta^phi = -(c_0 + ... + c_{phi-1} zeta^{phi-1})
            prev = table[j - 1]
            vec = [0] + list(prev[:-1])
            top = prev[-1]
            if top:
                for i in range(phi):
                    vec[i] -= top * cyclo[i]
        table.append(tuple(vec))
    _POWER_CACHE[n] = table
    return table


# ---------------------------------------------------------------------------
# cyclotomic numbers


class CycNum:
    """An element of Q(zeta_n) in reduced power-basis form."""

    __slots__ = ("n", "den", "num", "_min")

    def __init__(self, n, den, num):
        # callers must pass a normalized representation; use make() otherwise
        self.n = n
        self.den = den
        self.num = num
        self._min = None

    @staticmethod
    def make(n, den, num):
        if n < 1:
            raise StructureError(f"conductor must be >= 1, got {n}")
        if den < 0:
            den, num = -den, [-c for c in num]
        g = den
        for c in num:
            g = gcd(g, c)
            if g == 1:
                break
        if g > 1:
            den //= g
            num = [c // g for c in num]
        return CycNum(n, den, tuple(num))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(x, n=1):
        x = Fraction(x)
        phi = len(cyclotomic_polynomial(n)) - 1
        num = [0] * phi
        num[0] = x.numerator
        return CycNum.make(n, x.denominator, num)

    def lift(self, n2):
        """Embed into Q(zeta_n2); requires n | n2."""
        if n2 == self.n:
            return self
        if n2 % self.n != 0:
            raise StructureError(f"cannot lift conductor {self.n} into {n2}")
        step = n2 // self.n
        table = _power_table(n2)
        phi2 = len(table[0])
        out = [0] * phi2
        for i, c in enumerate(self.num):
            if c:
                vec = table[(i * step) % n2]
                for k in range(phi2):
                    out[k] += c * vec[k]
        return CycNum.make(n2, self.den, out)

    # -- ring operations ---------------------------------------------------

    def _pair(self, other):
        if not isinstance(other, CycNum):
            other = CycNum.from_rational(other)
        if self.n == other.n:
            return self, other
        n = self.n * other.n // gcd(self.n, other.n)
        return self.lift(n), other.lift(n)

    def __add__(self, other):
        a, b = self._pair(other)
        num = [x * b.den + y * a.den for x, y in zip(a.num, b.num)]
        return CycNum.make(a.n, a.den * b.den, num)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.n, self.den, tuple(-c for c in self.num))

    def __sub__(self, other):
        a, b = self._pair(other)
        num = [x * b.den - y * a.den for x, y in zip(a.num, b.num)]
        return CycNum.make(a.n, a.den * b.den, num)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        phi = len(a.num)
        conv = [0] * (2 * phi - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        conv[i + j] += x * y
        table = _power_table(a.n)
        out = list(conv[:phi])
        for j in range(phi, 2 * phi - 1):
            c = conv[j]
            if c:
                vec = table[j]
                for k in range(phi):
                    out[k] += c * vec[k]
        return CycNum.make(a.n, a.den * b.den, out)

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        # extended Euclid against the cyclotomic polynomial over Q
        cyclo = [Fraction(c) for c in cyclotomic_polynomial(self.n)]
        a = [Fraction(c, self.den) for c in self.num]
        r0, r1 = cyclo, _poly_trim(a)
        t0, t1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
        lead = r1[0]
        inv = [c / lead for c in t1]
        phi = len(self.num)
        inv += [Fraction(0)] * (phi - len(inv))
        return _from_fraction_vec(self.n, inv[:phi])

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.from_rational(1, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- Galois ------------------------------------------------------------

    def galois(self, b):
        """Apply the automorphism zeta |-> zeta^b; requires gcd(b, n) = 1."""
        if gcd(b, self.n) != 1:
            raise StructureError(f"exponent {b} is not a unit modulo {self.n}")
        table = _power_table(self.n)
        phi = len(self.num)
        out = [0] * phi
        for i, c in enumerate(self.num):
            if c:
                vec = table[(i * b) % self.n]
                for k in range(phi):
                    out[k] += c * vec[k]
        return CycNum.make(self.n, self.den, out)

    # -- conductor reduction ------------------------------------------------

    def descend(self, m):
        """Rewrite with conductor m (requires m | n and membership in Q(zeta_m));
        returns None if the element does not lie in the subfield."""
        if m == self.n:
            return self
        if self.n % m != 0:
            return None
        solver = _descent_solver(self.n, m)
        target = [Fraction(c, self.den) for c in self.num]
        coeffs = solver(target)
        if coeffs is None:
            return None
        return _from_fraction_vec(m, coeffs)

    def min_form(self):
        """Equivalent element at the smallest conductor dividing n."""
        if self._min is None:
            for d in divisors(self.n):
                low = self.descend(d)
                if low is not None:
                    self._min = low
                    break
        return self._min

    # -- comparisons ---------------------------------------------------------

    def __bool__(self):
        return any(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = self._pair(other)
        return a.den == b.den and a.num == b.num

    def __hash__(self):
        m = self.min_form()
        return hash((m.n, m.den, m.num))

    def key(self):
        return (self.n, self.den, self.num)

    # -- conversions ---------------------------------------------------------

    def as_fraction(self):
        m = self.min_form()
        if m.n != 1:
            raise StructureError("not a rational number")
        return Fraction(m.num[0], m.den)

    def is_rational(self):
        return self.min_form().n == 1

    def __repr__(self):
        return f"CycNum({self.to_str()})"

    def to_str(self, symbol="z"):
        if not self:
            return "0"
        parts = []
        for i in range(len(self.num) - 1, -1, -1):
            c = Fraction(self.num[i], self.den)
            if c == 0:
                continue
            if i == 0:
                mon = None
            elif i == 1:
                mon = symbol
            else:
                mon = f"{symbol}^{i}"
            sign = "-" if c < 0 else "+"
            c = abs(c)
            if mon is None:
                body = str(c)
            elif c == 1:
                body = mon
            else:
                body = f"{c}*{mon}"
            parts.append((sign, body))
        sign, body = parts[0]
        text = body if sign == "+" else f"-{body}"
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _poly_trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] * inv
        q[i] = c
        if c:
            for j, d in enumerate(b):
                a[i + j] -= c * d
    return _poly_trim(q), _poly_trim(a[: len(b) - 1])


def _from_fraction_vec(n, vec):
    den = 1
    for c in vec:
        den = den * c.denominator // gcd(den, c.denominator)
    num = [int(c * den) for c in vec]
    return CycNum.make(n, den, num)


_DESCENT_CACHE = {}


def _descent_solver(n, m):
    """Solver expressing conductor-n coordinate vectors over the lifted
    power basis of Q(zeta_m); returns a function vec -> coeffs or None."""
    if (n, m) in _DESCENT_CACHE:
        return _DESCENT_CACHE[(n, m)]
    phi_n = len(cyclotomic_polynomial(n)) - 1
    phi_m = len(cyclotomic_polynomial(m)) - 1
    basis = []
    for i in range(phi_m):
        e = [0] * phi_m
        e[i] = 1
        basis.append(CycNum.make(m, 1, e).lift(n))
    # row-reduce the transpose system once: columns are the lifted basis vectors
    rows = []
    for r in range(phi_n):
        rows.append([Fraction(basis[i].num[r], basis[i].den) for i in range(phi_m)])

    def solve(target):
        # fresh elimination per call on an augmented copy (phi_n x (phi_m+1))
        aug = [row[:] + [t] for row, t in zip(rows, target)]
        pivots = []
        pr = 0
        for pc in range(phi_m):
            pivot = None
            for r in range(pr, phi_n):
                if aug[r][pc]:
                    pivot = r
                    break
            if pivot is None:
                continue
            aug[pr], aug[pivot] = aug[pivot], aug[pr]
            inv = 1 / aug[pr][pc]
            aug[pr] = [c * inv for c in aug[pr]]
            for r in range(phi_n):
                if r != pr and aug[r][pc]:
                    f = aug[r][pc]
                    aug[r] = [c - f * d for c, d in zip(aug[r], aug[pr])]
            pivots.append(pc)
            pr += 1
        for r in range(pr, phi_n):
            if aug[r][phi_m]:
                return None
        coeffs = [Fraction(0)] * phi_m
        for r, pc in enumerate(pivots):
            coeffs[pc] = aug[r][phi_m]
        return coeffs

    _DESCENT_CACHE[(n, m)] = solve
    return solve


# ---------------------------------------------------------------------------
# public helpers


def zeta(n, k=1):
    """The root of unity zeta_n^k as a CycNum of conductor n."""
    phi = len(cyclotomic_polynomial(n)) - 1
    vec = _power_table(n)[k % n]
    return CycNum.make(n, 1, list(vec))


def cyc(n, coeffs):
    """Build the element sum(coeffs[i] * zeta_n^i), reducing mod the
    cyclotomic polynomial; coeffs may exceed the basis length."""
    if n < 1:
        raise StructureError(f"conductor must be >= 1, got {n}")
    result = CycNum.from_rational(0, n)
    for i, c in enumerate(coeffs):
        c = Fraction(c)
        if c:
            result = result + zeta(n, i) * CycNum.from_rational(c, n)
    return result


ZERO = CycNum.from_rational(0)
ONE = CycNum.from_rational(1)


class GaloisUnit:
    """An element of Gal(Q(zeta_n)/Q): the automorphism zeta |-> zeta^b."""

    __slots__ = ("n", "b")

    def __init__(self, n, b):
        b %= n
        if n == 1:
            b = 1
        if gcd(b, n) != 1:
            raise StructureError(f"exponent {b} is not a unit modulo {n}")
        self.n = n
        self.b = b if b else 1

    def __mul__(self, other):
        if self.n != other.n:
            raise StructureError("conductor mismatch in Galois composition")
        return GaloisUnit(self.n, (self.b * other.b) % self.n)

    def apply(self, x):
        if isinstance(x, CycNum):
            if self.n % x.n == 0:
                return x.lift(self.n).galois(self.b)
            if x.n % self.n == 0:
                rest = x.n // self.n
                if gcd(rest, self.n) != 1:
                    raise StructureError(
                        "no canonical extension of the Galois unit to the element conductor")
                return x.galois(_crt(self.b, self.n, 1, rest))
            raise StructureError("incompatible conductors for Galois action")
        return x  # rationals are fixed

    def __eq__(self, other):
        return isinstance(other, GaloisUnit) and (self.n, self.b) == (other.n, other.b)

    def __hash__(self):
        return hash((self.n, self.b))

    def __repr__(self):
        return f"GaloisUnit({self.n}, {self.b})"


def _crt(a, m, b, n):
    # unique solution modulo m*n for coprime moduli
    g, p, _ = _ext_gcd(m, n)
    assert g == 1
    return (a + (b - a) * p % n * m) % (m * n)


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    t = (old_r - old_s * a) // b if b else 0
    return old_r, old_s, t


def galois_apply(unit, x):
    """Apply a GaloisUnit (or a bare exponent for the conductor of x)."""
    if isinstance(unit, GaloisUnit):
        return unit.apply(x)
    return x.galois(unit)
