"""Exact truncated power series over Q and Q(sqrt(3)), used as an oracle.

The closed-form generating functions are expanded here with exact
coefficient arithmetic and matched against the recurrence-built moment
sequences; the functional systems the recurrences satisfy are replayed
term by term. Everything is a finite list of exact coefficients: no
floating point, no symbolic engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, TreeDomainError
from . import moments

GF_UNIFORM_CAP = 200
GF_YULE_CAP = 100


class Sqrt3:
    """Element a + b*sqrt(3) of the quadratic field Q(sqrt(3))."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _coerce(self, other):
        if isinstance(other, Sqrt3):
            return other
        if isinstance(other, (int, Fraction)):
            return Sqrt3(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Sqrt3(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Sqrt3(-self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Sqrt3(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Sqrt3(
            self.a * other.a + 3 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - 3 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("zero or non-invertible element of Q(sqrt 3)")
        return Sqrt3(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __repr__(self):
        if self.b == 0:
            return "Sqrt3(%s)" % (self.a,)
        return "Sqrt3(%s, %s)" % (self.a, self.b)


SQRT3 = Sqrt3(0, 1)


class Series:
    """Truncated formal power series with exact coefficients.

    Coefficients are Fractions or Sqrt3 values. Binary operations truncate
    to the smaller operand order; differentiation drops one order and
    integration gains one. Orders never change silently beyond these rules.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise TreeDomainError("a series needs at least its constant term")

    @staticmethod
    def from_list(values, order=None, ring=Fraction):
        coeffs = [ring(v) if not isinstance(v, (Fraction, Sqrt3)) else v for v in values]
        if order is not None:
            if order + 1 < len(coeffs):
                coeffs = coeffs[: order + 1]
            else:
                coeffs = coeffs + [ring(0)] * (order + 1 - len(coeffs))
        return Series(coeffs)

    @staticmethod
    def constant(value, order, ring=Fraction):
        return Series.from_list([value], order=order, ring=ring)

    @staticmethod
    def z(order, ring=Fraction):
        return Series.from_list([0, 1], order=order, ring=ring)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, n: int):
        if not 0 <= n <= self.order:
            raise TreeDomainError(
                "coefficient %d outside truncation order %d" % (n, self.order)
            )
        return self.coeffs[n]

    def _zero(self):
        c = self.coeffs[0]
        return c - c

    def _one(self):
        zero = self._zero()
        return zero + 1

    def truncate(self, order: int) -> "Series":
        if order >= self.order:
            return self
        return Series(self.coeffs[: order + 1])

    def __eq__(self, other):
        return isinstance(other, Series) and self.coeffs == other.coeffs

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, Series):
            coeffs = list(self.coeffs)
            coeffs[0] = coeffs[0] + other
            return Series(coeffs)
        order = min(self.order, other.order)
        return Series([self.coeffs[i] + other.coeffs[i] for i in range(order + 1)])

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Series):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([c * other for c in self.coeffs])
        order = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(order + 1):
            acc = a[0] * b[n]
            for i in range(1, n + 1):
                acc = acc + a[i] * b[n - i]
            out.append(acc)
        return Series(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise TreeDomainError("negative series powers are not supported")
        out = Series([self._one()] + [self._zero()] * self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def inverse(self) -> "Series":
        c0 = self.coeffs[0]
        if not c0:
            raise TreeDomainError("cannot invert a series with zero constant term")
        inv0 = 1 / c0 if isinstance(c0, Sqrt3) else Fraction(1) / c0
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = self._zero()
            for i in range(1, n + 1):
                if i < len(self.coeffs):
                    acc = acc + self.coeffs[i] * out[n - i]
            out.append(-inv0 * acc)
        return Series(out)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, Sqrt3):
                return self * other.inverse()
            return self * (Fraction(1) / Fraction(other))
        return (self * other.inverse()).truncate(min(self.order, other.order))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def sqrt(self) -> "Series":
        """Square root by Newton iteration with a doubling precision
        schedule; the result is re-squared as a self-check."""
        c0 = self.coeffs[0]
        if isinstance(c0, Sqrt3):
            if c0 != 1:
                raise TreeDomainError("series sqrt over Q(sqrt 3) needs constant term 1")
        else:
            if c0 != 1:
                root = _fraction_sqrt(c0)
                if root is None:
                    raise TreeDomainError(
                        "series sqrt needs constant term 1 or a rational square"
                    )
                scaled = self * (Fraction(1) / c0)
                return scaled.sqrt() * root
        target = self.order
        y = Series([self._one()])
        while y.order < target:
            step = min(2 * y.order + 1, target)
            padded = Series(list(y.coeffs) + [self._zero()] * (step - y.order))
            y = (padded + self.truncate(step) * padded.inverse()) * Fraction(1, 2)
        check = y * y
        if check.coeffs != self.truncate(check.order).coeffs:
            raise ArithmeticError("series sqrt failed its squaring check")
        return y

    def differentiate(self) -> "Series":
        if self.order < 1:
            raise TreeDomainError("cannot differentiate an order-0 series")
        return Series([self.coeffs[i] * i for i in range(1, self.order + 1)])

    def integrate(self) -> "Series":
        out = [self._zero()]
        for i, c in enumerate(self.coeffs):
            out.append(c / (i + 1))
        return Series(out)

    def compose(self, inner: "Series") -> "Series":
        """Substitute ``inner`` (zero constant term) into this series."""
        if inner.coeffs[0]:
            raise TreeDomainError("composition needs a zero inner constant term")
        order = min(self.order, inner.order)
        inner = inner.truncate(order)
        zero = inner._zero()
        acc = Series([zero] * (order + 1))
        for c in reversed(self.coeffs[: order + 1]):
            acc = acc * inner + c
        return acc

    def shift_up(self, k: int = 1) -> "Series":
        """Multiply by z^k (order grows by k)."""
        zero = self._zero()
        return Series([zero] * k + list(self.coeffs))

    def shift_down(self, k: int = 1) -> "Series":
        """Divide by z^k; the dropped coefficients must vanish."""
        if any(self.coeffs[i] for i in range(min(k, len(self.coeffs)))):
            raise TreeDomainError("cannot divide by z^%d: low-order terms nonzero" % k)
        if self.order < k:
            raise TreeDomainError("series too short to shift down by %d" % k)
        return Series(self.coeffs[k:])

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return "Series([%s%s], order=%d)" % (head, ", ..." if self.order > 5 else "", self.order)


def _fraction_sqrt(value: Fraction):
    if value <= 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


# ---------------------------------------------------------------------------
# Named expansions

def geometric(order: int, ring=Fraction) -> Series:
    """1/(1-z)."""
    return Series([ring(1)] * (order + 1))


def log_one_minus_z(order: int, ring=Fraction) -> Series:
    """log(1-z), built by integrating -1/(1-z)."""
    return (-geometric(order - 1, ring)).integrate()


def sin_taylor(order: int, ring=Fraction) -> Series:
    out = [ring(0)] * (order + 1)
    sign = 1
    for k in range(1, order + 1, 2):
        out[k] = ring(sign) / math.factorial(k)
        sign = -sign
    return Series(out)


def cos_taylor(order: int, ring=Fraction) -> Series:
    out = [ring(0)] * (order + 1)
    sign = 1
    for k in range(0, order + 1, 2):
        out[k] = ring(sign) / math.factorial(k)
        sign = -sign
    return Series(out)


def sqrt_one_minus(multiple: int, order: int) -> Series:
    """sqrt(1 - multiple*z)."""
    return Series.from_list([1, -multiple], order=order).sqrt()


def catalan_gf(order: int) -> Series:
    """C(z) = (1 - sqrt(1-4z)) / (2z)."""
    r = sqrt_one_minus(4, order + 1)
    return (1 - r).shift_down(1) * Fraction(1, 2)


def labeled_topology_egf(order: int) -> Series:
    """1 - sqrt(1-2z); coefficient n is (number of labeled topologies)/n!."""
    return 1 - sqrt_one_minus(2, order)


def gf_uniform(which: str, order: int, cap: int = GF_UNIFORM_CAP) -> Series:
    """Closed-form Catalan-weighted generating functions, uniform model.

    'R' and 'T' carry C_{n-1} E[R_n] and C_{n-1} E[T_n]; 'V' and 'U' carry
    C_{n-1} E[T_n R_n] and C_{n-1} E[T_n^2]. The R form solves the root
    fixed-point equation g = g^2 + zC as a quadratic (g = R + zC), giving
    R = (sqrt(1-4z) - sqrt(2 sqrt(1-4z) - 1)) / 2, and T = R / sqrt(1-4z).
    """
    if order > cap:
        raise CapacityError("uniform GF expansion capped at order %d" % cap)
    pad = order + 4
    r = sqrt_one_minus(4, pad)
    w = (2 * r - 1).sqrt()
    if which == "R":
        return ((r - w) * Fraction(1, 2)).truncate(order)
    if which == "T":
        return ((r - w) * Fraction(1, 2) * r.inverse()).truncate(order)
    q = (-2 * r + 4 * w - 1).sqrt()
    if which == "V":
        num = -w + r * (-r + w - q + 3) - 1
        return (num * Fraction(1, 2) * (r * w).inverse()).truncate(order)
    if which == "U":
        r_inv = r.inverse()
        w_inv = w.inverse()
        middle = (-2 * q * w_inv + q + 4 * w_inv + 3) * r_inv
        cubic = r_inv * r_inv * r_inv
        return ((middle - cubic - 6 * w_inv + 1) * Fraction(1, 2)).truncate(order)
    raise TreeDomainError("unknown uniform generating function %r" % (which,))


def gf_yule_R(order: int, cap: int = GF_YULE_CAP) -> Series:
    """Mean-root generating function under the Yule model, in Q(sqrt 3):

        R(z) = 2 z sin(u) / ((z-1) (sqrt(3) cos(u) + sin(u))),
        u = (sqrt(3)/2) log(1-z).

    Every coefficient must come out rational; a surviving sqrt(3) part
    would mean the expansion is wrong.
    """
    if order > cap:
        raise CapacityError("Yule GF expansion capped at order %d" % cap)
    pad = order + 2
    log_series = log_one_minus_z(pad)
    u = Series([Sqrt3(0, Fraction(1, 2)) * c for c in log_series.coeffs])
    sin_u = sin_taylor(pad, ring=lambda v: Sqrt3(Fraction(v))).compose(u)
    cos_u = cos_taylor(pad, ring=lambda v: Sqrt3(Fraction(v))).compose(u)
    z = Series.z(pad, ring=lambda v: Sqrt3(Fraction(v)))
    numerator = z * sin_u * 2
    denominator = (z - 1) * (sin_u + cos_u * SQRT3)
    return (numerator * denominator.inverse()).truncate(order)


def yule_mean_root_coefficients(order: int) -> list:
    """Rational coefficients of gf_yule_R; raises if any sqrt(3) part survives."""
    series = gf_yule_R(order)
    out = []
    for n, c in enumerate(series.coeffs):
        if not c.is_rational:
            raise ArithmeticError(
                "coefficient %d of the Yule root GF has a sqrt(3) component" % n
            )
        out.append(c.a)
    return out


# ---------------------------------------------------------------------------
# Functional-system verification

@dataclass
class SystemCheck:
    system: str
    equation: str
    order_checked: int
    first_violation: int | None

    @property
    def ok(self) -> bool:
        return self.first_violation is None


@dataclass
class SystemReport:
    order: int
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def violations(self):
        return [c for c in self.checks if not c.ok]


def _first_nonzero(series: Series, upto: int):
    for n in range(min(upto, series.order) + 1):
        if series.coeffs[n]:
            return n
    return None


def verify_functional_systems(order: int, cap: int = GF_UNIFORM_CAP) -> SystemReport:
    """Replay the three functional systems on recurrence-built series.

    The uniform systems are polynomial identities among the Catalan-weighted
    series; the Yule system is differential, checked with denominators
    cleared by z(1-z). Any nonzero residual coefficient is a violation.
    """
    if order > cap:
        raise CapacityError("system verification capped at order %d" % cap)
    checks = []

    useq = moments.uniform_sequences(order)
    mkseries = lambda values: Series.from_list(
        [0] + [values[n] for n in range(1, order + 1)]
    )
    R = mkseries(useq.rt) - mkseries(useq.cat)         # Catalan-weighted E[R]
    T = mkseries(useq.t)
    St = mkseries(useq.st)
    Vt = mkseries(useq.vt)
    U = mkseries(useq.u)
    P = mkseries(useq.cat)                             # z C(z)
    Rt = R + P
    S = St - 2 * R - P
    V = Vt - T
    z = Series.z(order)

    residual = R - (R * R + 2 * P * R + P * P)
    checks.append(SystemCheck("S1", "root fixed point", residual.order,
                              _first_nonzero(residual, residual.order)))
    residual = T - (2 * P * T + R)
    checks.append(SystemCheck("S1", "total from root", residual.order,
                              _first_nonzero(residual, residual.order)))

    residual = (St - z) - (St * St + 2 * Rt * Rt + P * P)
    checks.append(SystemCheck("S2", "second moment of root", residual.order,
                              _first_nonzero(residual, residual.order)))
    residual = Vt - (2 * Vt * Rt + 2 * P * T + St - Rt)
    checks.append(SystemCheck("S2", "mixed moment", residual.order,
                              _first_nonzero(residual, residual.order)))
    residual = U - (2 * P * U + 2 * T * T + 2 * V - S)
    checks.append(SystemCheck("S2", "second moment of total", residual.order,
                              _first_nonzero(residual, residual.order)))

    yseq = moments.yule_sequences(order)
    mkyule = lambda h: Series.from_list(
        [0] + [Fraction(h[n], yseq.fact[n]) for n in range(1, order + 1)]
    )
    Ry = mkyule(yseq.hr)
    Ty = mkyule(yseq.ht)
    Sy = Series.from_list([0] + [
        Fraction(yseq.plain("s", n), yseq.fact[n]) for n in range(1, order + 1)
    ])
    Vy = mkyule(yseq.hv)
    Uy = mkyule(yseq.hu)
    zy = Series.z(order)
    one_minus_z = 1 - zy

    # z(1-z) T' - (1+z) T = z(1-z) R' - (1-z) R
    lhs = zy * one_minus_z * Ty.differentiate() - (1 + zy) * Ty
    rhs = zy * one_minus_z * Ry.differentiate() - one_minus_z * Ry
    residual = lhs - rhs
    checks.append(SystemCheck("S3", "mean total", residual.order,
                              _first_nonzero(residual, residual.order)))

    # z(1-z) V' - (2R(1-z) + 1 + z) V = (1-z)(2TR + zS' - S) + 2zT
    lhs = zy * one_minus_z * Vy.differentiate() - (2 * Ry * one_minus_z + 1 + zy) * Vy
    rhs = one_minus_z * (2 * Ty * Ry + zy * Sy.differentiate() - Sy) + 2 * zy * Ty
    residual = lhs - rhs
    checks.append(SystemCheck("S3", "mixed moment", residual.order,
                              _first_nonzero(residual, residual.order)))

    # z(1-z) U' - (1+z) U = (1-z)(2T^2 + 2zV' - 2V - zS' + S)
    lhs = zy * one_minus_z * Uy.differentiate() - (1 + zy) * Uy
    rhs = one_minus_z * (
        2 * Ty * Ty + 2 * zy * Vy.differentiate() - 2 * Vy
        - zy * Sy.differentiate() + Sy
    )
    residual = lhs - rhs
    checks.append(SystemCheck("S3", "second moment of total", residual.order,
                              _first_nonzero(residual, residual.order)))

    return SystemReport(order, checks)
