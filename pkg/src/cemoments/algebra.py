"""Exact arithmetic substrate: integer polynomials in the formal dimension d,
rational polynomials in the block size M, and truncated power series in u.

Everything here is immutable and exact. Floats never enter; the only numeric
types are Python ints and fractions.Fraction. Series carry an explicit
truncation cap and refuse to report coefficients beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


Rational = Fraction

Coefficient = Union[Fraction, "MPolynomial"]


def _strip_trailing_zeros(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _format_poly(coeffs, var):
    """Render descending-power form like 2d^3+4d^2+10d+8 or 4M^2+4M."""
    if not coeffs:
        return "0"
    pieces = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = coeffs[power]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if power == 0:
            body = str(mag)
        else:
            head = "" if mag == 1 else str(mag)
            body = f"{head}{var}" if power == 1 else f"{head}{var}^{power}"
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += sign + body
    return out


@dataclass(frozen=True)
class DimPolynomial:
    """Integer-coefficient polynomial in the formal dimension d.

    coeffs[k] is the coefficient of d^k; the tuple carries no trailing zeros,
    so the zero polynomial is the empty tuple.
    """

    coeffs: tuple

    def __init__(self, coeffs=()):
        cleaned = _strip_trailing_zeros(int(c) for c in coeffs)
        object.__setattr__(self, "coeffs", cleaned)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, power):
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return 0

    @property
    def leading_coefficient(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, DimPolynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return DimPolynomial(
            self.coefficient(k) + other.coefficient(k) for k in range(n)
        )

    def __neg__(self):
        return DimPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, DimPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return DimPolynomial(c * other for c in self.coeffs)
        if not isinstance(other, DimPolynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return DimPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return DimPolynomial(out)

    __rmul__ = __mul__

    def eval_at(self, x):
        """Exact Horner evaluation at a rational (or integer) point."""
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        return _format_poly(self.coeffs, "d")

    def to_json(self):
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls(int(s) for s in data)


@dataclass(frozen=True)
class MPolynomial:
    """Polynomial in the block size M with exact rational coefficients."""

    coeffs: tuple

    def __init__(self, coeffs=()):
        cleaned = _strip_trailing_zeros(Fraction(c) for c in coeffs)
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def constant(cls, value):
        return cls((Fraction(value),))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, power):
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    @property
    def constant_term(self):
        return self.coefficient(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, MPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.coeffs
            return len(self.coeffs) == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPolynomial((other,))
        if not isinstance(other, MPolynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return MPolynomial(
            self.coefficient(k) + other.coefficient(k) for k in range(n)
        )

    __radd__ = __add__

    def __neg__(self):
        return MPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPolynomial((other,))
        if not isinstance(other, MPolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MPolynomial(c * other for c in self.coeffs)
        if not isinstance(other, MPolynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return MPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return MPolynomial(out)

    __rmul__ = __mul__

    def eval_at(self, m):
        m = Fraction(m)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * m + c
        return acc

    def __str__(self):
        # Rational coefficients render with an explicit slash, e.g. 1/2M^2.
        if not self.coeffs:
            return "0"
        return _format_poly(self.coeffs, "M")

    def to_json(self):
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls(Fraction(s) for s in data)


def _as_coefficient(value):
    if isinstance(value, MPolynomial):
        return value
    return Fraction(value)


def _coeff_is_zero(value):
    if isinstance(value, MPolynomial):
        return not value.coeffs
    return value == 0


def _coeff_eq(a, b):
    if isinstance(a, MPolynomial) or isinstance(b, MPolynomial):
        if not isinstance(a, MPolynomial):
            a = MPolynomial((a,)) if a != 0 else MPolynomial()
        return a == b
    return a == b


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in u known only through u^cap.

    Coefficients are Fractions or MPolynomials (mixing is allowed; sums and
    products promote as needed). Powers above cap are semantically unknown,
    not zero: arithmetic truncates to the smaller cap and coefficient() for
    a power above cap raises rather than returning 0.
    """

    cap: int
    terms: tuple

    def __init__(self, cap, terms=()):
        cap = int(cap)
        if cap < 0:
            raise ValueError("truncation cap must be >= 0")
        terms = [_as_coefficient(t) for t in terms]
        if len(terms) > cap + 1:
            raise ValueError("more terms than the cap allows")
        terms += [Fraction(0)] * (cap + 1 - len(terms))
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def zero(cls, cap):
        return cls(cap)

    @classmethod
    def single_term(cls, cap, power, coefficient):
        if power > cap:
            raise ValueError(f"power {power} exceeds cap {cap}")
        terms = [Fraction(0)] * (cap + 1)
        terms[power] = coefficient
        return cls(cap, terms)

    def coefficient(self, power):
        if power < 0:
            raise IndexError("negative power")
        if power > self.cap:
            raise IndexError(
                f"power {power} is beyond the truncation cap {self.cap}"
            )
        return self.terms[power]

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cap == other.cap and all(
            _coeff_eq(a, b) for a, b in zip(self.terms, other.terms)
        )

    def __hash__(self):
        return hash((self.cap, self.terms))

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        cap = min(self.cap, other.cap)
        return TruncatedSeries(
            cap, [self.terms[k] + other.terms[k] for k in range(cap + 1)]
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        cap = min(self.cap, other.cap)
        out = [Fraction(0)] * (cap + 1)
        for i in range(cap + 1):
            a = self.terms[i]
            if _coeff_is_zero(a):
                continue
            for j in range(cap + 1 - i):
                b = other.terms[j]
                if _coeff_is_zero(b):
                    continue
                out[i + j] = out[i + j] + a * b
        return TruncatedSeries(cap, out)

    __rmul__ = __mul__

    def scale(self, c):
        c = Fraction(c)
        return TruncatedSeries(self.cap, [t * c for t in self.terms])

    def is_zero(self):
        return all(_coeff_is_zero(t) for t in self.terms)

    def eval_at(self, u, m=None):
        """Exact value of the truncated sum at u (and M=m where needed)."""
        u = Fraction(u)
        acc = Fraction(0)
        for t in reversed(self.terms):
            if isinstance(t, MPolynomial):
                if m is None:
                    raise ValueError("series has M-dependence; m is required")
                t = t.eval_at(m)
            acc = acc * u + t
        return acc

    def to_json(self):
        encoded = []
        for t in self.terms:
            if isinstance(t, MPolynomial):
                encoded.append(t.to_json())
            else:
                encoded.append(str(t))
        return {"var": "u", "cap": self.cap, "terms": encoded}

    @classmethod
    def from_json(cls, data):
        if data.get("var") != "u":
            raise ValueError("expected a series in u")
        terms = []
        for item in data["terms"]:
            if isinstance(item, list):
                terms.append(MPolynomial.from_json(item))
            else:
                terms.append(Fraction(item))
        return cls(data["cap"], terms)


def poly_add(a, b):
    """Coefficient-wise exact sum, canonical form."""
    return a + b


def poly_eval(p, x):
    """Exact Horner evaluation of a polynomial at a rational point."""
    return p.eval_at(x)


def series_mul(a, b):
    """Cauchy product truncated at the smaller cap."""
    return a * b


def series_scale(a, c):
    """Term-wise scaling by an exact rational."""
    return a.scale(c)
