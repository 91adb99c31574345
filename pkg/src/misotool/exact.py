"""Exact Gaussian-rational scalars.

A :class:`GaussianRational` is a number ``(a + b i) / d`` with integers
``a``, ``b`` and a positive denominator ``d``, always kept in lowest terms.
Instances are immutable and interoperate with ``int`` and
``fractions.Fraction``, so numpy object arrays of them support ``@``,
``sum``, ``.conj()`` and friends without any wrapper class.
"""

from fractions import Fraction
from math import gcd, isfinite
import numbers

__all__ = ["GaussianRational", "gq"]


class GaussianRational:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re = _to_fraction(re)
        im = _to_fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        g = gcd(a, b, d)
        self._a, self._b, self._d = a // g, b // g, d // g

    @classmethod
    def _raw(cls, a, b, d):
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(a, b, d)
        if g != 1:
            a, b, d = a // g, b // g, d // g
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @classmethod
    def from_number(cls, x):
        """Convert ``x`` exactly. Floats convert to their exact dyadic value."""
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not numbers here")
        if isinstance(x, numbers.Rational):
            return cls._raw(int(x.numerator), 0, int(x.denominator))
        if isinstance(x, numbers.Complex):
            z = complex(x)
            return cls(Fraction(z.real), Fraction(z.imag))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    @property
    def real(self):
        return Fraction(self._a, self._d)

    @property
    def imag(self):
        return Fraction(self._b, self._d)

    def conjugate(self):
        return GaussianRational._raw(self._a, -self._b, self._d)

    def abs2(self):
        """``|z|**2`` as an exact Fraction."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __abs__(self):
        return float(self.abs2()) ** 0.5

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussianRational._raw(other.numerator, 0, other.denominator)
        if isinstance(other, numbers.Rational) and not isinstance(other, bool):
            return GaussianRational._raw(int(other.numerator), 0, int(other.denominator))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return GaussianRational._raw(self._a + o._a, self._b + o._b, self._d)
        return GaussianRational._raw(
            self._a * o._d + o._a * self._d,
            self._b * o._d + o._b * self._d,
            self._d * o._d,
        )

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, e = self._a, self._b, o._a, o._b
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("GaussianRational division by zero")
        # z / w = z * conj(w) * d_w^2 / (a_w^2 + b_w^2) / d_w
        n = o._a * o._a + o._b * o._b
        c, e = o._a, -o._b
        a, b = self._a, self._b
        return GaussianRational._raw(
            (a * c - b * e) * o._d, (a * e + b * c) * o._d, self._d * n
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GaussianRational._raw(1, 0, 1) / self) ** (-n)
        result = GaussianRational._raw(1, 0, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, numbers.Complex) and not isinstance(other, bool):
                return complex(self) == complex(other)
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __complex__(self):
        return complex(Fraction(self._a, self._d), Fraction(self._b, self._d))

    def __float__(self):
        if self._b != 0:
            raise TypeError("GaussianRational with nonzero imaginary part")
        return float(Fraction(self._a, self._d))

    def __repr__(self):
        return f"GaussianRational({self.real!s}, {self.imag!s})"

    def __str__(self):
        if self._b == 0:
            return str(self.real)
        return f"({self.real}{'+' if self._b > 0 else '-'}{abs(self.imag)}i)"


def _to_fraction(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not isfinite(x):
            raise ValueError("non-finite value has no exact representation")
        return Fraction(x)
    if isinstance(x, numbers.Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, numbers.Real):
        return _to_fraction(float(x))
    raise TypeError(f"expected a real number, got {type(x).__name__}")


def gq(re=0, im=0):
    """Shorthand constructor: ``gq(1, -2)`` is ``1 - 2i``."""
    return GaussianRational(re, im)
