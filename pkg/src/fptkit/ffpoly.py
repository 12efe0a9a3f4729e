"""Prime-field arithmetic and sparse multivariate polynomials over F_p.

Polynomials are immutable maps ``exponent tuple -> coefficient`` with
coefficients stored as least residues in ``[1, p-1]`` and keys kept in
lexicographic order, so equal polynomials have equal term maps.

The ``*_reduced`` functions work modulo the Frobenius bracket power
``m^[q] = (X_1^q, ..., X_d^q)``.  Because that ideal is monomial, reducing
a polynomial just deletes every term with some exponent ``>= q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NegativeExponent, PolySyntaxError, UnknownVariable

__all__ = [
    "PrimeChar",
    "BracketLevel",
    "PolyRing",
    "SparsePoly",
    "BracketArith",
    "is_prime",
    "binom_mod_p",
    "parse_poly",
    "reduce_mod_bracket",
    "mul_reduced",
    "pow_reduced",
]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for every n < 3.3e24)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeChar:
    """The characteristic ``p`` of the base field."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"characteristic must be a prime, got {self.p!r}")

    def __int__(self):
        return self.p


def _as_prime(p) -> int:
    if isinstance(p, PrimeChar):
        return p.p
    return PrimeChar(p).p


@dataclass(frozen=True)
class BracketLevel:
    """Frobenius level ``q = p^e`` with ``e >= 1``."""

    p: int
    e: int
    q: int = field(init=False)

    def __post_init__(self):
        p = _as_prime(self.p)
        object.__setattr__(self, "p", p)
        if not isinstance(self.e, int) or self.e < 1:
            raise ValueError(f"level exponent must be >= 1, got {self.e!r}")
        object.__setattr__(self, "q", p**self.e)


def binom_mod_p(n: int, k: int, p) -> int:
    """``C(n, k) mod p`` via Lucas' theorem on base-p digits."""
    p = _as_prime(p)
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        # small binomial over digits < p: exact integer then reduce
        num = den = 1
        for i in range(kd):
            num = num * (nd - i) % p
            den = den * (i + 1) % p
        result = result * num * pow(den, p - 2, p) % p
        n //= p
        k //= p
    return result


@dataclass(frozen=True)
class PolyRing:
    """``F_p[X_1, ..., X_d]`` with named variables."""

    p: int
    variables: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", _as_prime(self.p))
        names = tuple(self.variables)
        if not names:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not _IDENT.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")
        object.__setattr__(self, "variables", names)

    @property
    def d(self) -> int:
        return len(self.variables)

    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})

    def one(self) -> "SparsePoly":
        return SparsePoly(self, {(0,) * self.d: 1})

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> "SparsePoly":
        return SparsePoly(self, {tuple(exps): coeff})

    def var(self, name_or_index) -> "SparsePoly":
        i = name_or_index if isinstance(name_or_index, int) else self.variables.index(name_or_index)
        exps = [0] * self.d
        exps[i] = 1
        return self.monomial(exps)

    def parse(self, text: str) -> "SparsePoly":
        return parse_poly(text, self.variables, self.p)


class SparsePoly:
    """Immutable sparse polynomial over a :class:`PolyRing`."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, int] | Iterable = ()):
        p, d = ring.p, ring.d
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != d or any((not isinstance(x, int)) or x < 0 for x in exps):
                raise ValueError(f"bad exponent vector {exps} for {d} variables")
            acc[exps] = acc.get(exps, 0) + c
        self.ring = ring
        self._terms = {k: acc[k] % p for k in sorted(acc) if acc[k] % p}
        self._hash = None

    @classmethod
    def _clean(cls, ring: PolyRing, terms: dict) -> "SparsePoly":
        # terms already reduced mod p with no zero coefficients
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = {k: terms[k] for k in sorted(terms)}
        obj._hash = None
        return obj

    @property
    def terms(self) -> Mapping[tuple, int]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, int):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, tuple(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, int):
            return SparsePoly(self.ring, {(0,) * self.ring.d: other})
        raise TypeError(f"cannot combine SparsePoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        p = self.ring.p
        for k, c in other._terms.items():
            v = (acc.get(k, 0) + c) % p
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return SparsePoly._clean(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return SparsePoly._clean(self.ring, {k: p - c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return SparsePoly._clean(self.ring, _mul_terms(self._terms, other._terms, self.ring.p))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def total_degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(sum(k) for k in self._terms)

    def min_degree(self) -> int:
        """Lowest total degree of a term (the m-adic order)."""
        if not self._terms:
            raise ValueError("order of the zero polynomial is undefined")
        return min(sum(k) for k in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.ring.d, 0)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def frobenius_twist(self, m: int) -> "SparsePoly":
        """Multiply every exponent by ``m``; equals ``self**m`` when m is a power of p."""
        return SparsePoly._clean(
            self.ring, {tuple(x * m for x in k): c for k, c in self._terms.items()}
        )

    def to_text(self) -> str:
        """Canonical text: terms in descending lex order, explicit ``*`` and ``^``."""
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self._terms, reverse=True):
            c = self._terms[exps]
            factors = []
            for name, x in zip(self.ring.variables, exps):
                if x == 1:
                    factors.append(name)
                elif x > 1:
                    factors.append(f"{name}^{x}")
            if c != 1 or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"SparsePoly({self.to_text()!r}, p={self.ring.p}, vars={self.ring.variables})"


def _mul_terms(a: dict, b: dict, p: int) -> dict:
    acc: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            acc[k] = acc.get(k, 0) + ca * cb
    return {k: c % p for k, c in acc.items() if c % p}


class BracketArith:
    """Arithmetic on term maps modulo ``m^[q]`` using packed exponent keys.

    An exponent vector is packed into one integer with ``w`` bits per
    coordinate, ``2^(w-1) >= q``.  The sum of two reduced vectors never
    carries between fields, and adding ``2^(w-1) - q`` to every field sets
    the field's top bit exactly when that coordinate reached ``q``.  So a
    product term is discarded with a single AND.
    """

    def __init__(self, d: int, p: int, q: int):
        self.d, self.p, self.q = d, p, q
        w = q.bit_length() + 1
        self.width = w
        self.field_mask = (1 << w) - 1
        top = 1 << (w - 1)
        self.offset = sum((top - q) << (w * j) for j in range(d))
        self.high = sum(top << (w * j) for j in range(d))

    def pack(self, exps: Sequence[int]) -> int:
        w = self.width
        key = 0
        for j, x in enumerate(exps):
            key |= x << (w * j)
        return key

    def unpack(self, key: int) -> tuple:
        w, mask = self.width, self.field_mask
        return tuple((key >> (w * j)) & mask for j in range(self.d))

    def survives(self, exps: Sequence[int]) -> bool:
        return all(x < self.q for x in exps)

    def from_poly(self, f: SparsePoly) -> dict:
        """Reduced packed term map of ``f``."""
        q = self.q
        return {self.pack(k): c for k, c in f._terms.items() if all(x < q for x in k)}

    def to_poly(self, ring: PolyRing, terms: dict) -> SparsePoly:
        return SparsePoly._clean(ring, {self.unpack(k): c for k, c in terms.items()})

    def mul(self, a: dict, b: dict) -> dict:
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return {}
        off, high, p = self.offset, self.high, self.p
        acc: dict = {}
        get = acc.get
        for kb, cb in b.items():
            base = kb + off
            for ka, ca in a.items():
                if (ka + base) & high:
                    continue
                k = ka + kb
                acc[k] = get(k, 0) + ca * cb
        return {k: c % p for k, c in acc.items() if c % p}

    def pow(self, a: dict, n: int) -> dict:
        result = {0: 1}
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
                if not result:
                    return result
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def exponent_matrix(self, a) -> np.ndarray:
        """Exponent vectors of the keys of ``a`` as an ``(n, d)`` int array."""
        w, d = self.width, self.d
        if w * d <= 62:
            keys = np.fromiter(a, dtype=np.int64, count=len(a))
            shifts = np.arange(d, dtype=np.int64) * w
            return (keys[:, None] >> shifts) & self.field_mask
        return np.array([self.unpack(k) for k in a], dtype=np.int64).reshape(len(a), d)


def _check_level(f: SparsePoly, lvl: BracketLevel):
    if f.ring.p != lvl.p:
        raise ValueError(f"level prime {lvl.p} does not match ring prime {f.ring.p}")


def reduce_mod_bracket(f: SparsePoly, lvl: BracketLevel) -> SparsePoly:
    """Delete every term with some exponent ``>= q``."""
    _check_level(f, lvl)
    q = lvl.q
    return SparsePoly._clean(f.ring, {k: c for k, c in f._terms.items() if all(x < q for x in k)})


def mul_reduced(f: SparsePoly, g: SparsePoly, lvl: BracketLevel) -> SparsePoly:
    """``reduce_mod_bracket(f * g)``, discarding product terms as they are formed."""
    _check_level(f, lvl)
    g = f._coerce(g)
    arith = BracketArith(f.ring.d, lvl.p, lvl.q)
    return arith.to_poly(f.ring, arith.mul(arith.from_poly(f), arith.from_poly(g)))


def pow_reduced(f: SparsePoly, n: int, lvl: BracketLevel) -> SparsePoly:
    """``reduce_mod_bracket(f**n)``.

    Splits ``n`` into base-p digits ``n = sum n_i p^i`` and uses
    ``f^(p^i) = frobenius_twist(f, p^i)``, which is exact over F_p.  Each
    digit power ``n_i < p`` is done by square-and-multiply, reducing after
    every product.  Twists are multiplied highest first since they lose the
    most terms to the bracket.
    """
    _check_level(f, lvl)
    if not isinstance(n, int) or n < 0:
        raise ValueError("exponent must be a nonnegative integer")
    arith = BracketArith(f.ring.d, lvl.p, lvl.q)
    p = lvl.p
    digits = []
    m = n
    while m:
        digits.append(m % p)
        m //= p
    result = {0: 1}
    for i in reversed(range(len(digits))):
        if not digits[i]:
            continue
        twisted = arith.from_poly(f.frobenius_twist(p**i))
        result = arith.mul(result, arith.pow(twisted, digits[i]))
        if not result:
            break
    return arith.to_poly(f.ring, result)


# --- parser -----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break  # trailing whitespace
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent over::

        expr   := term (('+' | '-') term)*
        term   := unary ('*' unary)*
        unary  := ('+' | '-') unary | power
        power  := atom ('^' INT)?
        atom   := INT | NAME | '(' expr ')'
    """

    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return PolySyntaxError(message, self.text, tok[2])

    def parse(self) -> SparsePoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        result = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("int", "name") or tok[1] == "(":
                raise self.error("expected an operator (implicit multiplication is not allowed)")
            raise self.error(f"unexpected {tok[1]!r}")
        return result

    def expr(self) -> SparsePoly:
        result = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> SparsePoly:
        result = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            result = result * self.unary()
        return result

    def unary(self) -> SparsePoly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self) -> SparsePoly:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.peek()
            if exp_tok[0] == "op" and exp_tok[1] == "-":
                raise NegativeExponent(exp_tok[2])
            if exp_tok[0] != "int":
                raise self.error("exponent must be a nonnegative integer literal")
            self.take()
            after = self.peek()
            if after[0] == "op" and after[1] == "^":
                raise self.error("chained '^' needs parentheses")
            return _power(base, exp_tok[1])
        return base

    def atom(self) -> SparsePoly:
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            return SparsePoly(self.ring, {(0,) * self.ring.d: value})
        if kind == "name":
            if value not in self.ring.variables:
                raise UnknownVariable(value, pos)
            return self.ring.var(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")" or close[0] != "op":
                raise self.error("expected ')'", close)
            return inner
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {value!r}", tok)


def _power(f: SparsePoly, n: int) -> SparsePoly:
    # exact power over F_p: base-p digits with Frobenius twists
    p = f.ring.p
    result = f.ring.one()
    i = 0
    while n:
        n, digit = divmod(n, p)
        if digit:
            result = result * (f.frobenius_twist(p**i) ** digit)
        i += 1
    return result


def parse_poly(text: str, variables: Sequence[str], p) -> SparsePoly:
    """Parse ``text`` into a canonical polynomial over ``F_p[variables]``.

    >>> parse_poly("X*Y + Z^2 + Z^2", ["X", "Y", "Z"], 3).terms[(0, 0, 2)]
    2
    """
    ring = PolyRing(p, tuple(variables))
    return _Parser(text, ring).parse()
