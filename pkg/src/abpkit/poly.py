"""Variables, affine linear forms and sparse multivariate polynomials over F_p."""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, NamedTuple

from . import field

DEFAULT_CAP = 10**6


class VarId(NamedTuple):
    """Variable ``y^{row,col}``; generic variables use ``row == 0``."""

    row: int
    col: int

    def __str__(self) -> str:
        return f"y{self.row},{self.col}"


Assignment = Mapping[VarId, int]
Monomial = tuple  # sorted tuple of VarId, repetitions allowed


class MissingVariableError(KeyError):
    def __init__(self, var: VarId):
        super().__init__(var)
        self.var = var

    def __str__(self) -> str:
        return f"assignment has no value for {self.var}"


class CapExceededError(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"symbolic expansion needs {count} monomials, cap is {cap}")
        self.count = count
        self.cap = cap


def matrix_vars(m: int) -> list[VarId]:
    return [VarId(i, j) for i in range(1, m + 1) for j in range(1, m + 1)]


def parse_var(token: str) -> VarId:
    """Parse ``y12``, ``x12``, ``y1,2`` or ``y10_3`` into a VarId."""
    t = token.strip().lstrip("-").lstrip("xy")
    for sep in (",", "_"):
        if sep in t:
            r, c = t.split(sep)
            return VarId(int(r), int(c))
    if len(t) != 2 or not t.isdigit():
        raise ValueError(f"cannot parse variable {token!r}")
    return VarId(int(t[0]), int(t[1]))


class AffineForm:
    """``const + sum(coeff * var)`` with coefficients reduced mod p.

    Immutable and hashable; zero coefficients are never stored.
    """

    __slots__ = ("const", "_terms", "_hash")

    def __init__(self, const: int = 0, terms: Mapping[VarId, int] | Iterable = ()):
        p = field.get_prime()
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[VarId, int] = {}
        for v, c in items:
            v = VarId(*v)
            acc[v] = (acc.get(v, 0) + c) % p
        self.const = const % p
        self._terms = tuple(sorted((v, c) for v, c in acc.items() if c))
        self._hash = None

    @classmethod
    def var(cls, row: int, col: int, coeff: int = 1) -> AffineForm:
        return cls(0, {VarId(row, col): coeff})

    @property
    def terms(self) -> dict[VarId, int]:
        return dict(self._terms)

    def items(self) -> tuple:
        return self._terms

    def coeff(self, v: VarId) -> int:
        for w, c in self._terms:
            if w == v:
                return c
        return 0

    def variables(self) -> list[VarId]:
        return [v for v, _ in self._terms]

    def linear_part(self) -> AffineForm:
        return AffineForm(0, self._terms)

    def is_linear(self) -> bool:
        return self.const == 0

    def is_constant(self) -> bool:
        return not self._terms

    def is_zero(self) -> bool:
        return self.const == 0 and not self._terms

    def evaluate(self, a: Assignment) -> int:
        p = field.get_prime()
        total = self.const
        for v, c in self._terms:
            try:
                total += c * a[v]
            except KeyError:
                raise MissingVariableError(v) from None
        return total % p

    def __add__(self, other):
        if isinstance(other, int):
            return AffineForm(self.const + other, self._terms)
        if not isinstance(other, AffineForm):
            return NotImplemented
        return AffineForm(self.const + other.const, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> AffineForm:
        return AffineForm(-self.const, [(v, -c) for v, c in self._terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return AffineForm(self.const * k, [(v, c * k) for v, c in self._terms])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return not self._terms and self.const == other % field.get_prime()
        if not isinstance(other, AffineForm):
            return NotImplemented
        return self.const == other.const and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.const, self._terms))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"AffineForm({format_affine(self)!r})"


ZERO = AffineForm()
ONE = AffineForm(1)


def format_affine(f: AffineForm) -> str:
    parts = []
    if f.const or f.is_constant():
        parts.append(str(field.signed(f.const)))
    for v, c in f.items():
        c = field.signed(c)
        name = f"y{v.row},{v.col}"
        if c == 1:
            parts.append(name)
        elif c == -1:
            parts.append("-" + name)
        else:
            parts.append(f"{c}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


def eval_affine(f: AffineForm, a: Assignment) -> int:
    return f.evaluate(a)


class SparsePoly:
    """Sparse polynomial: monomial (sorted VarId tuple) -> nonzero coefficient."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[Monomial, int] | None = None):
        p = field.get_prime()
        self._c: dict[Monomial, int] = {}
        if coeffs:
            for mono, c in coeffs.items():
                c %= p
                if c:
                    key = tuple(sorted(mono))
                    self._c[key] = (self._c.get(key, 0) + c) % p
                    if not self._c[key]:
                        del self._c[key]

    @classmethod
    def _raw(cls, d: dict) -> SparsePoly:
        out = cls.__new__(cls)
        out._c = d
        return out

    @classmethod
    def constant(cls, c: int) -> SparsePoly:
        return cls({(): c})

    @classmethod
    def from_affine(cls, f: AffineForm) -> SparsePoly:
        d = {(v,): c for v, c in f.items()}
        if f.const:
            d[()] = f.const
        return cls._raw(d)

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._c)

    def items(self):
        return self._c.items()

    def coefficient(self, mono: Iterable[VarId]) -> int:
        return self._c.get(tuple(sorted(mono)), 0)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        return max((len(m) for m in self._c), default=-1)

    def homogeneous_component(self, d: int) -> SparsePoly:
        return SparsePoly._raw({m: c for m, c in self._c.items() if len(m) == d})

    def truncate(self, d: int) -> SparsePoly:
        return SparsePoly._raw({m: c for m, c in self._c.items() if len(m) <= d})

    def variables(self) -> set[VarId]:
        return {v for m in self._c for v in m}

    def evaluate(self, a: Assignment) -> int:
        p = field.get_prime()
        total = 0
        for mono, c in self._c.items():
            t = c
            for v in mono:
                try:
                    t = t * a[v] % p
                except KeyError:
                    raise MissingVariableError(v) from None
            total += t
        return total % p

    def __add__(self, other: SparsePoly) -> SparsePoly:
        p = field.get_prime()
        d = dict(self._c)
        for m, c in other._c.items():
            s = (d.get(m, 0) + c) % p
            if s:
                d[m] = s
            else:
                d.pop(m, None)
        return SparsePoly._raw(d)

    def __neg__(self) -> SparsePoly:
        p = field.get_prime()
        return SparsePoly._raw({m: (-c) % p for m, c in self._c.items()})

    def __sub__(self, other: SparsePoly) -> SparsePoly:
        return self + (-other)

    def scale(self, k: int) -> SparsePoly:
        p = field.get_prime()
        k %= p
        if not k:
            return SparsePoly()
        return SparsePoly._raw({m: c * k % p for m, c in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if isinstance(other, AffineForm):
            other = SparsePoly.from_affine(other)
        return mul_truncated(self, other, None)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._c == other._c

    def __repr__(self) -> str:
        if not self._c:
            return "SparsePoly(0)"
        terms = []
        for m, c in sorted(self._c.items(), key=lambda mc: (len(mc[0]), mc[0])):
            mono = "*".join(f"y{v.row}{v.col}" for v in m) or "1"
            terms.append(f"{field.signed(c)}*{mono}")
        return "SparsePoly(" + " + ".join(terms) + ")"


def mul_truncated(a: SparsePoly, b: SparsePoly, max_degree: int | None) -> SparsePoly:
    p = field.get_prime()
    d: dict[Monomial, int] = {}
    for ma, ca in a._c.items():
        for mb, cb in b._c.items():
            if max_degree is not None and len(ma) + len(mb) > max_degree:
                continue
            key = tuple(sorted(ma + mb))
            d[key] = (d.get(key, 0) + ca * cb) % p
    return SparsePoly._raw({m: c for m, c in d.items() if c})


def affine_product(f: AffineForm, g: AffineForm) -> SparsePoly:
    return SparsePoly.from_affine(f) * SparsePoly.from_affine(g)


def monomial(*vars_: VarId) -> Monomial:
    return tuple(sorted(VarId(*v) for v in vars_))
