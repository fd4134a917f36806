"""Laurent polynomials and matrices over a cyclotomic field.

A Laurent polynomial is a sparse map {exponent: CycNum} with no stored
zeros; the empty map is zero.  Matrices are immutable row-major grids of
Laurent polynomials.  Determinants use cofactor expansion up to 4x4 and
fraction-free Bareiss elimination above; inverses are adjugate divided
by a unit-monomial determinant, which is exactly the invertibility
condition for transition matrices on the two-chart projective line.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .cyclotomic import CycNum, render_cycnum, term_count
from .errors import ConductorMismatch, DimensionMismatch, NonUnimodular, ParseError


class LaurentPoly:
    """Sparse Laurent polynomial sum(coeffs[e] * z^e) with CycNum coefficients."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs=None):
        clean = {}
        for e, c in (coeffs or {}).items():
            if isinstance(c, (int, Fraction)):
                c = CycNum.rational(conductor, c)
            elif c.conductor != conductor:
                raise ConductorMismatch(
                    f"coefficient conductor {c.conductor} vs {conductor}")
            if not c.is_zero():
                clean[int(e)] = c
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, conductor: int) -> "LaurentPoly":
        return cls(conductor, {})

    @classmethod
    def const(cls, conductor: int, value) -> "LaurentPoly":
        return cls(conductor, {0: value})

    @classmethod
    def monomial(cls, conductor: int, exponent: int, coeff=1) -> "LaurentPoly":
        return cls(conductor, {exponent: coeff})

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int) -> CycNum:
        return self.coeffs.get(e, CycNum.zero(self.conductor))

    def min_exp(self):
        return min(self.coeffs) if self.coeffs else None

    def max_exp(self):
        return max(self.coeffs) if self.coeffs else None

    def unit_monomial(self):
        """(coeff, exponent) if this is c*z^k with c != 0, else None."""
        if len(self.coeffs) != 1:
            return None
        ((e, c),) = self.coeffs.items()
        return c, e

    def is_constant(self) -> bool:
        return not self.coeffs or set(self.coeffs) == {0}

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.conductor != self.conductor:
            raise ConductorMismatch(
                f"conductor {self.conductor} vs {other.conductor}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return LaurentPoly(self.conductor, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentPoly(self.conductor, {e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                p = c1 * c2
                cur = out.get(e)
                out[e] = p if cur is None else cur + p
        return LaurentPoly(self.conductor, out)

    __rmul__ = __mul__

    def scale(self, c) -> "LaurentPoly":
        if isinstance(c, (int, Fraction)):
            c = CycNum.rational(self.conductor, c)
        return LaurentPoly(self.conductor,
                           {e: v * c for e, v in self.coeffs.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by z^k."""
        return LaurentPoly(self.conductor,
                           {e + k: c for e, c in self.coeffs.items()})

    def __pow__(self, n: int):
        if n < 0:
            um = self.unit_monomial()
            if um is None:
                raise ValueError("negative powers only of unit monomials")
            c, e = um
            return LaurentPoly(self.conductor, {-e: c.inverse()}) ** (-n)
        result = LaurentPoly.const(self.conductor, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute(self, c: CycNum, e: int) -> "LaurentPoly":
        """Replace z by c*z^e term by term (e in {+1, -1}); c must be nonzero."""
        if c.is_zero():
            raise ValueError("substitution constant must be nonzero")
        out = {}
        for k, v in self.coeffs.items():
            key = e * k
            val = v * c ** k
            cur = out.get(key)
            out[key] = val if cur is None else cur + val
        return LaurentPoly(self.conductor, out)

    def divexact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises if the divisor does not divide exactly."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return self
        um = other.unit_monomial()
        if um is not None:
            c, e = um
            cinv = c.inverse()
            return LaurentPoly(self.conductor,
                               {k - e: v * cinv for k, v in self.coeffs.items()})
        # shift both to ordinary polynomials and long divide
        sa, sb = self.min_exp(), other.min_exp()
        da, db = self.max_exp() - sa, other.max_exp() - sb
        a = [self.coeff(sa + i) for i in range(da + 1)]
        b = [other.coeff(sb + i) for i in range(db + 1)]
        if da < db:
            raise ValueError("inexact Laurent division")
        q = [CycNum.zero(self.conductor)] * (da - db + 1)
        lead_inv = b[-1].inverse()
        for i in range(da - db, -1, -1):
            c = a[i + db] * lead_inv
            q[i] = c
            if not c.is_zero():
                for j in range(db + 1):
                    a[i + j] = a[i + j] - c * b[j]
        if any(not x.is_zero() for x in a):
            raise ValueError("inexact Laurent division")
        return LaurentPoly(self.conductor,
                           {sa - sb + i: qi for i, qi in enumerate(q)})

    def embed(self, conductor: int) -> "LaurentPoly":
        return LaurentPoly(conductor,
                           {e: c.embed(conductor) for e, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.conductor == other.conductor and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.conductor, frozenset(self.coeffs.items())))

    def __str__(self):
        return render_laurent(self)

    def __repr__(self):
        return f"LaurentPoly({self.conductor}, {render_laurent(self)!r})"


class LaurentMatrix:
    """Immutable rows x cols grid of LaurentPoly entries at one conductor."""

    __slots__ = ("rows", "cols", "conductor", "entries")

    def __init__(self, conductor: int, entries):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise DimensionMismatch("matrix must have positive dimensions")
        cols = len(entries[0])
        for row in entries:
            if len(row) != cols:
                raise DimensionMismatch("ragged matrix rows")
            for p in row:
                if not isinstance(p, LaurentPoly) or p.conductor != conductor:
                    raise ConductorMismatch("entry conductor mismatch")
        object.__setattr__(self, "rows", len(entries))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentMatrix is immutable")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def identity(cls, conductor: int, n: int) -> "LaurentMatrix":
        one = LaurentPoly.const(conductor, 1)
        zero = LaurentPoly.zero(conductor)
        return cls(conductor, [[one if i == j else zero for j in range(n)]
                               for i in range(n)])

    @classmethod
    def diag(cls, conductor: int, polys) -> "LaurentMatrix":
        polys = list(polys)
        zero = LaurentPoly.zero(conductor)
        return cls(conductor, [[p if i == j else zero for j in range(len(polys))]
                               for i, p in enumerate(polys)])

    @classmethod
    def diag_monomials(cls, conductor: int, exponents) -> "LaurentMatrix":
        return cls.diag(conductor, [LaurentPoly.monomial(conductor, e)
                                    for e in exponents])

    @classmethod
    def from_const(cls, conductor: int, grid) -> "LaurentMatrix":
        return cls(conductor, [[LaurentPoly.const(conductor, c) for c in row]
                               for row in grid])

    # -- algebra ----------------------------------------------------------------

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.cols} cols vs {other.rows} rows")
        zero = LaurentPoly.zero(self.conductor)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LaurentMatrix(self.conductor, out)

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return LaurentMatrix(self.conductor,
                             [[a + b for a, b in zip(r1, r2)]
                              for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentMatrix":
        return LaurentMatrix(self.conductor,
                             [[p.scale(c) for p in row] for row in self.entries])

    def scale_poly(self, q: LaurentPoly) -> "LaurentMatrix":
        return LaurentMatrix(self.conductor,
                             [[p * q for p in row] for row in self.entries])

    def shift(self, k: int) -> "LaurentMatrix":
        """Multiply every entry by z^k."""
        return LaurentMatrix(self.conductor,
                             [[p.shift(k) for p in row] for row in self.entries])

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.conductor,
                             [[self.entries[i][j] for i in range(self.rows)]
                              for j in range(self.cols)])

    def substitute(self, c: CycNum, e: int) -> "LaurentMatrix":
        return LaurentMatrix(self.conductor,
                             [[p.substitute(c, e) for p in row]
                              for row in self.entries])

    def embed(self, conductor: int) -> "LaurentMatrix":
        return LaurentMatrix(conductor,
                             [[p.embed(conductor) for p in row]
                              for row in self.entries])

    @classmethod
    def kron(cls, a: "LaurentMatrix", b: "LaurentMatrix") -> "LaurentMatrix":
        out = []
        for i in range(a.rows):
            for k in range(b.rows):
                row = []
                for j in range(a.cols):
                    for l in range(b.cols):
                        row.append(a.entries[i][j] * b.entries[k][l])
                out.append(row)
        return cls(a.conductor, out)

    @classmethod
    def block_diag(cls, blocks) -> "LaurentMatrix":
        blocks = list(blocks)
        conductor = blocks[0].conductor
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        zero = LaurentPoly.zero(conductor)
        grid = [[zero] * m for _ in range(n)]
        i0 = j0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    grid[i0 + i][j0 + j] = b.entries[i][j]
            i0 += b.rows
            j0 += b.cols
        return cls(conductor, grid)

    # -- determinant and inverse -------------------------------------------------

    def det(self) -> LaurentPoly:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        if n <= 4:
            return _det_cofactor(self.entries, self.conductor)
        return _det_bareiss(self.entries, self.conductor)

    def inverse(self) -> "LaurentMatrix":
        """Adjugate over the determinant; requires a unit-monomial determinant."""
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        d = self.det()
        um = d.unit_monomial()
        if um is None:
            raise NonUnimodular(f"determinant {d} is not a unit monomial")
        c, e = um
        dinv = LaurentPoly(self.conductor, {-e: c.inverse()})
        n = self.rows
        if n == 1:
            return LaurentMatrix(self.conductor, [[dinv]])
        adj = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = [[self.entries[r][s] for s in range(n) if s != i]
                         for r in range(n) if r != j]
                md = (_det_cofactor(minor, self.conductor) if n - 1 <= 4
                      else _det_bareiss(minor, self.conductor))
                if (i + j) % 2:
                    md = -md
                row.append(md * dinv)
            adj.append(row)
        return LaurentMatrix(self.conductor, adj)

    def eval_at_zero(self):
        """Constant-term grid of CycNum if no entry has a negative exponent, else None."""
        grid = []
        for row in self.entries:
            out = []
            for p in row:
                me = p.min_exp()
                if me is not None and me < 0:
                    return None
                out.append(p.coeff(0))
            grid.append(out)
        return grid

    def is_constant(self) -> bool:
        return all(p.is_constant() for row in self.entries for p in row)

    def max_abs_exp(self) -> int:
        m = 0
        for row in self.entries:
            for p in row:
                if not p.is_zero():
                    m = max(m, abs(p.min_exp()), abs(p.max_exp()))
        return m

    def min_exp(self):
        exps = [p.min_exp() for row in self.entries for p in row if not p.is_zero()]
        return min(exps) if exps else None

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self.conductor == other.conductor
                and self.entries == other.entries)

    def __str__(self):
        body = "; ".join(", ".join(render_laurent(p) for p in row)
                         for row in self.entries)
        return f"[{body}]"

    __repr__ = __str__


def _det_cofactor(entries, conductor):
    n = len(entries)
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    acc = LaurentPoly.zero(conductor)
    for j in range(n):
        c = entries[0][j]
        if c.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in entries[1:]]
        term = c * _det_cofactor(minor, conductor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _det_bareiss(entries, conductor):
    # fraction-free elimination; exact divisions stay in the Laurent ring
    m = [list(row) for row in entries]
    n = len(m)
    sign = 1
    prev = LaurentPoly.const(conductor, 1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly.zero(conductor)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.divexact(prev)
            m[i][k] = LaurentPoly.zero(conductor)
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign == 1 else -d


def regular_invertible_at(matrix: LaurentMatrix, point: str) -> bool:
    """True iff the matrix is holomorphic and invertible at the chart point.

    At "zero": no entry has a negative exponent and the constant-term
    matrix is invertible.  At "infinity": the same after z -> 1/z.
    """
    if matrix.rows != matrix.cols:
        raise DimensionMismatch("regularity check needs a square matrix")
    if point == "infinity":
        matrix = matrix.substitute(CycNum.one(matrix.conductor), -1)
    elif point != "zero":
        raise ValueError(f"point must be 'zero' or 'infinity', got {point!r}")
    grid = matrix.eval_at_zero()
    if grid is None:
        return False
    from .linalg import det_const
    return not det_const(grid, matrix.conductor).is_zero()


# ---------------------------------------------------------------------------
# canonical text form and parser, shared by scalars and Laurent polynomials
#
#   expr   := ['-'] term (('+'|'-') term)*
#   term   := factor (('·'|'*') factor)*
#   factor := rational | 'z<m>' ['^' int] | 'z' ['^' int] | '(' expr ')'
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<root>z\d+)|(?P<var>z)"
                    r"|(?P<op>[·*+\-^()]))")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            raise ParseError(f"bad character in {text!r}", line=1, column=pos + 1)
        if mt.lastgroup is not None:
            out.append((mt.lastgroup, mt.group(mt.lastgroup), pos))
        pos = mt.end()
    return out


class _Parser:
    def __init__(self, tokens, conductor, text):
        self.tokens = tokens
        self.i = 0
        self.conductor = conductor
        self.text = text

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg, pos):
        raise ParseError(f"{msg} in {self.text!r}", line=1,
                         column=(pos or 0) + 1)

    def parse_expr(self):
        kind, val, pos = self.peek()
        sign = 1
        if kind == "op" and val == "-":
            self.take()
            sign = -1
        acc = self.parse_term().scale(sign)
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.parse_term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def parse_term(self):
        acc = self.parse_factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in ("·", "*"):
                self.take()
                acc = acc * self.parse_factor()
            elif kind in ("num", "root", "var") or (kind == "op" and val == "("):
                # implicit product is not part of the grammar
                self.fail("missing multiplication sign", pos)
            else:
                return acc

    def parse_factor(self):
        kind, val, pos = self.take()
        if kind == "num":
            return LaurentPoly.const(self.conductor, Fraction(val))
        if kind == "root":
            m = int(val[1:])
            from .cyclotomic import root_of_unity
            k = self.parse_power()
            if self.conductor % m != 0:
                self.fail(f"root z{m} does not live in conductor {self.conductor}", pos)
            zeta = root_of_unity(m, k).embed(self.conductor)
            return LaurentPoly.const(self.conductor, zeta)
        if kind == "var":
            k = self.parse_power()
            return LaurentPoly.monomial(self.conductor, k)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            kind, val, pos = self.take()
            if kind != "op" or val != ")":
                self.fail("expected ')'", pos)
            return inner
        self.fail("unexpected token", pos)

    def parse_power(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            sign = 1
            if kind == "op" and val == "-":
                sign = -1
                kind, val, pos = self.take()
            if kind != "num" or "/" in val:
                self.fail("expected integer exponent", pos)
            return sign * int(val)
        return 1


def parse_laurent(text: str, conductor: int) -> LaurentPoly:
    """Parse the canonical text form of a Laurent polynomial."""
    parser = _Parser(_tokenize(text), conductor, text)
    result = parser.parse_expr()
    if parser.i != len(parser.tokens):
        parser.fail("trailing input", parser.peek()[2])
    return result


def parse_cycnum(text: str, conductor: int) -> CycNum:
    """Parse the canonical text form of a scalar (no Laurent variable allowed)."""
    p = parse_laurent(text, conductor)
    if not p.is_constant():
        raise ParseError(f"expected a scalar, got {text!r}")
    return p.coeff(0)


def render_laurent(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.coeffs):
        c = p.coeffs[e]
        cs = render_cycnum(c)
        multi = term_count(c) > 1
        if e == 0:
            parts.append(f"({cs})" if multi and len(p.coeffs) > 1 else cs)
            continue
        zpart = "z" if e == 1 else f"z^{e}"
        if c.is_one():
            parts.append(zpart)
        elif c == -1:
            parts.append(f"-{zpart}")
        elif multi:
            parts.append(f"({cs})·{zpart}")
        else:
            parts.append(f"{cs}·{zpart}")
    out = parts[0]
    for part in parts[1:]:
        out += part if part.startswith("-") else "+" + part
    return out
