"""Exact multivariate Laurent polynomial arithmetic over the integers.

Polynomials live in Z[x_1^{±1}, ..., x_r^{±1}].  They are stored sparsely as a
map from exponent vectors (tuples of ints, possibly negative) to nonzero
integer coefficients.  All arithmetic is exact; coefficients are Python ints.

Many quantities downstream are only well defined up to multiplication by a
unit of the Laurent ring, i.e. by +-(monomial).  ``normalize_unit`` picks the
canonical representative of that orbit: shift so the minimum exponent of each
variable is 0, then fix the sign so the graded-lex greatest term has positive
coefficient.
"""

from __future__ import annotations

import math
from itertools import combinations


class LaurentPoly:
    """A sparse Laurent polynomial over Z in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, coef in terms.items():
                if len(exp) != nvars:
                    raise ValueError(
                        "exponent %r has length %d, expected %d" % (exp, len(exp), nvars))
                if coef:
                    clean[tuple(exp)] = coef
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def one(cls, nvars):
        return cls(nvars, {(0,) * nvars: 1})

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars, exp, coef=1):
        return cls(nvars, {tuple(exp): coef})

    @classmethod
    def variable(cls, nvars, i):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_monomial(self):
        return len(self.terms) == 1

    def is_unit(self):
        """True iff the polynomial is a unit of the Laurent ring: +-x^v."""
        if len(self.terms) != 1:
            return False
        (coef,) = self.terms.values()
        return coef in (1, -1)

    def is_one(self):
        return self.terms == {(0,) * self.nvars: 1}

    def unit_inverse(self):
        """Inverse of a unit +-x^v, namely +-x^(-v)."""
        if not self.is_unit():
            raise ValueError("inverse of a non-unit")
        ((exp, coef),) = self.terms.items()
        return LaurentPoly(self.nvars, {tuple(-e for e in exp): coef})

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for exp, coef in other.terms.items():
            s = out.get(exp, 0) + coef
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return LaurentPoly(self.nvars, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero(self.nvars)
            return LaurentPoly(self.nvars,
                               {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return LaurentPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers only defined for units")
        out = LaurentPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, LaurentPoly)
                and self.nvars == other.nvars and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def _check(self, other):
        if not isinstance(other, LaurentPoly) or other.nvars != self.nvars:
            raise ValueError("operands live in different Laurent rings")

    # -- structure ---------------------------------------------------------

    def min_exponents(self):
        """Per-variable minimum exponent over the support (zero poly -> zeros)."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def shift(self, vec):
        """Multiply by the monomial x^vec."""
        return LaurentPoly(self.nvars,
                           {tuple(a + b for a, b in zip(e, vec)): c
                            for e, c in self.terms.items()})

    def leading_term(self):
        """(exponent, coefficient) of the graded-lex greatest term."""
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def sorted_terms(self):
        """Terms in ascending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def evaluate_at_one(self):
        """Sum of coefficients: the image under every variable -> 1."""
        return sum(self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "LaurentPoly(0)"
        bits = []
        for exp, coef in reversed(self.sorted_terms()):
            mono = "*".join("x%d^%d" % (i, e) for i, e in enumerate(exp) if e)
            if mono:
                bits.append("%+d*%s" % (coef, mono))
            else:
                bits.append("%+d" % coef)
        return "LaurentPoly(%s)" % " ".join(bits)


def _grlex_key(exp):
    return (sum(exp), exp)


# ---------------------------------------------------------------------------
# Unit normalization
# ---------------------------------------------------------------------------

def normalize_unit(p):
    """Canonical representative of {+-x^v * p}.

    Shift so every variable's minimum exponent is 0, then negate if needed so
    that the graded-lex greatest term has a positive coefficient.  Zero maps
    to zero.
    """
    if p.is_zero():
        return p
    q = p.shift(tuple(-m for m in p.min_exponents()))
    _, lead = q.leading_term()
    if lead < 0:
        q = -q
    return q


# ---------------------------------------------------------------------------
# Exact division
# ---------------------------------------------------------------------------

def exact_div(p, q):
    """Return s with p = q*s if q divides p in the Laurent ring, else None.

    Divisibility by a unit-multiple is the same thing, so both operands are
    first shifted into ordinary-polynomial position; the quotient's monomial
    offset is restored at the end.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return LaurentPoly.zero(p.nvars)
    a = p.min_exponents()
    b = q.min_exponents()
    ph = p.shift(tuple(-m for m in a))
    qh = q.shift(tuple(-m for m in b))
    s = _poly_exact_div(ph, qh)
    if s is None:
        return None
    return s.shift(tuple(x - y for x, y in zip(a, b)))


def _poly_exact_div(p, q):
    """Exact division in Z[x_1..x_r] (no negative exponents allowed in the
    quotient).  Leading-term division in graded-lex order: if q | p the
    leading term of the quotient is forced at every step, so failure proves
    indivisibility."""
    nvars = p.nvars
    rem = p
    out = {}
    qexp, qcoef = q.leading_term()
    while not rem.is_zero():
        rexp, rcoef = rem.leading_term()
        c, r = divmod(rcoef, qcoef)
        if r:
            return None
        exp = tuple(a - b for a, b in zip(rexp, qexp))
        if any(e < 0 for e in exp):
            return None
        out[exp] = c
        rem = rem - q * LaurentPoly.monomial(nvars, exp, c)
    return LaurentPoly(nvars, out)


# ---------------------------------------------------------------------------
# GCD: recursive content/primitive-part with a subresultant remainder
# sequence in the last variable.  Deterministic; no modular shortcuts.
# ---------------------------------------------------------------------------

def gcd(p, q):
    """A gcd of p and q in the Laurent ring, unit-normalized.

    gcd(0, 0) = 0.  Monomial factors are units here, so they never appear in
    the result.
    """
    if p.is_zero() and q.is_zero():
        return p
    if p.is_zero():
        return normalize_unit(q)
    if q.is_zero():
        return normalize_unit(p)
    ph = p.shift(tuple(-m for m in p.min_exponents()))
    qh = q.shift(tuple(-m for m in q.min_exponents()))
    return normalize_unit(_poly_gcd(ph, qh))


def _sign_norm(p):
    if p.is_zero():
        return p
    _, lead = p.leading_term()
    return -p if lead < 0 else p


def _poly_gcd(p, q):
    """gcd in Z[x_1..x_r] for honest polynomials (no negative exponents)."""
    if p.is_zero():
        return _sign_norm(q)
    if q.is_zero():
        return _sign_norm(p)
    if p.nvars == 0:
        a = p.terms.get((), 0)
        b = q.terms.get((), 0)
        return LaurentPoly.const(0, math.gcd(a, b))
    pc, pp = _content_pp(p)
    qc, qp = _content_pp(q)
    d = _poly_gcd(pc, qc)
    g = _subresultant_gcd(pp, qp)
    return _sign_norm(_join_last(_mul_coeffs(_split_last(g), d), p.nvars))


def _split_last(p):
    """View p in Z[x_1..x_{r-1}][y] (y = last variable): degree -> coefficient,
    with coefficients as (r-1)-variable polynomials."""
    out = {}
    for exp, coef in p.terms.items():
        d = exp[-1]
        head = exp[:-1]
        bucket = out.setdefault(d, {})
        bucket[head] = bucket.get(head, 0) + coef
    return {d: LaurentPoly(p.nvars - 1, t) for d, t in out.items()
            if any(t.values())}


def _join_last(coeffs, nvars):
    terms = {}
    for d, poly in coeffs.items():
        for exp, coef in poly.terms.items():
            terms[exp + (d,)] = coef
    return LaurentPoly(nvars, terms)


def _mul_coeffs(coeffs, c):
    return {d: poly * c for d, poly in coeffs.items()}


def _content_pp(p):
    """``(content, primitive part)`` of p with respect to its last variable."""
    coeffs = _split_last(p)
    cont = LaurentPoly.zero(p.nvars - 1)
    for poly in coeffs.values():
        cont = _poly_gcd(cont, poly)
        if cont.is_one():
            break
    pp = {d: _require(_poly_exact_div(poly, cont))
          for d, poly in coeffs.items()}
    return cont, pp


def _require(x):
    if x is None:
        raise AssertionError("division guaranteed exact by theory failed")
    return x


def _prem(a, b):
    """Pseudo-remainder of a by b in R[y]: lc(b)^(deg a - deg b + 1) * a mod b,
    on coefficient dictionaries {degree: R-element}."""
    da, db = max(a), max(b)
    lb = b[db]
    e = da - db + 1
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        new = {d: c * lb for d, c in r.items()}
        for d, c in b.items():
            nd = d + dr - db
            val = new.get(nd, LaurentPoly.zero(c.nvars)) - lr * c
            if val.is_zero():
                new.pop(nd, None)
            else:
                new[nd] = val
        r = new
        e -= 1
    for _ in range(e):
        r = {d: c * lb for d, c in r.items()}
    return r


def _subresultant_gcd(a, b):
    """Subresultant PRS on primitive a, b in R[y]; returns a primitive gcd
    as a full polynomial in all variables."""
    nvars_r = next(iter(a.values())).nvars  # coefficient ring variable count
    nvars = nvars_r + 1
    if max(a) < max(b):
        a, b = b, a
    one = LaurentPoly.one(nvars_r)
    g = h = one
    while True:
        delta = max(a) - max(b)
        r = _prem(a, b)
        if not r:
            break
        if max(r) == 0:
            # Primitive parts are coprime; gcd is carried by contents alone.
            return LaurentPoly.one(nvars)
        a, b = b, r
        divisor = g * h ** delta
        b = {d: _require(_poly_exact_div(c, divisor)) for d, c in b.items()}
        g = a[max(a)]
        if delta == 1:
            h = g
        elif delta > 1:
            h = _require(_poly_exact_div(g ** delta, h ** (delta - 1)))
    cont, pp = _content_pp(_join_last(b, nvars))
    return _join_last(pp, nvars)


def gcd_many(polys):
    """Running gcd of an iterable, with early exit once it reaches a unit."""
    acc = None
    for p in polys:
        acc = normalize_unit(p) if acc is None else gcd(acc, p)
        if acc is not None and acc.is_one():
            return acc
    if acc is None:
        raise ValueError("gcd of an empty collection")
    return acc


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

class LaurentMatrix:
    """A labelled matrix of Laurent polynomials (rows: edges, cols: faces)."""

    __slots__ = ("nvars", "rows", "cols", "entries", "row_labels", "col_labels")

    def __init__(self, nvars, entries, row_labels=None, col_labels=None):
        self.nvars = nvars
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")
            for e in row:
                if e.nvars != nvars:
                    raise ValueError("entry variable count mismatch")
        self.row_labels = list(row_labels) if row_labels is not None \
            else list(range(self.rows))
        self.col_labels = list(col_labels) if col_labels is not None \
            else list(range(self.cols))

    def submatrix(self, row_idx, col_idx):
        return LaurentMatrix(
            self.nvars,
            [[self.entries[i][j] for j in col_idx] for i in row_idx],
            [self.row_labels[i] for i in row_idx],
            [self.col_labels[j] for j in col_idx])

    def copy(self):
        return LaurentMatrix(self.nvars, [row[:] for row in self.entries],
                             self.row_labels, self.col_labels)

    def __repr__(self):
        return "LaurentMatrix(%dx%d over %d vars)" % (
            self.rows, self.cols, self.nvars)


def determinant(mat):
    """Exact determinant by fraction-free (Bareiss) elimination.

    Accepts a LaurentMatrix or a plain list of lists of LaurentPoly.  The
    empty (0 x 0) matrix has determinant 1.
    """
    if isinstance(mat, LaurentMatrix):
        if mat.rows != mat.cols:
            raise ValueError("determinant of a non-square matrix")
        entries = [row[:] for row in mat.entries]
        nvars = mat.nvars
    else:
        entries = [list(row) for row in mat]
        if entries and len(entries) != len(entries[0]):
            raise ValueError("determinant of a non-square matrix")
        nvars = entries[0][0].nvars if entries else 0
    n = len(entries)
    if n == 0:
        return LaurentPoly.one(nvars)
    sign = 1
    prev = LaurentPoly.one(nvars)
    a = entries
    for k in range(n - 1):
        pivot = next((i for i in range(k, n) if not a[i][k].is_zero()), None)
        if pivot is None:
            return LaurentPoly.zero(nvars)
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = _require(exact_div(num, prev))
            a[i][k] = LaurentPoly.zero(nvars)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def maximal_minor_gcd_bruteforce(mat):
    """gcd over all row-size minors, by direct enumeration.

    Exponential in the column count; used as an oracle and as the terminal
    stage of the Fitting-invariant pipeline once matrices are small.
    """
    if mat.rows > mat.cols:
        raise ValueError("need rows <= cols for maximal (row-size) minors")
    if mat.rows == 0:
        return LaurentPoly.one(mat.nvars)
    acc = LaurentPoly.zero(mat.nvars)
    all_rows = range(mat.rows)
    for cols in combinations(range(mat.cols), mat.rows):
        minor = determinant(mat.submatrix(all_rows, cols))
        acc = gcd(acc, minor)
        if acc.is_one():
            break
    return normalize_unit(acc)


# ---------------------------------------------------------------------------
# Specialisation along a homomorphism of free abelian groups
# ---------------------------------------------------------------------------

def specialize(p, exp_map, sign_source=None, sign_target=None):
    """Push p through the monomial map x^v -> y^(A v), with optional sign
    twists.

    ``exp_map`` is an s x r integer matrix A (list of s rows).  A sign
    character (+-1 per variable) may be supplied on the source (applied as
    prod(chi_i^v_i)) or on the target (applied as prod(chi_j^(Av)_j)).
    The result lives in s variables.
    """
    rows = [tuple(r) for r in exp_map]
    s = len(rows)
    r = p.nvars
    for row in rows:
        if len(row) != r:
            raise ValueError("exponent map has wrong shape")
    out = {}
    for exp, coef in p.terms.items():
        img = tuple(sum(a * e for a, e in zip(row, exp)) for row in rows)
        c = coef
        if sign_source is not None:
            for chi, e in zip(sign_source, exp):
                if chi == -1 and e % 2:
                    c = -c
        if sign_target is not None:
            for chi, e in zip(sign_target, img):
                if chi == -1 and e % 2:
                    c = -c
        val = out.get(img, 0) + c
        if val:
            out[img] = val
        else:
            del out[img]
    return LaurentPoly(s, out)


def sign_twist(p, sigma):
    """Substitute x_i -> sigma_i * x_i (sigma_i in {+1, -1}); an involution."""
    ident = [[1 if i == j else 0 for j in range(p.nvars)]
             for i in range(p.nvars)]
    return specialize(p, ident, sign_source=sigma)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

def poly_to_json(p):
    """{"vars": r, "terms": [...]} with terms ascending in graded-lex order.

    Polynomials are emitted unit-normalized so that equal unit classes have
    byte-identical serializations.
    """
    q = normalize_unit(p)
    return {"vars": q.nvars,
            "terms": [{"exp": list(e), "coef": c} for e, c in q.sorted_terms()]}


def poly_from_json(obj):
    return LaurentPoly(obj["vars"],
                       {tuple(t["exp"]): t["coef"] for t in obj["terms"]})
