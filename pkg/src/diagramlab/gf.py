"""Exact arithmetic for GF(p^k) in polynomial basis.

Elements are stored as integer codes 0 .. p^k - 1 whose base-p digits,
read little-endian, are the coefficients of the residue polynomial.
Every field is described by a :class:`FieldDescriptor` holding the
characteristic, the degree and a monic irreducible modulus; extension
towers are expressed by constructing the big field with the small one
as a declared parent, which precomputes an embedding.

Fields of moderate order (the desk-scale defaults go up to 5^6 = 15625)
get lazily built log/antilog tables so that multiplication, inversion
and powers are O(1); the polynomial-basis representation is always the
source of truth, the tables are an optimization.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence


class FieldError(Exception):
    """Base class for finite-field construction and arithmetic errors."""


class NonPrimeError(FieldError):
    """Characteristic is not an odd prime."""


class ReducibleModulusError(FieldError):
    """Proposed modulus polynomial is not irreducible (or not monic of the right degree)."""


class MixedFieldsError(FieldError):
    """Operands belong to different field descriptors."""


class ZeroInverseError(FieldError):
    """Inversion (or a negative power) of zero was requested."""


class NoDeclaredParentError(FieldError):
    """Embedding requested into a field that does not declare the source as parent."""


# Orders up to this bound get log/antilog tables on first multiplication.
_TABLE_ORDER_LIMIT = 1 << 17


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# Dense polynomial helpers over GF(p).  Polynomials are tuples of ints in
# [0, p), little-endian, with no trailing zeros ("normalized").
# ---------------------------------------------------------------------------

def _pnorm(c: Sequence[int]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _pnorm(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _pnorm(out)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pnorm(out)


def _pdivmod(a, m, p):
    """Divide a by monic m, returning (quotient, remainder)."""
    a = list(a)
    dm = len(m) - 1
    if dm < 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(a) - dm, 0)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            q[i - dm] = c
            for j, y in enumerate(m):
                a[i - dm + j] = (a[i - dm + j] - c * y) % p
    return _pnorm(q), _pnorm(a)


def _pmod(a, m, p):
    return _pdivmod(a, m, p)[1]


def _pgcd(a, b, p):
    a, b = _pnorm(a), _pnorm(b)
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        bm = tuple((c * inv_lead) % p for c in b)
        a, b = b, _pmod(a, bm, p)
    return a


def _ppow_pk(m, p, n):
    """x^(p^n) mod m, by n successive p-th powers."""
    t = _pmod((0, 1), m, p)
    for _ in range(n):
        acc: tuple[int, ...] = (1,)
        base = t
        e = p
        while e:
            if e & 1:
                acc = _pmod(_pmul(acc, base, p), m, p)
            base = _pmod(_pmul(base, base, p), m, p)
            e >>= 1
        t = acc
    return t


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin irreducibility test for a monic modulus over GF(p)."""
    m = tuple(c % p for c in modulus)
    k = len(m) - 1
    if k < 1 or m[-1] != 1:
        return False
    if m[0] == 0 and k > 1:
        return False
    if k == 1:
        return True
    x = (0, 1)
    primes = set()
    n = k
    d = 2
    while d * d <= n:
        if n % d == 0:
            primes.add(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        primes.add(n)
    for ell in primes:
        h = _ppow_pk(m, p, k // ell)
        if len(_pgcd(_psub(h, x, p), m, p)) - 1 != 0:
            return False
    return _psub(_ppow_pk(m, p, k), x, p) == ()


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Deterministic default modulus of degree k over GF(p).

    Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 are scanned minimizing
    c_{k-1} first and the constant term last; the first irreducible wins.
    (For p=5, k=3 this yields x^3 + x + 1.)
    """
    for top_down in itertools.product(range(p), repeat=k):
        coeffs = tuple(reversed(top_down)) + (1,)
        if _is_irreducible(coeffs, p):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


class FieldDescriptor:
    """Immutable description of GF(p^k) with optional parent subfield.

    Do not instantiate directly; use :func:`make_field`, which validates
    the modulus.  All element-level arithmetic is available both on
    integer codes (``add_codes`` etc.) and through :class:`FieldElem`.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...],
                 parent: "FieldDescriptor | None" = None):
        self.p = p
        self.k = k
        self.modulus = modulus
        self.parent = parent
        self.order = p ** k
        self._log: list[int] | None = None
        self._exp: list[int] | None = None
        self._gen_code: int | None = None
        self._embed_table: list[int] | None = None  # parent code -> code here
        self._embedded_codes: frozenset[int] | None = None
        self._coord_basis: list[list[int]] | None = None  # inverse basis matrix mod p

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FieldDescriptor):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus) \
            and self.parent == other.parent
    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    # -- code-level arithmetic ----------------------------------------------

    def decode(self, code: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.k):
            code, r = divmod(code, p)
            out.append(r)
        return tuple(out)

    def encode(self, digits: Sequence[int]) -> int:
        p = self.p
        code = 0
        for d in reversed(tuple(digits)):
            code = code * p + (d % p)
        return code

    def add_codes(self, a: int, b: int) -> int:
        p = self.p
        code = 0
        mult = 1
        for _ in range(self.k):
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            code += ((ra + rb) % p) * mult
            mult *= p
        return code

    def neg_code(self, a: int) -> int:
        p = self.p
        code = 0
        mult = 1
        for _ in range(self.k):
            a, ra = divmod(a, p)
            code += (-ra % p) * mult
            mult *= p
        return code

    def sub_codes(self, a: int, b: int) -> int:
        return self.add_codes(a, self.neg_code(b))

    def _mul_codes_poly(self, a: int, b: int) -> int:
        prod = _pmod(_pmul(self.decode(a), self.decode(b), self.p), self.modulus, self.p)
        return self.encode(prod + (0,) * (self.k - len(prod)))

    def mul_codes(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is None:
            if self.order <= _TABLE_ORDER_LIMIT:
                self._ensure_tables()
            else:
                return self._mul_codes_poly(a, b)
        return self._exp[self._log[a] + self._log[b]]

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise ZeroInverseError("zero has no multiplicative inverse")
        if self.order <= _TABLE_ORDER_LIMIT:
            self._ensure_tables()
            return self._exp[(self.order - 1) - self._log[a]]
        return self.pow_code(a, self.order - 2)

    def pow_code(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return self.encode((1,))
            if e < 0:
                raise ZeroInverseError("zero to a negative power")
            return 0
        n = self.order - 1
        e %= n
        if self._exp is not None or self.order <= _TABLE_ORDER_LIMIT:
            self._ensure_tables()
            return self._exp[(self._log[a] * e) % n]
        acc = self.encode((1,))
        base = a
        while e:
            if e & 1:
                acc = self._mul_codes_poly(acc, base)
            base = self._mul_codes_poly(base, base)
            e >>= 1
        return acc

    def frobenius_code(self, a: int) -> int:
        return self.pow_code(a, self.p)

    # -- log/antilog tables --------------------------------------------------

    def _ensure_tables(self) -> None:
        if self._exp is not None:
            return
        n = self.order - 1
        primes = set()
        m = n
        d = 2
        while d * d <= m:
            if m % d == 0:
                primes.add(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            primes.add(m)
        gen = None
        for cand in range(2, self.order):
            if all(self._pow_poly(cand, n // ell) != 1 for ell in primes):
                gen = cand
                break
        if gen is None:  # pragma: no cover - every finite field has a generator
            raise FieldError("no multiplicative generator found")
        exp = [0] * (2 * n)
        log = [0] * self.order
        v = 1
        for i in range(n):
            exp[i] = v
            exp[i + n] = v
            log[v] = i
            v = self._mul_codes_poly(v, gen)
        self._exp = exp
        self._log = log
        self._gen_code = gen

    def _pow_poly(self, a: int, e: int) -> int:
        acc = 1
        base = a
        while e:
            if e & 1:
                acc = self._mul_codes_poly(acc, base)
            base = self._mul_codes_poly(base, base)
            e >>= 1
        return acc

    @property
    def multiplicative_generator(self) -> "FieldElem":
        self._ensure_tables()
        return FieldElem(self, self._gen_code)

    def log_code(self, a: int) -> int:
        """Discrete log base the canonical generator; a must be nonzero."""
        if a == 0:
            raise ZeroInverseError("log of zero")
        self._ensure_tables()
        return self._log[a]

    # -- element constructors -------------------------------------------------

    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    def one(self) -> "FieldElem":
        return FieldElem(self, self.encode((1,)))

    def element(self, value: "int | Sequence[int]") -> "FieldElem":
        """Make an element from a prime-subfield integer or a coefficient list."""
        if isinstance(value, int):
            return FieldElem(self, value % self.p)
        digits = tuple(value)
        if len(digits) > self.k:
            raise FieldError(f"coefficient list longer than degree {self.k}")
        return FieldElem(self, self.encode(digits + (0,) * (self.k - len(digits))))

    def from_code(self, code: int) -> "FieldElem":
        if not 0 <= code < self.order:
            raise FieldError(f"code {code} out of range for {self!r}")
        return FieldElem(self, code)

    def elements(self) -> Iterator["FieldElem"]:
        for c in range(self.order):
            yield FieldElem(self, c)

    def random_element(self, rng) -> "FieldElem":
        return FieldElem(self, rng.randrange(self.order))

    def random_nonzero(self, rng) -> "FieldElem":
        return FieldElem(self, rng.randrange(1, self.order))

    # -- subfield embedding ----------------------------------------------------

    def _ensure_embedding(self) -> None:
        if self._embed_table is not None:
            return
        parent = self.parent
        if parent is None:
            raise NoDeclaredParentError(f"{self!r} has no declared parent field")
        # Deterministic search for the smallest root of the parent modulus here.
        root = None
        for cand in range(self.order):
            acc = 0
            for c in reversed(parent.modulus):
                acc = self.add_codes(self.mul_codes(acc, cand), c % self.p)
            if acc == 0:
                root = cand
                break
        if root is None:
            raise NoDeclaredParentError(
                f"parent modulus has no root in {self!r}; degrees are incompatible")
        powers = [self.encode((1,))]
        for _ in range(parent.k - 1):
            powers.append(self.mul_codes(powers[-1], root))
        table = []
        for code in range(parent.order):
            digits = parent.decode(code)
            acc = 0
            for d, pw in zip(digits, powers):
                if d:
                    acc = self.add_codes(acc, self.mul_codes(d, pw))
            table.append(acc)
        self._embed_table = table
        self._embedded_codes = frozenset(table)

    def embed_code(self, parent_code: int) -> int:
        self._ensure_embedding()
        return self._embed_table[parent_code]

    def embedded_codes(self) -> frozenset[int]:
        """Set of codes forming the image of the declared parent field."""
        self._ensure_embedding()
        return self._embedded_codes

    # -- coordinates over the parent -------------------------------------------

    def _ensure_coords(self) -> None:
        """Build the inverse of the GF(p)-matrix sending parent-coordinate
        blocks (c_0,...,c_{m-1}) to sum_t embed(c_t) x^t."""
        if self._coord_basis is not None:
            return
        self._ensure_embedding()
        parent = self.parent
        m = self.k // parent.k
        if m * parent.k != self.k:
            raise NoDeclaredParentError("parent degree does not divide extension degree")
        x = self.encode((0, 1)) if self.k > 1 else self.encode((1,))
        cols = []
        xt = self.encode((1,))
        for _ in range(m):
            for j in range(parent.k):
                alpha_j = parent.encode(tuple(1 if i == j else 0 for i in range(parent.k)))
                cols.append(self.decode(self.mul_codes(self.embed_code(alpha_j), xt)))
            xt = self.mul_codes(xt, x)
        # Invert the k x k matrix whose columns are `cols`, over GF(p).
        p = self.p
        n = self.k
        aug = [[cols[j][i] for j in range(n)] + [1 if t == i else 0 for t in range(n)]
               for i in range(n)]
        row = 0
        for col in range(n):
            piv = next((r for r in range(row, n) if aug[r][col]), None)
            if piv is None:  # pragma: no cover - basis is invertible by construction
                raise FieldError("embedding basis is singular")
            aug[row], aug[piv] = aug[piv], aug[row]
            inv = pow(aug[row][col], p - 2, p)
            aug[row] = [(v * inv) % p for v in aug[row]]
            for r in range(n):
                if r != row and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[row])]
            row += 1
        self._coord_basis = [r[n:] for r in aug]

    def subfield_coords(self, code: int) -> tuple[int, ...]:
        """Coordinates of an element over the declared parent, as parent codes,
        with respect to the basis 1, x, ..., x^(m-1)."""
        self._ensure_coords()
        parent = self.parent
        digits = self.decode(code)
        p = self.p
        sol = [sum(r * d for r, d in zip(row, digits)) % p for row in self._coord_basis]
        m = self.k // parent.k
        return tuple(parent.encode(sol[t * parent.k:(t + 1) * parent.k]) for t in range(m))


class FieldElem:
    """An element of a fixed GF(p^k), wrapping an integer code."""

    __slots__ = ("field", "code")

    def __init__(self, field: FieldDescriptor, code: int):
        self.field = field
        self.code = code

    # -- helpers ------------------------------------------------------------

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise MixedFieldsError(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, int):
            return FieldElem(self.field, other % self.field.p)
        return NotImplemented  # type: ignore[return-value]

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.decode(self.code)

    @property
    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.add_codes(self.code, o.code))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.sub_codes(self.code, o.code))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.sub_codes(o.code, self.code))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.mul_codes(self.code, o.code))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.mul_codes(self.code, self.field.inv_code(o.code)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.mul_codes(o.code, self.field.inv_code(self.code)))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg_code(self.code))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow_code(self.code, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv_code(self.code))

    def frobenius(self) -> "FieldElem":
        return FieldElem(self.field, self.field.frobenius_code(self.code))

    # -- comparison -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.code == other.code and self.field == other.field
        if isinstance(other, int):
            return self.code == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.code))

    def __repr__(self):
        return f"{self.field!r}{list(self.coeffs)}"


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def make_field(p: int, k: int, modulus: Sequence[int] | None = None,
               parent: FieldDescriptor | None = None) -> FieldDescriptor:
    """Construct a validated GF(p^k) descriptor.

    The modulus, when given, is a little-endian coefficient list of a monic
    degree-k polynomial over GF(p); when omitted, the deterministic smallest
    irreducible (see :func:`_smallest_irreducible`) is used.  A parent field
    may be declared to enable subfield embedding; its characteristic must
    match and its degree divide k.
    """
    if not is_prime(p) or p == 2:
        raise NonPrimeError(f"characteristic must be an odd prime, got {p}")
    if k < 1:
        raise FieldError(f"degree must be positive, got {k}")
    if parent is not None:
        if parent.p != p:
            raise MixedFieldsError("parent field has different characteristic")
        if k % parent.k != 0:
            raise NoDeclaredParentError("parent degree must divide extension degree")
    if modulus is None:
        mod = _smallest_irreducible(p, k)
    else:
        mod = tuple(c % p for c in modulus)
        if len(mod) != k + 1 or mod[-1] != 1:
            raise ReducibleModulusError(
                f"modulus must be monic of degree {k}, got {list(modulus)}")
        if not _is_irreducible(mod, p):
            raise ReducibleModulusError(f"modulus {list(modulus)} is reducible over GF({p})")
    return FieldDescriptor(p, k, mod, parent)


def frobenius(a: FieldElem) -> FieldElem:
    """The p-power map a -> a^p; iterating k times is the identity."""
    return a.frobenius()


def embed_subfield(a: FieldElem, target: FieldDescriptor) -> FieldElem:
    """Embed an element of the declared parent field into `target`.

    The embedding sends the parent's polynomial generator to the smallest
    root of the parent modulus inside `target` (deterministic), and is a
    ring homomorphism.
    """
    if target.parent != a.field:
        raise NoDeclaredParentError(
            f"{target!r} was not constructed with {a.field!r} as parent")
    return FieldElem(target, target.embed_code(a.code))


class SpanResult:
    """Dimension and a basis subset from :func:`subfield_span`."""

    __slots__ = ("dimension", "basis")

    def __init__(self, dimension: int, basis: list[FieldElem]):
        self.dimension = dimension
        self.basis = basis

    def __repr__(self):
        return f"SpanResult(dimension={self.dimension}, basis={self.basis})"


def subfield_span(elements: Iterable[FieldElem], base: FieldDescriptor) -> SpanResult:
    """Dimension over `base` of the span of elements of its declared extension.

    Returns the first input elements that form a basis of the span.
    Dimension equal to k_ext / k_base means the elements span the
    whole extension.
    """
    elems = list(elements)
    ext = None
    for e in elems:
        if ext is None:
            ext = e.field
        elif e.field != ext:
            raise MixedFieldsError("span inputs lie in different fields")
    if ext is None:
        return SpanResult(0, [])
    if ext.parent != base:
        raise NoDeclaredParentError(f"{ext!r} does not declare {base!r} as parent")
    m = ext.k // base.k
    # Echelonize coordinate vectors over the base field.
    pivots: dict[int, list[int]] = {}
    basis: list[FieldElem] = []
    for e in elems:
        vec = list(ext.subfield_coords(e.code))
        for col in range(m):
            if vec[col] == 0:
                continue
            if col in pivots:
                f = vec[col]
                row = pivots[col]
                for j in range(m):
                    vec[j] = base.sub_codes(vec[j], base.mul_codes(f, row[j]))
            else:
                inv = base.inv_code(vec[col])
                pivots[col] = [base.mul_codes(inv, v) for v in vec]
                basis.append(e)
                break
    return SpanResult(len(basis), basis)
