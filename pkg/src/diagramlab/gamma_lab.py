"""Concrete operator laboratory over GL2 of a small finite field.

Principal-series modules carry the weighted permutation action of the
group on the projective line; the summed operators S_s project diagonal
eigenvectors toward the socle, and MeatAxe-style spinning decides
irreducibility and socles by exhaustive sweeps.  Everything here is an
oracle: results are computed, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf import FieldDescriptor
from .gfmatrix import DenseMatrix, EchelonBasis, GFTable
from .weights import Character


class GammaError(Exception):
    pass


class SOutOfRangeError(GammaError):
    pass


class ZeroModuleError(GammaError):
    pass


class NotUniqueError(GammaError):
    """The socle-projection sweep found no or several exponents."""

    def __init__(self, chi: Character, hits: list[int]):
        super().__init__(f"sweep for {chi!r} found exponents {hits}")
        self.chi = chi
        self.hits = hits


# ---------------------------------------------------------------------------
# 2x2 matrices over the lab field, as 4-tuples of codes
# ---------------------------------------------------------------------------

def mat_mul(F: FieldDescriptor, A, B):
    a, b, c, d = A
    e, f, g, h = B
    m, s = F.mul_codes, F.add_codes
    return (s(m(a, e), m(b, g)), s(m(a, f), m(b, h)),
            s(m(c, e), m(d, g)), s(m(c, f), m(d, h)))


def mat_det(F: FieldDescriptor, A):
    a, b, c, d = A
    return F.sub_codes(F.mul_codes(a, d), F.mul_codes(b, c))


def mat_inv(F: FieldDescriptor, A):
    a, b, c, d = A
    det = mat_det(F, A)
    i = F.mul_codes
    di = F.inv_code(det)
    n = F.neg_code
    return (i(d, di), i(n(b), di), i(n(c), di), i(a, di))


def group_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


# ---------------------------------------------------------------------------
# Linear operators
# ---------------------------------------------------------------------------

class MonomialOp:
    """One nonzero entry per row: w[i] = scale[i] * v[perm[i]]."""

    __slots__ = ("table", "perm", "scale")

    def __init__(self, table: GFTable, perm: np.ndarray, scale: np.ndarray):
        self.table = table
        self.perm = perm
        self.scale = scale

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.table.MUL[self.scale, v[self.perm]]

    def to_dense(self) -> DenseMatrix:
        n = len(self.perm)
        data = np.zeros((n, n), dtype=np.int16)
        data[np.arange(n), self.perm] = self.scale
        return DenseMatrix(self.table, data)


class DenseOp:
    __slots__ = ("mat",)

    def __init__(self, mat: DenseMatrix):
        self.mat = mat

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.mat.matvec(v)

    def to_dense(self) -> DenseMatrix:
        return self.mat


# ---------------------------------------------------------------------------
# Context and modules
# ---------------------------------------------------------------------------

class GammaContext:
    """The lab group: generating matrices, unipotent and torus families,
    and the antidiagonal/slanted elements the summed operators use."""

    def __init__(self, field: FieldDescriptor):
        self.field = field
        self.table = GFTable(field)
        self.q = field.order
        F = field
        one = F.encode((1,))
        self.one = one
        field._ensure_tables()
        g = field._gen_code
        self.gen_code = g
        self.w = (0, one, one, 0)
        # u(x) upper unipotent, l(x) lower, t(a,d) diagonal
        self.u = lambda x: (one, x, 0, one)
        self.diag = lambda a, d: (a, 0, 0, d)
        self.generators = [self.u(one), self.diag(g, one), self.w]
        basis = [F.encode(tuple(1 if i == j else 0 for i in range(F.k)))
                 for j in range(F.k)]
        self.u_gens = [self.u(b) for b in basis]
        self.torus_gens = [self.diag(g, one), self.diag(one, g)]
        self.g_lambda = [(lam, one, one, 0) for lam in range(self.q)]
        self._check_generation()

    def _check_generation(self) -> None:
        nat = build_natural_module(self)
        v = self.table.vec([self.one, self.field.add_codes(self.one, self.one)])
        basis = spin(nat, v)
        if basis.shape[0] != 2:
            raise GammaError("generators failed to spin the natural module")


class GammaModule:
    """A module with its generator, unipotent and torus actions (and the
    slanted family when the module hosts the summed operators)."""

    def __init__(self, table: GFTable, dim: int, spin_ops, u_ops, torus_ops,
                 glambda_ops=None, name: str = "module"):
        self.table = table
        self.dim = dim
        self.spin_ops = spin_ops
        self.u_ops = u_ops
        self.torus_ops = torus_ops
        self.glambda_ops = glambda_ops
        self.name = name

    def zero_vec(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int16)

    def basis_vec(self, i: int) -> np.ndarray:
        v = self.zero_vec()
        v[i] = self.table.field.encode((1,))
        return v


def build_natural_module(ctx: GammaContext) -> GammaModule:
    def op(M):
        return DenseOp(DenseMatrix.from_rows(ctx.table, [[M[0], M[1]], [M[2], M[3]]]))
    return GammaModule(
        ctx.table, 2,
        [op(M) for M in ctx.generators],
        [op(M) for M in ctx.u_gens],
        [op(M) for M in ctx.torus_gens],
        [op(M) for M in ctx.g_lambda],
        name="natural",
    )


class PrincipalSeriesModule(GammaModule):
    """Functions on the group transforming by a torus character under the
    upper-triangular subgroup, with the right-translation action.

    Basis is indexed by the projective line: coset representatives are the
    lower unipotents (affine points, by field code) and the antidiagonal
    element (the point at infinity, last index).  The basis function
    supported at the identity coset is an unipotent-invariant eigenvector
    with the inducing character.
    """

    def __init__(self, ctx: GammaContext, chi: Character):
        if chi.modulus != ctx.q - 1:
            raise GammaError(f"character modulus {chi.modulus} does not match q-1")
        self.ctx = ctx
        self.chi = chi
        q = ctx.q
        super().__init__(
            ctx.table, q + 1,
            [self._op(M) for M in ctx.generators],
            [self._op(M) for M in ctx.u_gens],
            [self._op(M) for M in ctx.torus_gens],
            [self._op(M) for M in ctx.g_lambda],
            name=f"ps({chi.e_a},{chi.e_d})",
        )
        self.f_chi_index = 0

    def _chi_val(self, a_code: int, d_code: int) -> int:
        F = self.ctx.field
        return F.mul_codes(F.pow_code(a_code, self.chi.e_a),
                           F.pow_code(d_code, self.chi.e_d))

    def _op(self, M) -> MonomialOp:
        ctx = self.ctx
        F = ctx.field
        q = ctx.q
        one = ctx.one
        perm = np.zeros(q + 1, dtype=np.int64)
        scale = np.zeros(q + 1, dtype=np.int16)
        for idx in range(q + 1):
            rep = (one, 0, idx, one) if idx < q else ctx.w
            P = mat_mul(F, rep, M)
            a, b, c, d = P
            if d != 0:
                y = F.mul_codes(c, F.inv_code(d))
                a_B = F.mul_codes(mat_det(F, P), F.inv_code(d))
                perm[idx] = y
                scale[idx] = self._chi_val(a_B, d)
            else:
                perm[idx] = q
                scale[idx] = self._chi_val(b, c)
        return MonomialOp(ctx.table, perm, scale)

    def f_chi(self) -> np.ndarray:
        return self.basis_vec(self.f_chi_index)


def build_principal_series(ctx: GammaContext, chi: Character) -> PrincipalSeriesModule:
    return PrincipalSeriesModule(ctx, chi)


# ---------------------------------------------------------------------------
# The summed operators
# ---------------------------------------------------------------------------

def apply_S_s(module: GammaModule, v: np.ndarray, s: int,
              zero_pow_zero: bool = True) -> np.ndarray:
    """sum over lam of lam^s (g_lam . v), exactly.

    The lam = 0 term contributes only at s = 0, and then only under the
    0^0 = 1 convention (configurable; sensitivity is reported upstream).
    """
    q = module.table.q
    if not 0 <= s <= q - 1:
        raise SOutOfRangeError(f"s={s} outside [0, {q - 1}]")
    if module.glambda_ops is None:
        raise GammaError("module carries no slanted family")
    F = module.table.field
    out = module.zero_vec()
    ADD, MUL = module.table.ADD, module.table.MUL
    for lam in range(q):
        if lam == 0:
            if s != 0 or not zero_pow_zero:
                continue
            coeff = F.encode((1,))
        else:
            coeff = F.pow_code(lam, s)
        out = ADD[out, MUL[coeff][module.glambda_ops[lam].apply(v)]]
    return out


# ---------------------------------------------------------------------------
# Spinning, invariants, socle
# ---------------------------------------------------------------------------

def spin(module: GammaModule, v: np.ndarray) -> DenseMatrix:
    """Echelonized basis of the smallest submodule containing v."""
    basis = EchelonBasis(module.table, module.dim)
    work = []
    if basis.insert(v.astype(np.int16)):
        work.append(v.astype(np.int16))
    while work:
        cur = work.pop(0)
        for op in module.spin_ops:
            w = op.apply(cur)
            if basis.insert(w):
                work.append(w)
    return basis.matrix()


def restrict(module: GammaModule, basis: DenseMatrix) -> GammaModule:
    """The module structure on an invariant subspace, in basis coordinates."""
    eb = EchelonBasis(module.table, module.dim)
    for row in basis.data:
        eb.insert(row)
    k = basis.shape[0]

    def restrict_ops(ops):
        if ops is None:
            return None
        out = []
        for op in ops:
            cols = []
            for i in range(k):
                c = eb.coords(op.apply(basis.data[i]))
                if c is None:
                    raise GammaError("subspace is not stable under the action")
                cols.append(c)
            data = np.stack(cols, axis=1) if k else np.zeros((0, 0), dtype=np.int16)
            out.append(DenseOp(DenseMatrix(module.table, data)))
        return out

    return GammaModule(module.table, k,
                       restrict_ops(module.spin_ops),
                       restrict_ops(module.u_ops),
                       restrict_ops(module.torus_ops),
                       restrict_ops(module.glambda_ops),
                       name=module.name + "|sub")


def u_invariants(module: GammaModule) -> list[tuple[Character, np.ndarray]]:
    """Basis of the unipotent-fixed subspace, split into simultaneous torus
    eigenvectors; entries are (character, vector) with vectors in module
    coordinates, sorted by character exponents."""
    if module.dim == 0:
        return []
    t = module.table
    rows = []
    ident = DenseMatrix.identity(t, module.dim)
    for op in module.u_ops:
        rows.append(op.to_dense().sub(ident).data)
    fixed = DenseMatrix(t, np.vstack(rows)).kernel()  # rows span the fixed space
    d = fixed.shape[0]
    if d == 0:
        return []
    feb = EchelonBasis(t, module.dim)
    for row in fixed.data:
        feb.insert(row)
    fixed = feb.matrix()

    def restrict_to(rows_matrix: DenseMatrix, op_dense: DenseMatrix,
                    parent_coords) -> DenseMatrix:
        cols = []
        for i in range(rows_matrix.shape[0]):
            img = op_dense.matvec(rows_matrix.data[i])
            c = parent_coords(img)
            if c is None:
                raise GammaError("torus does not preserve the fixed space")
            cols.append(c)
        return DenseMatrix(t, np.stack(cols, axis=1))

    t1 = restrict_to(fixed, module.torus_ops[0].to_dense(), feb.coords)
    t2 = restrict_to(fixed, module.torus_ops[1].to_dense(), feb.coords)
    q1 = t.q - 1
    results: list[tuple[Character, np.ndarray]] = []
    ident_d = DenseMatrix.identity(t, d)
    for l1 in range(1, t.q):
        k1 = t1.sub(DenseMatrix(t, t.MUL[l1][ident_d.data])).kernel()
        if k1.shape[0] == 0:
            continue
        k1eb = EchelonBasis(t, d)
        for row in k1.data:
            k1eb.insert(row)
        k1m = k1eb.matrix()
        t2r = restrict_to(k1m, t2, k1eb.coords)
        ident_e = DenseMatrix.identity(t, k1m.shape[0])
        for l2 in range(1, t.q):
            k2 = t2r.sub(DenseMatrix(t, t.MUL[l2][ident_e.data])).kernel()
            if k2.shape[0] == 0:
                continue
            chi = Character(q1, t.log(l1), t.log(l2))
            lifted = DenseMatrix(t, k2.data) @ k1m @ DenseMatrix(t, fixed.data)
            for row in lifted.data:
                results.append((chi, row))
    results.sort(key=lambda cv: (cv[0].e_a, cv[0].e_d))
    return results


def is_irreducible(module: GammaModule) -> bool:
    """Deterministic sweep: spin every unipotent eigenvector and every basis
    vector; reducible iff a proper nonzero submodule shows up.  Complete
    whenever every submodule meets the unipotent-fixed space in a swept
    line, which holds in the multiplicity-free situations the lab meets."""
    if module.dim == 0:
        raise ZeroModuleError("irreducibility of the zero module is undefined")
    if module.dim == 1:
        return True
    candidates = [v for _, v in u_invariants(module)]
    candidates += [module.basis_vec(i) for i in range(module.dim)]
    for v in candidates:
        k = spin(module, v).shape[0]
        if 0 < k < module.dim:
            return False
    return True


def socle(module: GammaModule) -> tuple[DenseMatrix, list[tuple[Character, int]]]:
    """Sum of the spins of unipotent eigenvectors that generate irreducible
    submodules, with the (character, dimension) list of the constituents."""
    acc = EchelonBasis(module.table, module.dim)
    constituents: list[tuple[Character, int]] = []
    for chi, v in u_invariants(module):
        sb = spin(module, v)
        sub = restrict(module, sb)
        if sub.dim and is_irreducible(sub):
            grew = False
            for row in sb.data:
                grew = acc.insert(row) or grew
            if grew:
                constituents.append((chi, sb.shape[0]))
    return acc.matrix(), constituents


# ---------------------------------------------------------------------------
# The exponent sweep
# ---------------------------------------------------------------------------

@dataclass
class FindSResult:
    chi: Character
    s: int
    witness: np.ndarray
    hits: list[int]
    witness_in_socle: bool
    witness_u_invariant: bool
    convention_sensitive: bool

    def as_entry(self, zero_pow_zero: bool) -> dict:
        return {
            "chi": [self.chi.e_a, self.chi.e_d],
            "s": self.s,
            "unique": True,
            "convention": "0^0=1" if zero_pow_zero else "0^0=0",
            "sensitive": self.convention_sensitive,
        }


def _sweep_hits(module: PrincipalSeriesModule, soc: EchelonBasis,
                images: list[np.ndarray], zero_pow_zero: bool):
    """All s whose image is a nonzero unipotent-invariant socle member
    (membership in the fixed vectors of the socle, not just the socle),
    sharing precomputed g_lam images."""
    t = module.table
    F = t.field
    q = t.q
    hits = []
    witnesses = {}
    for s in range(q):
        out = module.zero_vec()
        for lam in range(q):
            if lam == 0:
                if s != 0 or not zero_pow_zero:
                    continue
                coeff = F.encode((1,))
            else:
                coeff = F.pow_code(lam, s)
            out = t.ADD[out, t.MUL[coeff][images[lam]]]
        if not np.any(out) or not soc.contains(out):
            continue
        if all(np.array_equal(op.apply(out), out) for op in module.u_ops):
            hits.append(s)
            witnesses[s] = out
    return hits, witnesses


def find_s(ctx: GammaContext, chi: Character,
           zero_pow_zero: bool = True) -> FindSResult:
    """Exhaustive sweep for the unique exponent sending the eigenvector to a
    nonzero unipotent-invariant vector of the socle of its spun submodule;
    no closed form is assumed."""
    if chi.is_swap_fixed:
        raise GammaError(f"{chi!r} is swap-fixed; the uniqueness claim excludes it")
    ps = build_principal_series(ctx, chi)
    v = ps.f_chi()
    mbasis = spin(ps, v)
    sub = restrict(ps, mbasis)
    soc_sub, _ = socle(sub)
    soc = EchelonBasis(ctx.table, ps.dim)
    if soc_sub.shape[0]:
        for row in (soc_sub @ mbasis).data:
            soc.insert(row)
    images = [op.apply(v) for op in ps.glambda_ops]
    hits, witnesses = _sweep_hits(ps, soc, images, zero_pow_zero)
    flip_hits, _ = _sweep_hits(ps, soc, images, not zero_pow_zero)
    if len(hits) != 1:
        raise NotUniqueError(chi, hits)
    s = hits[0]
    w = witnesses[s]
    return FindSResult(chi, s, w, hits, True, True, hits != flip_hits)


def sweep_s_table(ctx: GammaContext, zero_pow_zero: bool = True,
                  chars: Iterable[Character] | None = None):
    """Run the exponent sweep over all torus characters (or a subset).

    Returns (entries, findings): entries one per character in exponent-lex
    order, swap-fixed characters marked excluded; findings collect the
    non-unique sweeps, which are reported, never raised.
    """
    q1 = ctx.q - 1
    if chars is None:
        chars = [Character(q1, ea, ed) for ea in range(q1) for ed in range(q1)]
    entries = []
    findings = []
    for chi in chars:
        if chi.is_swap_fixed:
            entries.append({"chi": [chi.e_a, chi.e_d], "s": None, "unique": None,
                            "excluded": "swap-fixed",
                            "convention": "0^0=1" if zero_pow_zero else "0^0=0"})
            continue
        try:
            res = find_s(ctx, chi, zero_pow_zero)
        except NotUniqueError as exc:
            entry = {"chi": [chi.e_a, chi.e_d], "s": None, "unique": False,
                     "hits": exc.hits, "unresolved": True,
                     "convention": "0^0=1" if zero_pow_zero else "0^0=0"}
            entries.append(entry)
            findings.append(entry)
            continue
        if not (res.witness_in_socle and res.witness_u_invariant):
            entry = res.as_entry(zero_pow_zero)
            entry["unresolved"] = True
            entries.append(entry)
            findings.append(entry)
            continue
        entries.append(res.as_entry(zero_pow_zero))
    return entries, findings


def check_word_identities(ctx: GammaContext, module: GammaModule, n_words: int,
                          rng, max_len: int = 4) -> int:
    """Evaluate random generator words two ways: as composed module operators
    and as the module operator of the group product.  Returns the number of
    identities checked; raises on any mismatch."""
    if not isinstance(module, PrincipalSeriesModule):
        raise GammaError("word checks run on principal-series modules")
    F = ctx.field
    ident = DenseMatrix.identity(ctx.table, module.dim)
    for n in range(n_words):
        length = rng.randint(1, max_len)
        idxs = [rng.randrange(len(ctx.generators)) for _ in range(length)]
        prod = (F.encode((1,)), 0, 0, F.encode((1,)))
        composed = ident
        # h1 h2 acts as op(h1) o op(h2)
        for i in idxs:
            prod = mat_mul(F, prod, ctx.generators[i])
            composed = composed @ module._op(ctx.generators[i]).to_dense()
        direct = module._op(prod).to_dense()
        if direct != composed:
            raise GammaError(f"word identity failed at word {n}: {idxs}")
    return n_words
