"""The infinite twisted diagram: character registry, index-shift involution,
socle cycling, and finitely supported coefficient vectors.

The diagram is a Z-indexed tower of copies of a fixed block decomposition.
Its normalizer involution acts on (character, coefficient-vector) pairs:
most characters transport coefficients unchanged, one pair shifts indices
by +-1 and one pair scales entrywise by a nonvanishing sequence lambda.
All scalar data lives in a finite model GF(q^m) of the algebraic closure;
reports record m and that "spanning" means spanning GF(q^m) over GF(q).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .gf import FieldDescriptor, FieldElem, MixedFieldsError, embed_subfield, subfield_span
from .weights import (
    Character,
    GenericParams,
    OrbitIndexSet,
    WeightTuple,
    default_weight_table,
    delta,
    special_characters,
    weight_tuple,
)


class DiagramError(Exception):
    pass


class CharacterClashError(DiagramError):
    """Two registered characters coincide; the involution cases would be ambiguous."""


class UnknownCharacterError(DiagramError):
    pass


class WindowOverflowError(DiagramError):
    """A transport would move support outside the working window."""


class CycleUndefinedError(DiagramError):
    """The socle cycling map is not pinned on this character."""


SCALE_ONE = "one"
SCALE_LAMBDA = "lambda"
SCALE_LAMBDA_INV = "lambda_inverse"


@dataclass(frozen=True)
class TransportSpec:
    """Index shift and entrywise scale kind applied by the involution."""

    shift: int
    scale: str


GENERIC_TRANSPORT = TransportSpec(0, SCALE_ONE)


# ---------------------------------------------------------------------------
# Coefficient vectors: finitely supported maps index -> field element
# ---------------------------------------------------------------------------

class CoeffVector:
    """Sparse vector over a window of Z; zero entries are never stored.

    Internally a sorted tuple of (index, code) pairs over a fixed field,
    which makes vectors hashable and cheap to compare.
    """

    __slots__ = ("field", "entries")

    def __init__(self, field: FieldDescriptor, entries: tuple[tuple[int, int], ...]):
        self.field = field
        self.entries = entries

    @classmethod
    def from_items(cls, field: FieldDescriptor,
                   items: Iterable[tuple[int, "FieldElem | int"]]) -> "CoeffVector":
        acc: dict[int, int] = {}
        for i, v in items:
            if isinstance(v, FieldElem):
                if v.field != field:
                    raise MixedFieldsError("coefficient from a different field")
                code = v.code
            else:
                code = int(v) % field.p
            if code:
                acc[i] = field.add_codes(acc[i], code) if i in acc else code
                if acc[i] == 0:
                    del acc[i]
        return cls(field, tuple(sorted(acc.items())))

    @classmethod
    def unit(cls, field: FieldDescriptor, i: int, scalar: "FieldElem | None" = None) -> "CoeffVector":
        code = scalar.code if scalar is not None else field.encode((1,))
        if code == 0:
            return cls(field, ())
        return cls(field, ((i, code),))

    # -- inspection -----------------------------------------------------------

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def min_index(self) -> int:
        return self.entries[0][0]

    def items(self):
        for i, code in self.entries:
            yield i, FieldElem(self.field, code)

    def __getitem__(self, i: int) -> FieldElem:
        for j, code in self.entries:
            if j == i:
                return FieldElem(self.field, code)
        return FieldElem(self.field, 0)

    # -- functional updates ------------------------------------------------------

    def shifted(self, t: int) -> "CoeffVector":
        if t == 0:
            return self
        return CoeffVector(self.field, tuple((i + t, c) for i, c in self.entries))

    def scaled(self, scalar: FieldElem) -> "CoeffVector":
        if scalar.field != self.field:
            raise MixedFieldsError("scalar from a different field")
        if scalar.code == 0:
            return CoeffVector(self.field, ())
        mul = self.field.mul_codes
        return CoeffVector(self.field, tuple((i, mul(c, scalar.code)) for i, c in self.entries))

    def transported(self, shift: int, scale_codes: "Mapping[int, int] | None") -> "CoeffVector":
        """Apply c'_{i+shift} = scale(i) * c_i with per-source-index scale codes."""
        mul = self.field.mul_codes
        out = []
        for i, c in self.entries:
            s = scale_codes[i] if scale_codes is not None else None
            code = mul(c, s) if s is not None else c
            if code:
                out.append((i + shift, code))
        return CoeffVector(self.field, tuple(out))

    def minus(self, other: "CoeffVector") -> "CoeffVector":
        if other.field != self.field:
            raise MixedFieldsError("vectors from different fields")
        acc = dict(self.entries)
        sub = self.field.sub_codes
        for i, c in other.entries:
            r = sub(acc.get(i, 0), c)
            if r:
                acc[i] = r
            elif i in acc:
                del acc[i]
        return CoeffVector(self.field, tuple(sorted(acc.items())))

    def normalized(self) -> "CoeffVector":
        """Scale so the lowest-index nonzero entry is 1."""
        if not self.entries:
            return self
        lead = self.entries[0][1]
        if lead == self.field.encode((1,)):
            return self
        inv = self.field.inv_code(lead)
        mul = self.field.mul_codes
        return CoeffVector(self.field, tuple((i, mul(c, inv)) for i, c in self.entries))

    # -- dunder ------------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, CoeffVector) and self.entries == other.entries \
            and self.field == other.field

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        inner = " + ".join(f"{list(self.field.decode(c))}*e{i}" for i, c in self.entries)
        return f"<{inner or '0'}>"


# ---------------------------------------------------------------------------
# Character registry
# ---------------------------------------------------------------------------

class CharacterRegistry:
    """Characters of the tower's diagonal layer with their block incidences,
    transports and the socle cycling map.

    Registered characters are the socle character of each block plus the
    four distinguished ones living in blocks {2}, {}, {0,1}, {0} (two swap
    pairs).  Swaps of registered characters are "known": they have a
    transport case even when no facts are ever stored at them.
    """

    def __init__(self, params: GenericParams,
                 weight_table: Mapping[int, WeightTuple],
                 socle_chars: Mapping[int, Character],
                 specials,
                 s_values: Mapping[Character, int] | None = None):
        self.params = params
        self.weight_table = dict(weight_table)
        self.socle_chars = dict(socle_chars)  # bitmask -> Character
        self.specials = specials
        self.chi1: Character = specials.chi1
        self.chi2: Character = specials.chi2
        self.chi1_swap = self.chi1.swap()
        self.chi2_swap = self.chi2.swap()
        f = params.f
        self.chi_plus = socle_chars[OrbitIndexSet.of(f, {1}).bitmask]
        self.chi_minus = socle_chars[OrbitIndexSet.of(f, {0, 1}).bitmask]
        self.s_values: dict[Character, int] = dict(s_values or {})

        self._socle_mask_by_char = {chi: mask for mask, chi in self.socle_chars.items()}
        mask2 = OrbitIndexSet.of(f, {2}).bitmask
        mask_empty = 0
        mask01 = OrbitIndexSet.of(f, {0, 1}).bitmask
        mask0 = OrbitIndexSet.of(f, {0}).bitmask
        self.block_of: dict[Character, int] = dict(self._socle_mask_by_char)
        self.block_of[self.chi1] = mask2
        self.block_of[self.chi1_swap] = mask_empty
        self.block_of[self.chi2] = mask01
        self.block_of[self.chi2_swap] = mask0
        self.incidence: dict[int, tuple[Character, ...]] = {}
        for mask, chi in self.socle_chars.items():
            extra = tuple(spec for spec in
                          (self.chi1, self.chi1_swap, self.chi2, self.chi2_swap)
                          if self.block_of[spec] == mask)
            self.incidence[mask] = (chi,) + extra
        self.cyc: dict[Character, Character] = {}
        for mask, chi in self.socle_chars.items():
            J = OrbitIndexSet.from_bitmask(f, mask)
            self.cyc[chi] = self.socle_chars[delta(J).bitmask]
        self.cyc[self.chi2] = self.socle_chars[mask0]
        self.cyc[self.chi1] = self.socle_chars[mask_empty]
        self.notes = {
            "cyc_chi1": "forced: cyc(cyc(chi1)) = cyc(chi2) lands in block {0} and "
                        "delta is injective, so cyc(chi1) is the socle character of {}",
        }

        self._transports: dict[Character, TransportSpec] = {
            self.chi_plus: TransportSpec(+1, SCALE_ONE),
            self.chi_plus.swap(): TransportSpec(-1, SCALE_ONE),
            self.chi_minus: TransportSpec(-1, SCALE_ONE),
            self.chi_minus.swap(): TransportSpec(+1, SCALE_ONE),
            self.chi1: TransportSpec(0, SCALE_LAMBDA),
            self.chi1_swap: TransportSpec(0, SCALE_LAMBDA_INV),
        }
        self._known = set(self.block_of) | {chi.swap() for chi in self.block_of}

    # -- queries ---------------------------------------------------------------

    def characters(self) -> list[Character]:
        """All registered characters, socle first by bitmask then the specials."""
        out = [self.socle_chars[m] for m in sorted(self.socle_chars)]
        out += [self.chi1, self.chi1_swap, self.chi2, self.chi2_swap]
        return out

    def is_registered(self, chi: Character) -> bool:
        return chi in self.block_of

    def is_known(self, chi: Character) -> bool:
        return chi in self._known

    def is_socle(self, chi: Character) -> bool:
        return chi in self._socle_mask_by_char

    def socle_mask(self, chi: Character) -> int:
        return self._socle_mask_by_char[chi]

    def socle_char_of_block(self, mask: int) -> Character:
        return self.socle_chars[mask]

    def transport_of(self, chi: Character) -> TransportSpec:
        """Transport case of the involution for a known character."""
        if chi not in self._known:
            raise UnknownCharacterError(f"{chi!r} is not a known character of the tower")
        return self._transports.get(chi, GENERIC_TRANSPORT)

    def cycle_target(self, chi: Character) -> Character:
        t = self.cyc.get(chi)
        if t is None:
            raise CycleUndefinedError(f"socle cycling is not pinned on {chi!r}")
        return t

    def attach_s_values(self, entries: Iterable[tuple[Character, int]]) -> None:
        for chi, s in entries:
            self.s_values[chi] = s


def build_registry(params: GenericParams,
                   weight_table: Mapping[int, WeightTuple] | None = None,
                   special_twist: int = 1,
                   s_values: Mapping[Character, int] | None = None) -> CharacterRegistry:
    """Build and validate the character registry.

    Raises :class:`CharacterClashError` when any two registered characters
    (or any two of the six transport-distinguished ones) coincide, which
    signals degenerate parameters or a bad table.
    """
    from .weights import character_from_tuple

    if weight_table is None:
        weight_table = default_weight_table(params)
    socle_chars: dict[int, Character] = {}
    for mask in range(1 << params.f):
        J = OrbitIndexSet.from_bitmask(params.f, mask)
        wt = weight_tuple(J, params, weight_table)
        socle_chars[mask] = character_from_tuple(wt.values, params.p, params.f, wt.twist)
    specials = special_characters(params, special_twist)

    labelled: list[tuple[str, Character]] = [
        (f"socle[{OrbitIndexSet.from_bitmask(params.f, m)!r}]", chi)
        for m, chi in sorted(socle_chars.items())
    ]
    labelled += [("chi1", specials.chi1), ("chi1^s", specials.chi1.swap()),
                 ("chi2", specials.chi2), ("chi2^s", specials.chi2.swap())]
    f = params.f
    labelled += [("chi_plus^s", socle_chars[OrbitIndexSet.of(f, {1}).bitmask].swap()),
                 ("chi_minus^s", socle_chars[OrbitIndexSet.of(f, {0, 1}).bitmask].swap())]
    seen: dict[Character, str] = {}
    for name, chi in labelled:
        if chi in seen:
            raise CharacterClashError(
                f"{name} and {seen[chi]} both encode to {chi!r}; "
                "adjust twists or parameters")
        seen[chi] = name
    return CharacterRegistry(params, weight_table, socle_chars, specials, s_values)


# ---------------------------------------------------------------------------
# The lambda sequence
# ---------------------------------------------------------------------------

LAMBDA_MODES = ("rational", "twisted", "spanning", "degenerate")


class LambdaSeq:
    """Nonvanishing scalars indexed by the working window [-W, W].

    Modes: rational (all values in the base field), twisted (value at 0
    rational, all others different from it), spanning (twisted and the
    values span the extension over the base), degenerate (no constraint).
    The mode predicate is validated at construction.
    """

    def __init__(self, base: FieldDescriptor, ext: FieldDescriptor,
                 window: int, values: Mapping[int, FieldElem], mode: str):
        if mode not in LAMBDA_MODES:
            raise DiagramError(f"unknown lambda mode {mode!r}")
        if ext.parent != base:
            raise DiagramError("extension field must declare the base field as parent")
        self.base = base
        self.ext = ext
        self.window = window
        self.mode = mode
        self.values: dict[int, FieldElem] = {}
        for i in range(-window, window + 1):
            if i not in values:
                raise DiagramError(f"lambda value missing at index {i}")
            v = values[i]
            if v.field != ext:
                raise MixedFieldsError("lambda values must live in the extension field")
            if v.is_zero:
                raise DiagramError(f"lambda value at index {i} is zero")
            self.values[i] = v
        self._rational_codes = ext.embedded_codes()
        self._validate_mode()

    def _validate_mode(self) -> None:
        lam0 = self.values[0]
        if self.mode in ("rational", "twisted", "spanning"):
            if lam0.code not in self._rational_codes:
                raise DiagramError("mode requires the value at index 0 to be base-rational")
        if self.mode == "rational":
            for i, v in self.values.items():
                if v.code not in self._rational_codes:
                    raise DiagramError(f"rational mode: value at {i} is not base-rational")
        if self.mode in ("twisted", "spanning"):
            for i, v in self.values.items():
                if i != 0 and v.code == lam0.code:
                    raise DiagramError(f"twisted mode: value at {i} equals the value at 0")
        if self.mode == "spanning":
            span = subfield_span(self.values.values(), self.base)
            m = self.ext.k // self.base.k
            if span.dimension != m:
                raise DiagramError(
                    f"spanning mode: values span dimension {span.dimension} of {m}")

    def at(self, i: int) -> FieldElem:
        try:
            return self.values[i]
        except KeyError:
            raise WindowOverflowError(f"index {i} outside working window "
                                      f"[-{self.window}, {self.window}]") from None

    def code_at(self, i: int) -> int:
        return self.at(i).code

    def inv_code_at(self, i: int) -> int:
        return self.ext.inv_code(self.at(i).code)

    def is_rational_at(self, i: int) -> bool:
        return self.at(i).code in self._rational_codes

    def is_rational_code(self, code: int) -> bool:
        return code in self._rational_codes

    def as_config(self) -> dict:
        return {
            "mode": self.mode,
            "window": self.window,
            "values": {str(i): list(v.coeffs) for i, v in sorted(self.values.items())},
        }


def generate_lambda(mode: str, base: FieldDescriptor, ext: FieldDescriptor,
                    window: int, rng,
                    overrides: Mapping[int, FieldElem] | None = None) -> LambdaSeq:
    """Draw a lambda sequence of the requested mode from a seeded rng.

    Overrides are applied after generation and revalidated by the mode
    predicate, so an inconsistent override fails loudly.
    """
    values: dict[int, FieldElem] = {}
    rational = sorted(ext.embedded_codes() - {0})
    if mode == "rational":
        lam0 = ext.from_code(rational[rng.randrange(len(rational))])
        values[0] = lam0
        pool = [c for c in rational if c != lam0.code]
        for i in range(1, window + 1):
            for j in (i, -i):
                if pool:
                    idx = rng.randrange(len(pool))
                    values[j] = ext.from_code(pool.pop(idx))
                else:  # window wider than the field: fall back to any non-lam0 value
                    values[j] = ext.from_code(rational[rng.randrange(len(rational))])
    elif mode in ("twisted", "spanning"):
        lam0 = ext.from_code(rational[rng.randrange(len(rational))])
        values[0] = lam0
        for i in range(1, window + 1):
            for j in (i, -i):
                while True:
                    v = ext.random_nonzero(rng)
                    if v.code != lam0.code:
                        values[j] = v
                        break
        if mode == "spanning":
            m = ext.k // base.k
            gen = ext.from_code(ext.encode((0, 1)) if ext.k > 1 else ext.encode((1,)))
            guard = 0
            while subfield_span(values.values(), base).dimension < m:
                v = values[1] * gen
                if v.code != lam0.code and not v.is_zero:
                    values[1] = v
                guard += 1
                if guard > 4 * m:  # pragma: no cover - generator powers span quickly
                    raise DiagramError("could not reach spanning mode")
    elif mode == "degenerate":
        v = ext.random_nonzero(rng)
        for i in range(-window, window + 1):
            values[i] = v
    else:
        raise DiagramError(f"unknown lambda mode {mode!r}")
    if overrides:
        for i, v in overrides.items():
            values[i] = v
    return LambdaSeq(base, ext, window, values, mode)


# ---------------------------------------------------------------------------
# The involution and the socle cycling map on coefficient shadows
# ---------------------------------------------------------------------------

def _scale_codes(spec: TransportSpec, support: tuple[int, ...], lam: LambdaSeq):
    if spec.scale == SCALE_ONE:
        return None
    if spec.scale == SCALE_LAMBDA:
        return {i: lam.code_at(i) for i in support}
    if spec.scale == SCALE_LAMBDA_INV:
        return {i: lam.inv_code_at(i) for i in support}
    raise DiagramError(f"unknown scale kind {spec.scale!r}")  # pragma: no cover


def _check_window(support: tuple[int, ...], shift: int, window: int) -> None:
    if not support:
        return
    lo, hi = support[0] + shift, support[-1] + shift
    if lo < -window or hi > window:
        raise WindowOverflowError(
            f"shift {shift:+d} moves support {list(support)} outside [-{window}, {window}]")


def transport_vector(chi: Character, c: CoeffVector, lam: LambdaSeq,
                     registry: CharacterRegistry) -> CoeffVector:
    """Move a coefficient vector by the involution transport of `chi`,
    enforcing the working window."""
    spec = registry.transport_of(chi)
    supp = c.support
    _check_window(supp, spec.shift, lam.window)
    scales = _scale_codes(spec, supp, lam)
    return c.transported(spec.shift, scales)


def pi_tilde(chi: Character, c: CoeffVector, lam: LambdaSeq,
             registry: CharacterRegistry) -> tuple[Character, CoeffVector]:
    """The normalizer involution on (character, coefficient vector) pairs.

    Applying it twice returns the input exactly, for every lambda mode.
    """
    return chi.swap(), transport_vector(chi, c, lam, registry)


def s_pi_tilde(chi: Character, c: CoeffVector, lam: LambdaSeq,
               registry: CharacterRegistry) -> tuple[Character, CoeffVector]:
    """One step of the socle cycling map on coefficient shadows.

    The character advances along the cycle map; coefficients move by the
    involution's transport only, since the socle projection itself never
    moves tower indices.
    """
    target = registry.cycle_target(chi)
    return target, transport_vector(chi, c, lam, registry)


@dataclass
class TwistIdentityReport:
    """Comparison of the two cycling paths into block {0}."""

    ok: bool
    mu: FieldElem
    samples: list[dict]
    ratio_formula: str = "lambda[i] * mu"

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "mu": list(self.mu.coeffs),
            "ratio_formula": self.ratio_formula,
            "samples": self.samples,
        }


def twist_identity_check(lam: LambdaSeq, registry: CharacterRegistry,
                         samples: Iterable[CoeffVector],
                         mu: FieldElem | None = None) -> TwistIdentityReport:
    """Verify that the two-step path from chi1 and the one-step path from
    chi2 both end at the socle character of block {0}, with coefficient
    multipliers differing exactly by lambda at every index (times the
    symbolic constant mu, configuration with default 1)."""
    ext = lam.ext
    if mu is None:
        mu = embed_subfield(lam.base.one(), ext)
    else:
        if mu.field == lam.base:
            mu = embed_subfield(mu, ext)
        elif mu.field != ext:
            raise MixedFieldsError("mu must live in the base or extension field")
        if mu.is_zero or mu.code not in ext.embedded_codes():
            raise DiagramError("mu must be a nonzero base-rational scalar")
    target = registry.socle_char_of_block(0b001)  # block {0}
    report_samples: list[dict] = []
    ok = True
    for c in samples:
        chi_a, v1 = s_pi_tilde(registry.chi1, c, lam, registry)
        chi_a, v1 = s_pi_tilde(chi_a, v1, lam, registry)
        v1 = v1.scaled(mu)  # basis mismatch between the two routes
        chi_b, v2 = s_pi_tilde(registry.chi2, c, lam, registry)
        sample_ok = (chi_a == target and chi_b == target)
        ratios = []
        for (i, a), (j, b) in zip(v1.entries, v2.entries):
            expected = ext.mul_codes(lam.code_at(i), mu.code)
            got = ext.mul_codes(a, ext.inv_code(b))
            ratios.append({"index": i, "ratio": list(ext.decode(got)),
                           "expected": list(ext.decode(expected))})
            if i != j or got != expected:
                sample_ok = False
        if v1.support != v2.support or v1.support != c.support:
            sample_ok = False
        ok = ok and sample_ok
        report_samples.append({
            "support": list(c.support),
            "ok": sample_ok,
            "ratios": ratios,
        })
    return TwistIdentityReport(ok, mu, report_samples)
