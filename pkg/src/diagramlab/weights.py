"""Weight and character combinatorics over subsets of Z/f.

Serre-type weights are indexed by subsets J of {0,...,f-1}; the shift-flip
map delta drives how weights propagate, and each weight carries a tuple of
integers in [0, p-1] that encodes a torus character.  Only two of the eight
f=3 tuples are pinned by the standard parametrization; the rest are project
defaults that can be overridden from a table file and are flagged as
"configured" wherever they are echoed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .gf import is_prime


class WeightError(Exception):
    pass


class MissingTableEntryError(WeightError):
    """Requested subset has no entry in the weight table."""


class RangeViolationError(WeightError):
    """A tuple component fell outside [0, p-1]; the parameters are not generic enough."""


PROVENANCE_CANONICAL = "canonical"
PROVENANCE_CONFIGURED = "configured"


@dataclass(frozen=True)
class OrbitIndexSet:
    """A subset of Z/f with bitmask semantics."""

    f: int
    members: frozenset[int]

    def __post_init__(self):
        if not all(0 <= j < self.f for j in self.members):
            raise WeightError(f"members {set(self.members)} not within Z/{self.f}")

    @classmethod
    def of(cls, f: int, members: Iterable[int] = ()) -> "OrbitIndexSet":
        return cls(f, frozenset(members))

    @classmethod
    def from_bitmask(cls, f: int, mask: int) -> "OrbitIndexSet":
        return cls(f, frozenset(j for j in range(f) if mask >> j & 1))

    @property
    def bitmask(self) -> int:
        return sum(1 << j for j in self.members)

    def __contains__(self, j: int) -> bool:
        return j % self.f in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __repr__(self):
        inner = ",".join(str(j) for j in sorted(self.members))
        return "{" + inner + "}"


@dataclass(frozen=True)
class GenericParams:
    """The integer parameter tuple r of the underlying residual data."""

    p: int
    f: int
    r: tuple[int, ...]

    def __post_init__(self):
        if len(self.r) != self.f:
            raise WeightError(f"expected {self.f} parameters, got {len(self.r)}")

    @property
    def q(self) -> int:
        return self.p ** self.f


@dataclass(frozen=True)
class WeightTuple:
    """A weight label with its tuple, determinant twist and provenance flag."""

    label: OrbitIndexSet
    values: tuple[int, ...]
    provenance: str = PROVENANCE_CONFIGURED
    twist: int = 0


@dataclass(frozen=True)
class Character:
    """A diagonal-torus character as an exponent pair modulo q-1."""

    modulus: int
    e_a: int
    e_d: int

    def __post_init__(self):
        object.__setattr__(self, "e_a", self.e_a % self.modulus)
        object.__setattr__(self, "e_d", self.e_d % self.modulus)

    def swap(self) -> "Character":
        return Character(self.modulus, self.e_d, self.e_a)

    @property
    def is_swap_fixed(self) -> bool:
        return self.e_a == self.e_d

    def __repr__(self):
        return f"chi({self.e_a},{self.e_d})"


def char_swap(chi: Character) -> Character:
    """Exponent-pair swap; an involution on characters."""
    return chi.swap()


def character_from_tuple(values: Iterable[int], p: int, f: int, twist: int = 0) -> Character:
    """Encode a length-f exponent tuple as a character.

    The tuple is read as the base-p expansion of the first diagonal
    exponent, relative to a determinant twist carried on both coordinates.
    Only exponent differences matter downstream; the convention is fixed
    here and echoed in reports.
    """
    q1 = p ** f - 1
    e = sum(v * p ** i for i, v in enumerate(values))
    return Character(q1, e + twist, twist)


# ---------------------------------------------------------------------------
# The delta dynamics on subsets of Z/f
# ---------------------------------------------------------------------------

def delta(J: OrbitIndexSet) -> OrbitIndexSet:
    """Shift then flip at 0: j is in delta(J) iff j+1 in J (for j != 0),
    iff 1 not in J (for j = 0).  A bijection on subsets."""
    f = J.f
    members = set()
    for j in range(f):
        nxt = (j + 1) % f
        if j == 0:
            if nxt not in J.members:
                members.add(j)
        elif nxt in J.members:
            members.add(j)
    return OrbitIndexSet(f, frozenset(members))


def delta_orbits(f: int) -> list[list[OrbitIndexSet]]:
    """Partition of all subsets into delta-orbits, each cyclically ordered.

    Orbits start at their smallest-bitmask member and follow delta; orbits
    are listed in order of their starting bitmask.
    """
    seen: set[int] = set()
    orbits: list[list[OrbitIndexSet]] = []
    for mask in range(1 << f):
        if mask in seen:
            continue
        start = OrbitIndexSet.from_bitmask(f, mask)
        orbit = [start]
        seen.add(mask)
        cur = delta(start)
        while cur.bitmask != mask:
            orbit.append(cur)
            seen.add(cur.bitmask)
            cur = delta(cur)
        orbits.append(orbit)
    return orbits


# ---------------------------------------------------------------------------
# Weight tuples and the distinguished characters
# ---------------------------------------------------------------------------

def _component(p: int, r_i: int, in_j: bool, next_in_j: bool) -> int:
    if in_j:
        return (p - 1 - r_i) if next_in_j else (r_i + 1)
    return (p - 2 - r_i) if next_in_j else r_i


def default_weight_table(params: GenericParams,
                         twists: Mapping[int, int] | None = None) -> dict[int, WeightTuple]:
    """Built-in weight table, keyed by bitmask.

    Component i depends on whether i and i+1 lie in J.  For J={2} and
    J={0,1} (at f=3) this reproduces the canonical tuples
    (r0, p-2-r1, r2+1) and (p-1-r0, r1+1, p-2-r2); those two entries are
    flagged canonical, all others are configured defaults.
    """
    p, f = params.p, params.f
    canonical_masks = {OrbitIndexSet.of(3, {2}).bitmask,
                       OrbitIndexSet.of(3, {0, 1}).bitmask} if f == 3 else set()
    table: dict[int, WeightTuple] = {}
    for mask in range(1 << f):
        J = OrbitIndexSet.from_bitmask(f, mask)
        values = tuple(
            _component(p, params.r[i], i in J.members, (i + 1) % f in J.members)
            for i in range(f))
        provenance = PROVENANCE_CANONICAL if mask in canonical_masks else PROVENANCE_CONFIGURED
        twist = twists.get(mask, 0) if twists else 0
        table[mask] = WeightTuple(J, values, provenance, twist)
    return table


def weight_tuple(J: OrbitIndexSet, params: GenericParams,
                 table: Mapping[int, WeightTuple]) -> WeightTuple:
    """Look up the weight tuple for J, validating the [0, p-1] range."""
    entry = table.get(J.bitmask)
    if entry is None:
        raise MissingTableEntryError(f"no weight tuple configured for J={J!r}")
    for a in entry.values:
        if not 0 <= a <= params.p - 1:
            raise RangeViolationError(
                f"tuple {entry.values} for J={J!r} leaves [0, {params.p - 1}]; "
                f"parameters r={params.r} are not generic for these bounds")
    return entry


def weight_dim(w: WeightTuple) -> int:
    """Dimension prod(a_i + 1) of the twisted tensor product of symmetric powers."""
    d = 1
    for a in w.values:
        d *= a + 1
    return d


@dataclass(frozen=True)
class SpecialCharacters:
    """The two distinguished non-socle characters, as tuples and encodings."""

    mu1: tuple[int, ...]
    mu2: tuple[int, ...]
    chi1: Character
    chi2: Character
    twist: int


def special_characters(params: GenericParams, twist: int = 1) -> SpecialCharacters:
    """The mu-tuples (p-2-r0, p-1-r1, r2+1) and (p-r0, r1+1, r2) and their
    character encodings.

    The determinant twist is configuration (default 1); with twist 0 the
    first tuple would collide with a configured socle character under the
    truncated encoding, which the registry would reject.
    """
    if params.f != 3:
        raise WeightError("distinguished characters are defined for f=3")
    p = params.p
    r = params.r
    mu1 = (p - 2 - r[0], p - 1 - r[1], r[2] + 1)
    mu2 = (p - r[0], r[1] + 1, r[2])
    for mu in (mu1, mu2):
        for c in mu:
            if not 0 <= c <= p - 1:
                raise RangeViolationError(f"character tuple {mu} leaves [0, {p - 1}]")
    return SpecialCharacters(
        mu1, mu2,
        character_from_tuple(mu1, p, params.f, twist),
        character_from_tuple(mu2, p, params.f, twist),
        twist,
    )


# ---------------------------------------------------------------------------
# Genericity diagnostics
# ---------------------------------------------------------------------------

@dataclass
class GenericityReport:
    passed: bool
    checks: list[tuple[str, bool, str]]

    def failures(self) -> list[tuple[str, str]]:
        return [(name, detail) for name, ok, detail in self.checks if not ok]


def validate_genericity(params: GenericParams,
                        bounds: tuple[int, int] | None = None,
                        table: Mapping[int, WeightTuple] | None = None,
                        special_twist: int = 1) -> GenericityReport:
    """Check the configurable genericity bounds and that all configured
    weight and character tuples are range-valid and pairwise distinct."""
    checks: list[tuple[str, bool, str]] = []
    lo, hi = bounds if bounds is not None else (1, params.p - 3)
    ok = is_prime(params.p) and params.p > 2
    checks.append(("p_odd_prime", ok, f"p={params.p}"))
    ok = lo <= hi
    checks.append(("bounds_nonempty", ok, f"[{lo},{hi}]"))
    for i, ri in enumerate(params.r):
        ok = lo <= ri <= hi
        checks.append((f"r{i}_in_bounds", ok, f"r{i}={ri} vs [{lo},{hi}]"))
    if table is None:
        table = default_weight_table(params)
    chars: dict[Character, str] = {}
    range_ok = True
    for mask in sorted(table):
        wt = table[mask]
        if any(not 0 <= a <= params.p - 1 for a in wt.values):
            range_ok = False
            checks.append((f"tuple_range_J={wt.label!r}", False, f"{wt.values}"))
            continue
        chi = character_from_tuple(wt.values, params.p, params.f, wt.twist)
        if chi in chars:
            checks.append((f"distinct_J={wt.label!r}", False,
                           f"character {chi!r} already used by {chars[chi]}"))
        else:
            chars[chi] = f"J={wt.label!r}"
    if range_ok:
        checks.append(("tuple_ranges", True, "all components in range"))
    try:
        spec = special_characters(params, special_twist)
        for name, chi in (("chi1", spec.chi1), ("chi2", spec.chi2),
                          ("chi1_swap", spec.chi1.swap()), ("chi2_swap", spec.chi2.swap())):
            if chi in chars:
                checks.append((f"distinct_{name}", False,
                               f"collides with {chars[chi]}"))
            else:
                chars[chi] = name
    except WeightError as exc:
        checks.append(("special_characters", False, str(exc)))
    passed = all(ok for _, ok, _ in checks)
    return GenericityReport(passed, checks)


# ---------------------------------------------------------------------------
# Table file I/O: one record per line, `J=<bitmask> tuple=<a0,a1,...> [twist=<e>]`
# ---------------------------------------------------------------------------

def parse_weight_table(text: str, params: GenericParams) -> dict[int, WeightTuple]:
    table: dict[int, WeightTuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = dict()
        for tok in line.split():
            if "=" not in tok:
                raise WeightError(f"line {lineno}: malformed token {tok!r}")
            key, val = tok.split("=", 1)
            fields[key] = val
        try:
            mask = int(fields["J"])
            values = tuple(int(v) for v in fields["tuple"].split(","))
            twist = int(fields.get("twist", "0"))
        except (KeyError, ValueError) as exc:
            raise WeightError(f"line {lineno}: {exc}") from exc
        if len(values) != params.f:
            raise WeightError(f"line {lineno}: expected {params.f} components")
        J = OrbitIndexSet.from_bitmask(params.f, mask)
        table[mask] = WeightTuple(J, values, PROVENANCE_CONFIGURED, twist)
    return table


def load_weight_table(path, params: GenericParams,
                      base: Mapping[int, WeightTuple] | None = None) -> dict[int, WeightTuple]:
    """Load table records from a file, overriding entries of `base` (which
    defaults to the built-in table)."""
    with open(path, "r", encoding="utf-8") as fh:
        loaded = parse_weight_table(fh.read(), params)
    table = dict(base if base is not None else default_weight_table(params))
    table.update(loaded)
    return table
