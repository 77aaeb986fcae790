"""Fact saturation over the twisted tower, with replayable certificates.

Facts assert membership in an unknown invariant subspace: an eigen fact
pins a coefficient combination of a fixed eigenvector line, a block fact
pins a whole block image.  Rules move facts around the tower (incidence,
the involution, socle generation, socle projection, socle cycling) and a
cancellation rule shrinks support, which is the descent that drives
certification.  Saturation is a deterministic FIFO fixpoint; every stored
fact carries one trace step, and replaying the trace reproduces the store
bit for bit.

"not certified" always means "not derivable in this rule system within
the configured window and budget", never a claim of reducibility;
"certified" summarizes the configured seed battery, it is not a
quantifier over all possible seeds.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .diagram import (
    CharacterRegistry,
    CoeffVector,
    DiagramError,
    LambdaSeq,
    WindowOverflowError,
    transport_vector,
)
from .gf import FieldDescriptor, FieldElem, embed_subfield
from .weights import Character, OrbitIndexSet, WeightTuple, delta, weight_dim

EIGEN = "E"
BLOCK = "B"

MODE_EXT = "ext"    # combinations over the full coefficient field
MODE_BASE = "base"  # combinations restricted to the base field (restriction of scalars)

NOT_CERTIFIED_NOTE = ("'not certified' means not derivable in this rule system; "
                      "it is never a reducibility claim")


class EngineError(Exception):
    pass


class PivotNotRationalError(EngineError):
    """Base-field mode requires the cancellation scalar to be base-rational."""


class ZeroResultError(EngineError):
    """A cancellation produced the zero vector; the fact is discarded."""


class BudgetExceededError(EngineError):
    pass


class MalformedTraceError(EngineError):
    pass


# ---------------------------------------------------------------------------
# Facts
# ---------------------------------------------------------------------------

class Fact:
    """An eigen or block fact with a nonzero coefficient vector."""

    __slots__ = ("kind", "label", "coeffs", "_key")

    def __init__(self, kind: str, label, coeffs: CoeffVector):
        if coeffs.is_zero:
            raise EngineError("zero facts are discarded at creation")
        if kind not in (EIGEN, BLOCK):
            raise EngineError(f"unknown fact kind {kind!r}")
        self.kind = kind
        self.label = label
        self.coeffs = coeffs
        if kind == EIGEN:
            self._key = (EIGEN, label.e_a, label.e_d)
        else:
            self._key = (BLOCK, label)

    @property
    def label_key(self):
        return self._key

    def identity(self):
        return (self._key, self.coeffs.entries)

    def canonical_str(self) -> str:
        if self.kind == EIGEN:
            head = f"E:{self.label.e_a},{self.label.e_d}"
        else:
            head = f"B:{self.label}"
        body = ";".join(f"{i}={c}" for i, c in self.coeffs.entries)
        return f"{head}|{body}"

    def payload(self) -> list:
        label = [self.label.e_a, self.label.e_d] if self.kind == EIGEN else self.label
        return [self.kind, label, [[i, c] for i, c in self.coeffs.entries]]

    def __repr__(self):
        return f"Fact({self.canonical_str()})"


def eigen_fact(chi: Character, coeffs: CoeffVector) -> Fact:
    return Fact(EIGEN, chi, coeffs)


def block_fact(mask: int, coeffs: CoeffVector) -> Fact:
    return Fact(BLOCK, mask, coeffs)


def decode_fact(payload, ext: FieldDescriptor, char_modulus: int) -> Fact:
    try:
        kind, label, entries = payload
        coeffs = CoeffVector(ext, tuple((int(i), int(c)) for i, c in entries))
        for _, c in coeffs.entries:
            if not 0 < c < ext.order:
                raise ValueError(f"coefficient code {c} out of range")
        if kind == EIGEN:
            return Fact(EIGEN, Character(char_modulus, int(label[0]), int(label[1])), coeffs)
        if kind == BLOCK:
            return Fact(BLOCK, int(label), coeffs)
    except (TypeError, ValueError, IndexError, EngineError) as exc:
        raise MalformedTraceError(f"bad fact payload {payload!r}: {exc}") from exc
    raise MalformedTraceError(f"bad fact kind in payload {payload!r}")


# ---------------------------------------------------------------------------
# Rules (public, one call per derivation; the saturation loop uses these)
# ---------------------------------------------------------------------------

def rule_incidence(f: Fact, registry: CharacterRegistry) -> list[Fact]:
    """Block fact -> eigen facts for every character incident to the block."""
    if f.kind != BLOCK:
        raise EngineError("rule_incidence consumes block facts")
    return [Fact(EIGEN, chi, f.coeffs) for chi in registry.incidence[f.label]]


def rule_pi(f: Fact, registry: CharacterRegistry, lam: LambdaSeq) -> Fact:
    """Swap the character and transport coefficients by the involution."""
    if f.kind != EIGEN:
        raise EngineError("rule_pi consumes eigen facts")
    out = transport_vector(f.label, f.coeffs, lam, registry)
    return Fact(EIGEN, f.label.swap(), out)


def rule_socle_project(f: Fact, registry: CharacterRegistry) -> Fact:
    """Project an eigen fact at a non-socle character onto the socle
    character of its home block, coefficients unchanged.

    This is the within-block socle step (the unique nonvanishing operator
    image lands on the socle line); the finite laboratory checks that
    mechanism exhaustively at desk scale.
    """
    if f.kind != EIGEN:
        raise EngineError("rule_socle_project consumes eigen facts")
    chi = f.label
    if registry.is_socle(chi):
        raise EngineError("socle projection applies to non-socle characters")
    mask = registry.block_of.get(chi)
    if mask is None:
        raise EngineError(f"{chi!r} has no pinned home block")
    return Fact(EIGEN, registry.socle_char_of_block(mask), f.coeffs)


def rule_socle_gen(f: Fact, registry: CharacterRegistry, lam: LambdaSeq) -> Fact:
    """Eigen fact at the socle character of block J -> block fact at delta(J),
    coefficients moved by the same transport as the involution."""
    if f.kind != EIGEN or not registry.is_socle(f.label):
        raise EngineError("rule_socle_gen consumes eigen facts at socle characters")
    mask = registry.socle_mask(f.label)
    J = OrbitIndexSet.from_bitmask(registry.params.f, mask)
    out = transport_vector(f.label, f.coeffs, lam, registry)
    return Fact(BLOCK, delta(J).bitmask, out)


def rule_cyc_special(f: Fact, registry: CharacterRegistry, lam: LambdaSeq,
                     mu_ext: FieldElem) -> Fact:
    """One socle-cycling step from a distinguished character.

    The first distinguished character carries the symbolic basis-mismatch
    scalar mu (a base-field unit, default 1); verdicts must not depend on it.
    """
    if f.kind != EIGEN:
        raise EngineError("rule_cyc_special consumes eigen facts")
    chi = f.label
    target = registry.cycle_target(chi)
    out = transport_vector(chi, f.coeffs, lam, registry)
    if chi == registry.chi1:
        out = out.scaled(mu_ext)
    return Fact(EIGEN, target, out)


def _pattern_ratio(v: CoeffVector, w: CoeffVector, lam: LambdaSeq,
                   mu_code: int) -> int | None:
    """If v = t * mu * lambda . w entrywise, return the code of t, else None."""
    if v.support != w.support:
        return None
    ext = v.field
    t = None
    for (i, a), (_, b) in zip(v.entries, w.entries):
        denom = ext.mul_codes(ext.mul_codes(mu_code, lam.code_at(i)), b)
        ti = ext.mul_codes(a, ext.inv_code(denom))
        if t is None:
            t = ti
        elif ti != t:
            return None
    return t


def rule_cancellation(f1: Fact, f2: Fact, pivot: int, registry: CharacterRegistry,
                      lam: LambdaSeq, mu_ext: FieldElem, mode: str) -> Fact:
    """Support descent: combine the twisted-pattern pair into a fact whose
    support strictly drops at the pivot.

    f1 must equal (t * mu * lambda)-times f2 entrywise for a single scalar t;
    the emitted fact is f1 - (f1[pivot]/f2[pivot]) f2, whose entry at i is
    t*mu*(lambda_i - lambda_pivot) f2_i.  Entries where lambda matches the
    pivot value also vanish.  In base mode the combination scalar must be
    base-rational, which is where the rationality of the pivot value enters.
    """
    if f1.kind != EIGEN or f2.kind != EIGEN or f1.label != f2.label:
        raise EngineError("cancellation needs two eigen facts at the same character")
    chi0 = registry.socle_char_of_block(0b001)
    if f1.label != chi0:
        raise EngineError("cancellation operates at the socle character of block {0}")
    v, w = f1.coeffs, f2.coeffs
    if pivot not in v.support:
        raise EngineError(f"pivot {pivot} not in support {list(v.support)}")
    t = _pattern_ratio(v, w, lam, mu_ext.code)
    if t is None:
        raise EngineError("facts do not form a twisted pattern pair")
    ext = v.field
    rho = ext.mul_codes(v[pivot].code, ext.inv_code(w[pivot].code))
    if mode == MODE_BASE and not lam.is_rational_code(rho):
        raise PivotNotRationalError(
            f"combination scalar at pivot {pivot} is not base-rational")
    out = v.minus(w.scaled(ext.from_code(rho)))
    if out.is_zero:
        raise ZeroResultError("all twisted differences vanish; no descent possible")
    return Fact(EIGEN, f1.label, out)


# ---------------------------------------------------------------------------
# Fact store
# ---------------------------------------------------------------------------

class FactStore:
    """Deduplicating store with per-mode scalar discipline.

    In ext mode every vector is normalized so its lowest-index entry is 1
    (facts are scale-invariant there).  In base mode vectors are kept as
    derived and deduplicated up to base-field span per (label, support):
    a new vector is stored only if it enlarges the span.
    """

    def __init__(self, mode: str, base: FieldDescriptor, ext: FieldDescriptor):
        if mode not in (MODE_EXT, MODE_BASE):
            raise EngineError(f"unknown scalar mode {mode!r}")
        self.mode = mode
        self.base = base
        self.ext = ext
        self.m = ext.k // base.k
        self.facts: list[Fact] = []
        self._ids: dict = {}
        self.by_group: dict = {}  # (label_key, support) -> [fact ids]
        self._spans: dict = {}    # base mode: (label_key, support) -> echelon rows

    def __len__(self):
        return len(self.facts)

    def canonicalize(self, fact: Fact) -> Fact:
        if self.mode == MODE_EXT:
            norm = fact.coeffs.normalized()
            if norm is not fact.coeffs:
                return Fact(fact.kind, fact.label, norm)
        return fact

    def _coords(self, coeffs: CoeffVector) -> list[int]:
        out: list[int] = []
        for _, c in coeffs.entries:
            out.extend(self.ext.subfield_coords(c))
        return out

    def _span_add(self, key, coeffs: CoeffVector) -> bool:
        """Reduce into the group's base-field echelon; True if independent."""
        rows = self._spans.setdefault(key, [])
        vec = self._coords(coeffs)
        base = self.base
        for pos, row in rows:
            c = vec[pos]
            if c:
                for j in range(pos, len(vec)):
                    vec[j] = base.sub_codes(vec[j], base.mul_codes(c, row[j]))
        pos = next((j for j, c in enumerate(vec) if c), None)
        if pos is None:
            return False
        inv = base.inv_code(vec[pos])
        rows.append((pos, [base.mul_codes(inv, c) for c in vec]))
        return True

    def add(self, fact: Fact) -> tuple[bool, int, Fact]:
        """Canonicalize and insert; returns (is_new, fact_id, stored_fact).

        Span-duplicates in base mode are reported with id -1 and not stored.
        """
        fact = self.canonicalize(fact)
        ident = fact.identity()
        existing = self._ids.get(ident)
        if existing is not None:
            return False, existing, self.facts[existing]
        key = (fact.label_key, fact.coeffs.support)
        if self.mode == MODE_BASE and not self._span_add(key, fact.coeffs):
            return False, -1, fact
        fid = len(self.facts)
        self.facts.append(fact)
        self._ids[ident] = fid
        self.by_group.setdefault(key, []).append(fid)
        return True, fid, fact

    def group(self, label_key, support) -> list[int]:
        return self.by_group.get((label_key, support), [])

    def iter_facts(self) -> Iterable[Fact]:
        return iter(self.facts)

    def digest(self) -> str:
        blob = "\n".join(sorted(f.canonical_str() for f in self.facts))
        return hashlib.sha256(blob.encode("ascii")).hexdigest()


# ---------------------------------------------------------------------------
# Coverage of the certification target
# ---------------------------------------------------------------------------

class CoverageTracker:
    """Singleton block facts must reach every (block, index) slot of the
    target window, with full scalar span in base mode."""

    def __init__(self, mode: str, base: FieldDescriptor, ext: FieldDescriptor,
                 n_blocks: int, target_window: int):
        self.mode = mode
        self.base = base
        self.ext = ext
        self.m = ext.k // base.k
        self.target_window = target_window
        self.slots = {(mask, j) for mask in range(n_blocks)
                      for j in range(-target_window, target_window + 1)}
        self.done: set = set()
        self._spans: dict = {}

    def observe(self, fact: Fact) -> None:
        if fact.kind != BLOCK or fact.coeffs.support_size != 1:
            return
        j = fact.coeffs.entries[0][0]
        if abs(j) > self.target_window:
            return
        slot = (fact.label, j)
        if slot in self.done:
            return
        if self.mode == MODE_EXT:
            self.done.add(slot)
            return
        rows = self._spans.setdefault(slot, [])
        vec = list(self.ext.subfield_coords(fact.coeffs.entries[0][1]))
        base = self.base
        for pos, row in rows:
            c = vec[pos]
            if c:
                for k in range(pos, self.m):
                    vec[k] = base.sub_codes(vec[k], base.mul_codes(c, row[k]))
        pos = next((k for k, c in enumerate(vec) if c), None)
        if pos is not None:
            inv = base.inv_code(vec[pos])
            rows.append((pos, [base.mul_codes(inv, c) for c in vec]))
            if len(rows) == self.m:
                self.done.add(slot)

    @property
    def complete(self) -> bool:
        return self.done >= self.slots

    def singleton_coverage_complete(self) -> bool:
        if self.mode == MODE_EXT:
            return self.complete
        return all((slot in self.done) or self._spans.get(slot) for slot in self.slots)

    def missing(self) -> list:
        return sorted(self.slots - self.done)


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    max_facts: int = 1_000_000
    max_firings: int = 10_000_000


@dataclass
class SaturationStats:
    facts: int = 0
    firings: int = 0
    boundary_losses: int = 0
    descent_steps: int = 0
    zero_results: int = 0
    pivot_skips: int = 0
    multi_support_facts: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SaturationResult:
    store: FactStore
    trace: list
    stats: SaturationStats
    covered: bool
    reason: str | None
    missing: list = field(default_factory=list)

    def digest(self) -> str:
        return self.store.digest()


def _stall_reason(stats: SaturationStats, coverage: CoverageTracker) -> str:
    if not coverage.singleton_coverage_complete():
        if stats.multi_support_facts and stats.descent_steps == 0:
            return "descent stalled"
        if stats.boundary_losses:
            return "window exhausted"
        return "insufficient propagation"
    return "scalar closure deficit"


def saturate(seeds: Sequence[Fact], registry: CharacterRegistry, lam: LambdaSeq,
             target_window: int, mode: str = MODE_EXT,
             budget: Budget = Budget(), mu: FieldElem | None = None,
             stop_when_covered: bool = True) -> SaturationResult:
    """Deterministic FIFO closure of the rule system from the given seeds.

    The descent loop is emergent: block closure re-centers supports at every
    shift, the twisted pattern pairs meet at the block-{0} socle character,
    and cancellation fires whenever a pattern pair with its smallest support
    index at the pivot 0 exists.  Saturation stops early once the target
    coverage is certified (the check point is deterministic), at the full
    fixpoint otherwise.
    """
    if not seeds:
        raise EngineError("seed list is empty")
    ext = lam.ext
    base = lam.base
    if mu is None:
        mu_ext = embed_subfield(base.one(), ext)
    elif mu.field == base:
        mu_ext = embed_subfield(mu, ext)
    else:
        if mu.field != ext or not lam.is_rational_code(mu.code):
            raise EngineError("mu must be a base-rational unit")
        mu_ext = mu
    if mu_ext.is_zero:
        raise EngineError("mu must be nonzero")

    store = FactStore(mode, base, ext)
    coverage = CoverageTracker(mode, base, ext, 1 << registry.params.f, target_window)
    stats = SaturationStats()
    trace: list = []
    # Priority worklist, ordered by (support size, penalty, insertion id).
    # The penalty adds the accumulated lambda-twist count to the distance of
    # the support from the certification zone: narrow facts propagate ahead
    # of wide ones, the untwisted near layer is explored before entrywise
    # scaled variants and before far excursions.  The shortest descent chain
    # needs a single twist crossing, so the cancellation pair forms long
    # before the variant population grows.  Priorities only order rule
    # applications; the rule system and its fixpoint are unchanged.
    heap: list[tuple[int, int, int]] = []
    twist_depth: list[int] = []
    near_radius = target_window + 4
    chi0 = registry.socle_char_of_block(0b001)
    mu_code = mu_ext.code
    scaled_chars = (registry.chi1, registry.chi1_swap)

    def excess(fact: Fact) -> int:
        ent = fact.coeffs.entries
        return max(0, max(-ent[0][0], ent[-1][0]) - near_radius)

    def emit(fact: Fact, rule: str, inputs: list[int], aux=None) -> None:
        is_new, fid, stored = store.add(fact)
        depth = max((twist_depth[i] for i in inputs), default=0)
        if rule in ("pi", "cyc") and inputs and store.facts[inputs[0]].label in scaled_chars:
            depth += 1
        if not is_new:
            # re-derivation along a less twisted route: improve the priority
            # so the fact's subtree is not deferred behind the variant layers
            if fid >= 0 and depth < twist_depth[fid]:
                twist_depth[fid] = depth
                old = store.facts[fid]
                heapq.heappush(heap, (old.coeffs.support_size, depth + excess(old), fid))
            return
        if len(store) > budget.max_facts:
            raise BudgetExceededError(f"fact budget {budget.max_facts} exceeded")
        step = [rule, stored.payload(), inputs]
        if aux is not None:
            step.append(aux)
        trace.append(step)
        coverage.observe(stored)
        size = stored.coeffs.support_size
        if size > 1:
            stats.multi_support_facts += 1
        twist_depth.append(depth)
        heapq.heappush(heap, (size, depth + excess(stored), fid))

    def fire(n: int = 1) -> None:
        stats.firings += n
        if stats.firings > budget.max_firings:
            raise BudgetExceededError(f"rule firing budget {budget.max_firings} exceeded")

    for seed in seeds:
        if seed.coeffs.is_zero:
            raise EngineError("seed facts must be nonzero")
        emit(seed, "seed", [])

    while heap:
        if stop_when_covered and coverage.complete:
            break
        _, penalty_key, fid = heapq.heappop(heap)
        fact = store.facts[fid]
        if penalty_key > twist_depth[fid] + excess(fact):
            continue  # stale queue entry, a better route was found
        if fact.kind == BLOCK:
            fire()
            for k, chi in enumerate(registry.incidence[fact.label]):
                emit(Fact(EIGEN, chi, fact.coeffs), "incidence", [fid], k)
            continue
        chi = fact.label
        # involution swap
        fire()
        try:
            emit(rule_pi(fact, registry, lam), "pi", [fid])
        except WindowOverflowError:
            stats.boundary_losses += 1
        # socle projection within the home block (non-socle characters)
        if registry.is_registered(chi) and not registry.is_socle(chi):
            fire()
            emit(rule_socle_project(fact, registry), "project", [fid])
        # socle generation to the delta-block
        if registry.is_socle(chi):
            fire()
            try:
                emit(rule_socle_gen(fact, registry, lam), "socle_gen", [fid])
            except WindowOverflowError:
                stats.boundary_losses += 1
        # socle cycling from the two distinguished characters
        if chi == registry.chi1 or chi == registry.chi2:
            fire()
            try:
                emit(rule_cyc_special(fact, registry, lam, mu_ext), "cyc", [fid])
            except WindowOverflowError:
                stats.boundary_losses += 1
        # descent at the block-{0} socle character, pivot fixed at 0
        if chi == chi0 and fact.coeffs.support_size >= 2 and fact.coeffs.min_index() == 0:
            group = store.group(fact.label_key, fact.coeffs.support)
            for other_id in list(group):
                if other_id == fid:
                    continue
                other = store.facts[other_id]
                for f1_id, f2_id, f1, f2 in ((fid, other_id, fact, other),
                                             (other_id, fid, other, fact)):
                    if _pattern_ratio(f1.coeffs, f2.coeffs, lam, mu_code) is None:
                        continue
                    fire()
                    try:
                        out = rule_cancellation(f1, f2, 0, registry, lam, mu_ext, mode)
                    except ZeroResultError:
                        stats.zero_results += 1
                        continue
                    except PivotNotRationalError:
                        stats.pivot_skips += 1
                        continue
                    stats.descent_steps += 1
                    emit(out, "cancel", [f1_id, f2_id], 0)

    stats.facts = len(store)
    covered = coverage.complete
    reason = None if covered else _stall_reason(stats, coverage)
    return SaturationResult(store, trace, stats, covered, reason, coverage.missing())


# ---------------------------------------------------------------------------
# Scalar closure report
# ---------------------------------------------------------------------------

def scalar_closure(store: FactStore, target_window: int, n_blocks: int = 8) -> dict:
    """Base-field span of attainable scalars of singleton block facts,
    per (block, index) slot.  In ext mode any singleton is a full line."""
    base, ext, m = store.base, store.ext, store.m
    summary: dict[tuple[int, int], int] = {}
    spans: dict[tuple[int, int], list] = {}
    for fact in store.iter_facts():
        if fact.kind != BLOCK or fact.coeffs.support_size != 1:
            continue
        j = fact.coeffs.entries[0][0]
        if abs(j) > target_window:
            continue
        slot = (fact.label, j)
        if store.mode == MODE_EXT:
            summary[slot] = m
            continue
        rows = spans.setdefault(slot, [])
        vec = list(ext.subfield_coords(fact.coeffs.entries[0][1]))
        for pos, row in rows:
            c = vec[pos]
            if c:
                for k in range(pos, m):
                    vec[k] = base.sub_codes(vec[k], base.mul_codes(c, row[k]))
        pos = next((k for k, c in enumerate(vec) if c), None)
        if pos is not None:
            inv = base.inv_code(vec[pos])
            rows.append((pos, [base.mul_codes(inv, c) for c in vec]))
    for slot, rows in spans.items():
        summary[slot] = len(rows)
    slots = [(mask, j) for mask in range(n_blocks)
             for j in range(-target_window, target_window + 1)]
    present = [summary.get(s, 0) for s in slots]
    return {
        "mode": store.mode,
        "span_target": m,
        "min_dimension": min(present) if present else 0,
        "full_everywhere": bool(present) and all(d == m for d in present),
        "per_slot": {f"{mask}:{j}": summary.get((mask, j), 0) for mask, j in slots},
    }


# ---------------------------------------------------------------------------
# Certification over a seed battery
# ---------------------------------------------------------------------------

def default_seed_battery(registry: CharacterRegistry, ext: FieldDescriptor, rng,
                         count: int, max_support: int, target_window: int) -> list[Fact]:
    """Every socle character with a unit seed, plus random seeds of bounded
    support with random nonzero scalars."""
    seeds = [Fact(EIGEN, registry.socle_char_of_block(mask), CoeffVector.unit(ext, 0))
             for mask in range(1 << registry.params.f)]
    for _ in range(count):
        mask = rng.randrange(1 << registry.params.f)
        size = rng.randint(1, max_support)
        idxs = sorted(rng.sample(range(-target_window, target_window + 1), size))
        coeffs = CoeffVector.from_items(
            ext, [(i, ext.random_nonzero(rng)) for i in idxs])
        seeds.append(Fact(EIGEN, registry.socle_char_of_block(mask), coeffs))
    return seeds


@dataclass
class Verdict:
    status: str                   # "certified" | "not-certified"
    reason: str | None
    stats: dict
    closure_summary: dict
    notes: str = NOT_CERTIFIED_NOTE

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "stats": self.stats,
            "closure_summary": self.closure_summary,
            "notes": self.notes,
        }


@dataclass
class CertificationResult:
    verdict: Verdict
    runs: list
    certificate: dict

    @property
    def certified(self) -> bool:
        return self.verdict.status == "certified"


def certify_irreducible(registry: CharacterRegistry, lam: LambdaSeq,
                        seeds: Sequence[Fact], target_window: int,
                        mode: str = MODE_EXT, budget: Budget = Budget(),
                        mu: FieldElem | None = None,
                        config_echo: Mapping | None = None) -> CertificationResult:
    """Run the saturation for every seed (each with a private store) and
    aggregate; certified iff every seed's closure covers all blocks at all
    target indices with full scalar closure of the mode."""
    runs = []
    overall = "certified"
    first_reason = None
    totals = {"facts": 0, "firings": 0, "boundary_losses": 0, "descent_steps": 0}
    n_blocks = 1 << registry.params.f
    closure_summary: dict = {}
    for n, seed in enumerate(seeds):
        res = saturate([seed], registry, lam, target_window, mode, budget, mu)
        run = {
            "seed_index": n,
            "seed": seed.payload(),
            "covered": res.covered,
            "reason": res.reason,
            "stats": res.stats.as_dict(),
            "digest": res.store.digest(),
            "trace": res.trace,
        }
        runs.append(run)
        for k in totals:
            totals[k] += res.stats.as_dict()[k]
        if not res.covered and overall == "certified":
            overall = "not-certified"
            first_reason = f"seed {n}: {res.reason}"
            closure_summary = scalar_closure(res.store, target_window, n_blocks)
    if overall == "certified":
        m = lam.ext.k // lam.base.k
        closure_summary = {"mode": mode, "span_target": m,
                           "min_dimension": m, "full_everywhere": True}
    verdict = Verdict(overall, first_reason, totals, closure_summary)
    certificate = {
        "format": "diagramlab-certificate/1",
        "scalar_mode": mode,
        "target_window": target_window,
        "config": dict(config_echo) if config_echo else {},
        "runs": runs,
        "verdict": verdict.as_dict(),
    }
    certificate["digest"] = hashlib.sha256(
        json.dumps(certificate, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    return CertificationResult(verdict, runs, certificate)


# ---------------------------------------------------------------------------
# Admissibility audit
# ---------------------------------------------------------------------------

@dataclass
class AuditResult:
    rows: list
    slope: int
    canonical_slope: int
    verdict: str
    weights: list

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "slope": self.slope,
            "canonical_slope": self.canonical_slope,
            "verdict": self.verdict,
            "weights": self.weights,
        }


def audit_admissibility(n_max: int, weight_table: Mapping[int, WeightTuple]) -> AuditResult:
    """Lower bound N * sum(dim) for the fixed vectors of an N-copy window;
    an unbounded bound (positive slope) certifies nonadmissibility."""
    weights = []
    slope = 0
    canonical_slope = 0
    for mask in sorted(weight_table):
        wt = weight_table[mask]
        d = weight_dim(wt)
        slope += d
        if wt.provenance == "canonical":
            canonical_slope += d
        weights.append({"J": mask, "tuple": list(wt.values), "dim": d,
                        "provenance": wt.provenance})
    rows = [{"N": n, "bound": n * slope} for n in range(1, n_max + 1)]
    verdict = "nonadmissible" if slope > 0 and n_max >= 1 else "inconclusive"
    return AuditResult(rows, slope, canonical_slope, verdict, weights)


# ---------------------------------------------------------------------------
# Certificate replay
# ---------------------------------------------------------------------------

def _replay_step(step, facts: list[Fact], registry: CharacterRegistry,
                 lam: LambdaSeq, mu_ext: FieldElem, mode: str,
                 ext: FieldDescriptor, char_modulus: int) -> Fact | None:
    """Recompute one trace step; returns the recomputed canonical fact or
    None when the step cannot be reproduced."""
    try:
        rule, payload = step[0], step[1]
        inputs = step[2] if len(step) > 2 else []
        aux = step[3] if len(step) > 3 else None
        expected = decode_fact(payload, ext, char_modulus)
        ins = [facts[i] for i in inputs]
    except (IndexError, TypeError) as exc:
        raise MalformedTraceError(f"bad trace step {step!r}: {exc}") from exc
    try:
        if rule == "seed":
            out = expected
        elif rule == "incidence":
            outs = rule_incidence(ins[0], registry)
            out = outs[aux]
        elif rule == "pi":
            out = rule_pi(ins[0], registry, lam)
        elif rule == "project":
            out = rule_socle_project(ins[0], registry)
        elif rule == "socle_gen":
            out = rule_socle_gen(ins[0], registry, lam)
        elif rule == "cyc":
            out = rule_cyc_special(ins[0], registry, lam, mu_ext)
        elif rule == "cancel":
            out = rule_cancellation(ins[0], ins[1], aux, registry, lam, mu_ext, mode)
        else:
            raise MalformedTraceError(f"unknown rule {rule!r}")
        return out
    except (EngineError, DiagramError, IndexError):
        return None


def replay_certificate(certificate: Mapping, registry: CharacterRegistry,
                       lam: LambdaSeq, mu: FieldElem | None = None) -> bool:
    """Independently re-execute every trace step (no search) and confirm
    every fact and every store digest; False on any mismatch."""
    if not isinstance(certificate, Mapping) or "runs" not in certificate:
        raise MalformedTraceError("certificate has no runs")
    mode = certificate.get("scalar_mode", MODE_EXT)
    ext = lam.ext
    base = lam.base
    if mu is None:
        mu_ext = embed_subfield(base.one(), ext)
    elif mu.field == base:
        mu_ext = embed_subfield(mu, ext)
    else:
        mu_ext = mu
    char_modulus = registry.params.q - 1
    store_probe = FactStore(mode, base, ext)
    for run in certificate["runs"]:
        facts: list[Fact] = []
        seen = set()
        for step in run.get("trace", []):
            out = _replay_step(step, facts, registry, lam, mu_ext, mode,
                               ext, char_modulus)
            if out is None:
                return False
            out = store_probe.canonicalize(out)
            expected = decode_fact(step[1], ext, char_modulus)
            if out.identity() != expected.identity():
                return False
            if expected.identity() in seen:
                return False
            seen.add(expected.identity())
            facts.append(expected)
        blob = "\n".join(sorted(f.canonical_str() for f in facts))
        if hashlib.sha256(blob.encode("ascii")).hexdigest() != run.get("digest"):
            return False
    return True
