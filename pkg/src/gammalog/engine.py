"""Decision engine: satisfiability, validity, countermodels, interpolants.

The engine decides the eighteen logics G(Lambda,m,n) with Lambda in
{Int, KC} and m, n in {1, 2, w}. Every logic is the base logic S4 (Int) or
S4.2 (KC) extended by the cluster-bounding axioms, and is complete for the
finite base-logic frames whose final clusters have size at most m and whose
non-final clusters have size at most n.

Verdicts are produced by a layered pipeline in which every positive answer
carries a machine-verified witness and every negative answer comes from a
method that is sound for the whole frame class:

1. Cluster-formula analysis. If the query is (the negation of) a frame
   formula over distinct atoms, refutability on the frame class reduces to
   whether the target frame itself lies in the class: a p-morphic image of
   a generated subframe of a class frame inherits the cluster bounds and
   confluence, and conversely the identity map realizes any class frame.
2. Base-logic type elimination over the subformula closure. Unsatisfiable
   results transfer soundly to every extension; satisfiable results are
   final for the (w,w) logics and otherwise feed a cluster-refinement
   attempt whose output is re-verified against the frame class.
3. Bounded enumeration of class models (also the countermodel oracle).

Anything undecided within budget is reported as Unknown, never guessed.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from . import kripke
from .frame_formulas import OMEGA, RootedFrame
from .kripke import PreorderModel, generated_submodel, is_confluent, model_check
from .syntax import (
    And, Atom, Bottom, Box, Diamond, Formula, Iff, Implies, Not, Or, Top,
    FALSE, TRUE, atoms, node_count, pretty, sort_key, sorted_formulas,
    subformula_closure, to_core,
)

Bound = Union[int, float]


# ---------------------------------------------------------------------------
# Logic identifiers and the interpolation catalog
# ---------------------------------------------------------------------------

class LogicError(ValueError):
    pass


@dataclass(frozen=True)
class LogicId:
    """G(lambda, m, n): final clusters of size <= m, non-final <= n."""

    lam: str
    m: Bound
    n: Bound

    def __post_init__(self):
        if self.lam not in ("Int", "KC"):
            raise LogicError(f"lambda must be Int or KC, got {self.lam!r}")
        for value in (self.m, self.n):
            if value != OMEGA and value not in (1, 2):
                raise LogicError(f"cluster bounds must be 1, 2 or w, got {value!r}")

    @property
    def confluent(self) -> bool:
        return self.lam == "KC"

    @property
    def unbounded(self) -> bool:
        return self.m == OMEGA and self.n == OMEGA

    def __str__(self) -> str:
        return f"G({self.lam},{_bound_str(self.m)},{_bound_str(self.n)})"


def _bound_str(value: Bound) -> str:
    return "w" if value == OMEGA else str(int(value))


_LOGIC_RE = re.compile(r"G\(\s*(Int|KC)\s*,\s*(1|2|w)\s*,\s*(1|2|w)\s*\)")
_ALIAS_LOGICS = {
    "S4": LogicId("Int", OMEGA, OMEGA),
    "S4.2": LogicId("KC", OMEGA, OMEGA),
    "Grz": LogicId("Int", 1, 1),
}


def parse_logic(text: str) -> LogicId:
    text = text.strip()
    if text in _ALIAS_LOGICS:
        return _ALIAS_LOGICS[text]
    m = _LOGIC_RE.fullmatch(text)
    if not m:
        raise LogicError(
            f"bad logic {text!r}; expected G(Int|KC,1|2|w,1|2|w) or S4, S4.2, Grz"
        )
    bounds = [OMEGA if tok == "w" else int(tok) for tok in m.groups()[1:]]
    return LogicId(m.group(1), bounds[0], bounds[1])


ALL_LOGICS: tuple[LogicId, ...] = tuple(
    LogicId(lam, m, n)
    for lam in ("Int", "KC")
    for m in (1, 2, OMEGA)
    for n in (1, 2, OMEGA)
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: str
    m: Optional[Bound]
    n: Optional[Bound]
    has_cip: bool
    has_dip: bool
    decidable_here: bool
    aliases: tuple[str, ...] = ()


def catalog() -> list[CatalogEntry]:
    """The classification of normal S4 extensions by interpolation:
    exactly 37 entries with the Craig property, exactly 49 with the
    deductive property."""
    entries: list[CatalogEntry] = [
        CatalogEntry("For", "For", None, None, True, True, False,
                     aliases=("inconsistent",))
    ]
    seen = {("For", None, None)}

    def add(family: str, m: Bound, n: Bound, cip: bool, decidable: bool):
        key = (family, m, n)
        if key in seen:
            return
        seen.add(key)
        name = f"G({family},{_bound_str(m)},{_bound_str(n)})"
        aliases = {
            ("Int", OMEGA, OMEGA): ("S4",),
            ("KC", OMEGA, OMEGA): ("S4.2",),
            ("Int", 1, 1): ("Grz",),
        }.get(key, ())
        entries.append(CatalogEntry(name, family, m, n, cip, True, decidable, aliases))

    for lam in ("Int", "KC"):
        for m in (1, 2, OMEGA):
            for n in (1, 2, OMEGA):
                add(lam, m, n, cip=True, decidable=True)
    for lam in ("LP2", "LV", "LS"):
        for n in (1, 2, OMEGA):
            add(lam, n, 1, cip=True, decidable=False)
            add(lam, 1, n, cip=True, decidable=False)
    for n in (1, 2, OMEGA):
        add("Cl", n, 0, cip=True, decidable=False)
    for lam in ("LP2", "LV", "LS"):
        for m in (2, OMEGA):
            for n in (2, OMEGA):
                add(lam, m, n, cip=False, decidable=False)
    return entries


# ---------------------------------------------------------------------------
# Budgets and verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    """Explicit resource limits; exceeding any of them yields Unknown."""

    max_letters: int = 20          # modal atoms in a type space
    max_types: int = 60_000        # coherent types in a type space
    max_worlds: int = 5            # model enumeration bound
    max_candidates: int = 4_000    # interpolant candidates
    max_seconds: float = 30.0      # wall clock per engine call


class BudgetExceeded(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class _Deadline:
    def __init__(self, seconds: float):
        self.t0 = time.monotonic()
        self.seconds = seconds

    def check(self, what: str) -> None:
        if time.monotonic() - self.t0 > self.seconds:
            raise BudgetExceeded(f"time budget exceeded during {what}")


@dataclass(frozen=True)
class Satisfiable:
    model: PreorderModel = field(hash=False)
    world: str


@dataclass(frozen=True)
class Unsatisfiable:
    pass


UNSAT = Unsatisfiable()


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class Valid:
    pass


VALID = Valid()


@dataclass(frozen=True)
class Invalid:
    model: PreorderModel = field(hash=False)
    world: str


@dataclass(frozen=True)
class Interpolant:
    formula: Formula
    checked_left: bool = True
    checked_right: bool = True


@dataclass(frozen=True)
class NotValid:
    model: PreorderModel = field(hash=False)
    world: str


# ---------------------------------------------------------------------------
# Frame class membership
# ---------------------------------------------------------------------------

def in_frame_class(model: PreorderModel, logic: LogicId) -> bool:
    finals, nonfinals = kripke.cluster_sizes(model)
    if any(size > logic.m for size in finals):
        return False
    if any(size > logic.n for size in nonfinals):
        return False
    if logic.confluent and not is_confluent(model):
        return False
    return True


def frame_in_class(frame: RootedFrame, logic: LogicId) -> bool:
    return in_frame_class(frame.as_model(), logic)


# ---------------------------------------------------------------------------
# Type spaces: bit-parallel Hintikka assignments over a closure
# ---------------------------------------------------------------------------

def _column(j: int, k: int) -> int:
    """Bitmask over 2^k assignments where assignment i has bit j set."""
    step = 1 << j
    block = ((1 << step) - 1) << step
    period = step << 1
    reps = (1 << k) // period
    return block * (((1 << (period * reps)) - 1) // ((1 << period) - 1)) if reps else 0


class TypeSpace:
    """All propositionally coherent truth assignments for a closure.

    Letters are the closure's atoms and boxed subformulas; an assignment is
    an integer whose bit j gives letter j's value. Formula truth across all
    assignments is held as one big bitmask, so coherence filtering and
    elimination run bit-parallel.
    """

    def __init__(self, seeds: Iterable[Formula], budget: Budget):
        core_seeds = [to_core(f) for f in seeds]
        self.closure = subformula_closure(core_seeds)
        self.letters = sorted_formulas(
            f for f in self.closure if isinstance(f, (Atom, Box))
        )
        self.k = len(self.letters)
        if self.k > budget.max_letters:
            raise BudgetExceeded(
                f"type space needs {self.k} letters (cap {budget.max_letters})"
            )
        self._index = {f: j for j, f in enumerate(self.letters)}
        self._full = (1 << (1 << self.k)) - 1
        self._masks: dict[Formula, int] = {}
        self._bytes: dict[Formula, bytes] = {}
        self.box_positions = [
            j for j, f in enumerate(self.letters) if isinstance(f, Box)
        ]
        self.box_mask = 0
        for j in self.box_positions:
            self.box_mask |= 1 << j
        coherent_mask = self._full
        for j in self.box_positions:
            letter = self.letters[j]
            coherent_mask &= (self._full ^ _column(j, self.k)) | self.mask(letter.sub)
        self.coherent = _bits(coherent_mask)
        if len(self.coherent) > budget.max_types:
            raise BudgetExceeded(
                f"type space has {len(self.coherent)} coherent types "
                f"(cap {budget.max_types})"
            )

    def mask(self, f: Formula) -> int:
        f = to_core(f)
        hit = self._masks.get(f)
        if hit is not None:
            return hit
        if f in self._index:
            out = _column(self._index[f], self.k)
        elif isinstance(f, Bottom):
            out = 0
        elif isinstance(f, Top):
            out = self._full
        elif isinstance(f, Not):
            out = self._full ^ self.mask(f.sub)
        elif isinstance(f, And):
            out = self.mask(f.left) & self.mask(f.right)
        elif isinstance(f, Or):
            out = self.mask(f.left) | self.mask(f.right)
        else:
            raise LogicError(f"formula outside the type space closure: {pretty(f)}")
        self._masks[f] = out
        return out

    def bits(self, f: Formula) -> bytes:
        """Byte view of a formula's truth mask, for O(1) per-type tests."""
        f = to_core(f)
        cached = self._bytes.get(f)
        if cached is None:
            n_bytes = ((1 << self.k) + 7) >> 3
            cached = self.mask(f).to_bytes(n_bytes, "little")
            self._bytes[f] = cached
        return cached

    def holds(self, f: Formula, assignment: int) -> bool:
        view = self.bits(f)
        return bool(view[assignment >> 3] >> (assignment & 7) & 1)

    def sig(self, assignment: int) -> int:
        return assignment & self.box_mask

    def box_core_mask(self, j: int) -> int:
        return self.mask(self.letters[j].sub)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _eliminate(
    space: TypeSpace,
    candidates: Sequence[int],
    top_witness: Optional[dict[int, bool]] = None,
) -> list[int]:
    """Greatest set of types whose missing boxes all have witnesses.

    A type i lacking box-letter j needs a surviving j-witness with a
    superset box signature, or (for the confluent construction) a witness
    in the fixed top cluster as recorded in ``top_witness``.
    """
    alive = sorted(candidates)
    obligations = {
        i: [j for j in space.box_positions if not i >> j & 1] for i in alive
    }
    core_bits = {j: space.bits(space.letters[j].sub) for j in space.box_positions}
    while True:
        witness_sigs: dict[int, set[int]] = {}
        for j in space.box_positions:
            view = core_bits[j]
            witness_sigs[j] = {
                space.sig(i) for i in alive if not view[i >> 3] >> (i & 7) & 1
            }
        answered: dict[tuple[int, int], bool] = {}
        kept = []
        for i in alive:
            sig_i = space.sig(i)
            ok = True
            for j in obligations[i]:
                if top_witness is not None and top_witness.get(j, False):
                    continue
                key = (sig_i, j)
                hit = answered.get(key)
                if hit is None:
                    hit = any(sig | sig_i == sig for sig in witness_sigs[j])
                    answered[key] = hit
                if not hit:
                    ok = False
                    break
            if ok:
                kept.append(i)
        if len(kept) == len(alive):
            return kept
        alive = kept


def _types_to_model(
    space: TypeSpace,
    survivors: Sequence[int],
    top: Sequence[int] = (),
) -> PreorderModel:
    """Build the canonical model over surviving types.

    ``top`` lists types forming an explicit final cluster that every world
    sees (the confluent construction); it may repeat survivor types.
    """
    names = {i: f"t{idx:06d}" for idx, i in enumerate(sorted(survivors))}
    top_names = [f"u{idx:06d}" for idx, _ in enumerate(top)]
    worlds = list(names.values()) + top_names
    order = set()
    for a in survivors:
        for b in survivors:
            if space.sig(a) | space.sig(b) == space.sig(b):
                order.add((names[a], names[b]))
        for tn in top_names:
            order.add((names[a], tn))
    for tn in top_names:
        for tn2 in top_names:
            order.add((tn, tn2))
    valuation = {}
    for j, letter in enumerate(space.letters):
        if isinstance(letter, Atom):
            ext = [names[i] for i in survivors if i >> j & 1]
            ext += [tn for tn, i in zip(top_names, top) if i >> j & 1]
            valuation[letter.name] = ext
    return PreorderModel(worlds, order, valuation)


def _s4_decide(space: TypeSpace, goal: Formula) -> tuple[bool, Optional[tuple[PreorderModel, str]]]:
    survivors = _eliminate(space, space.coherent)
    hits = [i for i in survivors if space.holds(goal, i)]
    if not hits:
        return False, None
    model = _types_to_model(space, survivors)
    world = f"t{sorted(survivors).index(hits[0]):06d}"
    return True, (generated_submodel(model, world), world)


def _s42_decide(space: TypeSpace, goal: Formula) -> tuple[bool, Optional[tuple[PreorderModel, str]]]:
    """Satisfiability over finite confluent preorders.

    Every finite confluent model has a single final cluster seen from
    everywhere, so we enumerate candidate top box-signatures b, take all
    coherent types with signature b that satisfy the cores of b (the
    largest possible top cluster, which dominates every smaller choice),
    and eliminate the types lying below it.
    """
    sigs = sorted({space.sig(i) for i in space.coherent})
    for b in sigs:
        outcome = _top_cluster_candidates(space, b)
        if outcome is None:
            continue
        top, top_witness = outcome
        compatibles = [
            i for i in space.coherent if space.sig(i) | b == b
        ]
        survivors = _eliminate(space, compatibles, top_witness)
        hit_world = None
        sorted_survivors = sorted(survivors)
        for idx, i in enumerate(sorted_survivors):
            if space.holds(goal, i):
                hit_world = f"t{idx:06d}"
                break
        if hit_world is None:
            for idx, i in enumerate(top):
                if space.holds(goal, i):
                    hit_world = f"u{idx:06d}"
                    break
        if hit_world is not None:
            model = _types_to_model(space, survivors, top)
            return True, (generated_submodel(model, hit_world), hit_world)
    return False, None


def _top_cluster_candidates(
    space: TypeSpace, b: int
) -> Optional[tuple[list[int], dict[int, bool]]]:
    """The largest candidate final cluster with box signature b, with its
    per-obligation witness record; None if it cannot be a final cluster."""
    top = [
        i for i in space.coherent
        if space.sig(i) == b
        and all(space.holds(space.letters[j].sub, i)
                for j in space.box_positions if b >> j & 1)
    ]
    if not top:
        return None
    top_witness = {}
    for j in space.box_positions:
        if b >> j & 1:
            continue
        top_witness[j] = any(not space.holds(space.letters[j].sub, i) for i in top)
        if not top_witness[j]:
            return None
    return top, top_witness


# ---------------------------------------------------------------------------
# Frame enumeration and model search
# ---------------------------------------------------------------------------

def _set_partitions(items: tuple[int, ...]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]
        yield [[first]] + partition


@lru_cache(maxsize=None)
def _labeled_posets(b: int) -> tuple[frozenset[tuple[int, int]], ...]:
    """All strict partial orders on range(b), as transitive irreflexive sets."""
    posets: list[set[tuple[int, int]]] = [set()]
    for new in range(b):
        extended = []
        existing = list(range(new))
        for rel in posets:
            for down in _subsets(existing):
                dset = set(down)
                if any((d2, d) in rel and d2 not in dset for d in dset for d2 in existing):
                    continue
                ups = [u for u in existing if u not in dset]
                for up in _subsets(ups):
                    uset = set(up)
                    if any((u, u2) in rel and u2 not in uset for u in uset for u2 in ups):
                        continue
                    if any((d, u) not in rel for d in dset for u in uset):
                        continue
                    new_rel = set(rel)
                    new_rel |= {(d, new) for d in dset}
                    new_rel |= {(new, u) for u in uset}
                    extended.append(new_rel)
        posets = extended
    return tuple(frozenset(r) for r in posets)


def _subsets(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


@lru_cache(maxsize=None)
def _canonical_frames(k: int) -> tuple[frozenset[tuple[int, int]], ...]:
    """Preorders on range(k), one representative per isomorphism class,
    in canonical adjacency-encoding order."""
    seen = set()
    out = []
    perms = list(itertools.permutations(range(k)))
    for partition in _set_partitions(tuple(range(k))):
        blocks = [sorted(block) for block in partition]
        block_of = {}
        for bi, block in enumerate(blocks):
            for x in block:
                block_of[x] = bi
        for poset in _labeled_posets(len(blocks)):
            rel = frozenset(
                (x, y) for x in range(k) for y in range(k)
                if block_of[x] == block_of[y] or (block_of[x], block_of[y]) in poset
            )
            canon = min(
                tuple(sorted((p[a], p[b]) for a, b in rel)) for p in perms
            )
            if canon not in seen:
                seen.add(canon)
                out.append(frozenset(canon))
    out.sort(key=lambda rel: sorted(rel))
    return tuple(out)


def eval_on_frame(
    succ: Sequence[int], env: dict[str, int], f: Formula, cache: Optional[dict] = None
) -> int:
    """Bit-parallel satisfaction set over a small frame.

    ``succ[w]`` is the successor bitmask of world w and ``env`` maps atom
    names to extension bitmasks; the result is the bitmask of [[f]].
    """
    if cache is None:
        cache = {}
    hit = cache.get(f)
    if hit is not None:
        return hit
    k = len(succ)
    full = (1 << k) - 1
    if isinstance(f, Atom):
        out = env.get(f.name, 0)
    elif isinstance(f, Bottom):
        out = 0
    elif isinstance(f, Top):
        out = full
    elif isinstance(f, Not):
        out = full ^ eval_on_frame(succ, env, f.sub, cache)
    elif isinstance(f, And):
        out = eval_on_frame(succ, env, f.left, cache) & eval_on_frame(succ, env, f.right, cache)
    elif isinstance(f, Or):
        out = eval_on_frame(succ, env, f.left, cache) | eval_on_frame(succ, env, f.right, cache)
    elif isinstance(f, Implies):
        out = (full ^ eval_on_frame(succ, env, f.left, cache)) | eval_on_frame(succ, env, f.right, cache)
    elif isinstance(f, Iff):
        a = eval_on_frame(succ, env, f.left, cache)
        b = eval_on_frame(succ, env, f.right, cache)
        out = (a & b) | (full ^ (a | b))
    elif isinstance(f, Box):
        sub = eval_on_frame(succ, env, f.sub, cache)
        out = 0
        for w in range(k):
            if succ[w] & ~sub == 0:
                out |= 1 << w
    elif isinstance(f, Diamond):
        sub = eval_on_frame(succ, env, f.sub, cache)
        out = 0
        for w in range(k):
            if succ[w] & sub:
                out |= 1 << w
    else:
        raise LogicError(f"unknown node {f!r}")
    cache[f] = out
    return out


@lru_cache(maxsize=None)
def _class_frames(k: int, lam: str, m: Bound, n: Bound) -> tuple[tuple[int, ...], ...]:
    """Successor-mask vectors of the canonical k-world frames in the class."""
    logic = LogicId(lam, m, n)
    out = []
    worlds = [f"w{i}" for i in range(k)]
    for rel in _canonical_frames(k):
        order = {(worlds[a], worlds[b]) for a, b in rel}
        skeleton = PreorderModel(worlds, order, {})
        if in_frame_class(skeleton, logic):
            succ = [0] * k
            for a, b in rel:
                succ[a] |= 1 << b
            out.append(tuple(succ))
    return tuple(out)


def _frame_walk(
    f: Formula,
    logic: LogicId,
    max_worlds: int,
    want: str,
    deadline: Optional[_Deadline] = None,
) -> Optional[tuple[PreorderModel, str]]:
    """Scan class models in canonical order for a world refuting f
    (want='refute') or satisfying it (want='satisfy')."""
    names = sorted(atoms(f))
    for k in range(1, max_worlds + 1):
        worlds = [f"w{i}" for i in range(k)]
        full = (1 << k) - 1
        for succ in _class_frames(k, logic.lam, logic.m, logic.n):
            if deadline:
                deadline.check("model enumeration")
            for bits in itertools.product(range(1 << k), repeat=len(names)):
                env = dict(zip(names, bits))
                sat_bits = eval_on_frame(succ, env, f)
                target = (full ^ sat_bits) if want == "refute" else sat_bits
                if target:
                    world_index = (target & -target).bit_length() - 1
                    model = PreorderModel(
                        worlds,
                        {(worlds[a], worlds[b]) for a in range(k) for b in range(k)
                         if succ[a] >> b & 1},
                        {name: [worlds[i] for i in range(k) if bit >> i & 1]
                         for name, bit in zip(names, bits)},
                    )
                    world = worlds[world_index]
                    # re-verify with the reference semantics before returning
                    holds = kripke.satisfies(model, world, f)
                    if holds == (want == "satisfy") and in_frame_class(model, logic):
                        return model, world
    return None


def countermodel_search(
    f: Formula, logic: LogicId, max_worlds: int
) -> Optional[tuple[PreorderModel, str]]:
    """First class model (canonical order) refuting f, up to the size bound.

    Sound for refutation and incomplete: absence of a countermodel within
    the bound proves nothing.
    """
    return _frame_walk(f, logic, max_worlds, "refute")


def _search_satisfying_model(
    f: Formula, logic: LogicId, max_worlds: int, deadline: _Deadline
) -> Optional[tuple[PreorderModel, str]]:
    return _frame_walk(f, logic, max_worlds, "satisfy", deadline)


# ---------------------------------------------------------------------------
# Structural analysis of substituted frame formulas
# ---------------------------------------------------------------------------

def _simplify_units(f: Formula) -> Formula:
    """Trivial unit rewrites used only to normalize matcher input."""
    if isinstance(f, Not):
        sub = _simplify_units(f.sub)
        if isinstance(sub, Not):
            return sub.sub
        return Not(sub)
    if isinstance(f, Implies):
        left, right = _simplify_units(f.left), _simplify_units(f.right)
        if left == TRUE:
            return right
        return Implies(left, right)
    if isinstance(f, And):
        left, right = _simplify_units(f.left), _simplify_units(f.right)
        if left == TRUE:
            return right
        if right == TRUE:
            return left
        return And(left, right)
    if isinstance(f, Or):
        left, right = _simplify_units(f.left), _simplify_units(f.right)
        if left == FALSE:
            return right
        if right == FALSE:
            return left
        return Or(left, right)
    return f


def _flatten(f: Formula, ctor) -> list[Formula]:
    if isinstance(f, ctor):
        return _flatten(f.left, ctor) + _flatten(f.right, ctor)
    return [f]


def _match_frame_conjunction(f: Formula) -> Optional[tuple[RootedFrame, list[str]]]:
    """Recognize the satisfied form of a frame formula over distinct atoms.

    Returns (target frame, atom names) when f is exactly the conjunction of
    the frame-formula items (i)-(v) for some rooted preorder, with the
    substituted arguments pairwise distinct atoms; None otherwise.
    """
    f = _simplify_units(f)
    while isinstance(f, Not) and isinstance(f.sub, Not):
        f = f.sub.sub
    items = _flatten(f, And)
    if len(items) < 2:
        return None
    first, second = items[0], items[1]
    if not isinstance(first, Atom) or not isinstance(second, Box):
        return None
    args = _flatten(second.sub, Or)
    if not all(isinstance(a, Atom) for a in args):
        return None
    names = [a.name for a in args]
    if len(set(names)) != len(names) or first.name != names[0]:
        return None
    k = len(names)
    index = {name: i for i, name in enumerate(names)}
    need_neg = {(i, j) for i in range(k) for j in range(k) if i != j}
    rel_pairs: set[tuple[int, int]] = set()
    nonrel_pairs: set[tuple[int, int]] = set()
    for item in items[2:]:
        if not (isinstance(item, Box) and isinstance(item.sub, Implies)):
            return None
        left, right = item.sub.left, item.sub.right
        if not isinstance(left, Atom) or left.name not in index:
            return None
        i = index[left.name]
        if isinstance(right, Not) and isinstance(right.sub, Atom) and right.sub.name in index:
            pair = (i, index[right.sub.name])
            if pair not in need_neg:
                return None
            need_neg.discard(pair)
        elif isinstance(right, Diamond) and isinstance(right.sub, Atom) and right.sub.name in index:
            rel_pairs.add((i, index[right.sub.name]))
        elif (
            isinstance(right, Not)
            and isinstance(right.sub, Diamond)
            and isinstance(right.sub.sub, Atom)
            and right.sub.sub.name in index
        ):
            nonrel_pairs.add((i, index[right.sub.sub.name]))
        else:
            return None
    if need_neg:
        return None
    all_pairs = {(i, j) for i in range(k) for j in range(k)}
    if rel_pairs | nonrel_pairs != all_pairs or rel_pairs & nonrel_pairs:
        return None
    try:
        frame = RootedFrame(k, frozenset(rel_pairs))
    except kripke.ModelError:
        return None
    return frame, names


def _frame_formula_sat(f: Formula, logic: LogicId):
    """Decide sat for inputs that are satisfied frame-formula conjunctions.

    The conjunction is satisfiable at a point x iff the generated subframe
    p-morphs onto the target with the atoms as preimages; over the frame
    class that happens iff the target frame itself lies in the class.
    """
    match = _match_frame_conjunction(f)
    if match is None:
        return None
    frame, names = match
    if not frame_in_class(frame, logic):
        return UNSAT
    model = frame.as_model({name: [f"g{i}"] for i, name in enumerate(names)})
    if kripke.satisfies(model, "g0", f) and in_frame_class(model, logic):
        return Satisfiable(model, "g0")
    return None


# ---------------------------------------------------------------------------
# sat / valid / equivalent
# ---------------------------------------------------------------------------

_SAT_CACHE: dict[tuple, object] = {}


def sat(f: Formula, logic: LogicId, budget: Optional[Budget] = None):
    """Satisfiability of f over the finite frames of the logic.

    Returns Satisfiable(model, world) with a verified in-class witness,
    Unsatisfiable, or Unknown. Never an unverified positive and never a
    wrong verdict: Unsatisfiable comes only from methods sound for the
    whole frame class.
    """
    budget = budget or Budget()
    key = (f, logic, budget)
    hit = _SAT_CACHE.get(key)
    if hit is not None:
        return hit
    result = _sat_uncached(f, logic, budget)
    _SAT_CACHE[key] = result
    return result


def _sat_uncached(f: Formula, logic: LogicId, budget: Budget):
    deadline = _Deadline(budget.max_seconds)

    structural = _frame_formula_sat(f, logic)
    if structural is not None:
        return structural

    core = to_core(f)
    base_sat: Optional[bool] = None
    base_witness = None
    skip_reason = ""
    try:
        space = TypeSpace([core], budget)
        if logic.lam == "Int":
            base_sat, base_witness = _s4_decide(space, core)
        else:
            base_sat, base_witness = _s42_decide(space, core)
    except BudgetExceeded as exc:
        skip_reason = exc.reason

    if base_sat is False:
        return UNSAT
    if base_sat and base_witness is not None:
        model, world = base_witness
        if logic.unbounded:
            if kripke.satisfies(model, world, f) and in_frame_class(model, logic):
                return Satisfiable(model, world)
        else:
            refined = _try_refine_to_class(model, world, f, logic)
            if refined is not None:
                return refined

    try:
        found = _search_satisfying_model(f, logic, budget.max_worlds, deadline)
    except BudgetExceeded as exc:
        return Unknown(exc.reason)
    if found is not None:
        model, world = found
        return Satisfiable(model, world)
    reason = skip_reason or (
        f"base logic reports satisfiable but no class model with at most "
        f"{budget.max_worlds} worlds was found"
    )
    return Unknown(reason)


def _try_refine_to_class(
    model: PreorderModel, world: str, f: Formula, logic: LogicId
) -> Optional[Satisfiable]:
    from .refine import RefinementError, refine_model

    if len(model.worlds) > 80:
        return None
    sigma = subformula_closure([to_core(f)])
    try:
        refined = refine_model(model, sigma, sigma, logic.m, logic.n)
    except RefinementError:
        return None
    if kripke.satisfies(refined, world, f) and in_frame_class(refined, logic):
        return Satisfiable(refined, world)
    return None


def valid(f: Formula, logic: LogicId, budget: Optional[Budget] = None):
    """Valid iff ~f is unsatisfiable; Invalid carries the countermodel."""
    result = sat(Not(f), logic, budget)
    if isinstance(result, Unsatisfiable):
        return VALID
    if isinstance(result, Satisfiable):
        return Invalid(result.model, result.world)
    return Unknown(result.reason)


def equivalent(
    f: Formula, g: Formula, logic: LogicId, budget: Optional[Budget] = None
) -> Optional[bool]:
    """True/False for decided equivalence, None for unknown."""
    if f == g:
        return True
    result = valid(Iff(f, g), logic, budget)
    if isinstance(result, Valid):
        return True
    if isinstance(result, Invalid):
        return False
    return None


# ---------------------------------------------------------------------------
# Interpolants
# ---------------------------------------------------------------------------

def _size_layer(by_size: dict[int, list[Formula]], size: int) -> list[Formula]:
    batch: list[Formula] = []
    for g in by_size[size - 1]:
        if g not in (FALSE, TRUE):
            if not isinstance(g, Not):
                batch.append(Not(g))
            batch.append(Box(g))
            batch.append(Diamond(g))
    for left_size in range(1, size - 1):
        right_size = size - 1 - left_size
        for a in by_size[left_size]:
            if a in (FALSE, TRUE):
                continue
            for b in by_size[right_size]:
                if b in (FALSE, TRUE) or a == b:
                    continue
                for ctor in (And, Or):
                    if isinstance(b, ctor):
                        continue
                    if not isinstance(a, ctor) and sort_key(a) > sort_key(b):
                        continue
                    batch.append(ctor(a, b))
    return batch


def _candidate_stream(names: Sequence[str], max_candidates: int) -> Iterator[Formula]:
    """Canonicalized formulas over the atoms, in waves of growing node
    count; each wave is emitted in canonical (depth, size, print) order."""
    by_size: dict[int, list[Formula]] = {
        1: [FALSE, TRUE] + [Atom(n) for n in sorted(names)]
    }
    emitted = 0
    top = 1
    previous = 0
    for wave_cap in (4, 6, 8, 10):
        while top < wave_cap:
            top += 1
            by_size[top] = _size_layer(by_size, top)
        wave = [
            f for s in range(1, top + 1) for f in by_size[s]
            if node_count(f) > previous
        ]
        wave.sort(key=sort_key)
        for f in wave:
            yield f
            emitted += 1
            if emitted >= max_candidates:
                return
        previous = wave_cap


def _fingerprint(f: Formula, zoo: Sequence[PreorderModel]) -> tuple:
    return tuple(frozenset(model_check(m, f)) for m in zoo)


def _fingerprint_zoo(names: Sequence[str]) -> list[PreorderModel]:
    frames = [
        (["a"], {("a", "a")}),
        (["a", "b"], {("a", "a"), ("b", "b"), ("a", "b")}),
        (["a", "b"], {("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")}),
        (["a", "b", "c"], {("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("a", "c")}),
    ]
    zoo = []
    pick = sorted(names)[:2]
    for worlds, order in frames:
        for bits in itertools.product(range(1 << len(worlds)), repeat=len(pick)):
            valuation = {
                name: [w for i, w in enumerate(worlds) if bit >> i & 1]
                for name, bit in zip(pick, bits)
            }
            zoo.append(PreorderModel(worlds, order, valuation))
    return zoo


def find_interpolant(
    f1: Formula, f2: Formula, logic: LogicId, budget: Optional[Budget] = None
):
    """Craig interpolant for f1 -> f2 in the logic, by candidate enumeration.

    Valid implications always have an interpolant in these logics, so with
    enough budget the enumeration terminates; candidates are tried in
    canonical order and both implications are re-verified before returning.
    """
    budget = budget or Budget()
    outer = valid(Implies(f1, f2), logic, budget)
    if isinstance(outer, Invalid):
        return NotValid(outer.model, outer.world)
    if isinstance(outer, Unknown):
        return Unknown(f"implication undecided: {outer.reason}")

    shared = sorted(atoms(f1) & atoms(f2))
    zoo = _fingerprint_zoo(shared)
    seen: dict[tuple, list[Formula]] = {}
    tried = 0
    for chi in _candidate_stream(shared, budget.max_candidates * 4):
        if tried >= budget.max_candidates:
            break
        print_key = _fingerprint(chi, zoo)
        bucket = seen.setdefault(print_key, [])
        if any(equivalent(chi, other, logic, budget) for other in bucket):
            continue
        bucket.append(chi)
        tried += 1
        left = valid(Implies(f1, chi), logic, budget)
        if not isinstance(left, Valid):
            continue
        right = valid(Implies(chi, f2), logic, budget)
        if not isinstance(right, Valid):
            continue
        assert atoms(chi) <= set(shared)
        return Interpolant(chi)
    return Unknown(
        f"no interpolant found among {tried} candidates (cap {budget.max_candidates})"
    )
