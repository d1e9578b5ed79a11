"""Maximal inseparable sets and the canonical finite models built from them.

Fix a signed closure (Sigma1, Sigma2) and a logic. A subset T of Sigma is
separable when some formula over the shared closure atoms follows from T1
and refutes T2; since every logic handled here has the Craig interpolation
property, separability coincides with joint inconsistency of T1 and T2,
which is what the engine decides. Maximal inseparable sets decide every
side formula up to negation-representative, and they are the worlds of the
canonical model: T sees T' when every boxed member of T stays in T', and an
atom holds at the worlds containing it. Every closure member is then true
exactly at the worlds containing it, and when the logic extends S4.2 the
underlying frame is confluent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from . import engine as _engine
from .engine import Budget, LogicId, Satisfiable, Unsatisfiable
from .kripke import PreorderModel, model_check
from .syntax import (
    Atom, Box, Formula, SignedClosure, conj, iter_negation_pairs, modality_key,
    pretty, sorted_formulas,
)


class OracleUndecided(RuntimeError):
    """The consistency oracle ran out of budget; construction aborts loudly."""


class SeparableError(RuntimeError):
    def __init__(self, witness: Optional[Formula]):
        name = pretty(witness) if witness is not None else "(witness unavailable)"
        super().__init__(f"the set is separable, witnessed by {name}")
        self.witness = witness


@dataclass(frozen=True)
class Separable:
    witness: Formula


@dataclass(frozen=True)
class Inseparable:
    pass


@dataclass(frozen=True)
class MaximalSet:
    """A maximal inseparable subset, split by closure side."""

    t1: frozenset[Formula]
    t2: frozenset[Formula]

    @property
    def members(self) -> frozenset[Formula]:
        return self.t1 | self.t2

    def label(self) -> str:
        return "{" + ", ".join(pretty(f) for f in sorted_formulas(self.members)) + "}"


def _sides(T, closure: SignedClosure) -> tuple[frozenset, frozenset]:
    """Split T by closure side.

    T is either a flat formula set (split as T & sigma_i, the default
    reading) or an explicit pair (t1, t2) when the caller tracks which side
    each formula came from.
    """
    if isinstance(T, tuple) and len(T) == 2:
        t1, t2 = frozenset(T[0]), frozenset(T[1])
    else:
        flat = frozenset(T)
        t1, t2 = flat & closure.sigma1, flat & closure.sigma2
        if t1 | t2 != flat:
            stray = flat - closure.sigma
            raise ValueError(
                f"formulas outside the closure: {[pretty(f) for f in sorted_formulas(stray)]}"
            )
        return t1, t2
    if not t1 <= closure.sigma1 or not t2 <= closure.sigma2:
        stray = (t1 - closure.sigma1) | (t2 - closure.sigma2)
        raise ValueError(
            f"formulas outside their closure side: {[pretty(f) for f in sorted_formulas(stray)]}"
        )
    return t1, t2


def _consistent(
    formulas: Iterable[Formula], logic: LogicId, budget: Optional[Budget]
) -> bool:
    query = conj(sorted_formulas(set(formulas)))
    result = _engine.sat(query, logic, budget)
    if isinstance(result, Satisfiable):
        return True
    if isinstance(result, Unsatisfiable):
        return False
    raise OracleUndecided(
        f"consistency of {pretty(query)} undecided: {result.reason}"
    )


def is_separable(
    T: Iterable[Formula],
    closure: SignedClosure,
    logic: LogicId,
    budget: Optional[Budget] = None,
):
    """Separable(witness) or Inseparable(), deciding via joint consistency.

    The witness is the Craig interpolant of /\\T1 -> ~/\\T2; it uses only
    atoms shared by both closure sides.
    """
    t1, t2 = _sides(T, closure)
    if _consistent(t1 | t2, logic, budget):
        return Inseparable()
    from .syntax import Not
    result = _engine.find_interpolant(
        conj(sorted_formulas(t1)), Not(conj(sorted_formulas(t2))), logic, budget
    )
    if isinstance(result, _engine.Interpolant):
        return Separable(result.formula)
    raise OracleUndecided(
        "the set is separable but the witness search ran out of budget"
    )


def _class_polarity(
    sigma: frozenset[Formula], anchor: Formula
) -> tuple[frozenset[Formula], frozenset[Formula]]:
    """Members of sigma in the anchor's modality class and in its negation's."""
    from .syntax import Not
    key = modality_key(anchor)
    neg_key = modality_key(Not(anchor))
    pos = frozenset(f for f in sigma if modality_key(f) == key)
    neg = frozenset(f for f in sigma if modality_key(f) == neg_key)
    return pos, neg


def extend_to_maximal(
    T: Iterable[Formula],
    closure: SignedClosure,
    logic: LogicId,
    budget: Optional[Budget] = None,
) -> MaximalSet:
    """Lindenbaum-style extension: walk each side in canonical order, add
    the formula if the set stays inseparable, otherwise its negation
    representative (which then must keep the set inseparable)."""
    t1, t2 = _sides(T, closure)
    if not _consistent(t1 | t2, logic, budget):
        result = is_separable(t1 | t2, closure, logic, budget)
        witness = result.witness if isinstance(result, Separable) else None
        raise SeparableError(witness)
    sides = {1: set(t1), 2: set(t2)}
    for index in (1, 2):
        sigma = closure.side(index)
        chosen = sides[index]
        for anchor, neg_anchor in iter_negation_pairs(sigma):
            pos, neg = _class_polarity(sigma, anchor)
            decided_pos = chosen & pos
            decided_neg = chosen & neg
            if decided_pos:
                chosen |= pos
                continue
            if decided_neg:
                chosen |= neg
                continue
            other = sides[2 if index == 1 else 1]
            if _consistent(chosen | other | pos, logic, budget):
                chosen |= pos
            elif _consistent(chosen | other | neg, logic, budget):
                chosen |= neg
            else:
                raise SeparableError(None)
    return MaximalSet(frozenset(sides[1]), frozenset(sides[2]))


# ---------------------------------------------------------------------------
# The canonical model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmorynskiModel:
    model: PreorderModel = field(hash=False)
    worlds: Mapping[str, MaximalSet] = field(hash=False)
    closure: SignedClosure = field(hash=False)
    logic: LogicId = LogicId("Int", float("inf"), float("inf"))

    def to_json_dict(self) -> dict:
        """Kripke JSON with worlds renamed to their sorted member lists."""
        from .kripke import model_to_dict
        rename = {wid: self.worlds[wid].label() for wid in self.model.worlds}
        raw = model_to_dict(self.model)
        return {
            "worlds": sorted(rename[w] for w in raw["worlds"]),
            "order": sorted([rename[a], rename[b]] for a, b in raw["order"]),
            "valuation": {
                atom: sorted(rename[w] for w in ws)
                for atom, ws in raw["valuation"].items()
            },
            "closure": "strict",
        }


def _maximal_sets_from_types(
    closure: SignedClosure, logic: LogicId, budget: Budget
) -> list[MaximalSet]:
    """Enumerate maximal inseparable sets as surviving type assignments.

    For the (w,w) logics the base-logic elimination is exactly the
    consistency oracle; for bounded logics each surviving type is re-checked
    with the full engine and the construction aborts on any Unknown.
    """
    space = _engine.TypeSpace(sorted_formulas(closure.sigma), budget)
    if logic.lam == "Int":
        survivors = set(_engine._eliminate(space, space.coherent))
    else:
        survivors = set()
        sigs = sorted({space.sig(i) for i in space.coherent})
        for b in sigs:
            outcome = _engine._top_cluster_candidates(space, b)
            if outcome is None:
                continue
            top, top_witness = outcome
            compatibles = [i for i in space.coherent if space.sig(i) | b == b]
            survivors |= set(_engine._eliminate(space, compatibles, top_witness))
            survivors |= set(top)
    sets = {}
    for i in sorted(survivors):
        t1 = frozenset(f for f in closure.sigma1 if space.holds(f, i))
        t2 = frozenset(f for f in closure.sigma2 if space.holds(f, i))
        sets[(t1, t2)] = MaximalSet(t1, t2)
    out = sorted(sets.values(), key=lambda ms: ms.label())
    if not logic.unbounded:
        out = [ms for ms in out if _consistent(ms.members, logic, budget)]
    return out


def _maximal_sets_by_branching(
    closure: SignedClosure, logic: LogicId, budget: Budget
) -> list[MaximalSet]:
    """Depth-first branching over (formula vs negation) choices with
    inseparability pruning; reference implementation for cross-checks."""
    pair_plan: list[tuple[int, frozenset, frozenset]] = []
    for index in (1, 2):
        sigma = closure.side(index)
        for anchor, _ in iter_negation_pairs(sigma):
            pos, neg = _class_polarity(sigma, anchor)
            pair_plan.append((index, pos, neg))
    results = {}

    def walk(pos_at: int, sides: dict[int, frozenset]):
        if pos_at == len(pair_plan):
            ms = MaximalSet(sides[1], sides[2])
            results[(ms.t1, ms.t2)] = ms
            return
        index, pos, neg = pair_plan[pos_at]
        for choice in (pos, neg):
            extended = dict(sides)
            extended[index] = sides[index] | choice
            if _consistent(extended[1] | extended[2], logic, budget):
                walk(pos_at + 1, extended)

    walk(0, {1: frozenset(), 2: frozenset()})
    return sorted(results.values(), key=lambda ms: ms.label())


def build_smorynski_model(
    closure: SignedClosure,
    logic: LogicId,
    budget: Optional[Budget] = None,
    strategy: str = "types",
) -> SmorynskiModel:
    """Build the canonical model over all maximal inseparable sets.

    Worlds carry short ids in memory; ``to_json_dict`` serializes them under
    their sorted member lists.
    """
    budget = budget or Budget()
    if strategy == "types":
        maximal = _maximal_sets_from_types(closure, logic, budget)
    elif strategy == "branching":
        maximal = _maximal_sets_by_branching(closure, logic, budget)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not maximal:
        raise OracleUndecided("no maximal inseparable sets; is the logic consistent?")
    width = len(str(len(maximal)))
    ids = {f"m{idx:0{width}d}": ms for idx, ms in enumerate(maximal)}
    boxed = frozenset(f for f in closure.sigma if isinstance(f, Box))
    items = sorted(ids.items())
    box_part = {wid: ms.members & boxed for wid, ms in items}
    order = set()
    for wid, _ in items:
        for wid2, _ in items:
            if box_part[wid] <= box_part[wid2]:
                order.add((wid, wid2))
    atoms_here = sorted(f.name for f in closure.sigma if isinstance(f, Atom))
    member_sets = {wid: ms.members for wid, ms in items}
    valuation = {
        name: [wid for wid, _ in items if Atom(name) in member_sets[wid]]
        for name in atoms_here
    }
    model = PreorderModel([wid for wid, _ in items], order, valuation)
    return SmorynskiModel(model, dict(items), closure, logic)


def truth_lemma_violations(sm: SmorynskiModel) -> list[tuple[str, Formula]]:
    """(world, formula) pairs where membership and satisfaction disagree."""
    out = []
    for f in sorted_formulas(sm.closure.sigma):
        extension = model_check(sm.model, f)
        for wid, ms in sorted(sm.worlds.items()):
            if (wid in extension) != (f in ms.members):
                out.append((wid, f))
    return out
