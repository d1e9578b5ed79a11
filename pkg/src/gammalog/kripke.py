"""Finite preorder Kripke models: model checking, clusters, p-morphisms.

Models are immutable after construction. World ids are opaque strings and
every deterministic enumeration iterates them in lexicographic order.
Unknown atoms evaluate to the empty set (logged once per model) because the
closure machinery routinely checks formulas over partially valued models.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .syntax import (
    And, Atom, Bottom, Box, Diamond, Formula, Iff, Implies, Not, Or, Top,
)

log = logging.getLogger(__name__)


class ModelError(ValueError):
    """Raised for structurally invalid models, frames, or world lookups."""


class PreorderModel:
    """A finite set of worlds with a reflexive-transitive order and valuation.

    ``closure="strict"`` validates that the given order is already a
    preorder; ``closure="auto"`` adds the reflexive-transitive closure.
    """

    __slots__ = ("worlds", "order", "valuation", "_succ", "_cache", "_warned", "_gen")

    def __init__(
        self,
        worlds: Iterable[str],
        order: Iterable[tuple[str, str]],
        valuation: Mapping[str, Iterable[str]],
        closure: str = "strict",
    ):
        ws = tuple(sorted(set(worlds)))
        if not ws:
            raise ModelError("a model needs at least one world")
        wset = set(ws)
        rel = {(a, b) for a, b in order}
        for a, b in rel:
            if a not in wset or b not in wset:
                raise ModelError(f"order mentions unknown world in ({a}, {b})")
        if closure == "auto":
            rel = _reflexive_transitive_closure(ws, rel)
        elif closure == "strict":
            _validate_preorder(ws, rel)
        else:
            raise ModelError(f"closure mode must be 'auto' or 'strict', got {closure!r}")
        val = {}
        for atom, extension in valuation.items():
            ext = frozenset(extension)
            bad = ext - wset
            if bad:
                raise ModelError(f"valuation of {atom} mentions unknown worlds {sorted(bad)}")
            val[atom] = ext
        self.worlds: tuple[str, ...] = ws
        self.order: frozenset[tuple[str, str]] = frozenset(rel)
        self.valuation: dict[str, frozenset[str]] = val
        self._succ = {w: frozenset(b for a, b in rel if a == w) for w in ws}
        self._cache: dict[Formula, frozenset[str]] = {}
        self._warned: set[str] = set()
        self._gen: dict[frozenset[str], "PreorderModel"] = {}

    def successors(self, w: str) -> frozenset[str]:
        try:
            return self._succ[w]
        except KeyError:
            raise ModelError(f"unknown world {w!r}") from None

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.order

    def replace(self, **kwargs) -> "PreorderModel":
        params = {
            "worlds": self.worlds,
            "order": self.order,
            "valuation": self.valuation,
            "closure": "strict",
        }
        params.update(kwargs)
        return PreorderModel(**params)

    def _key(self):
        return (
            self.worlds,
            self.order,
            tuple(sorted((a, tuple(sorted(e))) for a, e in self.valuation.items())),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, PreorderModel) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"PreorderModel({len(self.worlds)} worlds, {len(self.order)} edges)"


def _reflexive_transitive_closure(
    worlds: Sequence[str], rel: set[tuple[str, str]]
) -> set[tuple[str, str]]:
    succ = {w: {w} for w in worlds}
    for a, b in rel:
        succ[a].add(b)
    changed = True
    while changed:
        changed = False
        for w in worlds:
            extra = set()
            for v in succ[w]:
                extra |= succ[v]
            if not extra <= succ[w]:
                succ[w] |= extra
                changed = True
    return {(a, b) for a in worlds for b in succ[a]}


def _validate_preorder(worlds: Sequence[str], rel: set[tuple[str, str]]) -> None:
    for w in worlds:
        if (w, w) not in rel:
            raise ModelError(f"order is not reflexive at {w}")
    succ = {w: {b for a, b in rel if a == w} for w in worlds}
    for a, b in rel:
        if not succ[b] <= succ[a]:
            missing = sorted(succ[b] - succ[a])
            raise ModelError(f"order is not transitive: {a} <= {b} <= {missing[0]}")


# ---------------------------------------------------------------------------
# Model checking
# ---------------------------------------------------------------------------

def model_check(model: PreorderModel, f: Formula) -> frozenset[str]:
    """The set of worlds satisfying f under the standard Kripke semantics."""
    cache = model._cache
    hit = cache.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        out = model.valuation.get(f.name)
        if out is None:
            if f.name not in model._warned:
                model._warned.add(f.name)
                log.debug("atom %s has no valuation entry; treating as empty", f.name)
            out = frozenset()
    elif isinstance(f, Bottom):
        out = frozenset()
    elif isinstance(f, Top):
        out = frozenset(model.worlds)
    elif isinstance(f, Not):
        out = frozenset(model.worlds) - model_check(model, f.sub)
    elif isinstance(f, And):
        out = model_check(model, f.left) & model_check(model, f.right)
    elif isinstance(f, Or):
        out = model_check(model, f.left) | model_check(model, f.right)
    elif isinstance(f, Implies):
        out = (frozenset(model.worlds) - model_check(model, f.left)) | model_check(model, f.right)
    elif isinstance(f, Iff):
        a, b = model_check(model, f.left), model_check(model, f.right)
        out = (a & b) | (frozenset(model.worlds) - a - b)
    elif isinstance(f, Box):
        sub = model_check(model, f.sub)
        out = frozenset(w for w in model.worlds if model.successors(w) <= sub)
    elif isinstance(f, Diamond):
        sub = model_check(model, f.sub)
        out = frozenset(w for w in model.worlds if model.successors(w) & sub)
    else:
        raise ModelError(f"unknown formula node {f!r}")
    cache[f] = out
    return out


def satisfies(model: PreorderModel, world: str, f: Formula) -> bool:
    if world not in model._succ:
        raise ModelError(f"unknown world {world!r}")
    return world in model_check(model, f)


# ---------------------------------------------------------------------------
# Clusters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterView:
    """Partition of a model's worlds into clusters with their strict order.

    Clusters are indexed in order of their least world id; ``final[i]`` says
    no cluster lies strictly above cluster i.
    """

    clusters: tuple[frozenset[str], ...]
    leq: frozenset[tuple[int, int]]
    final: tuple[bool, ...]
    cluster_of: Mapping[str, int] = field(hash=False, compare=False, default_factory=dict)

    def strictly_above(self, i: int) -> list[int]:
        return [j for j in range(len(self.clusters)) if (i, j) in self.leq and i != j]

    def index_of(self, worlds: frozenset[str]) -> int:
        for i, c in enumerate(self.clusters):
            if c == worlds:
                return i
        raise ModelError(f"no cluster equals {sorted(worlds)}")


def clusters(model: PreorderModel) -> ClusterView:
    groups: dict[str, set[str]] = {}
    for w in model.worlds:
        rep = min(v for v in model.worlds if model.leq(w, v) and model.leq(v, w))
        groups.setdefault(rep, set()).add(w)
    ordered = [frozenset(groups[rep]) for rep in sorted(groups)]
    leq = set()
    for i, ci in enumerate(ordered):
        for j, cj in enumerate(ordered):
            if model.leq(min(ci), min(cj)):
                leq.add((i, j))
    final = tuple(
        not any((i, j) in leq and i != j for j in range(len(ordered)))
        for i in range(len(ordered))
    )
    cluster_of = {w: i for i, c in enumerate(ordered) for w in c}
    return ClusterView(tuple(ordered), frozenset(leq), final, cluster_of)


def cluster_sizes(model: PreorderModel) -> tuple[list[int], list[int]]:
    """(final cluster sizes, non-final cluster sizes)."""
    view = clusters(model)
    finals = [len(c) for c, fin in zip(view.clusters, view.final) if fin]
    nonfinals = [len(c) for c, fin in zip(view.clusters, view.final) if not fin]
    return finals, nonfinals


# ---------------------------------------------------------------------------
# Generated submodels and confluence
# ---------------------------------------------------------------------------

def generated_submodel(model: PreorderModel, world: str) -> PreorderModel:
    """Restriction of the model to the worlds reachable from ``world``."""
    keep = model.successors(world)
    cached = model._gen.get(keep)
    if cached is not None:
        return cached
    sub = PreorderModel(
        keep,
        {(a, b) for a, b in model.order if a in keep and b in keep},
        {atom: ext & keep for atom, ext in model.valuation.items()},
    )
    model._gen[keep] = sub
    return sub


def is_confluent(model: PreorderModel) -> bool:
    """True iff any two successors of a common world share a successor."""
    for w in model.worlds:
        succ = sorted(model.successors(w))
        for a, b in itertools.combinations(succ, 2):
            if not model.successors(a) & model.successors(b):
                return False
    return True


# ---------------------------------------------------------------------------
# p-morphisms
# ---------------------------------------------------------------------------

_SHAPE_CACHE: dict[tuple[int, frozenset], tuple[int, frozenset]] = {}


def _frame_shape(frame) -> tuple[int, frozenset[tuple[int, int]]]:
    """Accepts any object with integer ``size`` and relation ``rel``."""
    size = int(frame.size)
    rel = frozenset((int(a), int(b)) for a, b in frame.rel)
    if (size, rel) in _SHAPE_CACHE:
        return _SHAPE_CACHE[(size, rel)]
    if size <= 0:
        raise ModelError("target frame must be nonempty")
    for a, b in rel:
        if not (0 <= a < size and 0 <= b < size):
            raise ModelError(f"target relation pair ({a},{b}) out of range")
    for i in range(size):
        if (i, i) not in rel:
            raise ModelError(f"target frame not reflexive at {i}")
    for a, b in rel:
        for c in range(size):
            if (b, c) in rel and (a, c) not in rel:
                raise ModelError("target frame not transitive")
    for i in range(size):
        if (0, i) not in rel:
            raise ModelError("target frame is not rooted at 0")
    _SHAPE_CACHE[(size, rel)] = (size, rel)
    return size, rel


@dataclass(frozen=True)
class PMorphism:
    """A surjective monotone map with the back condition, from a generated
    submodel onto a finite rooted preorder."""

    source: PreorderModel
    target_size: int
    target_rel: frozenset[tuple[int, int]]
    mapping: Mapping[str, int] = field(hash=False, compare=False, default_factory=dict)

    def validate(self) -> None:
        m = self.mapping
        if set(m) != set(self.source.worlds):
            raise ModelError("p-morphism is not total on the source")
        if set(m.values()) != set(range(self.target_size)):
            raise ModelError("p-morphism is not surjective")
        for a, b in self.source.order:
            if (m[a], m[b]) not in self.target_rel:
                raise ModelError(f"p-morphism not monotone at ({a},{b})")
        for w in self.source.worlds:
            for j in range(self.target_size):
                if (m[w], j) in self.target_rel:
                    if not any(m[v] == j for v in self.source.successors(w)):
                        raise ModelError(f"back condition fails at {w} for {j}")


def _is_p_morphism(sub: PreorderModel, size: int, rel, mapping: dict[str, int]) -> bool:
    if set(mapping.values()) != set(range(size)):
        return False
    for a, b in sub.order:
        if (mapping[a], mapping[b]) not in rel:
            return False
    for w in sub.worlds:
        fw = mapping[w]
        images = {mapping[v] for v in sub.successors(w)}
        for j in range(size):
            if (fw, j) in rel and j not in images:
                return False
    return True


def find_p_morphism(
    model: PreorderModel,
    world: str,
    frame,
    preimage_spec: Optional[Sequence[Formula]] = None,
) -> Optional[PMorphism]:
    """Search for a p-morphism from the submodel generated by ``world``.

    With ``preimage_spec`` = [f0..f_{n-1}] there is at most one candidate:
    y maps to the unique i with y in [[fi]]; the candidate is returned iff
    the preimage sets partition the submodel and the map is a p-morphism.
    Without a spec, all maps are tried in canonical order.
    """
    size, rel = _frame_shape(frame)
    sub = generated_submodel(model, world)
    if preimage_spec is not None:
        if len(preimage_spec) != size:
            raise ModelError(
                f"preimage spec has {len(preimage_spec)} formulas for {size} points"
            )
        extensions = [model_check(sub, f) for f in preimage_spec]
        mapping: dict[str, int] = {}
        for w in sub.worlds:
            hits = [i for i, ext in enumerate(extensions) if w in ext]
            if len(hits) != 1:
                return None
            mapping[w] = hits[0]
        if _is_p_morphism(sub, size, rel, mapping):
            return PMorphism(sub, size, rel, mapping)
        return None
    for values in itertools.product(range(size), repeat=len(sub.worlds)):
        mapping = dict(zip(sub.worlds, values))
        if _is_p_morphism(sub, size, rel, mapping):
            return PMorphism(sub, size, rel, mapping)
    return None


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

def model_to_dict(model: PreorderModel) -> dict:
    return {
        "worlds": list(model.worlds),
        "order": sorted([a, b] for a, b in model.order),
        "valuation": {a: sorted(ext) for a, ext in sorted(model.valuation.items())},
        "closure": "strict",
    }


def model_from_dict(data: Mapping) -> PreorderModel:
    try:
        worlds = data["worlds"]
        order = [tuple(pair) for pair in data["order"]]
        valuation = data.get("valuation", {})
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model object: {exc}") from exc
    closure = data.get("closure", "strict")
    return PreorderModel(worlds, order, valuation, closure=closure)


def load_model(path: str) -> PreorderModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))


def dump_model(model: PreorderModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_dict(model), handle, indent=2, sort_keys=True)
        handle.write("\n")


def describe_world(model: PreorderModel, world: str) -> str:
    trues = sorted(a for a, ext in model.valuation.items() if world in ext)
    return f"{world}: {{{', '.join(trues)}}}"
