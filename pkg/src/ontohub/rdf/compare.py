"""Graph comparison: ground equality with blank-node isomorphism, canonical labels."""

from __future__ import annotations

import hashlib
from collections import Counter, defaultdict

from .model import BNode, Graph, Term, Triple

# Leaves explored by the canonical labelling search before it settles for the
# best candidate found so far. Only highly symmetric blank structures hit it.
CANONICAL_SEARCH_BUDGET = 256


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def _split(g: Graph) -> tuple[set[Triple], list[Triple]]:
    ground, blank = set(), []
    for t in g.triples:
        if t.has_blank():
            blank.append(t)
        else:
            ground.add(t)
    return ground, blank


def _incidence(triples: list[Triple]) -> dict[BNode, list[tuple[str, str, Term]]]:
    incident: dict[BNode, list[tuple[str, str, Term]]] = defaultdict(list)
    for t in triples:
        if isinstance(t.subject, BNode):
            incident[t.subject].append(("out", t.predicate.value, t.object))
        if isinstance(t.object, BNode):
            incident[t.object].append(("in", t.predicate.value, t.subject))
    return incident


def _refine(incident: dict, colors: dict[BNode, str]) -> dict[BNode, str]:
    """Colour refinement until the partition stops splitting."""

    def other_color(term: Term) -> str:
        return "B" + colors[term] if isinstance(term, BNode) else "T" + term.n3()

    classes = len(set(colors.values()))
    while True:
        new = {}
        for node, edges in incident.items():
            sig = sorted(f"{d}|{p}|{other_color(o)}" for d, p, o in edges)
            new[node] = _digest(colors[node], *sig)
        new_classes = len(set(new.values()))
        colors = new
        if new_classes == classes:
            return colors
        classes = new_classes


def _initial_colors(incident: dict) -> dict[BNode, str]:
    return {node: _digest("blank") for node in incident}


def graph_equal_ground(a: Graph, b: Graph) -> bool:
    """Equal ground triples and isomorphic blank-node triples.

    Blank-node isomorphism is decided by backtracking over label bijections,
    pruned by colour refinement.
    """
    ground_a, blank_a = _split(a)
    ground_b, blank_b = _split(b)
    if ground_a != ground_b or len(blank_a) != len(blank_b):
        return False
    if not blank_a:
        return True
    inc_a, inc_b = _incidence(blank_a), _incidence(blank_b)
    if len(inc_a) != len(inc_b):
        return False
    colors_a = _refine(inc_a, _initial_colors(inc_a))
    colors_b = _refine(inc_b, _initial_colors(inc_b))
    if Counter(colors_a.values()) != Counter(colors_b.values()):
        return False
    return _find_bijection(blank_a, set(blank_b), inc_a, colors_a, colors_b) is not None


def _map_term(term: Term, mapping: dict[BNode, BNode]) -> Term:
    return mapping.get(term, term) if isinstance(term, BNode) else term


def _find_bijection(
    blank_a: list[Triple],
    target: set[Triple],
    inc_a: dict,
    colors_a: dict[BNode, str],
    colors_b: dict[BNode, str],
) -> dict[BNode, BNode] | None:
    by_color_b: dict[str, list[BNode]] = defaultdict(list)
    for node, color in colors_b.items():
        by_color_b[color].append(node)
    class_size = Counter(colors_a.values())
    order = sorted(inc_a, key=lambda n: (class_size[colors_a[n]], colors_a[n], n.label))
    position = {node: i for i, node in enumerate(order)}

    # Triples become checkable once every blank node in them is assigned.
    checks: dict[BNode, list[Triple]] = defaultdict(list)
    for t in blank_a:
        nodes = [x for x in (t.subject, t.object) if isinstance(x, BNode)]
        last = max(nodes, key=position.__getitem__)
        checks[last].append(t)

    mapping: dict[BNode, BNode] = {}
    used: set[BNode] = set()

    def consistent(node: BNode) -> bool:
        for t in checks[node]:
            mapped = Triple(_map_term(t.subject, mapping), t.predicate, _map_term(t.object, mapping))
            if mapped not in target:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        node = order[i]
        for candidate in by_color_b[colors_a[node]]:
            if candidate in used:
                continue
            mapping[node] = candidate
            used.add(candidate)
            if consistent(node) and search(i + 1):
                return True
            del mapping[node]
            used.discard(candidate)
        return False

    return dict(mapping) if search(0) else None


def canonical_blank_labels(g: Graph) -> Graph:
    """Relabel blank nodes deterministically (``c0``, ``c1``, ...).

    Labels come from colour refinement; remaining ties are broken by trying
    each candidate in the first tied class and keeping the relabelling whose
    sorted N-Triples form is smallest.
    """
    ground, blank = _split(g)
    if not blank:
        return g
    incident = _incidence(blank)
    colors = _refine(incident, _initial_colors(incident))
    best: list = [None, None]  # (serialization, mapping)
    leaves = [0]

    def relabel(final: dict[BNode, str]) -> dict[BNode, BNode]:
        ranked = sorted(final, key=lambda n: final[n])
        return {node: BNode(f"c{i}") for i, node in enumerate(ranked)}

    def explore(current: dict[BNode, str]) -> None:
        sizes = Counter(current.values())
        tied = [c for c, n in sizes.items() if n > 1]
        if not tied:
            leaves[0] += 1
            mapping = relabel(current)
            text = "\n".join(
                sorted(
                    Triple(_map_term(t.subject, mapping), t.predicate, _map_term(t.object, mapping)).n3()
                    for t in blank
                )
            )
            if best[0] is None or text < best[0]:
                best[0], best[1] = text, mapping
            return
        target_color = min(tied, key=lambda c: (sizes[c], c))
        members = sorted((n for n, c in current.items() if c == target_color), key=lambda n: n.label)
        for node in members:
            if best[0] is not None and leaves[0] >= CANONICAL_SEARCH_BUDGET:
                return
            individualized = dict(current)
            individualized[node] = _digest(current[node], "individualized")
            explore(_refine(incident, individualized))

    explore(colors)
    mapping = best[1]
    relabeled = {Triple(_map_term(t.subject, mapping), t.predicate, _map_term(t.object, mapping)) for t in blank}
    return Graph(frozenset(ground) | relabeled, g.prefixes)
