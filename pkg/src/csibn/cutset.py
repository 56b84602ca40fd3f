"""Conditional cutsets: value-specific conditioning sets for loopy networks.

A flat loop cutset instantiates the same variables on every branch.  A
conditional cutset is a tree: which variable gets instantiated next may
depend on the values chosen so far, because instantiating a variable can
render whole arcs vacuous and break loops early.  Branches therefore vary
in length, and the total number of network evaluations -- one per
root-to-leaf value combination -- can undercut the flat cutset's product
of domain sizes.

Variables are picked greedily by ``weight / arc_deletion_score``: cheap to
enumerate, effective at deleting arcs.  Ties break lexicographically so a
given network always yields the same cutset tree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import graphs
from .csi import reduce_network, reduce_tree
from .model import Context, Leaf, Network, Variable, as_tree, tree_size


class EmptyLeaf:
    """Terminal of a cutset tree: the remaining network is singly connected."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"


EMPTY = EmptyLeaf()


@dataclass(frozen=True)
class CutsetNode:
    """Instantiate ``test`` next; one arc per group of equivalent values.

    Each arc carries the subset of values it covers (a tuple, in declared
    value order) and the subtree to apply under any of them.  Arcs
    partition the tested variable's domain.
    """

    test: str
    arcs: tuple[tuple[tuple[str, ...], "CutsetTree"], ...]


CutsetTree = EmptyLeaf | CutsetNode


def cutset_variables(tree: CutsetTree) -> set[str]:
    if isinstance(tree, EmptyLeaf):
        return set()
    out = {tree.test}
    for _, child in tree.arcs:
        out |= cutset_variables(child)
    return out


def branch_contexts(tree: CutsetTree) -> list[Context]:
    """Every root-to-leaf value combination, in canonical depth-first order.

    Arcs are visited in declared order and each value of a grouped arc
    produces its own context: grouping shares subtree *structure*, not
    evaluations.
    """
    if isinstance(tree, EmptyLeaf):
        return [Context()]
    out: list[Context] = []
    for values, child in tree.arcs:
        subs = branch_contexts(child)
        for value in values:
            for sub in subs:
                out.append(sub.union({tree.test: value}))
    return out


def weight(var: Variable) -> float:
    """Cost of conditioning on ``var``: log2 of its domain size."""
    return math.log2(len(var.values))


def expected_parents(net: Network, v: str, x: str, value: str) -> float:
    """How many of ``v``'s parents stay relevant once ``x`` is bound to
    ``value``, estimated from the reduced CPT's leaf count.

    With ``t`` leaves left and parents A besides ``x``, each contributes
    ``log_{|val(A)|} t`` expected relevance; the average over those parents
    is the estimate.  A node whose only parent is ``x`` scores 0.
    """
    parents = net.parents(v)
    if x not in parents:
        raise ValueError(f"{x!r} is not a parent of {v!r}")
    net.variable(x).index(value)
    others = [p for p in parents if p != x]
    if not others:
        return 0.0
    t = tree_size(reduce_tree(as_tree(net, v), {x: value}))
    return sum(math.log(t, len(net.values(a))) for a in others) / len(others)


def arc_deletion_score(net: Network, x: str, children=None) -> float:
    """Expected number of arcs deleted by instantiating ``x``, averaged
    over its values.  ``children`` restricts which child nodes count
    (default: all of them)."""
    if children is None:
        children = net.children(x)
    var = net.variable(x)
    total = 0.0
    for v in children:
        for value in var.values:
            total += len(net.parents(v)) - expected_parents(net, v, x, value)
    return total / len(var.values)


@dataclass(frozen=True)
class HeuristicScore:
    variable: str
    weight: float
    arc_deletion: float
    ratio: float  # weight / arc_deletion, inf when nothing would be deleted


def rank_variables(net: Network) -> tuple[HeuristicScore, ...]:
    """Greedy-selection scores for every variable that has children."""
    out = []
    for name in sorted(net.var_names):
        if not net.children(name):
            continue
        w = weight(net.variable(name))
        d = arc_deletion_score(net, name)
        out.append(HeuristicScore(name, w, d, w / d if d > 0 else math.inf))
    return tuple(out)


def best_cut_variable(net: Network) -> str:
    """The variable the greedy heuristic would instantiate first."""
    ranked = rank_variables(net)
    if not ranked:
        raise ValueError("network has no variable with children")
    return min(ranked, key=lambda s: (s.ratio, s.variable)).variable


# -- building ----------------------------------------------------------------


def _tree_shape(tree) -> object:
    if isinstance(tree, Leaf):
        return "leaf"
    return (tree.test, tuple((v, _tree_shape(sub)) for v, sub in tree.branches))


def _network_signature(net: Network) -> object:
    """Structure of a network, blind to leaf probabilities.

    Two instantiation values whose reduced networks share a signature
    break the same loops the same way, so one subtree serves both.
    """
    shapes = tuple(
        (spec.var, spec.parents, _tree_shape(as_tree(net, spec.var)))
        for spec in sorted(net.nodes, key=lambda s: s.var)
    )
    return (frozenset(net.edges()), shapes)


def build_conditional_cutset(net: Network) -> CutsetTree:
    """Greedy conditional cutset for ``net``, built blind to any evidence.

    Stops as soon as the residual skeleton's 2-core is empty (the network
    left after dropping instantiated variables' outgoing arcs is then
    singly connected on every branch).  Candidates are 2-core variables
    with at least one child still in the core; the deletion score counts
    only arcs into fellow candidates, which keeps pure sinks from inflating
    a variable's apparent usefulness.
    """
    return _build(net, frozenset())


def _candidate_score(net: Network, v: str, pool: set[str]) -> float:
    kids = [c for c in net.children(v) if c in pool]
    return arc_deletion_score(net, v, children=kids)


def _build(current: Network, instantiated: frozenset) -> CutsetTree:
    core = graphs.two_core(current.skeleton())
    if not core:
        return EMPTY
    candidates = sorted(
        v
        for v in core
        if v not in instantiated and any(c in core for c in current.children(v))
    )
    if not candidates:
        raise RuntimeError("cyclic residual with no cuttable variable")

    cand_set = set(candidates)
    scored = [(v, _candidate_score(current, v, cand_set)) for v in candidates]
    if all(d <= 0 for _, d in scored):
        # every candidate's candidate-directed score degenerated to zero
        # (colliders only); count arcs into the whole core instead
        scored = [(v, _candidate_score(current, v, core)) for v in candidates]
    pick = min(
        scored,
        key=lambda vd: (
            weight(current.variable(vd[0])) / vd[1] if vd[1] > 0 else math.inf,
            vd[0],
        ),
    )[0]

    groups: list[tuple[list[str], object, Network]] = []
    for value in current.values(pick):
        reduced = reduce_network(current, {pick: value})
        sig = _network_signature(reduced)
        for values, seen_sig, _ in groups:
            if seen_sig == sig:
                values.append(value)
                break
        else:
            groups.append(([value], sig, reduced))

    arcs = tuple(
        (tuple(values), _build(rep, instantiated | {pick}))
        for values, _, rep in groups
    )
    return CutsetNode(pick, arcs)


def flat_cutset(net: Network, names) -> CutsetTree:
    """A conventional cutset over ``names``: every value its own branch,
    same variables on every path.  Exists for comparison."""
    names = list(names)
    for n in names:
        net.variable(n)
    if len(set(names)) != len(names):
        raise ValueError("duplicate cutset variable")
    tree: CutsetTree = EMPTY
    for name in reversed(names):
        tree = CutsetNode(
            name, tuple(((v,), tree) for v in net.values(name))
        )
    return tree


# -- residual stripping ------------------------------------------------------


def strip_singly_connected(net: Network) -> Network:
    """Remove the parts of the network no cutset needs to worry about.

    Repeatedly deletes childless nodes whose parents are pairwise adjacent
    in the current skeleton (their marginal contribution is 1) and absorbs
    parentless single-child nodes into that child by summing them out.
    What survives carries every loop of the original skeleton.
    """
    current = net
    while True:
        removed = _strip_step(current)
        if removed is None:
            return current
        current = removed


def _strip_step(net: Network) -> Network | None:
    skeleton = net.skeleton()
    for name in sorted(net.var_names):
        if not net.children(name):
            parents = net.parents(name)
            if all(
                q in skeleton[p]
                for i, p in enumerate(parents)
                for q in parents[i + 1 :]
            ):
                return _drop_node(net, name)
    for name in sorted(net.var_names):
        if not net.parents(name) and len(net.children(name)) == 1:
            return _absorb_root(net, name)
    return None


def _drop_node(net: Network, name: str) -> Network:
    variables = tuple(v for v in net.variables if v.name != name)
    nodes = tuple(s for s in net.nodes if s.var != name)
    return Network(variables, nodes)


def _absorb_root(net: Network, name: str) -> Network:
    """Sum a parentless node out of its only child's CPT."""
    from .model import CptTable, Distribution, NodeSpec, parent_assignments

    child = net.children(name)[0]
    spec = net.node(child)
    prior = as_tree(net, name)
    assert isinstance(prior, Leaf)
    root_var = net.variable(name)
    child_tree = as_tree(net, child)
    rest = tuple(p for p in spec.parents if p != name)
    rest_vars = [net.variable(p) for p in rest]
    n_vals = len(net.values(child))
    rows = []
    for assignment in parent_assignments(rest_vars):
        mixed = [0.0] * n_vals
        for ri, rv in enumerate(root_var.values):
            probs = reduce_tree(
                child_tree, {**assignment, name: rv}
            )
            assert isinstance(probs, Leaf)
            for k in range(n_vals):
                mixed[k] += prior.dist.probs[ri] * probs.dist.probs[k]
        rows.append(Distribution(tuple(mixed)))
    new_child = NodeSpec(child, rest, CptTable(tuple(rows)))
    variables = tuple(v for v in net.variables if v.name != name)
    nodes = tuple(
        new_child if s.var == child else s for s in net.nodes if s.var != name
    )
    return Network(variables, nodes)


# -- rendering ---------------------------------------------------------------


def format_cutset_tree(tree: CutsetTree, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(tree, EmptyLeaf):
        return f"{pad}(singly connected)\n"
    out = [f"{pad}{tree.test}\n"]
    for values, child in tree.arcs:
        out.append(f"{pad}  ={{{','.join(values)}}}:\n")
        out.append(format_cutset_tree(child, indent + 2))
    return "".join(out)


def cutset_tree_to_obj(tree: CutsetTree):
    if isinstance(tree, EmptyLeaf):
        return None
    return {
        "test": tree.test,
        "arcs": [
            {"values": list(values), "child": cutset_tree_to_obj(child)}
            for values, child in tree.arcs
        ],
    }


def cutset_tree_to_json(tree: CutsetTree) -> str:
    return json.dumps(cutset_tree_to_obj(tree), indent=2) + "\n"
