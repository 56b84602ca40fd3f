"""Structural decomposition of tree CPTs and join-tree size reporting.

A node whose CPT-tree branches asymmetrically can be split: each subtree
under the root test becomes its own *conditional node* carrying only the
parents that subtree actually mentions, and the original node becomes a
deterministic *multiplexer* that copies the conditional node selected by
the root-test variable's value.  The transformed network defines the same
joint distribution over the original variables once the auxiliary nodes
are summed out, but its families are smaller, which shrinks the cliques a
join-tree method would have to build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    CptTable,
    CptTree,
    Distribution,
    Leaf,
    Network,
    Node,
    NodeSpec,
    Variable,
    as_tree,
    parent_assignments,
    tree_size,
    tree_tested_vars,
)
from . import graphs


def is_full_tree(tree: CptTree) -> bool:
    """True when every root-to-leaf path tests the same variables in the
    same order: the tree is an exhaustive table in disguise (a bare leaf
    counts, as the table over zero parents)."""
    return _test_signature(tree) is not None


def _test_signature(tree: CptTree) -> tuple[str, ...] | None:
    if isinstance(tree, Leaf):
        return ()
    sigs = {_test_signature(sub) for _, sub in tree.branches}
    if len(sigs) != 1 or None in sigs:
        return None
    (child_sig,) = sigs
    return (tree.test,) + child_sig


@dataclass(frozen=True)
class DecompositionReport:
    """Accounting for one decomposition step.

    ``table_entries_before`` is the row count of the equivalent flat table
    (the product of parent arities); ``tree_entries_before`` counts the
    tree's leaves.  ``entries_after`` sums the conditional nodes' leaves
    plus the multiplexer's rows.
    """

    node: str
    table_entries_before: int
    tree_entries_before: int
    conditional_nodes: tuple[tuple[str, tuple[str, ...], int], ...]
    multiplexer: tuple[str, int]
    entries_after: int


def _conditional_name(base: str, test: str, value: str) -> str:
    sep = "," if "@" in base else "@"
    return f"{base}{sep}{test}={value}"


def decompose_node(net: Network, x: str) -> Network:
    new_net, _ = _decompose_node(net, x)
    return new_net


def _decompose_node(net: Network, x: str) -> tuple[Network, DecompositionReport]:
    spec = net.node(x)
    tree = as_tree(net, x)
    if not isinstance(tree, Node):
        raise ValueError(f"node {x!r} has no root test to split on")

    x_var = net.variable(x)
    selector = tree.test
    table_before = 1
    for p in spec.parents:
        table_before *= len(net.values(p))

    conditional_specs: list[NodeSpec] = []
    conditional_vars: list[Variable] = []
    cond_summary: list[tuple[str, tuple[str, ...], int]] = []
    for value, subtree in tree.branches:
        name = _conditional_name(x, selector, value)
        if name in net.var_names:
            raise ValueError(f"decomposition name collision: {name!r} already declared")
        occurring = tree_tested_vars(subtree)
        parents = tuple(p for p in spec.parents if p in occurring)
        conditional_vars.append(Variable(name, x_var.values))
        conditional_specs.append(NodeSpec(name, parents, subtree))
        cond_summary.append((name, parents, tree_size(subtree)))

    # The multiplexer copies the conditional node picked by the selector.
    mux_parents = (selector,) + tuple(v.name for v in conditional_vars)
    mux_parent_vars = [net.variable(selector)] + conditional_vars
    rows = []
    selector_values = net.values(selector)
    for assignment in parent_assignments(mux_parent_vars):
        chosen = conditional_vars[selector_values.index(assignment[selector])].name
        picked = assignment[chosen]
        rows.append(
            Distribution(tuple(1.0 if v == picked else 0.0 for v in x_var.values))
        )
    mux_spec = NodeSpec(x, mux_parents, CptTable(tuple(rows)), deterministic=True)

    variables = list(net.variables)
    insert_at = [v.name for v in variables].index(x)
    variables[insert_at:insert_at] = conditional_vars
    nodes = []
    for old in net.nodes:
        if old.var == x:
            nodes.extend(conditional_specs)
            nodes.append(mux_spec)
        else:
            nodes.append(old)
    report = DecompositionReport(
        node=x,
        table_entries_before=table_before,
        tree_entries_before=tree_size(tree),
        conditional_nodes=tuple(cond_summary),
        multiplexer=(x, len(rows)),
        entries_after=sum(s for _, _, s in cond_summary) + len(rows),
    )
    return Network(variables, nodes), report


def decompose_network(net: Network) -> tuple[Network, list[DecompositionReport]]:
    """Split every asymmetric tree CPT until only full trees remain.

    Original nodes are visited in topological order; conditional nodes
    introduced along the way are split recursively, depth first.
    Multiplexers (and tabular CPTs generally) are left alone.  Running the
    transform on its own output is the identity.
    """
    reports: list[DecompositionReport] = []
    current = net
    agenda = [v for v in net.topological_order() if v in {s.var for s in net.nodes}]
    while agenda:
        name = agenda.pop(0)
        spec = current.node(name)
        if isinstance(spec.cpt, CptTable) or spec.deterministic:
            continue
        if is_full_tree(spec.cpt):
            continue
        current, report = _decompose_node(current, name)
        reports.append(report)
        agenda[0:0] = [cname for cname, _, _ in report.conditional_nodes]
    return current, reports


# -- join-tree size metrics --------------------------------------------------


@dataclass(frozen=True)
class CliqueReport:
    """Clique structure of the moralized, min-fill-triangulated network.

    ``max_clique_weight`` is max over cliques of the summed log2 arities
    (the log-size of the largest clique table); ``total_table_weight`` sums
    every clique's state count.
    """

    elimination_order: tuple[str, ...]
    cliques: tuple[frozenset[str], ...]
    max_clique_weight: float
    total_table_weight: float


def moral_adjacency(net: Network) -> dict[str, set[str]]:
    adj = net.skeleton()
    for spec in net.nodes:
        ps = sorted(spec.parents)
        for i, a in enumerate(ps):
            for b in ps[i + 1 :]:
                adj[a].add(b)
                adj[b].add(a)
    return adj


def clique_report(net: Network) -> CliqueReport:
    adj = moral_adjacency(net)
    order = graphs.min_fill_order(adj)
    cliques = graphs.elimination_cliques(adj, order)
    weights = [
        sum(math.log2(len(net.values(v))) for v in clique) for clique in cliques
    ]
    sizes = []
    for clique in cliques:
        size = 1
        for v in clique:
            size *= len(net.values(v))
        sizes.append(float(size))
    return CliqueReport(
        elimination_order=tuple(order),
        cliques=tuple(cliques),
        max_clique_weight=max(weights) if weights else 0.0,
        total_table_weight=float(sum(sizes)),
    )
