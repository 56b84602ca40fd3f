"""Core model: discrete variables, tabular and tree-structured CPTs, JSON I/O.

A network file is a single JSON document::

    {
      "variables": [{"name": "A", "values": ["t", "f"]}, ...],
      "nodes": [
        {"var": "X",
         "parents": ["A", "B"],
         "deterministic": false,
         "cpt": {"kind": "tree", "root": <tree-node>}},
        ...
      ]
    }

where ``<tree-node>`` is either an interior test
``{"test": "A", "branches": {"t": <tree-node>, "f": <tree-node>}}``
or a leaf distribution ``{"leaf": [0.9, 0.1]}``.  A tabular CPT is
``{"kind": "table", "rows": [[...], ...]}`` whose rows run in row-major
order of the declared parent order (first parent varies slowest) and of
each parent's declared value order.  Leaf and row vectors align with the
node variable's declared value order.

All model objects are immutable after construction; operations return new
objects and never mutate their inputs, so values can be shared freely
across threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

NORMALIZATION_TOL = 1e-9


class NetworkFormatError(ValueError):
    """Raised when network JSON cannot be read at all (syntax level)."""


class NetworkSemanticsError(ValueError):
    """Raised when network JSON parses but violates a model invariant."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered, duplicate-free value list."""

    name: str
    values: tuple[str, ...]

    def index(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise ValueError(f"{value!r} is not a value of variable {self.name!r}") from None


class Context(Mapping[str, str]):
    """An immutable partial assignment of values to variables.

    Used both for contexts in independence queries and for evidence.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        object.__setattr__(self, "_bindings", dict(bindings))

    def __getitem__(self, var: str) -> str:
        return self._bindings[var]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}={x}" for v, x in sorted(self._bindings.items()))
        return f"Context({inner})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Mapping):
            return dict(self._bindings) == dict(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def union(self, other: Mapping[str, str]) -> "Context":
        """Combined context; rebinding a variable to a different value is an error."""
        merged = dict(self._bindings)
        for var, val in other.items():
            if var in merged and merged[var] != val:
                raise ValueError(f"variable {var!r} bound twice ({merged[var]!r} vs {val!r})")
            merged[var] = val
        return Context(merged)

    def restrict(self, variables: Iterable[str]) -> "Context":
        keep = set(variables)
        return Context({v: x for v, x in self._bindings.items() if v in keep})

    def consistent_with(self, assignment: Mapping[str, str]) -> bool:
        return all(assignment.get(v, x) == x for v, x in self._bindings.items())


@dataclass(frozen=True)
class Distribution:
    """A probability vector aligned with a variable's declared value order."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return all(p >= 0.0 for p in self.probs) and abs(sum(self.probs) - 1.0) <= tol


@dataclass(frozen=True)
class Leaf:
    dist: Distribution


@dataclass(frozen=True)
class Node:
    """Interior node of a CPT-tree: tests one parent, one branch per value.

    Branches are stored as ``(value, subtree)`` pairs in the test variable's
    declared value order.
    """

    test: str
    branches: tuple[tuple[str, "CptTree"], ...]

    def branch(self, value: str) -> "CptTree":
        for val, sub in self.branches:
            if val == value:
                return sub
        raise KeyError(f"node testing {self.test!r} has no branch for {value!r}")


CptTree = Leaf | Node


@dataclass(frozen=True)
class CptTable:
    """Flat CPT: one row per full parent assignment, row-major in parent order."""

    rows: tuple[Distribution, ...]


Cpt = CptTree | CptTable


@dataclass(frozen=True)
class NodeSpec:
    """CPT attachment for one variable: parents plus the distribution object."""

    var: str
    parents: tuple[str, ...]
    cpt: Cpt
    deterministic: bool = False


class Network:
    """A directed network over discrete variables with one CPT per variable.

    Construction performs no validation beyond name indexing; use
    :func:`validate` to obtain the list of invariant violations.
    """

    def __init__(self, variables: Sequence[Variable], nodes: Sequence[NodeSpec]):
        self._variables: tuple[Variable, ...] = tuple(variables)
        self._by_name: dict[str, Variable] = {v.name: v for v in self._variables}
        self._nodes: dict[str, NodeSpec] = {n.var: n for n in nodes}
        children: dict[str, list[str]] = {v.name: [] for v in self._variables}
        for spec in nodes:
            for p in spec.parents:
                if p in children:
                    children[p].append(spec.var)
        self._children: dict[str, tuple[str, ...]] = {
            v: tuple(cs) for v, cs in children.items()
        }

    # -- structure accessors -------------------------------------------------

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._variables

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables)

    @property
    def nodes(self) -> tuple[NodeSpec, ...]:
        return tuple(self._nodes[v.name] for v in self._variables if v.name in self._nodes)

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def values(self, name: str) -> tuple[str, ...]:
        return self.variable(name).values

    def node(self, name: str) -> NodeSpec:
        try:
            return self._nodes[name]
        except KeyError:
            raise KeyError(f"no node for variable {name!r}") from None

    def parents(self, name: str) -> tuple[str, ...]:
        return self.node(name).parents

    def children(self, name: str) -> tuple[str, ...]:
        self.variable(name)
        return self._children.get(name, ())

    def cpt(self, name: str) -> Cpt:
        return self.node(name).cpt

    def edges(self) -> list[tuple[str, str]]:
        return [(p, n.var) for n in self.nodes for p in n.parents]

    def skeleton(self) -> dict[str, set[str]]:
        """Undirected adjacency of the parent relation."""
        adj: dict[str, set[str]] = {v.name: set() for v in self._variables}
        for p, c in self.edges():
            if p in adj and c in adj:
                adj[p].add(c)
                adj[c].add(p)
        return adj

    def topological_order(self) -> list[str]:
        """Parent-before-child order, stable w.r.t. declared variable order."""
        indeg = {v.name: 0 for v in self._variables}
        for _, c in self.edges():
            if c in indeg:
                indeg[c] += 1
        order: list[str] = []
        ready = [v for v in self.var_names if indeg[v] == 0]
        while ready:
            cur = ready.pop(0)
            order.append(cur)
            for child in self.children(cur):
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
        ready_set = set(order)
        ready.extend(v for v in self.var_names if v not in ready_set)
        if len(order) != len(self._variables):
            raise ValueError("parent relation contains a cycle")
        return order

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except ValueError:
            return False
        return True

    def with_nodes(self, replacements: Mapping[str, NodeSpec]) -> "Network":
        new_nodes = [replacements.get(n.var, n) for n in self.nodes]
        return Network(self._variables, new_nodes)

    def check_context(self, ctx: Mapping[str, str]) -> None:
        """Raise unless every binding names a known variable and value."""
        for var, val in ctx.items():
            self.variable(var).index(val)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._variables == other._variables and self._nodes == other._nodes

    def __repr__(self) -> str:
        return f"Network({len(self._variables)} variables, {len(self.edges())} edges)"


# -- tree operations ---------------------------------------------------------


def tree_size(cpt: Cpt) -> int:
    """Number of entries: leaves of a tree, rows of a table."""
    if isinstance(cpt, CptTable):
        return len(cpt.rows)
    if isinstance(cpt, Leaf):
        return 1
    return sum(tree_size(sub) for _, sub in cpt.branches)


def tree_leaves(tree: CptTree) -> Iterator[Leaf]:
    if isinstance(tree, Leaf):
        yield tree
    else:
        for _, sub in tree.branches:
            yield from tree_leaves(sub)


def tree_tested_vars(tree: CptTree) -> set[str]:
    """Variables labelling at least one interior node."""
    if isinstance(tree, Leaf):
        return set()
    out = {tree.test}
    for _, sub in tree.branches:
        out |= tree_tested_vars(sub)
    return out


def tree_lookup(tree: CptTree, assignment: Mapping[str, str]) -> Distribution:
    """Walk the tree under ``assignment``; every tested variable must be bound."""
    while isinstance(tree, Node):
        if tree.test not in assignment:
            raise KeyError(f"assignment does not bind tested variable {tree.test!r}")
        tree = tree.branch(assignment[tree.test])
    return tree.dist


def parent_assignments(parent_vars: Sequence[Variable]) -> Iterator[dict[str, str]]:
    """Full assignments to ``parent_vars`` in row-major order."""
    names = [v.name for v in parent_vars]
    for combo in itertools.product(*(v.values for v in parent_vars)):
        yield dict(zip(names, combo))


def row_index(parent_vars: Sequence[Variable], assignment: Mapping[str, str]) -> int:
    idx = 0
    for var in parent_vars:
        idx = idx * len(var.values) + var.index(assignment[var.name])
    return idx


def table_to_tree(tab: CptTable, parent_order: Sequence[Variable]) -> CptTree:
    """Expand a table into the equivalent full tree in declared parent order."""
    expected = 1
    for v in parent_order:
        expected *= len(v.values)
    if len(tab.rows) != expected:
        raise ValueError(
            f"table has {len(tab.rows)} rows, expected {expected} for the given parents"
        )

    def build(depth: int, offset: int) -> CptTree:
        if depth == len(parent_order):
            return Leaf(tab.rows[offset])
        var = parent_order[depth]
        stride = 1
        for v in parent_order[depth + 1 :]:
            stride *= len(v.values)
        branches = tuple(
            (val, build(depth + 1, offset + i * stride))
            for i, val in enumerate(var.values)
        )
        return Node(var.name, branches)

    return build(0, 0)


def as_tree(net: Network, name: str) -> CptTree:
    """The node's CPT in tree form, expanding tables on the fly."""
    spec = net.node(name)
    if isinstance(spec.cpt, CptTable):
        return table_to_tree(spec.cpt, [net.variable(p) for p in spec.parents])
    return spec.cpt


# -- validation --------------------------------------------------------------


def validate(net: Network) -> list[str]:
    """All invariant violations, as stable human-readable strings."""
    violations: list[str] = []
    seen_names: set[str] = set()
    for var in net.variables:
        if var.name in seen_names:
            violations.append(f"duplicate variable: {var.name}")
        seen_names.add(var.name)
        if len(var.values) < 2:
            violations.append(f"degenerate variable: {var.name} has fewer than 2 values")
        if len(set(var.values)) != len(var.values):
            violations.append(f"duplicate value in variable: {var.name}")

    node_vars = {spec.var for spec in net.nodes}
    for var in net.variables:
        if var.name not in node_vars:
            violations.append(f"missing node: {var.name}")

    for spec in net.nodes:
        if len(set(spec.parents)) != len(spec.parents):
            violations.append(f"duplicate parent in node {spec.var}")
        unknown = [p for p in spec.parents if p not in seen_names]
        for p in unknown:
            violations.append(f"unknown parent: {p} in node {spec.var}")
        if unknown:
            continue
        violations.extend(_check_cpt(net, spec))

    if not net.is_acyclic():
        violations.append("cycle: parent relation is not acyclic")
    return violations


def _check_cpt(net: Network, spec: NodeSpec) -> list[str]:
    out: list[str] = []
    width = len(net.values(spec.var))
    if isinstance(spec.cpt, CptTable):
        expected = 1
        for p in spec.parents:
            expected *= len(net.values(p))
        if len(spec.cpt.rows) != expected:
            out.append(
                f"malformed CPT: node {spec.var} has {len(spec.cpt.rows)} rows, expected {expected}"
            )
        for i, row in enumerate(spec.cpt.rows):
            if len(row.probs) != width:
                out.append(f"malformed CPT: node {spec.var} row {i} has wrong width")
            elif not row.is_normalized():
                out.append(f"unnormalized row: node {spec.var} row {i}")
        return out

    def walk(tree: CptTree, path: tuple[str, ...]) -> None:
        if isinstance(tree, Leaf):
            if len(tree.dist.probs) != width:
                out.append(f"malformed CPT: leaf of node {spec.var} has wrong width")
            elif not tree.dist.is_normalized():
                out.append(f"unnormalized leaf: node {spec.var}")
            return
        if tree.test not in spec.parents:
            out.append(f"test not a parent: {tree.test} in node {spec.var}")
        if tree.test in path:
            out.append(f"repeated test on a path: {tree.test} in node {spec.var}")
        branch_vals = tuple(val for val, _ in tree.branches)
        if tree.test in net.var_names and branch_vals != net.values(tree.test):
            out.append(
                f"malformed CPT: node {spec.var} branches on {tree.test} "
                f"do not cover its values exactly"
            )
        for _, sub in tree.branches:
            walk(sub, path + (tree.test,))

    walk(spec.cpt, ())
    return out


# -- JSON I/O ----------------------------------------------------------------


def parse_network(text: str) -> Network:
    """Parse and fully validate a network; raises on any violation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    net = network_from_json(doc)
    violations = validate(net)
    if violations:
        raise NetworkSemanticsError(violations)
    return net


def network_from_json(doc: object) -> Network:
    if not isinstance(doc, dict):
        raise NetworkSemanticsError(["top level must be an object"])
    raw_vars = doc.get("variables")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_vars, list) or not isinstance(raw_nodes, list):
        raise NetworkSemanticsError(['"variables" and "nodes" must be arrays'])

    variables = []
    for rv in raw_vars:
        if not isinstance(rv, dict) or "name" not in rv or "values" not in rv:
            raise NetworkSemanticsError(["variable entries need name and values"])
        variables.append(Variable(str(rv["name"]), tuple(str(v) for v in rv["values"])))
    by_name = {v.name: v for v in variables}

    nodes = []
    for rn in raw_nodes:
        if not isinstance(rn, dict) or "var" not in rn or "cpt" not in rn:
            raise NetworkSemanticsError(["node entries need var and cpt"])
        var = str(rn["var"])
        if var not in by_name:
            raise NetworkSemanticsError([f"unknown variable: node {var!r}"])
        parents = tuple(str(p) for p in rn.get("parents", []))
        cpt = _cpt_from_json(rn["cpt"], var, by_name)
        nodes.append(NodeSpec(var, parents, cpt, bool(rn.get("deterministic", False))))
    return Network(variables, nodes)


def _cpt_from_json(raw: object, var: str, by_name: dict[str, Variable]) -> Cpt:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise NetworkSemanticsError([f"malformed CPT: node {var} needs a kind"])
    kind = raw["kind"]
    if kind == "table":
        rows = raw.get("rows")
        if not isinstance(rows, list):
            raise NetworkSemanticsError([f"malformed CPT: node {var} table needs rows"])
        return CptTable(tuple(Distribution(tuple(row)) for row in rows))
    if kind == "tree":
        return _tree_from_json(raw.get("root"), var, by_name)
    raise NetworkSemanticsError([f"malformed CPT: node {var} has unknown kind {kind!r}"])


def _tree_from_json(raw: object, var: str, by_name: dict[str, Variable]) -> CptTree:
    if not isinstance(raw, dict):
        raise NetworkSemanticsError([f"malformed CPT: node {var} tree entry must be an object"])
    if "leaf" in raw:
        return Leaf(Distribution(tuple(raw["leaf"])))
    if "test" not in raw or "branches" not in raw:
        raise NetworkSemanticsError([f"malformed CPT: node {var} tree entry needs test/branches"])
    test = str(raw["test"])
    raw_branches = raw["branches"]
    if test not in by_name:
        raise NetworkSemanticsError([f"unknown variable: test {test!r} in node {var}"])
    if not isinstance(raw_branches, dict):
        raise NetworkSemanticsError([f"malformed CPT: node {var} branches must be an object"])
    declared = by_name[test].values
    if set(raw_branches) != set(declared):
        raise NetworkSemanticsError(
            [f"malformed CPT: node {var} branches on {test} do not cover its values exactly"]
        )
    branches = tuple(
        (val, _tree_from_json(raw_branches[val], var, by_name)) for val in declared
    )
    return Node(test, branches)


def network_to_json(net: Network) -> dict:
    return {
        "variables": [
            {"name": v.name, "values": list(v.values)} for v in net.variables
        ],
        "nodes": [_node_to_json(spec) for spec in net.nodes],
    }


def _node_to_json(spec: NodeSpec) -> dict:
    out: dict = {"var": spec.var, "parents": list(spec.parents)}
    if spec.deterministic:
        out["deterministic"] = True
    if isinstance(spec.cpt, CptTable):
        out["cpt"] = {"kind": "table", "rows": [list(r.probs) for r in spec.cpt.rows]}
    else:
        out["cpt"] = {"kind": "tree", "root": _tree_to_json(spec.cpt)}
    return out


def _tree_to_json(tree: CptTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": list(tree.dist.probs)}
    return {
        "test": tree.test,
        "branches": {val: _tree_to_json(sub) for val, sub in tree.branches},
    }


def serialize_network(net: Network) -> str:
    """Stable, round-trippable rendering: parse(serialize(n)) == n."""
    return json.dumps(network_to_json(net), indent=2) + "\n"


# -- context syntax ----------------------------------------------------------


def parse_context(net: Network, text: str) -> Context:
    """Parse ``"Var=value,Var2=value2"`` against the network's declarations.

    Variable names may themselves contain ``=`` or ``,`` (decomposition
    introduces names like ``X@A=f,B=t``), so bindings are recognized by
    longest-prefix match against declared names rather than naive splitting.
    """
    bindings: dict[str, str] = {}
    text = text.strip()
    if not text:
        return Context()
    names = sorted(net.var_names, key=len, reverse=True)
    i = 0
    while i < len(text):
        if text[i] == ",":
            i += 1
            continue
        var = next((n for n in names if text.startswith(n + "=", i)), None)
        if var is None:
            raise ValueError(
                f"cannot parse binding at {text[i:]!r}: no known variable matches"
            )
        i += len(var) + 1
        j = text.find(",", i)
        val = text[i:] if j < 0 else text[i:j]
        i = len(text) if j < 0 else j
        net.variable(var).index(val)
        if var in bindings and bindings[var] != val:
            raise ValueError(f"variable {var!r} bound twice")
        bindings[var] = val
    return Context(bindings)


def format_context(ctx: Mapping[str, str]) -> str:
    return ",".join(f"{v}={x}" for v, x in sorted(ctx.items()))
