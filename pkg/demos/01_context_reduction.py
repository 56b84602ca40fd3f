"""
Context-specific structure in a tree CPT
========================================

A node whose CPT is a decision tree can ignore some of its parents once a
context fixes part of the network.  This script loads the bundled network
whose node X has parents A, B, C, D and shows which arcs turn vacuous under
a few contexts, and what the reduced CPT looks like.
"""

from csibn import fixtures
from csibn.csi import reduce_tree, vacuous_parents
from csibn.model import Leaf, as_tree

net = fixtures.load("fig2")
tree = as_tree(net, "X")


def show(tree, pad=""):
    # tiny renderer: one line per test, one per leaf
    if isinstance(tree, Leaf):
        print(pad + "-> " + ", ".join(f"{p:.2f}" for p in tree.dist.probs))
        return
    for value, child in tree.branches:
        print(f"{pad}{tree.test}={value}")
        show(child, pad + "    ")


print("full CPT for X:")
show(tree)

for context in ({"A": "t"}, {"A": "f"}, {"A": "f", "B": "t"}):
    label = ", ".join(f"{k}={v}" for k, v in context.items())
    gone = sorted(vacuous_parents(net, "X", context))
    print(f"\ncontext {label}: vacuous parents {gone or 'none'}")
    print("reduced CPT:")
    show(reduce_tree(tree, context))
