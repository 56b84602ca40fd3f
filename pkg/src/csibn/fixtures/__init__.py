"""Bundled example networks used by the tests, demos and documentation.

* ``fig1``: a five-valued root feeding three intermediate variables, a
  four-valued sink with a tree CPT whose first test short-circuits two
  parents, and one extra observer node.  Loopy; the showcase for
  conditional cutsets.
* ``fig2``: four binary roots into one tree-CPT node with asymmetric
  branch depths.  The showcase for vacuous arcs and heuristic scoring.
* ``fig3``: five binary roots into one node whose tree is a root test
  over two full subtables.  The showcase for decomposition.
"""

from importlib import resources

from ..model import Network, parse_network


def path(name: str):
    """Traversable handle on a bundled network file, name sans extension."""
    return resources.files(__package__) / f"{name}.json"


def load(name: str) -> Network:
    return parse_network(path(name).read_text())
