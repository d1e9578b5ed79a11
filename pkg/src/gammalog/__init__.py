"""gammalog: a workbench for the cluster-bounded modal logics over S4.

Library layout:

- ``syntax``: formula ASTs, parser/printer, closure operators
- ``kripke``: finite preorder models, model checking, p-morphism search
- ``frame_formulas``: Fine frame formulas, cluster frames, pattern instances
- ``smorynski``: maximal inseparable sets and Smorynski models
- ``refine``: adequate sets and cluster refinement surgery
- ``engine``: satisfiability, validity, countermodels, Craig interpolants
- ``cli``: the command-line front door
"""

from .syntax import Formula, parse, pretty

__all__ = ["Formula", "parse", "pretty"]
__version__ = "0.1.0"
