"""Exact workbench for continuous logic over rational metric spaces.

Everything computes with exact rationals; irrational values (square roots)
are returned as certified enclosures.  The main entry points:

- metric / amalgam / quenum: finite rational metric spaces, one-point
  extensions, the controlled amalgamation of perturbed subspaces, and a
  budgeted enumerator approximating the rational universal space.
- formula / syntax: the continuous-logic AST, its prefix syntax, the linear
  modulus calculus and the Borel-level analyzer of model sets.
- structures / scprobe: exact evaluation over finite structures, the
  truncated structure metric, and the finite categoricity probe.
- urysohn: certified enclosure evaluation of quantified sentences via
  optimization over admissibility polytopes, the quantifier-free decision
  procedure, and the square-root transform demonstration.
- graded: graded subgroups and cosets on partial isometries, their axioms,
  the left-invariant group metric, formula invariance, the approximation
  search and the oligomorphy probe.
- vaught / suite: exact Vaught transforms on finite discrete actions and
  the randomized algebra verification suite.
- reduction: encoding of finite group actions as metric structures with
  orbit equivalence realized as isomorphism.
- cli / catalog / textio: command line, artifact store, text formats.
"""

from .intervals import Enclosure
from .metric import (EmbeddingWitness, KatetovFunction, MetricError,
                     RationalMetricSpace, one_point_extend, validate_table)
from .formula import (BorelLevel, Formula, Relation, Signature, borel_level,
                      lipschitz)
from .structures import FiniteStructure, delta_seq, evaluate, mod_member
from .syntax import parse, print_formula

__all__ = [
    "Enclosure", "EmbeddingWitness", "KatetovFunction", "MetricError",
    "RationalMetricSpace", "one_point_extend", "validate_table",
    "BorelLevel", "Formula", "Relation", "Signature", "borel_level",
    "lipschitz", "FiniteStructure", "delta_seq", "evaluate", "mod_member",
    "parse", "print_formula",
]
