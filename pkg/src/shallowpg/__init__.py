"""Parity games on shallow tree-models and elimination forests.

The main entry points:

* :func:`shallowpg.scw.solve_scw` solves a game given a tree-model that
  induces its arena (enforcement-set dynamic programme).
* :func:`shallowpg.reduction.solve_treedepth` solves a game given an
  elimination forest, by reduction to the tree-model case.
* :func:`shallowpg.oracle.solve_zielonka` is the classical recursive solver
  used as ground truth.
* :func:`shallowpg.circuit.emit_scw_circuit` emits the same dynamic programme
  as an explicit boolean circuit.
"""

from .core import Arena, Coloring, FormatError, ParityGame, Player, WinnerPartition, parse_pg, serialize_pg

__all__ = [
    "Arena",
    "Coloring",
    "FormatError",
    "ParityGame",
    "Player",
    "WinnerPartition",
    "parse_pg",
    "serialize_pg",
]
