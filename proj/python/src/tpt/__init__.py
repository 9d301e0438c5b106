# SPDX-License-Identifier: MIT
"""Learning tree pattern transformations from example pairs."""

from ._tpt import (
    BudgetExceeded,
    ParseError,
    __version__,
    apply_all,
    apply_at,
    explains,
    explains_in_steps,
    gen_3sat,
    gen_vertex_cover,
    ingest,
    learn,
    normalize_tree,
    parse_formula,
    positions,
    print_formula,
    solve_dimacs,
)

__all__ = [
    "BudgetExceeded",
    "ParseError",
    "__version__",
    "apply_all",
    "apply_at",
    "explains",
    "explains_in_steps",
    "gen_3sat",
    "gen_vertex_cover",
    "ingest",
    "learn",
    "normalize_tree",
    "parse_formula",
    "positions",
    "print_formula",
    "solve_dimacs",
]
