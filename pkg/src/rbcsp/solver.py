"""Reference search procedures.

* :func:`solve_csp` — forward-checking backtracker over the numba/numpy
  kernel in :mod:`rbcsp._search`, with node/backtrack cost counters.
* :func:`enumerate_solutions` — exhaustive oracle, deliberately independent
  of the search kernel.
* :func:`dpll` — minimal DPLL (unit propagation + lowest-index splitting)
  for cross-validating the CNF encoder, with exact model counting.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from . import _search
from .core import (
    Assignment,
    CspInstance,
    ParameterError,
    SizeError,
    check_assignment,
    tuple_rank,
)
from .encoder import CnfFormula

__all__ = ["SolveConfig", "SolveResult", "SolveStatus", "solve_csp", "enumerate_solutions", "dpll"]

MAX_TUPLE_SPACE = 1 << 20
ENUM_ADVISORY = 10 ** 7


class SolveStatus(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    LIMIT = "LIMIT"


@dataclass(frozen=True)
class SolveConfig:
    node_limit: int | None = None
    heuristic: str = "mrv"
    count_all: bool = False

    def __post_init__(self):
        if self.node_limit is not None and self.node_limit < 1:
            raise ParameterError(f"node_limit must be >= 1, got {self.node_limit}")
        if self.heuristic not in ("lex", "mrv"):
            raise ParameterError(f"heuristic must be 'lex' or 'mrv', got {self.heuristic!r}")


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    witness: Assignment | tuple[bool, ...] | None
    nodes: int
    backtracks: int
    solutions: int | None = None


def _pack(instance: CspInstance):
    """Flatten an instance into the kernel's array layout."""
    n = instance.params.n
    k = instance.params.k
    d = instance.sizes.d
    m = instance.sizes.m
    space = instance.sizes.tuple_space
    if space > MAX_TUPLE_SPACE:
        raise SizeError(f"tuple space d^k = {space} exceeds the solver bound {MAX_TUPLE_SPACE}")

    scopes = np.empty((m, k), dtype=np.int64)
    incompat = np.zeros((m, space), dtype=np.bool_)
    for ci, con in enumerate(instance.constraints):
        scopes[ci, :] = con.scope
        for values in con.incompatible:
            incompat[ci, tuple_rank(values, d)] = True

    counts = np.zeros(n + 1, dtype=np.int64)
    for ci in range(m):
        for j in range(k):
            counts[scopes[ci, j] + 1] += 1
    var_con_start = np.cumsum(counts).astype(np.int64)
    var_con_idx = np.empty(m * k, dtype=np.int64)
    fill = var_con_start[:-1].copy()
    for ci in range(m):
        for j in range(k):
            u = scopes[ci, j]
            var_con_idx[fill[u]] = ci
            fill[u] += 1

    mults = np.array([d ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    return scopes, incompat, var_con_start, var_con_idx, mults


def solve_csp(instance: CspInstance, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    """Complete forward-checking search; LIMIT when the node budget runs out."""
    n = instance.params.n
    d = instance.sizes.d
    k = instance.params.k
    scopes, incompat, var_con_start, var_con_idx, mults = _pack(instance)
    heuristic = _search.HEURISTIC_LEX if cfg.heuristic == "lex" else _search.HEURISTIC_MRV
    limit = cfg.node_limit if cfg.node_limit is not None else 0
    status_code, nodes, backtracks, solutions, witness = _search.fc_search(
        n, d, k, scopes, incompat, var_con_start, var_con_idx, mults,
        heuristic, limit, cfg.count_all,
    )
    status = (SolveStatus.SAT, SolveStatus.UNSAT, SolveStatus.LIMIT)[status_code]
    result_witness = None
    if status is SolveStatus.SAT:
        result_witness = Assignment(tuple(int(v) for v in witness))
        report = check_assignment(instance, result_witness)
        assert report.satisfied, f"unsound witness, violates constraint {report.violated_index}"
    count = int(solutions) if cfg.count_all and status is not SolveStatus.LIMIT else None
    return SolveResult(
        status=status,
        witness=result_witness,
        nodes=int(nodes),
        backtracks=int(backtracks),
        solutions=count,
    )


def enumerate_solutions(instance: CspInstance, cap: int | None = None) -> int:
    """Exact satisfying-assignment count by brute force, early exit at cap."""
    n = instance.params.n
    d = instance.sizes.d
    if d ** n > ENUM_ADVISORY:
        warnings.warn(f"enumerating d^n = {d ** n} assignments; this will be slow", stacklevel=2)
    sets = [(con.scope, con.forbidden_set) for con in instance.constraints]
    count = 0
    for values in product(range(d), repeat=n):
        ok = True
        for scope, forbidden in sets:
            if tuple(values[u] for u in scope) in forbidden:
                ok = False
                break
        if ok:
            count += 1
            if cap is not None and count >= cap:
                return count
    return count


def dpll(cnf: CnfFormula, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    """Unit propagation plus splitting on the lowest-index unassigned
    variable, true branch first.  With count_all, counts every model
    (free variables contribute a factor 2 each)."""
    num_vars = cnf.num_vars
    clauses = cnf.clauses
    limit = cfg.node_limit
    if sys.getrecursionlimit() < 2 * num_vars + 200:
        sys.setrecursionlimit(2 * num_vars + 200)
    state = {"nodes": 0, "backtracks": 0, "solutions": 0, "witness": None, "limit": False}

    def propagate(assign: list[int]) -> bool:
        """Assign forced literals until fixpoint; False on conflict."""
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned_lit = 0
                n_unassigned = 0
                satisfied = False
                for lit in clause:
                    val = assign[abs(lit)]
                    if val == 0:
                        n_unassigned += 1
                        unassigned_lit = lit
                    elif (val > 0) == (lit > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if n_unassigned == 0:
                    return False
                if n_unassigned == 1:
                    assign[abs(unassigned_lit)] = 1 if unassigned_lit > 0 else -1
                    changed = True
        return True

    def all_satisfied(assign: list[int]) -> bool:
        for clause in clauses:
            if not any((assign[abs(lit)] > 0) == (lit > 0) and assign[abs(lit)] != 0
                       for lit in clause):
                return False
        return True

    def record_model(assign: list[int]):
        free = sum(1 for v in range(1, num_vars + 1) if assign[v] == 0)
        state["solutions"] += 1 << free
        if state["witness"] is None:
            state["witness"] = tuple(assign[v] > 0 for v in range(1, num_vars + 1))

    def search(assign: list[int]) -> bool:
        """True once a model is found and counting is off."""
        if not propagate(assign):
            return False
        if all_satisfied(assign):
            record_model(assign)
            return not cfg.count_all
        var = next(v for v in range(1, num_vars + 1) if assign[v] == 0)
        for sign in (1, -1):
            if limit is not None and state["nodes"] >= limit:
                state["limit"] = True
                return False
            state["nodes"] += 1
            branch = list(assign)
            branch[var] = sign
            if search(branch):
                return True
            state["backtracks"] += 1
            if state["limit"]:
                return False
        return False

    search([0] * (num_vars + 1))
    if state["limit"]:
        status = SolveStatus.LIMIT
    elif state["solutions"] > 0:
        status = SolveStatus.SAT
    else:
        status = SolveStatus.UNSAT
    return SolveResult(
        status=status,
        witness=state["witness"] if status is SolveStatus.SAT else None,
        nodes=state["nodes"],
        backtracks=state["backtracks"],
        solutions=state["solutions"] if cfg.count_all and status is not SolveStatus.LIMIT else None,
    )
