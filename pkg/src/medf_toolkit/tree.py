"""tree.py — the decidable tree T whose branches are the family.

A node f̄ is in T when, for every odd m < len(f̄), f̄(m) codes a pair (ḡ, c̄) of
length exactly m and every f̄(n), n < m, is the value that pair dictates:
ḡ(n) when the copy clause holds at n, #_F(ḡ↾n, c̄↾n) otherwise.

T is not pruned: a node may have no infinite branch through it.
"""
from __future__ import annotations

import logging

from .bounds import eval_bound
from .coding import decode_pair, encode_pair, pair_level
from .construction import (
    e_hat_prefix,
    good_prefixes,
    marked_set,
    order_rel,
)
from .errors import BudgetExceeded, PreconditionError
from .model import INF, BitSeq, BoundSpec, ConstructionContext, FinSeq, PairCode, TreeNode

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 1_000_000


def _odd_clause_holds(spec: BoundSpec, f: FinSeq, m: int) -> bool:
    """The requirement f̄(m) places on f̄↾m."""
    code = f[m]
    if pair_level(spec, code) != m:
        return False
    pair = decode_pair(spec, code)
    g, c = pair.h, pair.d
    nu = marked_set(ConstructionContext(spec, g, c), value_bound=m)
    good = good_prefixes(c)
    inside: list[int] = []
    for n in range(m):
        comparable = any(
            order_rel(spec, g, a, b) for i, a in enumerate(inside) for b in inside[i + 1:]
        )
        if good[n] and not comparable and n in nu:
            expected = g[n]
        else:
            expected = encode_pair(spec, PairCode(g[:n], c[:n]))
        if f[n] != expected:
            return False
        if n in nu:
            inside.append(n)
    return True


def is_tree_node(node: TreeNode) -> bool:
    spec, f = node.spec, node.f
    for n, v in enumerate(f):
        if not (isinstance(v, int) and 0 <= v) or not v < eval_bound(spec, n):
            return False
    return all(_odd_clause_holds(spec, f, m) for m in range(1, len(f), 2))


def _extends(spec: BoundSpec, f: FinSeq, v: int) -> bool:
    """Whether f⌢v is a node, given that f is one."""
    m = len(f)
    if not v < eval_bound(spec, m):
        return False
    return m % 2 == 0 or _odd_clause_holds(spec, f + (v,), m)


def _value_range(spec: BoundSpec, n: int, budget: int | None) -> range:
    bound = eval_bound(spec, n)
    if bound is INF:
        if budget is None:
            raise PreconditionError(f"F({n}) = ∞: a value budget is required")
        return range(budget)
    return range(bound)  # type: ignore[arg-type]


def children(node: TreeNode, budget: int | None = None) -> list[TreeNode]:
    """One-step extensions f⌢v, v < min(F(len f), budget), that are nodes.

    Without a budget v ranges over F(len f), which must then be finite.
    An invalid node has no children.
    """
    if not is_tree_node(node):
        return []
    f = node.f
    values = _value_range(node.spec, len(f), budget)
    if budget is not None:
        values = values[:budget]
    return [
        TreeNode(f + (v,), node.spec)
        for v in values
        if _extends(node.spec, f, v)
    ]


def level_set(
    spec: BoundSpec,
    level: int,
    value_budget: int | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> list[FinSeq]:
    """Every node of length `level`, breadth first, in lexicographic order."""
    frontier: list[FinSeq] = [()]
    for n in range(level):
        values = _value_range(spec, n, value_budget)
        if len(frontier) * len(values) > node_budget:
            raise BudgetExceeded(
                f"level {n + 1} could hold {len(frontier) * len(values)} nodes, budget {node_budget}"
            )
        frontier = [f + (v,) for f in frontier for v in values if _extends(spec, f, v)]
        logger.debug("level %d: %d nodes", n + 1, len(frontier))
    return frontier


def branch_prefix_check(spec: BoundSpec, g: FinSeq, c: BitSeq) -> bool:
    """Every initial segment of ê(g, c)↾len(g) is a node of T."""
    ctx = ConstructionContext(spec, g, c)
    f = e_hat_prefix(ctx, len(ctx))
    return all(is_tree_node(TreeNode(f[:k], spec)) for k in range(len(f) + 1))
