"""Strong and rooted branching bisimilarity of LTSs, by signature refinement.

Both checkers work on the disjoint union of the two systems. The branching
check is divergence-insensitive: a tau-cycle inside one class is inert, which
is what makes clusters of internal steps with exits collapse onto their exits.
"""
from __future__ import annotations

from .lts import TAU_L, Lts
from .threads import refine


def _union(p: Lts, q: Lts):
    n = p.num_states
    succ = [[] for _ in range(n + q.num_states)]
    for s, lab, t in p.transitions:
        succ[s].append((lab, t))
    for s, lab, t in q.transitions:
        succ[n + s].append((lab, n + t))
    term = set(p.terminating) | {n + s for s in q.terminating}
    return succ, term, p.root, n + q.root


def strong_partition(p: Lts, q: Lts):
    succ, term, r1, r2 = _union(p, q)
    nodes = range(len(succ))

    def sig(s, block):
        return frozenset((lab, block[t]) for lab, t in succ[s])

    return refine(nodes, sig, lambda s: s in term), r1, r2


def strong_bisimilar(p: Lts, q: Lts) -> bool:
    block, r1, r2 = strong_partition(p, q)
    return block[r1] == block[r2]


def _sccs(nodes: int, edges: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    index = [-1] * nodes
    low = [0] * nodes
    on_stack = [False] * nodes
    stack: list[int] = []
    out = []
    counter = 0
    for start in range(nodes):
        if index[start] != -1:
            continue
        work = [(start, 0)]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack[start] = True
        while work:
            v, i = work[-1]
            if i < len(edges[v]):
                work[-1] = (v, i + 1)
                w = edges[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


_DONE = ("$term",)


def branching_partition(succ, term) -> list[int]:
    """Branching bisimilarity classes of the states of ``succ``."""
    n = len(succ)
    # termination is observed through the signature, so that a state that
    # silently reaches termination can join the terminating class
    block = [0] * n
    count = 1
    while True:
        inert = [[t for lab, t in succ[s] if lab == TAU_L and block[t] == block[s]] for s in range(n)]
        sig: list = [None] * n
        # successors' components are finished before their predecessors
        for comp in _sccs(n, inert):
            acc = set()
            for s in comp:
                b = block[s]
                if s in term:
                    acc.add(_DONE)
                for lab, t in succ[s]:
                    if not (lab == TAU_L and block[t] == b):
                        acc.add((lab, block[t]))
                for t in inert[s]:
                    if sig[t] is not None:
                        acc |= sig[t]
            frozen = frozenset(acc)
            for s in comp:
                sig[s] = frozen
        keys: dict = {}
        new = [keys.setdefault((block[s], sig[s]), len(keys)) for s in range(n)]
        if len(keys) == count:
            return new
        block, count = new, len(keys)


def branching_bisimilar(p: Lts, q: Lts) -> bool:
    succ, term, r1, r2 = _union(p, q)
    block = branching_partition(succ, term)
    return block[r1] == block[r2]


def rooted_branching_bisimilar(p: Lts, q: Lts) -> bool:
    """Branching bisimilarity plus the root condition: initial moves are matched exactly."""
    succ, term, r1, r2 = _union(p, q)
    block = branching_partition(succ, term)
    if (r1 in term) != (r2 in term):
        return False
    moves1 = {(lab, block[t]) for lab, t in succ[r1]}
    moves2 = {(lab, block[t]) for lab, t in succ[r2]}
    return moves1 == moves2
