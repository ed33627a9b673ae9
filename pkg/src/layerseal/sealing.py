"""Deciding and constructing seals.

A program q seals a program p when, in the layered program p then q, no
receive belonging to p can ever consume a message sent after p finished.
Sealing is what makes a layer boundary safe: once sealed, anything layered
after q composes with p as if a global barrier stood between them.

Deciding is_seal(p, q) needs only the two signatures. For every channel i->j
that p leaves open, some process k must have p's last receive on the channel
causally before lst_k in p, and q must causally order fst_k before the point
that guards the channel in q: q's own first send on i->j when q sends on it,
otherwise lst_i, which bounds every send a later layer could add.

Construction works on the closed-channel graph: the directed graph over
processes with an edge (i, j) exactly when p closes channel i->j. A seal
exists if and only if the undirected version is connected. The synthesized
plan is a sequence of single-message transmissions in three phases:

a. direct closes: for spanning-tree edges pointing away from the centre
   whose reverse channel is still open, one transmission along the tree
   edge, which closes the reverse channel;
b. a converge-cast from the leaves to the centre (post-order);
c. a broadcast from the centre back out (pre-order).

Every transmission travels a channel that is closed by the time it is used,
and the two cast phases thread a causal path from every process to every
other, closing all channels p left open. The plan never exceeds 3(n-1)
transmissions.

All tie-breaking is deterministic: breadth-first spanning tree rooted at the
smallest process id with neighbours visited in ascending order, centre of
minimum eccentricity with the smallest id winning ties, children visited in
ascending order in both casts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import BadProcessId, ProcessCountMismatch, Unsealable
from .graph import FstDummy, LstDummy
from .model import Program, program, recv, send
from .signature import FirstSend, LastRecv, Signature, compute_signature

__all__ = [
    "ClosedChannelGraph",
    "Phase",
    "SealPlan",
    "closed_channels",
    "construct_seal",
    "expand_plan",
    "format_plan",
    "is_seal",
    "is_sealable",
    "parse_plan",
]


class Phase(Enum):
    DIRECT_CLOSE = "direct-close"
    CONVERGE_CAST = "converge-cast"
    BROADCAST = "broadcast"


@dataclass(frozen=True)
class ClosedChannelGraph:
    """Directed graph over process ids; an edge (i, j) means i->j is closed."""

    n: int
    edges: frozenset[tuple[int, int]]

    def undirected_adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, set[int]] = {i: set() for i in range(1, self.n + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return {i: sorted(peers) for i, peers in adj.items()}

    def undirected_connected(self) -> bool:
        if self.n <= 1:
            return True
        adj = self.undirected_adjacency()
        seen = {1}
        stack = [1]
        while stack:
            for peer in adj[stack.pop()]:
                if peer not in seen:
                    seen.add(peer)
                    stack.append(peer)
        return len(seen) == self.n


@dataclass(frozen=True)
class SealPlan:
    """Ordered single-message transmissions realizing a seal."""

    transmissions: tuple[tuple[int, int], ...]
    phase_tags: tuple[Phase, ...]

    def __post_init__(self) -> None:
        if len(self.transmissions) != len(self.phase_tags):
            raise ValueError("one phase tag per transmission")


def closed_channels(p: Program) -> ClosedChannelGraph:
    """Which channels p closes, read off the signature.

    Starts from every ordered pair and removes (i, j) when the signature
    keeps a last receive on i->j that is not ordered before lst_i. Survivors
    of signature construction never carry that edge, so the surviving
    last-receive nodes are exactly the open channels.
    """
    sig = compute_signature(p)
    edges = {
        (i, j)
        for i in range(1, p.n + 1)
        for j in range(1, p.n + 1)
        if i != j
    }
    for node in sig.nodes:
        if isinstance(node, LastRecv):
            ch = node.channel
            if (node, LstDummy(ch.src)) not in sig.edges:
                edges.discard((ch.src, ch.dst))
    return ClosedChannelGraph(p.n, frozenset(edges))


def is_sealable(p: Program) -> bool:
    """True when some seal for p exists."""
    return closed_channels(p).undirected_connected()


def is_seal(p: Program, q: Program) -> bool:
    """Decide whether q seals p, on signatures alone.

    Both programs must be balanced and deadlock-free over the same process
    count. Layering balanced deadlock-free programs is itself deadlock-free:
    the layered graph adds no edge from the later layer back into the
    earlier one.
    """
    sp = compute_signature(p)
    sq = compute_signature(q)
    if sp.n != sq.n:
        raise ProcessCountMismatch(sp.n, sq.n)
    return _seals(sp, sq)


def _seals(sp: Signature, sq: Signature) -> bool:
    for node in sp.sorted_nodes():
        if not isinstance(node, LastRecv):
            continue
        ch = node.channel
        target = FirstSend(ch) if FirstSend(ch) in sq.nodes else LstDummy(ch.src)
        guarded = any(
            (node, LstDummy(k)) in sp.edges and (FstDummy(k), target) in sq.edges
            for k in range(1, sp.n + 1)
        )
        if not guarded:
            return False
    return True


def expand_plan(plan: SealPlan, n: int) -> Program:
    """Expand a plan into the program that performs its transmissions.

    Raises :class:`BadProcessId` when a transmission endpoint lies outside
    1..n or sends to itself.
    """
    seqs: dict[int, list] = {}
    for src, dst in plan.transmissions:
        if not (1 <= src <= n and 1 <= dst <= n):
            raise BadProcessId(f"transmission {src}->{dst} outside 1..{n}")
        if src == dst:
            raise BadProcessId(f"transmission {src}->{dst} addresses itself")
        seqs.setdefault(src, []).append(send(dst))
        seqs.setdefault(dst, []).append(recv(src))
    return program("seal", n, seqs)


def _bfs_tree(adj: dict[int, list[int]], root: int) -> dict[int, int]:
    """Parent map of a breadth-first spanning tree; neighbours ascending."""
    parent: dict[int, int] = {}
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                parent[w] = v
                queue.append(w)
    return parent


def _tree_adjacency(parent: dict[int, int], n: int) -> dict[int, list[int]]:
    adj: dict[int, set[int]] = {i: set() for i in range(1, n + 1)}
    for child, par in parent.items():
        adj[child].add(par)
        adj[par].add(child)
    return {i: sorted(peers) for i, peers in adj.items()}


def _eccentricity(adj: dict[int, list[int]], start: int) -> int:
    depth = {start: 0}
    queue = [start]
    worst = 0
    while queue:
        v = queue.pop(0)
        for w in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                worst = max(worst, depth[w])
                queue.append(w)
    return worst


def _children_map(parent: dict[int, int], n: int) -> dict[int, list[int]]:
    children: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    for child in sorted(parent):
        children[parent[child]].append(child)
    return children


def construct_seal(p: Program) -> SealPlan:
    """Synthesize a seal plan for p, or raise :class:`Unsealable`.

    The expansion of the returned plan always satisfies
    ``is_seal(p, expand_plan(plan, p.n))`` and stays under 3n transmissions.
    """
    closed = closed_channels(p)
    if not closed.undirected_connected():
        raise Unsealable(f"closed-channel graph of {p.name!r} is disconnected")
    n = p.n
    if n <= 1:
        return SealPlan((), ())

    adj = closed.undirected_adjacency()
    bfs_parent = _bfs_tree(adj, root=1)
    tree_adj = _tree_adjacency(bfs_parent, n)
    centre = min(range(1, n + 1), key=lambda v: (_eccentricity(tree_adj, v), v))

    # Re-root the tree at the centre; orient every undirected tree edge by a
    # direction that the closed-channel graph actually provides, preferring
    # parent to child.
    parent = _bfs_tree(tree_adj, root=centre)
    children = _children_map(parent, n)

    preorder: list[int] = []
    postorder: list[int] = []

    def walk(v: int) -> None:
        if v != centre:
            preorder.append(v)
        for c in children[v]:
            walk(c)
        if v != centre:
            postorder.append(v)

    walk(centre)

    transmissions: list[tuple[int, int]] = []
    tags: list[Phase] = []
    for w in preorder:
        par = parent[w]
        away = (par, w) in closed.edges
        toward = (w, par) in closed.edges
        # Tree edges exist in the closed graph in at least one direction.
        # When only parent->child is closed and child->parent is open, one
        # early transmission down the edge closes the upward channel so the
        # converge-cast can use it.
        if away and not toward:
            transmissions.append((par, w))
            tags.append(Phase.DIRECT_CLOSE)
    for w in postorder:
        transmissions.append((w, parent[w]))
        tags.append(Phase.CONVERGE_CAST)
    for w in preorder:
        transmissions.append((parent[w], w))
        tags.append(Phase.BROADCAST)

    plan = SealPlan(tuple(transmissions), tuple(tags))
    # A failure here would be a construction bug, not an unsealable input;
    # the recovery would be extra direct closes along tree paths, but no
    # input class is known to need it.
    assert is_seal(p, expand_plan(plan, n)), "constructed plan must seal its input"
    return plan


_PLAN_LINE = re.compile(
    r"^\s*(\d+)\s*->\s*(\d+)\s*(?:\[([a-z-]+)\])?\s*$"
)


def format_plan(plan: SealPlan) -> str:
    """One transmission per line: ``src -> dst [phase]``."""
    lines = [
        f"{src} -> {dst} [{tag.value}]"
        for (src, dst), tag in zip(plan.transmissions, plan.phase_tags)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_plan(text: str) -> SealPlan:
    """Inverse of :func:`format_plan`; blank lines and ``#`` comments allowed."""
    transmissions: list[tuple[int, int]] = []
    tags: list[Phase] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _PLAN_LINE.match(line)
        if m is None:
            raise ValueError(f"plan line {lineno}: cannot parse {raw!r}")
        src, dst, tag = m.groups()
        try:
            phase = Phase(tag) if tag else Phase.DIRECT_CLOSE
        except ValueError:
            raise ValueError(f"plan line {lineno}: unknown phase {tag!r}") from None
        transmissions.append((int(src), int(dst)))
        tags.append(phase)
    return SealPlan(tuple(transmissions), tuple(tags))
