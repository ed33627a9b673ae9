"""Interference signatures.

The signature of a balanced, deadlock-free program is a quadratically sized
summary that preserves exactly what later layers need to know in order to
compose safely with it: per channel, whether a receive remains exposed to
messages sent by the future, and how the earliest send and latest receive on
each channel relate causally to every process's entry and exit.

Construction: take the program graph's transitive closure, keep the dummy
nodes, the first send per channel, and the last receive per channel, then

* drop a first send on i->j when fst_j causally precedes it (a message the
  receiver helped cause can never race ahead of the receiver's past), and
* drop a last receive on i->j when it causally precedes lst_i (the sender's
  remaining future is already ordered after it, so no later send can be
  consumed by it).

A channel i->j is left open exactly when its last-receive node survives.

Signatures compose: :func:`signature_compose` computes the signature of a
layered program from the two signatures alone, without revisiting the
programs. Node names are stable: fst_i / lst_i for the dummies, snd:i>j for
a surviving first send, rcv:j<i for a surviving last receive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ProcessCountMismatch
from .graph import (
    EventNode,
    FstDummy,
    LstDummy,
    build_program_graph,
    close_edges,
    transitive_closure,
)
from .model import Channel, Program, StmtKind, iter_events

__all__ = [
    "FirstSend",
    "LastRecv",
    "SigNode",
    "Signature",
    "compute_signature",
    "sig_node_name",
    "sig_node_sort_key",
    "signature_compose",
    "signature_equal",
]


@dataclass(frozen=True)
class FirstSend:
    """Earliest send on a channel that the receiver's past cannot see."""

    channel: Channel

    @property
    def name(self) -> str:
        return f"snd:{self.channel.src}>{self.channel.dst}"


@dataclass(frozen=True)
class LastRecv:
    """Latest receive on a channel, still exposed to future sends."""

    channel: Channel

    @property
    def name(self) -> str:
        return f"rcv:{self.channel.dst}<{self.channel.src}"


SigNode = FstDummy | LstDummy | FirstSend | LastRecv
SigEdge = tuple[SigNode, SigNode]


def sig_node_name(node: SigNode) -> str:
    return node.name


def sig_node_sort_key(node: SigNode) -> tuple[int, int, int, int]:
    if isinstance(node, FstDummy):
        return (0, node.proc, 0, 0)
    if isinstance(node, LstDummy):
        return (1, node.proc, 0, 0)
    if isinstance(node, FirstSend):
        return (2, node.channel.src, node.channel.dst, 0)
    return (3, node.channel.src, node.channel.dst, 0)


@dataclass(frozen=True)
class Signature:
    n: int
    nodes: frozenset[SigNode]
    edges: frozenset[SigEdge]

    def leaves_open(self, channel: Channel) -> bool:
        return LastRecv(channel) in self.nodes

    def open_channels(self) -> list[Channel]:
        return sorted(node.channel for node in self.nodes if isinstance(node, LastRecv))

    def sorted_nodes(self) -> list[SigNode]:
        return sorted(self.nodes, key=sig_node_sort_key)

    def sorted_edges(self) -> list[SigEdge]:
        return sorted(
            self.edges, key=lambda e: (sig_node_sort_key(e[0]), sig_node_sort_key(e[1]))
        )


def _check(sig: Signature) -> Signature:
    # Structural invariants; violations are implementation bugs.
    assert len(sig.nodes) <= 2 * sig.n + 2 * sig.n * (sig.n - 1), "signature not O(n^2)"
    for a, b in sig.edges:
        assert a != b, "closure must be irreflexive"
        assert a in sig.nodes and b in sig.nodes
    for node in sig.nodes:
        if isinstance(node, FirstSend):
            assert (FstDummy(node.channel.dst), node) not in sig.edges
        if isinstance(node, LastRecv):
            assert (node, LstDummy(node.channel.src)) not in sig.edges
    succ: dict[SigNode, set[SigNode]] = {}
    for a, b in sig.edges:
        succ.setdefault(a, set()).add(b)
    for a, bs in succ.items():
        for b in bs:
            for c in succ.get(b, ()):
                assert (a, c) in sig.edges, "edges must be transitively closed"
    return sig


def compute_signature(p: Program) -> Signature:
    """Signature of a balanced, deadlock-free program.

    Raises :class:`Unbalanced` or :class:`CyclicGraph` when the
    preconditions fail.
    """
    graph = build_program_graph(p)
    closed = transitive_closure(graph)

    first_send: dict[Channel, EventNode] = {}
    last_recv: dict[Channel, EventNode] = {}
    for ref in iter_events(p):
        node = EventNode(ref)
        if ref.kind is StmtKind.SEND:
            first_send.setdefault(ref.channel, node)
        else:
            last_recv[ref.channel] = node

    keep: dict[EventNode, SigNode] = {}
    for ch, node in first_send.items():
        if (FstDummy(ch.dst), node) not in closed:
            keep[node] = FirstSend(ch)
    for ch, node in last_recv.items():
        if (node, LstDummy(ch.src)) not in closed:
            keep[node] = LastRecv(ch)

    def rename(node) -> SigNode | None:
        if isinstance(node, (FstDummy, LstDummy)):
            return node
        return keep.get(node)

    nodes: set[SigNode] = {FstDummy(i) for i in range(1, p.n + 1)}
    nodes |= {LstDummy(i) for i in range(1, p.n + 1)}
    nodes |= set(keep.values())
    edges: set[SigEdge] = set()
    for a, b in closed:
        ra, rb = rename(a), rename(b)
        if ra is not None and rb is not None:
            edges.add((ra, rb))
    return _check(Signature(p.n, frozenset(nodes), frozenset(edges)))


def signature_compose(sp: Signature, sq: Signature) -> Signature:
    """Signature of the layered program, from the layer signatures alone.

    Glues each lst_i of the first signature to fst_i of the second, closes
    transitively, then removes inner dummies, shadowed sends and receives,
    and sends or receives whose channel the gluing closed.
    """
    if sp.n != sq.n:
        raise ProcessCountMismatch(sp.n, sq.n)
    n = sp.n

    p_nodes = {("p", v) for v in sp.nodes}
    q_nodes = {("q", v) for v in sq.nodes}
    nodes = p_nodes | q_nodes
    edges: set[tuple[tuple[str, SigNode], tuple[str, SigNode]]] = set()
    edges |= {(("p", a), ("p", b)) for a, b in sp.edges}
    edges |= {(("q", a), ("q", b)) for a, b in sq.edges}
    edges |= {(("p", LstDummy(i)), ("q", FstDummy(i))) for i in range(1, n + 1)}
    closed = close_edges(nodes, edges)

    survivors = set(nodes)
    survivors -= {("p", LstDummy(i)) for i in range(1, n + 1)}
    survivors -= {("q", FstDummy(i)) for i in range(1, n + 1)}
    # A first send of the later layer is shadowed by one on the same channel
    # in the earlier layer; symmetrically for last receives.
    survivors -= {
        ("q", v) for v in sq.nodes if isinstance(v, FirstSend) and ("p", v) in survivors
    }
    survivors -= {
        ("p", v) for v in sp.nodes if isinstance(v, LastRecv) and ("q", v) in survivors
    }
    # Gluing may close channels across the layer boundary.
    survivors -= {
        ("q", v)
        for v in sq.nodes
        if isinstance(v, FirstSend)
        and (("p", FstDummy(v.channel.dst)), ("q", v)) in closed
    }
    survivors -= {
        ("p", v)
        for v in sp.nodes
        if isinstance(v, LastRecv)
        and (("p", v), ("q", LstDummy(v.channel.src))) in closed
    }

    out_nodes = frozenset(v for _, v in survivors)
    out_edges = frozenset(
        (a[1], b[1]) for a, b in closed if a in survivors and b in survivors
    )
    return _check(Signature(n, out_nodes, out_edges))


def signature_equal(a: Signature, b: Signature) -> bool:
    """Exact equality under canonical node identity."""
    return a.n == b.n and a.nodes == b.nodes and a.edges == b.edges
