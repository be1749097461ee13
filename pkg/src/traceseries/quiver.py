"""Block structures and the directed multigraph of torus weights.

Vertices are the torus variables z_1..z_n.  Every denominator factor
(1 - (z_u/z_v) t) with u != v becomes an edge u -> v labelled t; the z-free
diagonal factors (1 - t) are kept aside as loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ConfigError, ConnectivityError
from .exactpoly import ONE, Monomial, VarId, t, z


@dataclass(frozen=True)
class BlockStructure:
    block_sizes: Tuple[int, ...]
    edge_multiplicity: Mapping[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ConfigError(f"block sizes must be positive integers, got {self.block_sizes}")
        object.__setattr__(self, "block_sizes", sizes)
        mult = {}
        for (a, b), k in dict(self.edge_multiplicity).items():
            if not (1 <= a <= len(sizes) and 1 <= b <= len(sizes)):
                raise ConfigError(f"block pair {(a, b)} out of range for {len(sizes)} blocks")
            if k < 0:
                raise ConfigError(f"negative generic count for block pair {(a, b)}")
            if k:
                mult[(a, b)] = int(k)
        object.__setattr__(self, "edge_multiplicity", mult)

    @classmethod
    def uniform(cls, block_sizes: Sequence[int], k: int = 1) -> "BlockStructure":
        t_ = len(block_sizes)
        return cls(tuple(block_sizes), {(a, b): k for a in range(1, t_ + 1) for b in range(1, t_ + 1)})

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def blocks(self) -> int:
        return len(self.block_sizes)

    def k(self, a: int, b: int) -> int:
        return self.edge_multiplicity.get((a, b), 0)

    def block_of(self, u: int) -> int:
        start = 0
        for a, size in enumerate(self.block_sizes, 1):
            if start < u <= start + size:
                return a
            start += size
        raise ValueError(f"index {u} outside 1..{self.n}")

    def gamma(self, u: int, v: int) -> Tuple[int, int]:
        return self.block_of(u), self.block_of(v)

    def block_ranges(self) -> List[range]:
        out, start = [], 1
        for size in self.block_sizes:
            out.append(range(start, start + size))
            start += size
        return out

    def is_diagonal_idempotent(self) -> bool:
        return all(s == 1 for s in self.block_sizes)


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    label: VarId

    def __str__(self):
        return f"{self.tail}->{self.head}[{self.label}]"


@dataclass(frozen=True)
class BlockQuiver:
    n: int
    edges: Tuple[Edge, ...]
    loops: Tuple[VarId, ...] = ()

    def out_edges(self, u: int) -> List[Edge]:
        return [e for e in self.edges if e.tail == u]

    def to_edge_list(self) -> List[Tuple[int, int, str]]:
        return [(e.tail, e.head, str(e.label)) for e in self.edges]


@dataclass(frozen=True)
class SpanningInTree:
    root: int
    tree_edges: Tuple[Edge, ...]

    def parent_edge(self) -> Dict[int, Edge]:
        return {e.tail: e for e in self.tree_edges}

    def path_to_root(self, u: int) -> List[Edge]:
        par = self.parent_edge()
        path = []
        while u != self.root:
            e = par[u]
            path.append(e)
            u = e.head
        return path


@dataclass(frozen=True)
class OrientedCycle:
    edges: Tuple[Tuple[Edge, int], ...]

    @property
    def weight(self) -> Monomial:
        w = ONE
        for e, s in self.edges:
            w = w * Monomial.var(e.label, s)
        return w

    def vertices(self) -> List[int]:
        return [e.tail if s > 0 else e.head for e, s in self.edges]

    def is_closed(self) -> bool:
        pos = None
        start = None
        for e, s in self.edges:
            a, b = (e.tail, e.head) if s > 0 else (e.head, e.tail)
            if pos is None:
                start = a
            elif pos != a:
                return False
            pos = b
        return pos == start

    def is_simple(self) -> bool:
        vs = self.vertices()
        return len(vs) == len(set(vs))


def position_label(u: int, v: int, alpha: int) -> VarId:
    return t(u, v, alpha)


def build_quiver(bs: BlockStructure, distinct_labels: bool = True, repeat: int = 1) -> BlockQuiver:
    """One edge per off-diagonal factor (1 - (z_u/z_v) t(., ., alpha)); ``repeat`` copies each factor.

    With ``distinct_labels`` the label of position (u, v) is t(u, v, alpha);
    otherwise it is the block label t(gamma(u, v), alpha).
    """
    edges, loops = [], []
    for u in range(1, bs.n + 1):
        for v in range(1, bs.n + 1):
            a, b = bs.gamma(u, v)
            for alpha in range(1, bs.k(a, b) + 1):
                label = t(u, v, alpha) if distinct_labels else t(a, b, alpha)
                for _ in range(repeat):
                    if u == v:
                        loops.append(label)
                    else:
                        edges.append(Edge(len(edges), u, v, label))
    return BlockQuiver(bs.n, tuple(edges), tuple(loops))


def spanning_in_trees(q: BlockQuiver, root: int = 1) -> List[SpanningInTree]:
    """All spanning arborescences directed toward ``root``, in a fixed order."""
    others = [u for u in range(1, q.n + 1) if u != root]
    choices = [q.out_edges(u) for u in others]
    if any(not c for c in choices):
        missing = [u for u, c in zip(others, choices) if not c]
        raise ConnectivityError(f"vertices {missing} have no outgoing edge; no spanning in-tree to v{root}")
    trees = []
    for pick in product(*choices):
        par = {e.tail: e.head for e in pick}
        ok = True
        for u in others:
            seen = set()
            while u != root:
                if u in seen:
                    ok = False
                    break
                seen.add(u)
                u = par[u]
            if not ok:
                break
        if ok:
            trees.append(SpanningInTree(root, tuple(pick)))
    if not trees:
        raise ConnectivityError(f"root v{root} is not reachable from every vertex; no spanning in-tree exists")
    return trees


def simple_cycles(q: BlockQuiver) -> List[OrientedCycle]:
    """Simple directed cycles, each reported once (rotation starting at its least vertex)."""
    by_pair: Dict[Tuple[int, int], List[Edge]] = {}
    for e in q.edges:
        by_pair.setdefault((e.tail, e.head), []).append(e)
    succ: Dict[int, List[int]] = {}
    for (a, b) in sorted(by_pair):
        succ.setdefault(a, []).append(b)

    vertex_cycles = []

    def dfs(start, path, on_path):
        for w in succ.get(path[-1], []):
            if w == start:
                vertex_cycles.append(list(path))
            elif w > start and w not in on_path:
                on_path.add(w)
                path.append(w)
                dfs(start, path, on_path)
                path.pop()
                on_path.discard(w)

    for s in range(1, q.n + 1):
        dfs(s, [s], {s})

    cycles = []
    for vc in vertex_cycles:
        hops = [by_pair[(vc[i], vc[(i + 1) % len(vc)])] for i in range(len(vc))]
        for pick in product(*hops):
            cycles.append(OrientedCycle(tuple((e, 1) for e in pick)))
    return cycles


def fundamental_cycle(e: Edge, tree: SpanningInTree) -> OrientedCycle:
    """The cycle of tree + e, oriented along e; backward tree edges get sign -1."""
    if e in tree.tree_edges:
        raise ValueError(f"edge {e} belongs to the tree")
    up_from_head = tree.path_to_root(e.head)
    up_from_tail = tree.path_to_root(e.tail)
    on_head_path = {x.tail for x in up_from_head} | {tree.root}
    # lowest common ancestor: first vertex on the tail's root path that the head's path visits
    lca = e.tail
    tail_part = []
    for x in up_from_tail:
        if lca in on_head_path:
            break
        tail_part.append(x)
        lca = x.head
    head_part = []
    for x in up_from_head:
        if x.tail == lca:
            break
        head_part.append(x)
    seq = [(e, 1)] + [(x, 1) for x in head_part] + [(x, -1) for x in reversed(tail_part)]
    return OrientedCycle(tuple(seq))


def tree_substitution(tree: SpanningInTree, n: Optional[int] = None) -> Dict[VarId, Monomial]:
    """z_root -> 1 and z_u -> prod of inverse labels along u's path, solving 1 - (z_u/z_v) t = 0 on tree edges."""
    verts = {tree.root} | {e.tail for e in tree.tree_edges}
    if n is not None:
        verts |= set(range(1, n + 1))
    out = {}
    for u in sorted(verts):
        m = ONE
        for e in tree.path_to_root(u):
            m = m * Monomial.var(e.label, -1)
        out[z(u)] = m
    return out
