"""Edge-colored graphs in the sense of crystallization theory.

An (n+1)-colored graph is a finite multigraph, regular of degree n+1,
with edges properly colored by {0, ..., n}: the edges of each color form
a perfect matching (loops are forbidden).  We store one fixed-point-free
involution per color; vertices are 0 .. 2p-1.

Such a graph encodes an n-dimensional pseudocomplex: take one n-simplex
per vertex, label its vertices by the colors, and glue simplices that
are c-adjacent along the faces opposite to their c-labelled vertices.
Everything downstream (homology, moves, trisections) works through this
dictionary, so this module is deliberately small and exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


class InvalidGraphError(ValueError):
    pass


class DisconnectedGraphError(InvalidGraphError):
    pass


def _check_involution(pairing, order, color):
    for v, w in enumerate(pairing):
        if not 0 <= w < order:
            raise InvalidGraphError(
                "color %d: image %d of vertex %d out of range" % (color, w, v))
        if w == v:
            raise InvalidGraphError(
                "color %d: loop at vertex %d" % (color, v))
        if pairing[w] != v:
            raise InvalidGraphError(
                "color %d: not an involution at vertex %d" % (color, v))


class ColoredGraph:
    """An (n+1)-colored graph on vertices 0..order-1.

    ``matchings[c][v]`` is the vertex joined to ``v`` by the c-colored
    edge.  Instances are immutable; all operations return new graphs.
    """

    __slots__ = ("n", "order", "matchings", "_code")

    def __init__(self, n: int, matchings):
        matchings = tuple(tuple(m) for m in matchings)
        if n < 1 or len(matchings) != n + 1:
            raise InvalidGraphError("expected %d matchings, got %d"
                                    % (n + 1, len(matchings)))
        order = len(matchings[0])
        if order == 0 or order % 2 != 0:
            raise InvalidGraphError("vertex count must be even and positive")
        for c, m in enumerate(matchings):
            if len(m) != order:
                raise InvalidGraphError("color %d has wrong length" % c)
            _check_involution(m, order, c)
        self.n = n
        self.order = order
        self.matchings = matchings
        self._code = None

    # -- basic structure ------------------------------------------------

    @property
    def colors(self):
        return range(self.n + 1)

    @property
    def p(self):
        return self.order // 2

    def neighbor(self, v: int, c: int) -> int:
        return self.matchings[c][v]

    def edges(self, c: int):
        """The c-colored edges as sorted pairs."""
        m = self.matchings[c]
        return [(v, m[v]) for v in range(self.order) if v < m[v]]

    def __eq__(self, other):
        return (isinstance(other, ColoredGraph)
                and self.n == other.n and self.matchings == other.matchings)

    def __hash__(self):
        return hash((self.n, self.matchings))

    def __repr__(self):
        return "ColoredGraph(n=%d, order=%d)" % (self.n, self.order)

    # -- residues --------------------------------------------------------

    def residues(self, colors) -> list:
        """Connected components of the subgraph with only the given colors.

        Returns a list of Residue, partitioning the vertex set.  The empty
        color set yields one singleton residue per vertex.
        """
        colors = tuple(sorted(set(colors)))
        for c in colors:
            if not 0 <= c <= self.n:
                raise InvalidGraphError("color %d out of range" % c)
        seen = [False] * self.order
        out = []
        for start in range(self.order):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            stack = [start]
            while stack:
                v = stack.pop()
                for c in colors:
                    w = self.matchings[c][v]
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            out.append(Residue(colors, frozenset(comp)))
        return out

    def residue_count(self, colors) -> int:
        return len(self.residues(colors))

    def residue_of(self, v: int, colors) -> "Residue":
        colors = tuple(sorted(set(colors)))
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for c in colors:
                w = self.matchings[c][u]
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        return Residue(colors, frozenset(comp))

    def is_connected(self) -> bool:
        return len(self.residues(self.colors)) == 1

    def require_connected(self):
        if not self.is_connected():
            raise DisconnectedGraphError("operation requires a connected graph")

    def is_bipartite(self) -> bool:
        """2-colorability; equals orientability of the represented polyhedron."""
        self.require_connected()
        return self.bipartition() is not None

    def bipartition(self):
        """A vector of vertex classes in {0,1}, or None if not bipartite.

        Normalized so that vertex 0 is in class 0.  Requires connectivity
        only per component (each component's lowest vertex gets class 0).
        """
        cls = [-1] * self.order
        for start in range(self.order):
            if cls[start] != -1:
                continue
            cls[start] = 0
            stack = [start]
            while stack:
                v = stack.pop()
                for c in self.colors:
                    w = self.matchings[c][v]
                    if cls[w] == -1:
                        cls[w] = 1 - cls[v]
                        stack.append(w)
                    elif cls[w] == cls[v]:
                        return None
        return cls

    def bicolored_cycles(self, c1: int, c2: int):
        """The {c1,c2}-colored cycles, each as a tuple of vertices in cyclic
        order (starting at the least vertex, first step along color c1 or c2
        whichever gives the lexicographically smaller tuple)."""
        seen = [False] * self.order
        cycles = []
        for start in range(self.order):
            if seen[start]:
                continue
            cyc = []
            v, col = start, c1
            while True:
                cyc.append(v)
                seen[v] = True
                v = self.matchings[col][v]
                col = c2 if col == c1 else c1
                if v == start and col == c1:
                    break
            alt = (cyc[0],) + tuple(reversed(cyc[1:]))
            cycles.append(min(tuple(cyc), alt))
        return cycles

    # -- subgraph extraction ----------------------------------------------

    def residue_subgraph(self, residue: "Residue"):
        """The residue as a standalone colored graph.

        Returns (graph, vertex_list, color_list): vertex i of the new graph
        is vertex_list[i] here, and its color j is color_list[j] here.
        """
        verts = sorted(residue.vertices)
        index = {v: i for i, v in enumerate(verts)}
        cols = list(residue.colors)
        matchings = [tuple(index[self.matchings[c][v]] for v in verts)
                     for c in cols]
        return ColoredGraph(len(cols) - 1, matchings), verts, cols

    def relabeled(self, perm):
        """The graph with vertex v renamed perm[v] (colors untouched)."""
        matchings = []
        for m in self.matchings:
            new = [0] * self.order
            for v in range(self.order):
                new[perm[v]] = perm[m[v]]
            matchings.append(tuple(new))
        return ColoredGraph(self.n, matchings)

    def color_permuted(self, sigma):
        """The graph with color c renamed sigma[c]."""
        new = [None] * (self.n + 1)
        for c in self.colors:
            new[sigma[c]] = self.matchings[c]
        return ColoredGraph(self.n, new)

    # -- regular embeddings and genus ---------------------------------------

    def regular_genus_eps(self, eps) -> Fraction:
        """The genus of the regular embedding for the cyclic permutation eps.

        Computed from 2 - 2*rho = sum_j g_{eps_j, eps_{j+1}} + (1-n) p.
        For bipartite graphs the result is the (integer) genus of the
        orientable embedding surface; otherwise the surface is
        non-orientable with 2*rho cross-caps, so half-integers can occur.
        """
        self.require_connected()
        eps = CyclicPermutation(eps, self.n)
        total = sum(self.residue_count((eps[j], eps[(j + 1) % (self.n + 1)]))
                    for j in range(self.n + 1))
        rho = Fraction(2 - total - (1 - self.n) * self.p, 2)
        if rho < 0:
            raise InvalidGraphError("negative genus: corrupted graph")
        return rho

    def regular_genus(self):
        """min over cyclic permutation classes; returns (genus, witness)."""
        best = None
        for eps in CyclicPermutation.all_classes(self.n):
            rho = self.regular_genus_eps(eps)
            if best is None or rho < best[0]:
                best = (rho, eps)
        return best

    def embedding(self, eps) -> "EmbeddingSurface":
        """The regular embedding into a closed surface.

        Faces are the {eps_j, eps_{j+1}}-colored cycles for consecutive
        colors of eps; the Euler count reproduces regular_genus_eps.
        """
        self.require_connected()
        eps = CyclicPermutation(eps, self.n)
        faces = []
        for j in range(self.n + 1):
            c1, c2 = eps[j], eps[(j + 1) % (self.n + 1)]
            for cyc in self.bicolored_cycles(c1, c2):
                faces.append(((c1, c2), cyc))
        V = self.order
        E = (self.n + 1) * self.p
        chi = V - E + len(faces)
        orientable = self.bipartition() is not None
        genus = Fraction(2 - chi, 2)
        surf = EmbeddingSurface(self, eps, tuple(faces), genus, orientable)
        return surf

    # -- gem / manifold checks ----------------------------------------------

    def is_closed_manifold_gem_dim2(self) -> bool:
        """A connected 3-colored graph always represents a closed surface."""
        return self.n == 2

    def three_residue_genera(self):
        """Genera of all 3-colored residues (any n >= 2)."""
        out = []
        for cols in itertools.combinations(self.colors, 3):
            for res in self.residues(cols):
                sub, _, _ = self.residue_subgraph(res)
                out.append((res, sub.regular_genus_eps((0, 1, 2))))
        return out

    # -- canonical code -------------------------------------------------------

    def canonical_code(self) -> bytes:
        """Relabeling-invariant code: equal codes iff the graphs are related
        by a color-preserving vertex relabeling.

        BFS-minimization: breadth-first numbering started from every vertex,
        exploring colors in increasing order; the code is the minimum, over
        all roots, of the serialized matchings in BFS labels.  Connected
        graphs only.
        """
        if self._code is not None:
            return self._code
        self.require_connected()
        best = None
        for root in range(self.order):
            label = {root: 0}
            order_out = [root]
            head = 0
            while head < len(order_out):
                v = order_out[head]
                head += 1
                for c in self.colors:
                    w = self.matchings[c][v]
                    if w not in label:
                        label[w] = len(order_out)
                        order_out.append(w)
            rows = []
            for c in self.colors:
                rows.append(tuple(label[self.matchings[c][v]]
                                  for v in order_out))
            cand = (self.n, tuple(rows))
            if best is None or cand < best:
                best = cand
        payload = bytearray([self.n, 0])
        wide = self.order > 255
        payload[1] = 1 if wide else 0
        for row in best[1]:
            for x in row:
                if wide:
                    payload += x.to_bytes(2, "big")
                else:
                    payload.append(x)
        self._code = bytes(payload)
        return self._code

    def canonical_hex(self) -> str:
        return self.canonical_code().hex()

    # -- gem file format ------------------------------------------------------

    def to_gem_text(self) -> str:
        lines = ["GEM %d %d" % (self.n, self.order)]
        for c in self.colors:
            lines.append("%d %s" % (c, " ".join(str(x) for x in self.matchings[c])))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_gem_text(text: str) -> "ColoredGraph":
        rows = {}
        header = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if parts[0] != "GEM" or len(parts) != 3:
                    raise InvalidGraphError("bad gem header: %r" % raw)
                header = (int(parts[1]), int(parts[2]))
                continue
            c = int(parts[0])
            rows[c] = tuple(int(x) for x in parts[1:])
        if header is None:
            raise InvalidGraphError("empty gem file")
        n, order = header
        matchings = []
        for c in range(n + 1):
            if c not in rows:
                raise InvalidGraphError("missing color %d" % c)
            if len(rows[c]) != order:
                raise InvalidGraphError("color %d: expected %d entries" % (c, order))
            matchings.append(rows[c])
        return ColoredGraph(n, matchings)


@dataclass(frozen=True)
class Residue:
    """A connected component of a color-restricted subgraph."""
    colors: tuple
    vertices: frozenset

    def __len__(self):
        return len(self.vertices)


class CyclicPermutation:
    """A cyclic permutation of {0..n}, normalized up to rotation and reversal.

    Two sequences are equal iff one is a rotation of the other or of its
    reverse; the normal form starts at 0 and takes the lexicographically
    smaller direction.
    """

    __slots__ = ("seq",)

    def __init__(self, seq, n=None):
        if isinstance(seq, CyclicPermutation):
            seq = seq.seq
        seq = tuple(seq)
        if n is not None and len(seq) != n + 1:
            raise ValueError("permutation must have length %d" % (n + 1))
        if sorted(seq) != list(range(len(seq))):
            raise ValueError("not a permutation of 0..%d: %r" % (len(seq) - 1, seq))
        i = seq.index(0)
        fwd = seq[i:] + seq[:i]
        rev = tuple(reversed(seq))
        j = rev.index(0)
        bwd = rev[j:] + rev[:j]
        self.seq = min(fwd, bwd)

    def __getitem__(self, j):
        return self.seq[j]

    def __iter__(self):
        return iter(self.seq)

    def __len__(self):
        return len(self.seq)

    def __eq__(self, other):
        return isinstance(other, CyclicPermutation) and self.seq == other.seq

    def __hash__(self):
        return hash(self.seq)

    def __repr__(self):
        return "CyclicPermutation%r" % (self.seq,)

    def induced(self, dropped_color):
        """The cyclic permutation induced on the remaining colors, with the
        survivors renumbered by rank (used for residues of one color less)."""
        rest = [c for c in self.seq if c != dropped_color]
        rank = {c: i for i, c in enumerate(sorted(rest))}
        return CyclicPermutation([rank[c] for c in rest])

    @staticmethod
    def all_classes(n):
        """All cyclic permutations of {0..n} up to rotation and reversal
        (n!/2 classes; 12 for n = 4)."""
        seen = set()
        out = []
        for perm in itertools.permutations(range(1, n + 1)):
            cp = CyclicPermutation((0,) + perm)
            if cp.seq not in seen:
                seen.add(cp.seq)
                out.append(cp)
        return out


@dataclass(frozen=True)
class EmbeddingSurface:
    """A regular embedding of a colored graph into a closed surface.

    faces: tuple of ((c1, c2), cycle) with cycle a vertex tuple; the face
    set tiles the surface.  genus follows the convention of the genus
    formula: for non-orientable surfaces it is half the cross-cap number.
    """
    graph: ColoredGraph
    permutation: CyclicPermutation
    faces: tuple
    genus: Fraction
    orientable: bool

    def euler_characteristic(self):
        V = self.graph.order
        E = (self.graph.n + 1) * self.graph.order // 2
        return V - E + len(self.faces)

    def rotation_at(self, v, bipartition=None):
        """Cyclic order of colors around v in the embedding: eps at class-0
        vertices and reversed eps at class-1 vertices (that is what makes the
        {eps_j, eps_j+1}-cycles the face boundaries)."""
        if bipartition is None:
            bipartition = self.graph.bipartition()
        seq = list(self.permutation)
        if bipartition is not None and bipartition[v] == 1:
            seq.reverse()
        return seq


def connected_sum(g1: ColoredGraph, g2: ColoredGraph, v1: int = 0, v2: int = 0):
    """Graph connected sum: remove one vertex from each graph and weld the
    hanging edges color by color.  For gems with v1, v2 in antipodal
    bipartition classes this represents the connected sum of the manifolds.
    """
    if g1.n != g2.n:
        raise InvalidGraphError("dimension mismatch")
    off = g1.order
    matchings = []
    for c in g1.colors:
        m = list(g1.matchings[c]) + [x + off for x in g2.matchings[c]]
        a, b = m[v1], m[v2 + off]
        m[a], m[b] = b, a
        matchings.append(m)
    keep = [v for v in range(g1.order + g2.order) if v not in (v1, v2 + off)]
    index = {v: i for i, v in enumerate(keep)}
    packed = [tuple(index[m[v]] for v in keep) for m in matchings]
    return ColoredGraph(g1.n, packed)


def standard_sphere_graph(n: int) -> ColoredGraph:
    """The order-2 (n+1)-colored graph: the n-sphere."""
    return ColoredGraph(n, [(1, 0)] * (n + 1))
