"""Combinatorial rewriting on colored graphs.

Dipole moves preserve the represented manifold (empty or connected
boundary); rho-pair switchings and combinatorial-handle cancellations
have controlled topological effects and power the 3-handle closure
procedure; quadricolor smoothing is the graph counterpart of a Dehn
surgery.  Sphere certification is a one-sided certificate: reduction of
a 4-colored graph to the order-2 graph by dipole moves proves it
represents the 3-sphere, failure proves nothing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .colored_graph import ColoredGraph, InvalidGraphError, standard_sphere_graph
from .homology import h1_group


class MoveError(ValueError):
    pass


# -- dipoles -----------------------------------------------------------------


@dataclass(frozen=True)
class Dipole:
    vertices: tuple        # (u, v), u < v
    colors: tuple          # the r connecting colors

    @property
    def order(self):
        return len(self.colors)


def joining_colors(g: ColoredGraph, u: int, v: int):
    return tuple(c for c in g.colors if g.matchings[c][u] == v)


def is_dipole(g: ColoredGraph, u: int, v: int, colors=None) -> bool:
    cols = joining_colors(g, u, v)
    if colors is not None and tuple(sorted(colors)) != cols:
        return False
    r = len(cols)
    if not 1 <= r <= g.n:
        return False
    complement = [c for c in g.colors if c not in cols]
    return v not in g.residue_of(u, complement).vertices


def find_dipoles(g: ColoredGraph, r: int) -> list:
    """All r-dipoles: vertex pairs joined by exactly r edges and lying in
    different components of the complementary-colored subgraph."""
    if not 1 <= r <= g.n:
        return []
    out = []
    for u in range(g.order):
        partners = {g.matchings[c][u] for c in g.colors}
        for v in partners:
            if v <= u:
                continue
            cols = joining_colors(g, u, v)
            if len(cols) == r and is_dipole(g, u, v, cols):
                out.append(Dipole((u, v), cols))
    return out


def eliminate_dipole(g: ColoredGraph, d: Dipole):
    """Delete the dipole and weld the hanging edges.

    Returns (new_graph, site) where the site can be fed to add_dipole to
    re-insert the dipole at the same place.  Surviving vertices are
    renumbered by their old order; site records new labels.
    """
    u, v = d.vertices
    if not is_dipole(g, u, v, d.colors):
        raise MoveError("(%d,%d) is not a %d-dipole of colors %r"
                        % (u, v, len(d.colors), d.colors))
    keep = [w for w in range(g.order) if w not in (u, v)]
    index = {w: i for i, w in enumerate(keep)}
    complement = [c for c in g.colors if c not in d.colors]
    matchings = []
    for c in g.colors:
        m = list(g.matchings[c])
        if c in complement:
            a, b = m[u], m[v]
            m[a], m[b] = b, a
        matchings.append(tuple(index[m[w]] for w in keep))
    welds = {c: (index[g.matchings[c][u]], index[g.matchings[c][v]])
             for c in complement}
    site = DipoleSite(tuple(sorted(d.colors)), welds,
                      parity=None)
    return ColoredGraph(g.n, matchings), site


@dataclass(frozen=True)
class DipoleSite:
    """Where to graft a dipole: for each non-dipole color, the directed
    edge (a, b) to cut; the new u attaches to every a, the new v to every b."""
    colors: tuple
    cuts: dict
    parity: object = None


def add_dipole(g: ColoredGraph, site: DipoleSite):
    """Insert a dipole of the given colors; inverse of eliminate_dipole.

    The two new vertices get the top two labels (u = order, v = order+1).
    """
    cols = tuple(sorted(site.colors))
    if not 1 <= len(cols) <= g.n:
        raise MoveError("dipole order out of range")
    complement = [c for c in g.colors if c not in cols]
    if sorted(site.cuts) != complement:
        raise MoveError("cuts must cover exactly the complementary colors")
    u, v = g.order, g.order + 1
    matchings = []
    for c in g.colors:
        m = list(g.matchings[c]) + [0, 0]
        if c in cols:
            m[u], m[v] = v, u
        else:
            a, b = site.cuts[c]
            if g.matchings[c][a] != b:
                raise MoveError("cut (%d,%d) is not a %d-colored edge" % (a, b, c))
            m[a], m[u] = u, a
            m[b], m[v] = v, b
        matchings.append(tuple(m))
    return ColoredGraph(g.n, matchings)


# -- rho-pairs ----------------------------------------------------------------


@dataclass(frozen=True)
class RhoPair:
    edges: tuple           # ((a,b), (c,d)) two i-colored edges, disjoint
    color: int
    shared_colors: tuple   # maximal set of colors c with a common {i,c}-cycle

    @property
    def order(self):
        return len(self.shared_colors)


def _cycle_ids(g: ColoredGraph, c1: int, c2: int):
    """Map vertex -> id of its {c1,c2}-cycle."""
    ids = [-1] * g.order
    k = 0
    for v in range(g.order):
        if ids[v] >= 0:
            continue
        stack = [v]
        ids[v] = k
        while stack:
            w = stack.pop()
            for c in (c1, c2):
                x = g.matchings[c][w]
                if ids[x] < 0:
                    ids[x] = k
                    stack.append(x)
        k += 1
    return ids


def find_rho_pairs(g: ColoredGraph, color: int, h: int) -> list:
    """All pairs of color-colored edges sharing their {color,c}-cycle for at
    least h other colors; each pair carries its maximal shared color set."""
    if not 1 <= h <= g.n:
        return []
    edges = g.edges(color)
    others = [c for c in g.colors if c != color]
    ids = {c: _cycle_ids(g, color, c) for c in others}
    out = []
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            (a, _b), (c, _d) = edges[i], edges[j]
            shared = tuple(cc for cc in others if ids[cc][a] == ids[cc][c])
            if len(shared) >= h:
                out.append(RhoPair((edges[i], edges[j]), color, shared))
    return out


def switch_rho_pair(g: ColoredGraph, pair: RhoPair) -> ColoredGraph:
    """Cancel the two edges and re-join their endpoints by new edges of the
    same color, choosing the unique rewiring that preserves the bipartition.

    Non-bipartite input is rejected: the paper fixes the switching choice
    only under bipartition-preservation, and guessing between the two
    rewirings can change the represented manifold.
    """
    (a, b), (c, d) = pair.edges
    i = pair.color
    if g.matchings[i][a] != b or g.matchings[i][c] != d:
        raise MoveError("pair edges are not %d-colored edges of the graph" % i)
    cls = g.bipartition()
    if cls is None:
        raise MoveError("ambiguous switching: graph is not bipartite")
    m = list(g.matchings[i])
    if cls[a] != cls[c]:
        m[a], m[c] = c, a
        m[b], m[d] = d, b
    else:
        m[a], m[d] = d, a
        m[b], m[c] = c, b
    matchings = list(g.matchings)
    matchings[i] = tuple(m)
    return ColoredGraph(g.n, matchings)


# -- combinatorial handles -----------------------------------------------------


@dataclass(frozen=True)
class CombinatorialHandle:
    vertices: tuple        # (x, y)
    missing: tuple         # the two colors not joining x and y

    @property
    def cycle_colors(self):
        return self.missing


def find_combinatorial_handles(g: ColoredGraph) -> list:
    """Vertex pairs joined by exactly n-1 edges and sharing the same
    bicolored cycle of the two missing colors."""
    out = []
    for x in range(g.order):
        partners = {g.matchings[c][x] for c in g.colors}
        for y in partners:
            if y <= x:
                continue
            cols = joining_colors(g, x, y)
            if len(cols) != g.n - 1:
                continue
            i, j = [c for c in g.colors if c not in cols]
            ids = _cycle_ids(g, i, j)
            if ids[x] == ids[y]:
                out.append(CombinatorialHandle((x, y), (i, j)))
    return out


def eliminate_combinatorial_handle(g: ColoredGraph, h: CombinatorialHandle):
    """Delete the handle and weld; the represented closed manifold loses an
    S1 x S(n-1) bundle summand (for gems where the move applies)."""
    x, y = h.vertices
    cols = joining_colors(g, x, y)
    if len(cols) != g.n - 1:
        raise MoveError("(%d,%d) not joined by exactly n-1 edges" % (x, y))
    i, j = [c for c in g.colors if c not in cols]
    if set(h.missing) != {i, j}:
        raise MoveError("missing colors mismatch")
    ids = _cycle_ids(g, i, j)
    if ids[x] != ids[y]:
        raise MoveError("(%d,%d) do not share their {%d,%d}-cycle" % (x, y, i, j))
    keep = [w for w in range(g.order) if w not in (x, y)]
    index = {w: k for k, w in enumerate(keep)}
    matchings = []
    for c in g.colors:
        m = list(g.matchings[c])
        if c in (i, j):
            a, b = m[x], m[y]
            m[a], m[b] = b, a
        matchings.append(tuple(index[m[w]] for w in keep))
    return ColoredGraph(g.n, matchings)


# -- quadricolors ---------------------------------------------------------------


@dataclass(frozen=True)
class Quadricolor:
    """Four vertices P0..P3 of a 4-colored graph with P_i, P_{i+1} being
    i-adjacent, P_i off the {i+1,i+2}-cycle shared by the other three; P4
    and P5 are the 1-neighbors of P0 and P3 (the attachment vertices)."""
    vertices: tuple        # (P0, P1, P2, P3)
    attachments: tuple     # (P4, P5)

    @property
    def p(self):
        return self.vertices

    def triple_edges(self):
        """The three vertex pairs that receive the added-color edges."""
        p0, p1, p2, p3 = self.vertices
        p4, p5 = self.attachments
        return ((p0, p1), (p2, p3), (p4, p5))


def quadricolor_at(g4: ColoredGraph, p0: int, p1: int, p2: int, p3: int):
    """Validate the pattern and return the Quadricolor, or None."""
    if g4.n != 3:
        raise MoveError("quadricolors live in 4-colored graphs")
    p = (p0, p1, p2, p3)
    if len(set(p)) != 4:
        return None
    for i in range(4):
        if g4.matchings[i][p[i]] != p[(i + 1) % 4]:
            return None
    for i in range(4):
        c1, c2 = (i + 1) % 4, (i + 2) % 4
        cyc = g4.residue_of(p[(i + 1) % 4], (c1, c2)).vertices
        others = {p[(i + 1) % 4], p[(i + 2) % 4], p[(i + 3) % 4]}
        if not others <= cyc or p[i] in cyc:
            return None
    p4 = g4.matchings[1][p0]
    p5 = g4.matchings[1][p3]
    if len({p0, p1, p2, p3, p4, p5}) != 6:
        return None
    return Quadricolor(p, (p4, p5))


def find_quadricolors(g4: ColoredGraph) -> list:
    """All quadricolors of a 4-colored graph."""
    out = []
    for p0 in range(g4.order):
        p1 = g4.matchings[0][p0]
        p2 = g4.matchings[1][p1]
        p3 = g4.matchings[2][p2]
        if g4.matchings[3][p3] != p0:
            continue
        q = quadricolor_at(g4, p0, p1, p2, p3)
        if q is not None:
            out.append(q)
    return out


def smooth_quadricolor(g4: ColoredGraph, q: Quadricolor) -> ColoredGraph:
    """Exchange the three 1-colored edges of the quadricolor:
    {P1P2, P0P4, P3P5} become {P0P1, P2P3, P4P5}.

    On the represented 3-manifold this performs the Dehn surgery along the
    complementary knot of the framed component owning the quadricolor,
    which cancels that component from the surgery description.
    """
    p0, p1, p2, p3 = q.vertices
    p4, p5 = q.attachments
    m = list(g4.matchings[1])
    if not (m[p1] == p2 and m[p0] == p4 and m[p3] == p5):
        raise MoveError("quadricolor 1-edges are not in the unsmoothed position")
    m[p0], m[p1] = p1, p0
    m[p2], m[p3] = p3, p2
    m[p4], m[p5] = p5, p4
    matchings = list(g4.matchings)
    matchings[1] = tuple(m)
    return ColoredGraph(g4.n, matchings)


def unsmooth_quadricolor(g4: ColoredGraph, q: Quadricolor) -> ColoredGraph:
    """Inverse of smooth_quadricolor (re-attachment of the 2-handle)."""
    p0, p1, p2, p3 = q.vertices
    p4, p5 = q.attachments
    m = list(g4.matchings[1])
    if not (m[p0] == p1 and m[p2] == p3 and m[p4] == p5):
        raise MoveError("quadricolor 1-edges are not in the smoothed position")
    m[p1], m[p2] = p2, p1
    m[p0], m[p4] = p4, p0
    m[p3], m[p5] = p5, p3
    matchings = list(g4.matchings)
    matchings[1] = tuple(m)
    return ColoredGraph(g4.n, matchings)


# -- sphere certification ---------------------------------------------------------


@dataclass
class SphereCertificate:
    certified: bool
    reduction_trace: list = field(default_factory=list)
    obstruction: str = ""


def _greedy_reduce(g: ColoredGraph, rng) -> tuple:
    """One greedy dipole-reduction run; returns (final_graph, trace)."""
    trace = []
    while g.order > 2:
        found = None
        for r in range(g.n, 0, -1):
            dips = find_dipoles(g, r)
            if dips:
                dips.sort(key=lambda d: d.vertices)
                found = dips[rng.randrange(len(dips))] if rng else dips[0]
                break
        if found is None:
            break
        trace.append((found.vertices, found.colors))
        g, _ = eliminate_dipole(g, found)
    return g, trace


def certify_sphere(g: ColoredGraph, restarts: int = 32, seed: int = 0) -> SphereCertificate:
    """Try to certify that a closed-manifold gem represents the sphere.

    Dimension 2 is exact (genus 0).  Dimension 3 runs greedy dipole
    elimination (highest order first, deterministic first pass, then
    seeded random restarts); certification means reduction to the order-2
    graph.  A negative result is inconclusive, except when the homology
    obstruction fires.
    """
    g.require_connected()
    if g.n == 2:
        ok = g.regular_genus_eps((0, 1, 2)) == 0
        return SphereCertificate(ok, [], "" if ok else "positive genus")
    rank, torsion = h1_group(g)
    if rank or torsion:
        return SphereCertificate(False, [],
                                 "H_1 is nontrivial (rank %d, torsion %r)" % (rank, torsion))
    reduced, trace = _greedy_reduce(g, None)
    if reduced.order == 2:
        return SphereCertificate(True, trace)
    rng = random.Random(seed)
    for _ in range(restarts):
        reduced, trace = _greedy_reduce(g, rng)
        if reduced.order == 2:
            return SphereCertificate(True, trace)
    return SphereCertificate(False, [], "reduction stuck at order %d" % reduced.order)


# -- closure: attaching 3-handles via rho-pair switchings ---------------------------


@dataclass
class ClosureResult:
    graph: ColoredGraph
    lost_summands: int
    switched_pairs: list
    trace: list


def _residue_without_color(g: ColoredGraph, color: int) -> ColoredGraph:
    """The graph with one color dropped; valid when that residue is connected."""
    matchings = [m for c, m in enumerate(g.matchings) if c != color]
    return ColoredGraph(g.n - 1, matchings)


def _break_cycle_dipole(g: ColoredGraph, pair: RhoPair):
    """Prop-style preparation of a rho_4-pair: insert a 3-dipole on the
    {i,4}-cycle containing the pair so that the pair becomes a rho_3-pair.

    Returns the new graph; the two new vertices are order, order+1 and
    form a combinatorial handle after the switching.
    """
    i = pair.color
    (a, b), (c, d) = pair.edges
    cyc = None
    for cycle in g.bicolored_cycles(i, 4):
        if a in cycle and c in cycle:
            cyc = cycle
            break
    if cyc is None:
        raise MoveError("pair does not lie on a common {%d,4}-cycle" % i)
    # walk the cycle; cut one i-edge and one 4-edge separating e from f
    L = len(cyc)
    pos = {v: k for k, v in enumerate(cyc)}
    # edges along the cycle: (cyc[k], cyc[k+1]) alternating colors
    def edge_color(k):
        u, v = cyc[k], cyc[(k + 1) % L]
        return i if g.matchings[i][u] == v else 4
    ke = min(pos[a], pos[b]) if abs(pos[a] - pos[b]) == 1 else L - 1
    kf = min(pos[c], pos[d]) if abs(pos[c] - pos[d]) == 1 else L - 1
    # pick one i-edge and one 4-edge, one on each arc strictly between e and f
    arc1 = [(k % L) for k in range(ke + 1, ke + 1 + ((kf - ke) % L))][:-1]
    arc2 = [(k % L) for k in range(kf + 1, kf + 1 + ((ke - kf) % L))][:-1]
    cut_i = next((k for k in arc1 if edge_color(k) == i), None)
    cut_4 = next((k for k in arc2 if edge_color(k) == 4), None)
    if cut_i is None or cut_4 is None:
        cut_i = next((k for k in arc2 if edge_color(k) == i), None)
        cut_4 = next((k for k in arc1 if edge_color(k) == 4), None)
    if cut_i is None or cut_4 is None:
        raise MoveError("cannot separate the pair on its {%d,4}-cycle" % i)
    ai, bi = cyc[cut_i], cyc[(cut_i + 1) % L]
    a4, b4 = cyc[cut_4], cyc[(cut_4 + 1) % L]
    cls = g.bipartition()
    if cls is None:
        raise MoveError("closure requires a bipartite gem")
    # new vertex x attaches to ai (color i) and to whichever of a4, b4 lies
    # in ai's bipartition class, so that every new edge crosses the classes
    other = tuple(cc for cc in g.colors if cc not in (i, 4))
    site_cuts = {i: (ai, bi)}
    site_cuts[4] = (a4, b4) if cls[a4] == cls[ai] else (b4, a4)
    return add_dipole(g, DipoleSite(other, site_cuts))


def close_manifold(g: ColoredGraph, rank: int, budget: int = 2000,
                   restarts: int = 32) -> ClosureResult:
    """Attach the missing 3- and 4-handles through rho-pair switchings.

    The caller asserts that the boundary is a connected sum of `rank`
    copies of S1 x S2 (H_1 of the color-4 residue is checked to have free
    rank `rank` as a necessary condition).  The routine looks for `rank`
    rho_3-pairs of the 4-hat-residue whose joint switching makes it a
    certified 3-sphere, performs the switchings in the 5-colored graph
    (detouring through a 3-dipole and a combinatorial-handle cancellation
    for pairs that are rho_4 there), and returns the closed gem together
    with the number of S1 x S3 summands lost.
    """
    g.require_connected()
    if g.n != 4:
        raise MoveError("closure operates on 5-colored graphs")
    if g.residue_count((0, 1, 2, 3)) != 1:
        raise MoveError("the color-4 residue must be connected")
    lam = _residue_without_color(g, 4)
    r1, t1 = h1_group(lam)
    if r1 != rank or t1:
        raise MoveError("boundary H_1 is not Z^%d (got rank %d, torsion %r)"
                        % (rank, r1, t1))
    if rank == 0:
        return ClosureResult(g, 0, [], [])

    pairs = []
    for i in range(4):
        pairs.extend(p for p in find_rho_pairs(lam, i, 3))
    if len(pairs) < rank:
        raise MoveError("closure not certified: only %d rho_3-pairs available"
                        % len(pairs))

    import itertools as _it
    tried = 0
    chosen = None
    for combo in _it.combinations(range(len(pairs)), rank):
        tried += 1
        if tried > budget:
            break
        sel = [pairs[k] for k in combo]
        used = set()
        ok = True
        for p in sel:
            for e in p.edges:
                if e in used:
                    ok = False
                used.add(e)
        if not ok:
            continue
        test = lam
        try:
            for p in sel:
                test = switch_rho_pair(test, p)
        except MoveError:
            continue
        if not test.is_connected():
            continue
        cert = certify_sphere(test, restarts=restarts)
        if cert.certified:
            chosen = sel
            break
    if chosen is None:
        raise MoveError("closure not certified: no switching set yields a "
                        "certified 3-sphere residue")

    trace = []
    work = g
    pending = []            # inserted (x, y, color) to cancel at the end
    for p in chosen:
        ids = _cycle_ids(work, p.color, 4)
        (a, _b), (c, _d) = p.edges
        if ids[a] == ids[c]:        # also a rho_4-pair in the 5-colored graph
            work = _break_cycle_dipole(work, p)
            pending.append((work.order - 2, work.order - 1, p.color))
            trace.append(("3-dipole", work.order - 2, work.order - 1))
        work = switch_rho_pair(work, p)
        trace.append(("switch", p.color, p.edges))
    # the inserted dipoles have become combinatorial handles; cancel them
    # from the top so lower indices stay valid
    for x, y, color in sorted(pending, reverse=True):
        handle = CombinatorialHandle((x, y), (color, 4))
        work = eliminate_combinatorial_handle(work, handle)
        trace.append(("handle", (x, y)))
    return ClosureResult(work, len(pending), chosen, trace)
