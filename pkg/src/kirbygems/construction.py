"""From Kirby diagrams to colored graphs.

The 4-colored graph of the boundary 3-manifold is drawn over the link
diagram: every strand is flanked by two rails and every crossing becomes
a subgraph of order eight, one {0,2}-doubled pair (a bigon) for each of
the four points where a rail of the under-strand passes below a rail of
the over-strand.  The rails, cut at the bigons, close into cycles that
are alternately colored 1 and 3.

The five-colored graph of the 4-manifold adds the color-4 matching: away
from the attachment gadgetry every 4-edge doubles a 1-edge; at the
quadricolor of a framed component the three 4-edges of the triple are
installed instead, and the dotted-component rules place the remaining
special 4-edges before the forced {1,4}-cycle completion.

Wiring constants below were pinned by exact oracles (first homology of
every construction equals the cokernel of the framed linking matrix,
including torsion; the regular genus of the boundary graph with respect
to (1,0,2,3) equals the crossing count plus one; smoothing a quadricolor
cancels its component from the surgery description).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .colored_graph import ColoredGraph
from .kirby import (OVER, UNDER, KirbyDiagram, Choices, DiagramError,
                    over_in, over_out, quadricolor_site_positions, validate)
from .moves import Quadricolor, find_quadricolors

L, R = 0, 1


def _entering_slot(port, side):
    return (port, -1) if side == L else (port, +1)


def _exiting_slot(port, side):
    return (port, +1) if side == L else (port, -1)


def _u_first_over(sign):
    """Under-track met first when walking the over passage."""
    return L if sign > 0 else R


def _o_first_under(sign):
    """Over-track met first when walking the under passage."""
    return R if sign > 0 else L


@dataclass
class RailEdge:
    a: int
    b: int
    kind: str                  # "arc" | "overmid" | "tunnel"
    corner: tuple = None       # (crossing, corner) for arc edges, else None
    arc: tuple = None          # canonical arc id (sorted port pair) for arc edges
    color: int = None          # 1 or 3, assigned by the phase rule


@dataclass
class LambdaLayout:
    """Construction metadata of a boundary graph: vertex keys
    (crossing, under_side, over_side, position), slot map, rail edges,
    and the rail-cycle list.  Downstream code uses it to locate
    quadricolors on the diagram and to attach the color-4 matching."""
    diagram: KirbyDiagram
    vertex_keys: list
    vid: dict
    rail_edges: list
    cycles: list               # lists of RailEdge indices
    slot_vertex: dict          # (crossing, port, +-1) -> vertex


# Wiring rules, frozen by the oracle battery (see tests/test_construction).
# x1: bigon vertex at which the under-rail arrives from its in-port;
# x2: bigon vertex at which the tunnel edge arrives; both indexed along
# the over-direction (0 = upstream) as functions of (sign, under_side).
def _x1(sign, u):
    return u if sign > 0 else 1 - u


def _x2(sign, u):
    return u if sign > 0 else 1 - u


def _phase_anchor(edge, diagram, shade):
    """Color of an anchor rail edge: 1 on the shade-0 side."""
    return 1 if shade[diagram.face_of_corner(*edge.corner)] == 0 else 3


PHASE_MODE = "min"


def build_lambda(d: KirbyDiagram, with_layout: bool = False):
    """The 4-colored graph of the boundary 3-manifold of the diagram.

    Requires a validated, self-framed diagram (use kirby.self_frame).
    Eight vertices per crossing; bipartite; every 3-residue has genus 0.
    """
    report = validate(d)
    if not report.ok:
        raise DiagramError("invalid diagram: %s" % "; ".join(report.problems))
    if d.n_crossings == 0:
        raise DiagramError("empty diagram")

    vertex_keys = []
    vid = {}
    for c in range(d.n_crossings):
        for u in (L, R):
            for o in (L, R):
                for e in (0, 1):
                    vid[(c, u, o, e)] = len(vertex_keys)
                    vertex_keys.append((c, u, o, e))
    nv = len(vertex_keys)

    # slot -> vertex
    slot_vertex = {}
    for c in range(d.n_crossings):
        s = d.signs[c]
        uf, us = _u_first_over(s), 1 - _u_first_over(s)
        of, os_ = _o_first_under(s), 1 - _o_first_under(s)
        for o in (L, R):
            p, q = _entering_slot(over_in(s), o), _exiting_slot(over_out(s), o)
            slot_vertex[(c,) + p] = vid[(c, uf, o, 0)]
            slot_vertex[(c,) + q] = vid[(c, us, o, 1)]
        for u in (L, R):
            p, q = _entering_slot(0, u), _exiting_slot(2, u)
            slot_vertex[(c,) + p] = vid[(c, u, of, _x1(s, u))]
            slot_vertex[(c,) + q] = vid[(c, u, os_, 1 - _x2(s, u))]

    # bigons: colors 0 and 2 both join (c,u,o,0)-(c,u,o,1)
    m0 = [0] * nv
    m2 = [0] * nv
    for c in range(d.n_crossings):
        for u in (L, R):
            for o in (L, R):
                a, b = vid[(c, u, o, 0)], vid[(c, u, o, 1)]
                m0[a], m0[b] = b, a
                m2[a], m2[b] = b, a

    # rail edges: internal (over-middle, tunnel) and along arcs
    rails = []
    for c in range(d.n_crossings):
        s = d.signs[c]
        uf, us = _u_first_over(s), 1 - _u_first_over(s)
        of, os_ = _o_first_under(s), 1 - _o_first_under(s)
        for o in (L, R):
            rails.append(RailEdge(vid[(c, uf, o, 1)], vid[(c, us, o, 0)],
                                  "overmid"))
        for u in (L, R):
            rails.append(RailEdge(vid[(c, u, of, 1 - _x1(s, u))],
                                  vid[(c, u, os_, _x2(s, u))], "tunnel"))
    seen_arcs = set()
    for (c, p), (c2, p2) in d.adj.items():
        key = tuple(sorted([(c, p), (c2, p2)]))
        if key in seen_arcs:
            continue
        seen_arcs.add(key)
        for sigma in (+1, -1):
            a = slot_vertex[(c, p, sigma)]
            b = slot_vertex[(c2, p2, -sigma)]
            corner = (c, p) if sigma == +1 else (c, (p - 1) % 4)
            rails.append(RailEdge(a, b, "arc", corner=corner, arc=key))

    # each vertex carries exactly two rail ends
    incidence = [[] for _ in range(nv)]
    for idx, e in enumerate(rails):
        incidence[e.a].append(idx)
        incidence[e.b].append(idx)
    for v, inc in enumerate(incidence):
        if len(inc) != 2:
            raise DiagramError("rail wiring broken at vertex %r (%d ends)"
                               % (vertex_keys[v], len(inc)))

    # rail cycles, alternately colored 1/3; anchor by the chessboard shade
    shade = d.chessboard()
    cycles = []
    placed = [False] * len(rails)
    for start in range(len(rails)):
        if placed[start]:
            continue
        cyc = [start]
        placed[start] = True
        v = rails[start].b
        while True:
            nxt = [k for k in incidence[v] if k != cyc[-1]]
            k = nxt[0]
            if k == cyc[0]:
                break
            cyc.append(k)
            placed[k] = True
            e = rails[k]
            v = e.b if e.a == v else e.a
        if len(cyc) % 2 != 0:
            raise DiagramError("odd rail cycle: wiring rules violated")
        anchors = [k for k in cyc if rails[k].kind == "arc"]
        if anchors and PHASE_MODE == "shade":
            k0 = anchors[0]
            c0 = _phase_anchor(rails[k0], d, shade)
            for j, k in enumerate(cyc):
                offset = (j - cyc.index(k0)) % 2
                rails[k].color = c0 if offset == 0 else 4 - c0
        else:
            for j, k in enumerate(cyc):
                rails[k].color = 1 if j % 2 == 0 else 3
        cycles.append(cyc)

    m1 = [-1] * nv
    m3 = [-1] * nv
    for e in rails:
        m = m1 if e.color == 1 else m3
        if m[e.a] != -1 or m[e.b] != -1:
            raise DiagramError("rail coloring clash")
        m[e.a], m[e.b] = e.b, e.a
    g = ColoredGraph(3, [m0, m1, m2, m3])
    if with_layout:
        return g, LambdaLayout(d, vertex_keys, vid, rails, cycles, slot_vertex)
    return g


# -- quadricolor location -----------------------------------------------------


@dataclass
class SiteAssignment:
    component: int
    quadricolor: Quadricolor
    arc: tuple                 # diagram arc hosting the site, if identifiable


def _component_of_crossing_side(d: KirbyDiagram, crossing, role):
    where = d.component_of_passage()
    return where[(crossing, role)]


def locate_quadricolors(d: KirbyDiagram, lam: ColoredGraph,
                        layout: LambdaLayout):
    """All quadricolors of the boundary graph, tagged with the diagram arc
    their strand-parallel edges run along (None for fully internal ones)
    and the framed component they belong to."""
    out = []
    rail_by_pair = {}
    for e in layout.rail_edges:
        rail_by_pair[frozenset((e.a, e.b))] = e
    where = d.component_of_passage()
    for q in find_quadricolors(lam):
        p0, p1, p2, p3 = q.vertices
        arc = None
        comp = None
        for (a, b) in ((p1, p2), (p3, p0)):
            e = rail_by_pair.get(frozenset((a, b)))
            if e is not None and e.kind == "arc":
                arc = e.arc
                (c, p), _ = e.arc
                role = UNDER if p in (0, 2) else OVER
                comp = where[(c, role)]
                break
        if comp is None:
            c = layout.vertex_keys[p0][0]
            comp = where[(c, UNDER)]
        out.append(SiteAssignment(comp, q, arc))
    return out


def arc_after_event(d: KirbyDiagram, comp_index, event_index):
    """The diagram arc leaving event `event_index` of the component."""
    comp = d.components[comp_index]
    p = comp.passages[event_index]
    s = d.signs[p.crossing]
    tail = (p.crossing, 2 if p.role == UNDER else over_out(s))
    return tuple(sorted([tail, d.adj[tail]]))


def choose_quadricolors(d: KirbyDiagram, lam: ColoredGraph,
                        layout: LambdaLayout, choices: Choices = None):
    """One quadricolor per framed component, honoring cut choices when
    given, else the first admissible site."""
    sites = locate_quadricolors(d, lam, layout)
    chosen = {}
    for i, comp in enumerate(d.components):
        if comp.kind != "framed":
            continue
        mine = [s for s in sites if s.component == i]
        if not mine:
            raise DiagramError("no quadricolor found for framed component %d "
                               "(self_frame should have added a curl pair)" % i)
        pick = None
        if choices is not None and i in choices.cuts:
            arc = arc_after_event(d, i, choices.cuts[i])
            for s in mine:
                if s.arc == arc:
                    pick = s
                    break
            if pick is None:
                raise DiagramError("no quadricolor on the cut arc of "
                                   "component %d" % i)
        else:
            mine.sort(key=lambda s: s.quadricolor.vertices)
            pick = mine[0]
        chosen[i] = pick
    return chosen


def find_quadricolor_sites(d: KirbyDiagram, lam_pair=None, choices=None):
    """The designated quadricolor of each framed component (spec surface).

    Dotted-only diagrams return an empty mapping."""
    if lam_pair is None:
        lam, layout = build_lambda(d, with_layout=True)
    else:
        lam, layout = lam_pair
    if all(c.kind == "dotted" for c in d.components):
        return {}
    return choose_quadricolors(d, lam, layout, choices)


# -- the five-colored graph ----------------------------------------------------


def build_gamma_framed(d: KirbyDiagram, choices: Choices = None,
                       with_layout: bool = False):
    """Gem of the compact 4-manifold of a framed-only diagram: double all
    1-colored edges by 4-colored ones except at one quadricolor per
    component, which receives the triple {P0P1, P2P3, P4P5} instead."""
    if d.m != 0:
        raise DiagramError("diagram has dotted components: use build_gamma_dotted")
    lam, layout = build_lambda(d, with_layout=True)
    chosen = choose_quadricolors(d, lam, layout, choices)
    m4 = list(lam.matchings[1])
    for site in chosen.values():
        for (a, b) in site.quadricolor.triple_edges():
            m4[a], m4[b] = b, a
    g = ColoredGraph(4, list(lam.matchings) + [tuple(m4)])
    if with_layout:
        return g, layout, chosen
    return g


def build_gamma(d: KirbyDiagram, choices: Choices = None):
    if d.m == 0:
        return build_gamma_framed(d, choices)
    return build_gamma_dotted(d, choices)


def _complete_14_cycles(lam: ColoredGraph, m4):
    """Close every {1,4}-colored path by adding the missing 4-edges.

    Vertices still lacking a 4-edge are endpoints of maximal alternating
    {1,4}-paths; each such path is closed by one new 4-edge between its
    two ends.  Isolated 1-edges (both ends free) just get doubled."""
    m1 = lam.matchings[1]
    n = lam.order
    for start in range(n):
        if m4[start] != -1:
            continue
        # walk the {1,4}-path from this free end: first along color 1
        v, col = start, 1
        while True:
            v = m1[v] if col == 1 else m4[v]
            nxt = 4 - col
            if nxt == 4 and m4[v] == -1:
                break
            col = nxt
        if v == start:
            raise DiagramError("{1,4}-path closed onto itself inconsistently")
        m4[start], m4[v] = v, start
    return m4


def build_gamma_dotted(d: KirbyDiagram, choices: Choices = None,
                       with_layout: bool = False):
    """Gem of the compact 4-manifold of a diagram with dotted components.

    Follows the attachment sequence: quadricolor triples on framed
    components, 4-edges along the highlighted segments, doubled 0-edges
    at undercrossings met by the sequence, the (v,v') and (w,w') edges of
    each dotted component, and the {1,4}-cycle completion.
    """
    lam, layout = build_lambda(d, with_layout=True)
    if choices is None:
        choices = Choices()
    m4 = [-1] * lam.order

    def add4(a, b):
        if m4[a] != -1 or m4[b] != -1 or a == b:
            raise DiagramError("conflicting 4-edge at (%d,%d)" % (a, b))
        m4[a], m4[b] = b, a

    chosen = choose_quadricolors(d, lam, layout, choices)
    for site in chosen.values():
        for (a, b) in site.quadricolor.triple_edges():
            add4(a, b)

    # highlighted segments: double the flanking rail 1-edges and the
    # 0-edges of undercrossings met along the way
    for i, arcs in (choices.highlights or {}).items():
        _attach_highlights(d, lam, layout, m4, add4, i, arcs)

    for j, comp in enumerate(d.components):
        if comp.kind != "dotted":
            continue
        if j not in choices.marks:
            raise DiagramError("dotted component %d needs MARK choices" % j)
        _attach_dotted(d, lam, layout, m4, add4, j, choices.marks[j], choices)

    _complete_14_cycles(lam, m4)
    g = ColoredGraph(4, list(lam.matchings) + [tuple(m4)])
    if with_layout:
        return g, layout, chosen
    return g


def _rail_edges_of_arc(layout: LambdaLayout, arc):
    return [e for e in layout.rail_edges if e.kind == "arc" and e.arc == arc]


def _attach_highlights(d, lam, layout, m4, add4, comp_index, arc_positions):
    """Double by 4-edges the 1-colored rail edges parallel to each
    highlighted segment, and the 0-edges of undercrossings met by the
    sequence (both bigons of the under-passage at such a crossing)."""
    comp = d.components[comp_index]
    k = len(comp.passages)
    for pos in arc_positions:
        arc = arc_after_event(d, comp_index, pos % k)
        for e in _rail_edges_of_arc(layout, arc):
            if e.color == 1:
                add4(e.a, e.b)
        # the crossing entered after this segment, when passed under,
        # contributes its doubled 0-edges
        nxt = comp.passages[(pos + 1) % k]
        if nxt.role == UNDER:
            c = nxt.crossing
            s = d.signs[c]
            of = _o_first_under(s)
            for u in (L, R):
                a = layout.vid[(c, u, of, 0)]
                b = layout.vid[(c, u, of, 1)]
                if m4[a] == -1 and m4[b] == -1:
                    add4(a, b)


def _attach_dotted(d, lam, layout, m4, add4, j, marks, choices):
    """The (v_j, v_j') and (w_j, w_j') 4-edges of a dotted component.

    The marked points split the component into its over-part and its
    under-part; at each marked point the 1-colored rail edge on the side
    of the declared region has two endpoints, and corresponding endpoints
    of the two marked edges are joined (respecting the bipartition)."""
    h_pos, hp_pos, region = marks
    cls = lam.bipartition()
    pairs = []
    for pos in (h_pos, hp_pos):
        arc = arc_after_event(d, j, pos)
        rail_edges = _rail_edges_of_arc(layout, arc)
        siders = [e for e in rail_edges
                  if d.face_of_corner(*e.corner) == region]
        if len(siders) != 1:
            raise DiagramError(
                "marked point of component %d after event %d does not lie "
                "on region %d" % (j, pos, region))
        e = siders[0]
        if e.color != 1:
            raise DiagramError(
                "the rail edge on region %d at the marked point is "
                "3-colored; choose the other region or move the mark"
                % region)
        pairs.append(e)
    e1, e2 = pairs
    if cls[e1.a] == cls[e2.a]:
        add4(e1.a, e2.b)
        add4(e1.b, e2.a)
    else:
        add4(e1.a, e2.a)
        add4(e1.b, e2.b)


# -- bounds ------------------------------------------------------------------


@dataclass
class BoundsReport:
    s: int
    s_bar: int
    l: int
    m: int
    t: dict
    genus_bound: int
    complexity_bound: int
    m_alpha: int = None
    framed_genus_bound: int = None

    def lines(self):
        out = ["counts: s=%d s_bar=%d l=%d m=%d t=%s"
               % (self.s, self.s_bar, self.l, self.m,
                  {k: v for k, v in sorted(self.t.items())})]
        out.append("regular genus bound: G(M) <= s + s_bar + (l-m) + 1 = %d"
                   % self.genus_bound)
        out.append("gem-complexity bound: k(M) <= 2s + 2s_bar + 2m - 1 + "
                   "2*sum(t) = %d" % self.complexity_bound)
        if self.framed_genus_bound is not None:
            out.append("framed-link genus bound: G(M) <= m_alpha + l = %d"
                       % self.framed_genus_bound)
        return out


def bounds_report(d: KirbyDiagram, t: dict) -> BoundsReport:
    """The genus and gem-complexity bounds read off a self-framed diagram."""
    s, sbar, l, m = d.s, d.s_bar, d.l, d.m
    rep = BoundsReport(s, sbar, l, m, dict(t),
                       s + sbar + (l - m) + 1,
                       2 * s + 2 * sbar + 2 * m - 1 + 2 * sum(t.values()))
    if m == 0:
        from .kirby import regions
        rr = regions(d)
        rep.m_alpha = rr.m_alpha
        rep.framed_genus_bound = rr.m_alpha + l
    return rep
