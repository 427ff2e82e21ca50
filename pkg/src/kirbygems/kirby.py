"""Kirby diagrams as planar combinatorial data.

A diagram is a list of components (dotted or framed-with-integer) whose
cyclic event sequences traverse crossings, plus the planar structure:
every crossing has four ports in counterclockwise order, port 0 being
the incoming under-strand, and an involution pairs ports into arcs.

Conventions (fixed once, used by the whole pipeline):
  * ports 0,1,2,3 counterclockwise; under-strand travels 0 -> 2;
  * sign +1 means the over-strand travels 3 -> 1, sign -1 means 1 -> 3;
  * a curl is an ordinary self-crossing whose two passages are adjacent
    in the component's event sequence, the short arc being its loop.

The writhe/linking computations double as an independent check on every
gem built downstream (first homology of a surgery is the cokernel of the
framed linking matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field


OVER = "O"
UNDER = "U"


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Passage:
    crossing: int
    role: str                   # OVER or UNDER


@dataclass
class Component:
    kind: str                   # "framed" | "dotted"
    framing: object             # int for framed, None for dotted
    passages: list = field(default_factory=list)


def under_in(c):
    return 0


def under_out(c):
    return 2


def over_in(sign):
    return 3 if sign > 0 else 1


def over_out(sign):
    return 1 if sign > 0 else 3


@dataclass
class Choices:
    """User choices steering the dotted/framed attachment.

    cuts[i]: event index of framed component i after which the component
    is cut (the quadricolor site sits on the arc leaving that event).
    highlights[i]: ordered list of arc ids (as (crossing, port) tails)
    traversed by the highlighted segment sequence of component i.
    marks[j]: (h_pos, hp_pos, region) for dotted component j, where the
    positions are event indices after which H_j and H'_j sit, and region
    is a face id of regions().
    """
    cuts: dict = field(default_factory=dict)
    highlights: dict = field(default_factory=dict)
    marks: dict = field(default_factory=dict)


class KirbyDiagram:
    """A planar framed/dotted link diagram with explicit port pairings."""

    def __init__(self, components, signs, adj, curls=()):
        self.components = components
        self.signs = list(signs)
        self.adj = dict(adj)
        self.curls = set(curls)
        self._faces = None

    # -- elementary counts -------------------------------------------------

    @property
    def n_crossings(self):
        return len(self.signs)

    @property
    def l(self):
        return len(self.components)

    @property
    def m(self):
        return sum(1 for c in self.components if c.kind == "dotted")

    def passage_ports(self, crossing, role):
        if role == UNDER:
            return 0, 2
        s = self.signs[crossing]
        return over_in(s), over_out(s)

    def component_of_passage(self):
        """Map (crossing, role) -> component index."""
        where = {}
        for i, comp in enumerate(self.components):
            for p in comp.passages:
                where[(p.crossing, p.role)] = i
        return where

    def writhe(self, i):
        comp = self.components[i]
        mine = {(p.crossing, p.role) for p in comp.passages}
        w = 0
        for c in range(self.n_crossings):
            if (c, OVER) in mine and (c, UNDER) in mine:
                w += self.signs[c]
        return w

    def linking_number(self, i, j):
        where = self.component_of_passage()
        total = 0
        for c in range(self.n_crossings):
            a = where.get((c, UNDER))
            b = where.get((c, OVER))
            if {a, b} == {i, j} and a != b:
                total += self.signs[c]
        assert total % 2 == 0
        return total // 2

    def linking_matrix(self):
        """Framed linking matrix of the underlying surgery description
        (dotted components count as 0-framed).  H_1 of the boundary
        3-manifold is the cokernel of this matrix."""
        l = self.l
        q = [[0] * l for _ in range(l)]
        for i in range(l):
            comp = self.components[i]
            q[i][i] = 0 if comp.kind == "dotted" else comp.framing
            for j in range(i + 1, l):
                v = self.linking_number(i, j)
                q[i][j] = q[j][i] = v
        return q

    @property
    def s(self):
        """Crossing count; curls are crossings of the diagram."""
        return self.n_crossings

    @property
    def s_bar(self):
        """Undercrossings of framed components."""
        where = self.component_of_passage()
        return sum(1 for c in range(self.n_crossings)
                   if self.components[where[(c, UNDER)]].kind == "framed")

    # -- planar structure ----------------------------------------------------

    def check_planar_map(self):
        ports = {(c, p) for c in range(self.n_crossings) for p in range(4)}
        if set(self.adj) != ports:
            raise DiagramError("port pairing must cover every port once")
        for k, v in self.adj.items():
            if v == k or self.adj.get(v) != k:
                raise DiagramError("port pairing is not a fixed-point-free involution")

    def faces(self):
        """Faces of the 4-valent map, each a tuple of directed arcs
        ((c, p), (c', p')); the face lies to the left of each arc."""
        if self._faces is not None:
            return self._faces
        out = []
        seen = set()
        for c in range(self.n_crossings):
            for p in range(4):
                if (c, p) in seen:
                    continue
                walk = []
                cur = (c, p)
                while cur not in seen:
                    seen.add(cur)
                    head = self.adj[cur]
                    walk.append((cur, head))
                    cur = (head[0], (head[1] - 1) % 4)
                out.append(tuple(walk))
        self._faces = out
        return out

    def face_of_corner(self, crossing, corner):
        """Face id containing the corner between ports corner, corner+1."""
        # the face to the left of the directed arc leaving port corner+1...
        # walking out of port k the left side is the corner between k and k+1,
        # so the face left of directed arc ((c,k) -> adj) contains corner k.
        target = (crossing, (corner + 1) % 4)
        # directed arc out of port corner+1 has left corner = corner+1; we want
        # corner k: use the arc out of port k? its left corner is k.
        for fid, walk in enumerate(self.faces()):
            for (tail, _head) in walk:
                if tail == (crossing, corner):
                    return fid
        raise DiagramError("corner not found (corrupted map)")

    def chessboard(self):
        """2-coloring of faces (0/1), color 0 on face 0; faces across an
        arc always differ.  Raises if the map is not checkerboard-colorable,
        which signals broken planar data."""
        faces = self.faces()
        side = {}
        for fid, walk in enumerate(faces):
            for (tail, head) in walk:
                side[(tail, head)] = fid
        color = [-1] * len(faces)
        color[0] = 0
        stack = [0]
        while stack:
            f = stack.pop()
            for (tail, head) in faces[f]:
                g = side[(head, tail)]
                if color[g] == -1:
                    color[g] = 1 - color[f]
                    stack.append(g)
                elif color[g] == color[f]:
                    raise DiagramError("map is not checkerboard colorable")
        return color

    def euler_check(self):
        v = self.n_crossings
        e = 2 * self.n_crossings
        f = len(self.faces())
        return v - e + f == 2

    def is_connected_map(self):
        if self.n_crossings == 0:
            return len(self.components) <= 1
        seen = {0}
        stack = [0]
        while stack:
            c = stack.pop()
            for p in range(4):
                c2, _ = self.adj[(c, p)]
                if c2 not in seen:
                    seen.add(c2)
                    stack.append(c2)
        return len(seen) == self.n_crossings


def curl_passage_order(sign, order):
    """Expansion of a curl event: passage roles in traversal order and the
    loop's (tail, head) ports."""
    if order == "UO":
        return (UNDER, OVER), (under_out(None), over_in(sign))
    return (OVER, UNDER), (over_out(sign), under_in(None))


# -- diagram assembly from event lists -------------------------------------------


class DiagramBuilder:
    """Assemble a KirbyDiagram from per-component event lists.

    Events are ("X", crossing, role) or ("CURL", sign) or
    ("CURL", sign, order).  Crossing signs are declared once; arcs are
    wired from the traversal order, so only genuinely planar data needs
    the PD lines (see parse_kirby).
    """

    def __init__(self):
        self.signs = {}
        self.components = []
        self.curls = set()
        self._events = []

    def add_crossing(self, cid, sign):
        if cid in self.signs and self.signs[cid] != sign:
            raise DiagramError("crossing %r declared with two signs" % cid)
        self.signs[cid] = sign

    def add_component(self, kind, framing, events):
        self.components.append((kind, framing))
        self._events.append(list(events))

    def _fresh_id(self):
        k = len(self.signs)
        while k in self.signs:
            k += 1
        return k

    def build(self):
        # normalize crossing ids to 0..n-1
        ids = sorted(self.signs)
        rename = {cid: i for i, cid in enumerate(ids)}
        signs = [self.signs[cid] for cid in ids]
        comps = []
        expanded = []
        curls = set()
        for (kind, framing), events in zip(self.components, self._events):
            passages = []
            loops = []
            for ev in events:
                if ev[0] == "X":
                    _, cid, role = ev
                    passages.append(Passage(rename[cid], role))
                elif ev[0] == "CURL":
                    sign = ev[1]
                    order = ev[2] if len(ev) > 2 else "UO"
                    cid = self._fresh_id()
                    self.signs[cid] = sign
                    rename[cid] = len(rename)
                    signs.append(sign)
                    roles, loop = curl_passage_order(sign, order)
                    c = rename[cid]
                    curls.add(c)
                    passages.append(Passage(c, roles[0]))
                    passages.append(Passage(c, roles[1]))
                    loops.append((len(passages) - 2, loop, c))
                else:
                    raise DiagramError("unknown event %r" % (ev,))
            comps.append(Component(kind, framing, passages))
            expanded.append(loops)

        diagram = KirbyDiagram(comps, signs, {}, curls)
        adj = {}

        def connect(a, b):
            if a in adj or b in adj:
                raise DiagramError("port used twice while wiring arcs")
            adj[a] = b
            adj[b] = a

        # wire the loop arcs of curls
        for comp, loops in zip(comps, expanded):
            for (k, (tail_port, head_port), cid_local) in loops:
                c = comp.passages[k].crossing
                connect((c, tail_port), (c, head_port))
        # wire consecutive passages within each component
        for comp in comps:
            ps = comp.passages
            if not ps:
                raise DiagramError("crossingless component: add a curl pair first")
            for k, p in enumerate(ps):
                q = ps[(k + 1) % len(ps)]
                s_out = diagram.signs[p.crossing]
                s_in = diagram.signs[q.crossing]
                tail = (p.crossing,
                        under_out(None) if p.role == UNDER else over_out(s_out))
                head = (q.crossing,
                        under_in(None) if q.role == UNDER else over_in(s_in))
                if tail in adj and adj[tail] == head:
                    continue            # already wired as a curl loop
                connect(tail, head)
        diagram.adj = adj
        diagram.check_planar_map()
        return diagram


# -- validation ------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    problems: list
    notes: list

    def __str__(self):
        lines = ["VALID" if self.ok else "INVALID"]
        lines += ["problem: %s" % p for p in self.problems]
        lines += ["note: %s" % n for n in self.notes]
        return "\n".join(lines)


def good_position_ok(comp):
    """Overcrossings and undercrossings each consecutive in cyclic order."""
    roles = [p.role for p in comp.passages]
    if not roles:
        return True
    k = len(roles)
    switches = sum(1 for i in range(k) if roles[i] != roles[(i + 1) % k])
    return switches <= 2


def quadricolor_site_positions(d: KirbyDiagram, i: int):
    """Event positions of framed component i admitting a quadricolor: the
    cut goes after event k when event k and event k+1 belong to a curl and
    an undercrossing, or to two curls."""
    comp = d.components[i]
    ps = comp.passages
    out = []
    k = len(ps)
    for idx in range(k):
        a, b = ps[idx], ps[(idx + 1) % k]
        a_curl = a.crossing in d.curls
        b_curl = b.crossing in d.curls
        if a_curl and b_curl and a.crossing != b.crossing:
            out.append(idx)
        elif a_curl and b.role == UNDER and not b_curl:
            out.append(idx)
        elif b_curl and a.role == UNDER and not a_curl:
            out.append(idx)
    return out


def validate(d: KirbyDiagram) -> ValidationReport:
    problems, notes = [], []
    try:
        d.check_planar_map()
    except DiagramError as e:
        return ValidationReport(False, [str(e)], [])
    where = {}
    for i, comp in enumerate(d.components):
        for p in comp.passages:
            key = (p.crossing, p.role)
            if key in where:
                problems.append("passage %r listed twice" % (key,))
            where[key] = i
    for c in range(d.n_crossings):
        for role in (OVER, UNDER):
            if (c, role) not in where:
                problems.append("crossing %d lacks an %s passage" % (c, role))
    if not d.is_connected_map():
        problems.append("diagram is not connected (connect components or "
                        "use graph connected sums of the resulting gems)")
    if not d.euler_check():
        problems.append("planar incidences fail the Euler check")
    for i, comp in enumerate(d.components):
        if comp.kind == "framed":
            w = d.writhe(i)
            if w != comp.framing:
                problems.append("component %d not self-framed: writhe %d, "
                                "framing %d" % (i, w, comp.framing))
            if not quadricolor_site_positions(d, i):
                problems.append("component %d has no quadricolor site: "
                                "add an opposite curl pair" % i)
        else:
            if not good_position_ok(comp):
                problems.append("dotted component %d not in good position" % i)
            notes.append("component %d: dotted; unknottedness/unlinkedness "
                         "is asserted by the caller, not verified" % i)
    return ValidationReport(not problems, problems, notes)


# -- self-framing ------------------------------------------------------------------


def self_frame(d: KirbyDiagram):
    """Add curls so every framed component is self-framed and has a
    quadricolor site.  Returns (new_diagram, t) with t[i] = 2 when writhe
    and framing already coincide, |difference| otherwise."""
    b = DiagramBuilder()
    for c in range(d.n_crossings):
        b.add_crossing(c, d.signs[c])
    t = {}
    for i, comp in enumerate(d.components):
        events = [("X", p.crossing, p.role) for p in comp.passages]
        if comp.kind == "framed":
            w = d.writhe(i)
            delta = comp.framing - w
            t[i] = 2 if delta == 0 else abs(delta)
            sgn = 1 if delta > 0 else -1
            extra = [("CURL", sgn, "UO")] * abs(delta)
            need_pair = delta == 0
            if abs(delta) == 1:
                # a lone curl needs an undercrossing neighbour for the site
                prev_roles = {p.role for p in comp.passages}
                if UNDER not in prev_roles:
                    need_pair = True
                else:
                    # insert the curl right before an undercrossing
                    k = next(j for j, p in enumerate(comp.passages)
                             if p.role == UNDER)
                    events = events[k:] + events[:k]
                    extra = extra + events
                    events = []
            if need_pair:
                extra += [("CURL", 1, "UO"), ("CURL", -1, "OU")]
            events = events + extra
        b.add_component(comp.kind, comp.framing, events)
    out = b.build()
    out = _ensure_sites(out, t)
    return out, t


def _ensure_sites(d: KirbyDiagram, t):
    missing = [i for i, comp in enumerate(d.components)
               if comp.kind == "framed" and not quadricolor_site_positions(d, i)]
    if not missing:
        return d
    b = DiagramBuilder()
    for c in range(d.n_crossings):
        b.add_crossing(c, d.signs[c])
    for i, comp in enumerate(d.components):
        events = [("X", p.crossing, p.role) for p in comp.passages]
        if i in missing:
            events += [("CURL", 1, "UO"), ("CURL", -1, "OU")]
        b.add_component(comp.kind, comp.framing, events)
    return b.build()


# -- regions ------------------------------------------------------------------------


@dataclass
class RegionReport:
    faces: list
    coloring: list
    outer: int
    m_alpha: int


def regions(d: KirbyDiagram, outer: int = None) -> RegionReport:
    """Faces with a chessboard coloring; m_alpha counts the regions colored
    like the unbounded one.  The combinatorial map does not know which face
    is unbounded; pass `outer` to fix it (default: face of the corner
    between ports 3 and 0 of crossing 0)."""
    faces = d.faces()
    if not d.euler_check():
        raise DiagramError("planar incidences fail the Euler check")
    coloring = d.chessboard()
    if outer is None:
        outer = d.face_of_corner(0, 3)
    alpha = coloring[outer]
    m_alpha = sum(1 for f in coloring if f == alpha)
    return RegionReport(faces, coloring, outer, m_alpha)


# -- text format ---------------------------------------------------------------------


def parse_kirby(text: str) -> tuple:
    """Parse the kirby file format; returns (diagram, choices).

    COMPONENT i DOTTED|FRAMED d
      X c OVER|UNDER +|-      (one per passage, in traversal order)
      CURL +|-                (optional order UO|OU as a trailing token)
    PD c a b e f              (arc labels at ports 0..3; validated)
    CUT i AFTER k / HILITE i a b c ... / MARK i H k H' k' REGION f
    """
    b = DiagramBuilder()
    comp_order = []
    events = {}
    meta = {}
    pd = {}
    choices = Choices()
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0].upper()
        if key == "COMPONENT":
            idx = int(tok[1])
            kind = tok[2].lower()
            framing = int(tok[3]) if kind == "framed" else None
            current = idx
            comp_order.append(idx)
            events[idx] = []
            if kind not in ("framed", "dotted"):
                raise DiagramError("bad component kind %r" % tok[2])
            meta[idx] = (kind, framing)
        elif key == "X":
            if current is None:
                raise DiagramError("X line outside a COMPONENT block")
            cid = int(tok[1])
            role = OVER if tok[2].upper().startswith("O") else UNDER
            sign = 1 if tok[3] == "+" else -1
            b.add_crossing(cid, sign)
            events[current].append(("X", cid, role))
        elif key == "CURL":
            if current is None:
                raise DiagramError("CURL line outside a COMPONENT block")
            sign = 1 if tok[1] == "+" else -1
            order = tok[2].upper() if len(tok) > 2 else "UO"
            events[current].append(("CURL", sign, order))
        elif key == "PD":
            pd[int(tok[1])] = tuple(int(x) for x in tok[2:6])
        elif key == "CUT":
            choices.cuts[int(tok[1])] = int(tok[3])
        elif key == "HILITE":
            choices.highlights[int(tok[1])] = [int(x) for x in tok[2:]]
        elif key == "MARK":
            i = int(tok[1])
            h = int(tok[3])
            hp = int(tok[5])
            reg = int(tok[7])
            choices.marks[i] = (h, hp, reg)
        else:
            raise DiagramError("unrecognized line: %r" % raw)
    for idx in comp_order:
        kind, framing = meta[idx]
        b.add_component(kind, framing, events[idx])
    d = b.build()
    if pd:
        _check_pd_labels(d, pd)
    return d, choices


def _check_pd_labels(d: KirbyDiagram, pd):
    """Arc labels must pair up exactly like the wired ports."""
    for c, labels in pd.items():
        if len(labels) != 4:
            raise DiagramError("PD line for crossing %d needs 4 labels" % c)
    for c, labels in pd.items():
        for p in range(4):
            c2, p2 = d.adj[(c, p)]
            if c2 in pd and pd[c2][p2] != labels[p]:
                raise DiagramError(
                    "PD labels disagree across the arc at crossing %d port %d"
                    % (c, p))


def diagram_to_text(d: KirbyDiagram, choices: Choices = None) -> str:
    lines = []
    arc_id = {}
    for (c, p), (c2, p2) in sorted(d.adj.items()):
        if (c, p) not in arc_id:
            k = len(arc_id) // 2
            arc_id[(c, p)] = arc_id[(c2, p2)] = k
    for i, comp in enumerate(d.components):
        if comp.kind == "framed":
            lines.append("COMPONENT %d FRAMED %d" % (i, comp.framing))
        else:
            lines.append("COMPONENT %d DOTTED" % i)
        for p in comp.passages:
            lines.append("X %d %s %s" % (
                p.crossing, "OVER" if p.role == OVER else "UNDER",
                "+" if d.signs[p.crossing] > 0 else "-"))
    for c in range(d.n_crossings):
        lines.append("PD %d %s" % (c, " ".join(
            str(arc_id[(c, p)]) for p in range(4))))
    if choices is not None:
        for i, k in sorted(choices.cuts.items()):
            lines.append("CUT %d AFTER %d" % (i, k))
        for i, seq in sorted(choices.highlights.items()):
            lines.append("HILITE %d %s" % (i, " ".join(map(str, seq))))
        for i, (h, hp, reg) in sorted(choices.marks.items()):
            lines.append("MARK %d H %d H' %d REGION %d" % (i, h, hp, reg))
    return "\n".join(lines) + "\n"
