"""Exact integral homology of the pseudocomplex of a colored graph.

The k-simplices of the complex are in bijection with the residues on
n-k colors: the vertex labelled c corresponds to a c-hat-residue, and in
general the simplex spanned by the labels outside {c_1..c_h} corresponds
to a {c_1..c_h}-residue.  Incidence is residue containment; signs come
from ordering each simplex's vertices by their color labels.

All arithmetic is exact (Python integers); Smith normal form is computed
with the classical pivoting reduction, which is plenty for desk-scale
graphs and never overflows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .colored_graph import ColoredGraph


@dataclass
class ChainComplex:
    """Integer chain complex; boundary[k] maps degree k to degree k-1."""
    dims: list
    boundary: list          # boundary[k]: matrix with dims[k-1] rows, dims[k] cols
    simplices: list         # simplices[k]: list of (colors, frozenset(vertices))

    def check_dd_zero(self):
        for k in range(2, len(self.dims)):
            prod = _mat_mult(self.boundary[k - 1], self.boundary[k])
            for row in prod:
                for x in row:
                    if x != 0:
                        raise AssertionError("boundary of boundary is nonzero")

    def euler_characteristic(self):
        return sum((-1) ** k * d for k, d in enumerate(self.dims))


def build_complex(g: ColoredGraph) -> ChainComplex:
    """The chain complex of the pseudocomplex encoded by g."""
    g.require_connected()
    n = g.n
    all_colors = set(g.colors)
    # simplices[k]: dimension-k simplices = residues on n-k colors
    simplices = []
    index = []
    for k in range(n + 1):
        h = n - k
        level = []
        for cols in itertools.combinations(sorted(all_colors), h):
            for res in g.residues(cols):
                level.append((cols, res.vertices))
        simplices.append(level)
        index.append({s: i for i, s in enumerate(level)})

    boundary = [None]
    for k in range(1, n + 1):
        rows, cols_cnt = len(simplices[k - 1]), len(simplices[k])
        mat = [[0] * cols_cnt for _ in range(rows)]
        for j, (cols, verts) in enumerate(simplices[k]):
            labels = sorted(all_colors - set(cols))   # vertex labels of the simplex
            v0 = min(verts)
            for i_lab, c in enumerate(labels):
                face_cols = tuple(sorted(set(cols) | {c}))
                face_verts = g.residue_of(v0, face_cols).vertices
                i = index[k - 1][(face_cols, face_verts)]
                mat[i][j] += (-1) ** i_lab
        boundary.append(mat)

    return ChainComplex([len(s) for s in simplices], boundary, simplices)


# -- exact Smith normal form -------------------------------------------------

def _mat_mult(a, b):
    if not a or not b:
        return []
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def smith_invariant_factors(mat):
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    a = [row[:] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    factors = []
    top = 0
    while True:
        pivot = None
        best = None
        for i in range(top, rows):
            for j in range(top, cols):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        while True:
            p = a[top][top]
            done = True
            for i in range(top + 1, rows):
                if a[i][top]:
                    q = a[i][top] // p
                    if a[i][top] % p:
                        done = False
                    for j in range(top, cols):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        done = False
                        break
            if not done:
                continue
            for j in range(top + 1, cols):
                if a[top][j]:
                    q = a[top][j] // p
                    rem = a[top][j] % p
                    for i in range(top, rows):
                        a[i][j] -= q * a[i][top]
                    if rem:
                        done = False
            if done:
                break
        # enforce divisibility of the remaining block by the pivot
        p = a[top][top]
        bad = None
        for i in range(top + 1, rows):
            for j in range(top + 1, cols):
                if a[i][j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            for j in range(top, cols):
                a[top][j] += a[bad][j]
            continue
        factors.append(abs(p))
        top += 1
        if top >= rows or top >= cols:
            break
    return factors


@dataclass
class HomologyReport:
    """Betti numbers and torsion (invariant-factor lists) per degree."""
    betti: list
    torsion: list

    def __str__(self):
        return "\n".join(self.lines())

    def lines(self):
        out = []
        for k, b in enumerate(self.betti):
            parts = []
            if b:
                parts.append("Z^%d" % b if b > 1 else "Z")
            parts.extend("Z/%d" % d for d in self.torsion[k])
            out.append("H_%d: %s" % (k, " + ".join(parts) if parts else "0"))
        return out

    @property
    def euler_characteristic(self):
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def homology_of_complex(cx: ChainComplex) -> HomologyReport:
    n = len(cx.dims) - 1
    ranks = [0] * (n + 2)       # rank of boundary_k
    invfs = [[] for _ in range(n + 2)]
    for k in range(1, n + 1):
        f = smith_invariant_factors(cx.boundary[k]) if cx.dims[k] and cx.dims[k - 1] else []
        ranks[k] = len(f)
        invfs[k] = f
    betti, torsion = [], []
    for k in range(n + 1):
        betti.append(cx.dims[k] - ranks[k] - ranks[k + 1])
        torsion.append([d for d in invfs[k + 1] if d > 1])
    return HomologyReport(betti, torsion)


def homology(g: ColoredGraph) -> HomologyReport:
    """Integral homology of the polyhedron represented by g."""
    return homology_of_complex(build_complex(g))


def h1_group(g: ColoredGraph):
    """(rank, invariant factors > 1) of first homology.

    Builds only the degree 0..2 part of the complex, which is all H_1
    needs; much cheaper than the full report on larger graphs."""
    g.require_connected()
    n = g.n
    all_colors = set(g.colors)
    levels = []
    index = []
    for k in (0, 1, 2):
        h = n - k
        level = []
        for cols in itertools.combinations(sorted(all_colors), h):
            for res in g.residues(cols):
                level.append((cols, res.vertices))
        levels.append(level)
        index.append({s: i for i, s in enumerate(level)})
    mats = []
    for k in (1, 2):
        rows = len(levels[k - 1])
        mat = [[0] * len(levels[k]) for _ in range(rows)]
        for j, (cols, verts) in enumerate(levels[k]):
            labels = sorted(all_colors - set(cols))
            v0 = min(verts)
            for i_lab, c in enumerate(labels):
                face_cols = tuple(sorted(set(cols) | {c}))
                face_verts = g.residue_of(v0, face_cols).vertices
                mat[index[k - 1][(face_cols, face_verts)]][j] += (-1) ** i_lab
        mats.append(mat)
    d1, d2 = mats
    r1 = smith_invariant_factors(d1) if levels[0] and levels[1] else []
    f2 = smith_invariant_factors(d2) if levels[1] and levels[2] else []
    betti1 = len(levels[1]) - len(r1) - len(f2)
    torsion = tuple(d for d in f2 if d > 1)
    return betti1, torsion


def abelian_group_from_matrix(mat, rank_ambient):
    """The abelian group Z^rank_ambient / im(mat) as (free rank, torsion)."""
    if not mat or not mat[0]:
        return rank_ambient, ()
    f = smith_invariant_factors(mat)
    rank = rank_ambient - len(f)
    return rank, tuple(d for d in f if d > 1)


def format_abelian(rank, torsion):
    parts = []
    if rank:
        parts.append("Z^%d" % rank if rank > 1 else "Z")
    parts.extend("Z/%d" % d for d in torsion)
    return " + ".join(parts) if parts else "0"
