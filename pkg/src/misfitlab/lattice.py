"""Two-phase hexagonal lattice windows, their Delaunay bond structure, and
the interface census.

The left phase is a unit hexagonal lattice, the right phase the same lattice
scaled by a rational ratio ``rho``; the two meet along a straight interface.
All construction arithmetic is exact: ratios and the interface offset are
``fractions.Fraction`` values, atom positions are rational pairs (a, b)
standing for the cartesian point (a, b*sqrt(3)), and all Delaunay decisions
(including the co-circular tie cases, which occur exactly when the ratio is
of the form 2i/(2j+1)) are made with integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .geometry import Pt2, SQRT3, norm2_sq, orient2, sub2, to_xy

LEFT = 0
RIGHT = 1

# Hexagonal basis: w1 = (1, 0), w2 = (1/2, sqrt(3)/2), w3 = w2 - w1.
W1 = np.array([1.0, 0.0])
W2 = np.array([0.5, SQRT3 / 2.0])
W3 = W2 - W1

_HALF = Fraction(1, 2)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are accepted for convenience; exactness is the caller's
        # problem (Fraction(0.8) is not 4/5).
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot convert {x!r} to Fraction")


@dataclass(frozen=True)
class LatticeSpec:
    """Parameters of a biphase lattice window.

    rho       -- ratio of right to left reference spacing, in (0, 1]
    k         -- strip thickness in row gaps (k+1 left rows)
    m_w       -- window half-width in columns of each phase's own spacing
    d         -- interface offset in units of the left spacing, > 1/3
    dimension -- 2 or 3
    tie_rule  -- "a" or "b": which diagonal resolves co-circular trapezia
    """

    rho: Fraction
    k: int
    m_w: int
    d: Fraction = Fraction(1)
    dimension: int = 2
    tie_rule: str = "a"

    def __post_init__(self):
        object.__setattr__(self, "rho", _as_fraction(self.rho))
        object.__setattr__(self, "d", _as_fraction(self.d))
        if not (0 < self.rho <= 1):
            raise ValueError(f"rho must be in (0, 1], got {self.rho}")
        if self.d <= Fraction(1, 3):
            raise ValueError(f"interface offset d must exceed 1/3, got {self.d}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.m_w < 2:
            raise ValueError("m_w must be >= 2 (no clamp band possible)")
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        if self.tie_rule not in ("a", "b"):
            raise ValueError("tie_rule must be 'a' or 'b'")

    @property
    def right_rows(self) -> int:
        """Number of right-phase rows: floor(k/rho) + 1, computed exactly."""
        return (self.k * self.rho.denominator) // self.rho.numerator + 1

    @property
    def left_rows(self) -> int:
        return self.k + 1

    @property
    def right_cols(self) -> int:
        """Index of the last right column: ceil(m_w/rho)."""
        p, q = self.rho.numerator, self.rho.denominator
        return -((-self.m_w * q) // p)

    def with_m_w(self, m_w: int) -> "LatticeSpec":
        return LatticeSpec(self.rho, self.k, m_w, self.d, self.dimension,
                           self.tie_rule)


def degenerate_rho(rho) -> bool:
    """Whether the lattice admits co-circular interface trapezia.

    This happens exactly when rho = 2i/(2j+1) for integers i, j, i.e. when
    the numerator of rho in lowest terms is even.
    """
    return _as_fraction(rho).numerator % 2 == 0


@dataclass
class Atom:
    id: int
    phase: int
    xi: tuple[int, int]
    coeff: tuple[Fraction, Fraction]  # coefficients against (w1, w2)

    @property
    def exact(self) -> Pt2:
        c1, c2 = self.coeff
        return (c1 + _HALF * c2, _HALF * c2)

    @property
    def pos(self) -> tuple[float, float]:
        return to_xy(self.exact)


class Lattice:
    """A bounded window of the biphase lattice with exact positions."""

    def __init__(self, spec: LatticeSpec, atoms: list[Atom]):
        self.spec = spec
        self.atoms = atoms
        self.n = len(atoms)
        self.pos = np.array([a.pos for a in atoms], dtype=float)
        self.phase = np.array([a.phase for a in atoms], dtype=np.int8)
        self.xi = np.array([a.xi for a in atoms], dtype=np.int64)
        self._index = {(a.phase, a.xi[0], a.xi[1]): a.id for a in atoms}
        # column coordinate of each atom (first basis coefficient): the
        # affine function x1 - x2/sqrt(3) evaluated at the atom.
        self.scol = np.array([float(a.coeff[0]) for a in atoms])

    def atom_id(self, phase: int, xi1: int, xi2: int) -> Optional[int]:
        return self._index.get((phase, xi1, xi2))

    def exact_pos(self, i: int) -> Pt2:
        return self.atoms[i].exact

    def column_ids(self, phase: int, col: int) -> list[int]:
        rows = self.spec.left_rows if phase == LEFT else self.spec.right_rows
        out = []
        for r in range(rows):
            i = self.atom_id(phase, col, r)
            if i is not None:
                out.append(i)
        return out

    @property
    def interface_left_ids(self) -> list[int]:
        return self.column_ids(LEFT, -1)

    @property
    def interface_right_ids(self) -> list[int]:
        return self.column_ids(RIGHT, 0)


def _left_coeff(spec: LatticeSpec, xi1: int, xi2: int) -> tuple[Fraction, Fraction]:
    return (Fraction(xi1 + 1) - spec.d, Fraction(xi2))


def _right_coeff(spec: LatticeSpec, xi1: int, xi2: int) -> tuple[Fraction, Fraction]:
    return (spec.rho * xi1, spec.rho * xi2)


def build_lattice(spec: LatticeSpec) -> Lattice:
    """All atoms of the window: left columns -m_w..-1, right columns
    0..ceil(m_w/rho), rows spanning the strip of thickness k."""
    if spec.dimension != 2:
        raise ValueError("build_lattice is 2D; use fcc3d.build_fcc for dimension 3")
    atoms = []
    for xi1 in range(-spec.m_w, 0):
        for xi2 in range(spec.left_rows):
            atoms.append(Atom(len(atoms), LEFT, (xi1, xi2),
                              _left_coeff(spec, xi1, xi2)))
    for xi1 in range(0, spec.right_cols + 1):
        for xi2 in range(spec.right_rows):
            atoms.append(Atom(len(atoms), RIGHT, (xi1, xi2),
                              _right_coeff(spec, xi1, xi2)))
    return Lattice(spec, atoms)


# ---------------------------------------------------------------------------
# Interface band: exact Delaunay edges between the two interface columns.
# ---------------------------------------------------------------------------

def _dotr(p: Pt2, q: Pt2) -> Fraction:
    """Euclidean dot product of two (a, b*sqrt(3)) points."""
    return p[0] * q[0] + 3 * p[1] * q[1]


class _BandPoint:
    __slots__ = ("side", "row", "pt", "param")

    def __init__(self, side: str, row: int, pt: Pt2, param: Fraction):
        self.side = side      # "P" (left column) or "Q" (right column)
        self.row = row
        self.pt = pt
        self.param = param    # coordinate along the interface direction w2


def _band_points(spec: LatticeSpec, pad: int):
    """Padded interface-column points, plus blocker points from the two
    columns behind each interface column (infinite-strip semantics)."""
    rho, d = spec.rho, spec.d
    top = spec.right_rows - 1
    qpad = -((-pad * rho.denominator) // rho.numerator)  # ceil(pad/rho)

    def left_pt(col: int, row: int) -> Pt2:
        c1 = Fraction(col + 1) - d
        return (c1 + _HALF * row, Fraction(row, 2))

    def right_pt(col: int, row: int) -> Pt2:
        return (rho * col + _HALF * rho * row, _HALF * rho * row)

    P = [_BandPoint("P", r, left_pt(-1, r), Fraction(r) - d / 2)
         for r in range(-pad, spec.k + pad + 1)]
    Q = [_BandPoint("Q", r, right_pt(0, r), rho * r)
         for r in range(-qpad, top + qpad + 1)]
    blockers = [bp.pt for bp in P] + [bp.pt for bp in Q]
    for r in range(-pad, spec.k + pad + 1):
        blockers.append(left_pt(-2, r))
        blockers.append(left_pt(-3, r))
    for r in range(-qpad, top + qpad + 1):
        blockers.append(right_pt(1, r))
        blockers.append(right_pt(2, r))
    return P, Q, blockers


def _edge_feasible(x: Pt2, y: Pt2, blockers: list[Pt2], tie_info: list):
    """Decide whether (x, y) is a Delaunay edge of the point set.

    Returns +1 if some circle through x, y has every other point strictly
    outside, 0 if the best circle has blockers exactly on it (a tie; the
    binding blockers are appended to tie_info), -1 otherwise.
    """
    a, b = sub2(y, x)
    mid = (x[0] + _HALF * (y[0] - x[0]), x[1] + _HALF * (y[1] - x[1]))
    u = (-3 * b, a)  # direction along the bisector, rational in this chart
    lo, hi = None, None
    lo_w, hi_w = None, None
    for w in blockers:
        if w == x or w == y:
            continue
        dwx = sub2(w, x)
        coef = 2 * _dotr(u, dwx)
        rhs = _dotr(w, w) - _dotr(x, x) - 2 * _dotr(mid, dwx)
        if coef == 0:
            if rhs <= 0:
                return -1
            continue
        bound = rhs / coef
        if coef > 0:
            if hi is None or bound < hi:
                hi, hi_w = bound, w
        else:
            if lo is None or bound > lo:
                lo, lo_w = bound, w
    if lo is None or hi is None:
        raise RuntimeError("unbounded bisector interval; blocker set too small")
    if lo < hi:
        return 1
    if lo == hi:
        tie_info.extend([lo_w, hi_w])
        return 0
    return -1


def _band_edges(spec: LatticeSpec, pad: int = 6):
    """Cross edges (P_row, Q_row) of the infinite-strip interface band,
    covering every pair incident to a window row, with ties resolved by
    the configured convention."""
    P, Q, blockers = _band_points(spec, pad)
    by_pt = {}
    for bp in P + Q:
        by_pt[bp.pt] = bp
    bxy = np.array([to_xy(w) for w in blockers])
    top = spec.right_rows - 1
    qslack = -((-2 * spec.rho.denominator) // spec.rho.numerator)
    edges = []
    ties = []
    for p in P:
        if not -3 <= p.row <= spec.k + 3:
            continue
        pxy = np.array(to_xy(p.pt))
        dist2 = np.sum((bxy - pxy) ** 2, axis=1)
        near = [blockers[i] for i in np.nonzero(dist2 <= 27.0)[0]]
        for q in Q:
            if not -qslack <= q.row <= top + qslack:
                continue
            if abs(p.param - q.param) > Fraction(3, 2):
                continue
            tie_info: list = []
            r = _edge_feasible(p.pt, q.pt, near, tie_info)
            if r == 1:
                edges.append((p.row, q.row))
            elif r == 0:
                partners = [by_pt.get(w) for w in tie_info]
                other_p = next((w for w in partners if w and w.side == "P"), None)
                other_q = next((w for w in partners if w and w.side == "Q"), None)
                if other_p is None or other_q is None:
                    continue  # tie against a bulk point: not a trapezium case
                # Convention (a): keep the diagonal joining the lower P to
                # the higher Q; convention (b) keeps the other one.
                keep = p.param < other_p.param and q.param > other_q.param
                if spec.tie_rule == "b":
                    keep = not keep
                ties.append({
                    "p_row": p.row, "q_row": q.row,
                    "other_p_row": other_p.row, "other_q_row": other_q.row,
                    "kept": keep,
                })
                if keep:
                    edges.append((p.row, q.row))
    edges.sort()
    return edges, ties, P, Q


# ---------------------------------------------------------------------------
# Bond graph
# ---------------------------------------------------------------------------

KIND_LEFT = 0      # both endpoints in the left phase, rest length 1
KIND_RIGHT = 1     # both endpoints right, rest length lambda
KIND_CROSS = 2     # interface bond

_KIND_NAMES = {KIND_LEFT: "1", KIND_RIGHT: "lambda", KIND_CROSS: "interface"}
_NNN_NAMES = {KIND_LEFT: "sqrt3", KIND_RIGHT: "lambda_sqrt3",
              KIND_CROSS: "interface"}


class BondGraph:
    """Nearest-neighbor edges, oriented reference triangles, and the padded
    interface coordination data of a lattice window."""

    def __init__(self, lattice: Lattice, edges, triangles, cross_degree,
                 ties, nnn_edges=None, nnn_ties=None):
        self.lattice = lattice
        ea, eb, kinds = [], [], []
        for a, b in edges:
            ea.append(a)
            eb.append(b)
            kinds.append(self._kind(a, b))
        self.ea = np.array(ea, dtype=np.int64)
        self.eb = np.array(eb, dtype=np.int64)
        self.ekind = np.array(kinds, dtype=np.int8)
        self.triangles = np.array(sorted(map(tuple, triangles)),
                                  dtype=np.int64).reshape(-1, 3)
        self.cross_degree = cross_degree   # atom id -> interface-bond count
        self.ties = ties
        self.nnn_ea = None
        self.nnn_eb = None
        self.nnn_kind = None
        self.nnn_ties = nnn_ties
        if nnn_edges is not None:
            na, nb, nk = [], [], []
            for a, b in nnn_edges:
                na.append(a)
                nb.append(b)
                nk.append(self._kind(a, b))
            self.nnn_ea = np.array(na, dtype=np.int64)
            self.nnn_eb = np.array(nb, dtype=np.int64)
            self.nnn_kind = np.array(nk, dtype=np.int8)
        self.ref_len = self._lengths(self.ea, self.eb)
        # precomputed reference triangle data for kinematics
        p = lattice.pos
        t = self.triangles
        e1 = p[t[:, 1]] - p[t[:, 0]]
        e2 = p[t[:, 2]] - p[t[:, 0]]
        self.tri_ref_det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if np.any(self.tri_ref_det <= 0):
            raise AssertionError("reference triangle with nonpositive area")
        inv = np.empty((len(t), 2, 2))
        inv[:, 0, 0] = e2[:, 1]
        inv[:, 0, 1] = -e2[:, 0]
        inv[:, 1, 0] = -e1[:, 1]
        inv[:, 1, 1] = e1[:, 0]
        self.tri_ref_inv = inv / self.tri_ref_det[:, None, None]

    def _kind(self, a: int, b: int) -> int:
        pa = self.lattice.phase[a]
        pb = self.lattice.phase[b]
        if pa == LEFT and pb == LEFT:
            return KIND_LEFT
        if pa == RIGHT and pb == RIGHT:
            return KIND_RIGHT
        return KIND_CROSS

    def _lengths(self, ea, eb):
        d = self.lattice.pos[ea] - self.lattice.pos[eb]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def n_edges(self) -> int:
        return len(self.ea)

    @property
    def n_cross(self) -> int:
        return int(np.sum(self.ekind == KIND_CROSS))

    def with_nnn(self) -> "BondGraph":
        """Return a copy carrying next-to-nearest-neighbor edges."""
        if self.nnn_ea is not None:
            return self
        res = nnn_neighbors(self.lattice, self)
        return BondGraph(self.lattice,
                         list(zip(self.ea.tolist(), self.eb.tolist())),
                         self.triangles.tolist(), self.cross_degree,
                         self.ties, nnn_edges=res.edges, nnn_ties=res.ties)


def delaunay(lattice: Lattice) -> BondGraph:
    """The Delaunay bond graph of the window, with the bulk emitted
    analytically and the interface band decided by exact predicates."""
    spec = lattice.spec
    k, m_w = spec.k, spec.m_w
    top = spec.right_rows - 1
    n_r = spec.right_cols

    triangles = []
    edges = set()

    def tri(ids):
        triangles.append(ids)
        edges.add(tuple(sorted((ids[0], ids[1]))))
        edges.add(tuple(sorted((ids[1], ids[2]))))
        edges.add(tuple(sorted((ids[0], ids[2]))))

    def aid(phase, c, r):
        i = lattice.atom_id(phase, c, r)
        assert i is not None
        return i

    # bulk cells of each phase: two CCW triangles per index cell
    for c in range(-m_w, -1):
        for r in range(k):
            a = aid(LEFT, c, r)
            b = aid(LEFT, c + 1, r)
            cc = aid(LEFT, c, r + 1)
            d2 = aid(LEFT, c + 1, r + 1)
            tri((a, b, cc))
            tri((b, d2, cc))
    for c in range(0, n_r):
        for r in range(top):
            a = aid(RIGHT, c, r)
            b = aid(RIGHT, c + 1, r)
            cc = aid(RIGHT, c, r + 1)
            d2 = aid(RIGHT, c + 1, r + 1)
            tri((a, b, cc))
            tri((b, d2, cc))

    # interface band
    cross, ties, P, Q = _band_edges(spec)
    q_by_p: dict[int, list[int]] = {}
    for pi, qj in cross:
        q_by_p.setdefault(pi, []).append(qj)
    for pi, qs in q_by_p.items():
        qs.sort()
        if 0 <= pi <= k and qs != list(range(qs[0], qs[-1] + 1)):
            raise AssertionError(f"non-contiguous band neighbors at P row {pi}")

    cross_degree: dict[int, int] = {}
    for i in lattice.interface_left_ids + lattice.interface_right_ids:
        cross_degree[i] = 0
    for pi, qj in cross:
        ip = lattice.atom_id(LEFT, -1, pi)
        iq = lattice.atom_id(RIGHT, 0, qj)
        if ip is not None:
            cross_degree[ip] += 1
        if iq is not None:
            cross_degree[iq] += 1
        if ip is not None and iq is not None:
            edges.add(tuple(sorted((ip, iq))))

    # staircase triangles: Q-fans below each P, P-steps between them
    prows = sorted(q_by_p)
    for pi in prows:
        qs = q_by_p[pi]
        ip = lattice.atom_id(LEFT, -1, pi)
        for qj in qs[:-1]:
            iq0 = lattice.atom_id(RIGHT, 0, qj)
            iq1 = lattice.atom_id(RIGHT, 0, qj + 1)
            if None not in (ip, iq0, iq1):
                t = _ccw(lattice, (ip, iq0, iq1))
                tri(t)
        if 0 <= pi < k and pi + 1 in q_by_p:
            if q_by_p[pi][-1] != q_by_p[pi + 1][0]:
                raise AssertionError("band staircase discontinuity")
            qj = q_by_p[pi][-1]
            ip1 = lattice.atom_id(LEFT, -1, pi + 1)
            iq = lattice.atom_id(RIGHT, 0, qj)
            if None not in (ip, ip1, iq):
                t = _ccw(lattice, (ip, ip1, iq))
                tri(t)

    real_ties = [t for t in ties
                 if 0 <= t["p_row"] <= k and 0 <= t["q_row"] <= top]
    return BondGraph(lattice, sorted(edges), triangles, cross_degree,
                     real_ties)


def _ccw(lattice: Lattice, t):
    a, b, c = (lattice.exact_pos(i) for i in t)
    s = orient2(a, b, c)
    assert s != 0
    return t if s > 0 else (t[0], t[2], t[1])


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

@dataclass
class Census:
    left_rows: int
    right_rows: int
    dislocation_count: int          # floor(k/rho) - k, the net row surplus
    five_coordinated_ids: list[int]
    p_cross_counts: dict[int, int]
    q_cross_counts: dict[int, int]
    max_bond_length: float
    max_cross_bond_exact_sq: Fraction
    ties: list
    degenerate: bool

    @property
    def five_coordinated_count(self) -> int:
        return len(self.five_coordinated_ids)

    @property
    def coordination_matches_formula(self) -> bool:
        return self.five_coordinated_count == self.dislocation_count


def interface_census(graph: BondGraph, lattice: Lattice = None) -> Census:
    """Coordination of the interface atoms, the dislocation count, and the
    longest reference bond.

    ``dislocation_count`` is the row surplus floor(k/rho) - k.  The list of
    five-coordinated right atoms (coordination taken in the full lattice)
    usually has exactly that many entries, but carries one extra when the
    strip's top row alignment strands a five-coordinated atom at the
    boundary; ``coordination_matches_formula`` flags this.
    """
    lat = lattice if lattice is not None else graph.lattice
    spec = lat.spec
    p_counts = {i: graph.cross_degree[i] for i in lat.interface_left_ids}
    q_counts = {i: graph.cross_degree[i] for i in lat.interface_right_ids}
    # interface atoms have four in-phase neighbors in the full lattice, so
    # five total neighbors means a single cross bond
    five = [i for i, c in q_counts.items() if 4 + c == 5]
    surplus = spec.right_rows - spec.left_rows  # floor(k/rho) - k
    max_sq = Fraction(0)
    for a, b, kind in zip(graph.ea, graph.eb, graph.ekind):
        if kind != KIND_CROSS:
            continue
        s = norm2_sq(sub2(lat.exact_pos(int(a)), lat.exact_pos(int(b))))
        if s > max_sq:
            max_sq = s
    return Census(
        left_rows=spec.left_rows,
        right_rows=spec.right_rows,
        dislocation_count=surplus,
        five_coordinated_ids=sorted(five),
        p_cross_counts=p_counts,
        q_cross_counts=q_counts,
        max_bond_length=float(np.max(graph.ref_len)) if graph.n_edges else 0.0,
        max_cross_bond_exact_sq=max_sq,
        ties=graph.ties,
        degenerate=degenerate_rho(spec.rho),
    )


# ---------------------------------------------------------------------------
# Next-to-nearest neighbors via the punctured Voronoi diagram
# ---------------------------------------------------------------------------

@dataclass
class NnnResult:
    edges: list[tuple[int, int]]
    ties: list[tuple[int, int]]


# index offsets of the six in-phase next-to-nearest neighbors
_NNN_STEPS = ((1, 1), (-1, -1), (-1, 2), (1, -2), (2, -1), (-2, 1))
_NN_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def nnn_neighbors(lattice: Lattice, graph: BondGraph = None) -> NnnResult:
    """Next-to-nearest neighbors: atoms whose Voronoi cells share an edge
    after each atom's nearest neighbors are removed from the lattice.

    Away from the interface this gives the distance-sqrt(3) pairs (left)
    and rho*sqrt(3) pairs (right); near the interface the definition is
    evaluated exactly.  Pairs whose shared boundary degenerates to a point
    are reported as ties, not as neighbors.
    """
    if graph is None:
        graph = delaunay(lattice)
    spec = lattice.spec
    rho, d = spec.rho, spec.d
    gpad = 5
    qg = -((-gpad * rho.denominator) // rho.numerator)

    # ghost-extended point set, keyed by (phase, col, row)
    pts: dict[tuple, Pt2] = {}
    for c in range(-spec.m_w - gpad, 0):
        for r in range(-gpad, spec.k + gpad + 1):
            c1 = Fraction(c + 1) - d
            pts[(LEFT, c, r)] = (c1 + _HALF * r, Fraction(r, 2))
    for c in range(0, spec.right_cols + qg + 1):
        for r in range(-qg, spec.right_rows + qg):
            pts[(RIGHT, c, r)] = (rho * c + _HALF * rho * r, _HALF * rho * r)

    # exact infinite-lattice NN sets for atoms near the interface
    band_pad = 6
    cross, _, _, _ = _band_edges(spec, pad=band_pad)
    cross_set = set(cross)

    def nn_keys(key):
        phase, c, r = key
        out = []
        for dc, dr in _NN_STEPS:
            k2 = (phase, c + dc, r + dr)
            if k2 in pts:
                out.append(k2)
        if phase == LEFT and c == -1:
            for (pi, qj) in cross_set:
                if pi == r and (RIGHT, 0, qj) in pts:
                    out.append((RIGHT, 0, qj))
        elif phase == RIGHT and c == 0:
            for (pi, qj) in cross_set:
                if qj == r and (LEFT, -1, pi) in pts:
                    out.append((LEFT, -1, pi))
        return out

    n_exact_right = max(1, -((-3 * rho.denominator) // rho.numerator))
    edges = set()
    ties = set()

    def key_of(atom: Atom):
        return (atom.phase, atom.xi[0], atom.xi[1])

    id_of = {}
    for a in lattice.atoms:
        id_of[key_of(a)] = a.id

    for atom in lattice.atoms:
        key = key_of(atom)
        phase, c, r = key
        near_interface = (phase == LEFT and c >= -3) or \
                         (phase == RIGHT and c <= n_exact_right)
        if not near_interface:
            for dc, dr in _NNN_STEPS:
                j = lattice.atom_id(phase, c + dc, r + dr)
                if j is not None:
                    edges.add(tuple(sorted((atom.id, j))))
            continue
        x = pts[key]
        removed = set(nn_keys(key))
        removed.add(key)
        cands = []
        for k2, y in pts.items():
            if k2 in removed:
                continue
            s = norm2_sq(sub2(y, x))
            if s <= Fraction(25, 4):  # candidates within 2.5
                cands.append((k2, y))
        blockers = [y for k2, y in pts.items()
                    if k2 not in removed and norm2_sq(sub2(y, x)) <= 36]
        for k2, y in cands:
            tie_info: list = []
            r2 = _edge_feasible(x, y, [w for w in blockers if w != y],
                                tie_info)
            j = id_of.get(k2)
            if j is None:
                continue
            if r2 == 1:
                edges.add(tuple(sorted((atom.id, j))))
            elif r2 == 0:
                ties.add(tuple(sorted((atom.id, j))))
    return NnnResult(edges=sorted(edges), ties=sorted(ties))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> float:
    return float(f"{x:.17g}")


def lattice_to_dict(graph: BondGraph) -> dict:
    lat = graph.lattice
    atoms = [{
        "id": a.id,
        "phase": "left" if a.phase == LEFT else "right",
        "xi": [int(a.xi[0]), int(a.xi[1])],
        "pos": [_fmt(a.pos[0]), _fmt(a.pos[1])],
    } for a in lat.atoms]
    edges = [{"a": int(a), "b": int(b), "rest": _KIND_NAMES[int(k)]}
             for a, b, k in zip(graph.ea, graph.eb, graph.ekind)]
    out = {
        "spec": {
            "rho": str(lat.spec.rho), "k": lat.spec.k, "m_w": lat.spec.m_w,
            "d": str(lat.spec.d), "dimension": lat.spec.dimension,
            "tie_rule": lat.spec.tie_rule,
        },
        "atoms": atoms,
        "edges": edges,
        "triangles": [[int(i) for i in t] for t in graph.triangles],
    }
    if graph.nnn_ea is not None:
        out["nnn_edges"] = [
            {"a": int(a), "b": int(b), "rest": _NNN_NAMES[int(k)]}
            for a, b, k in zip(graph.nnn_ea, graph.nnn_eb, graph.nnn_kind)]
    return out


def lattice_to_json(graph: BondGraph) -> str:
    return json.dumps(lattice_to_dict(graph), indent=1, sort_keys=True)
