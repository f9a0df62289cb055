"""Harmonic pair energy of a bonded lattice, its analytic gradient, the
single-cell energy, and empirical rigidity-constant sampling.

Every bond contributes one or two harmonic terms ``w * (|du| - r)^2``.  A
bond interior to a phase contributes once (rest length 1 on the left, the
mismatch ratio lambda on the right); a bond crossing the interface
contributes the half/half split of both rest lengths, or a single
``(|du| - mu)^2`` term under the mu rule.  Next-to-nearest bonds use rest
lengths sqrt(3) and lambda*sqrt(3) with their own stiffness weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lattice import BondGraph, KIND_CROSS, KIND_LEFT, KIND_RIGHT

SQRT3 = math.sqrt(3.0)

MODE_NN = "nn"
MODE_NN_PLUS_NNN = "nn+nnn"

RULE_SPLIT = "split"
RULE_MU = "mu"

CAT_LEFT = 0
CAT_RIGHT = 1
CAT_INTERFACE = 2
CAT_NNN = 3

_CATEGORIES = ("left", "right", "interface", "nnn")


@dataclass(frozen=True)
class EnergyParams:
    lam: float
    mode: str = MODE_NN
    c1: float = 1.0
    c2: float = 1.0
    interface_rule: str = RULE_SPLIT
    mu: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise ValueError("lambda must be in (0, 1)")
        if self.mode not in (MODE_NN, MODE_NN_PLUS_NNN):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.interface_rule not in (RULE_SPLIT, RULE_MU):
            raise ValueError(f"unknown interface rule {self.interface_rule!r}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("C1, C2 must be positive")
        if self.interface_rule == RULE_MU and self.mu <= 0:
            raise ValueError("mu must be positive")


@dataclass
class EnergyReport:
    total: float
    left: float
    right: float
    interface: float
    nnn: float
    coincident_bonds: list = field(default_factory=list)
    per_bond: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {"total": self.total, "left": self.left, "right": self.right,
                "interface": self.interface, "nnn": self.nnn}


class EnergyModel:
    """Flattened harmonic term table for one (graph, params) pair.

    Built once and reused across solver iterations; evaluation is a few
    vectorized numpy passes over the term arrays.
    """

    def __init__(self, graph: BondGraph, params: EnergyParams,
                 nn_base: float = 1.0):
        self.graph = graph
        self.params = params
        ia, ib, w, r, cat = [], [], [], [], []
        bond_index = []

        def term(a, b, wt, rest, c, bi):
            ia.append(a)
            ib.append(b)
            w.append(wt)
            r.append(rest)
            cat.append(c)
            bond_index.append(bi)

        lam, c1 = params.lam, params.c1
        for bi, (a, b, kind) in enumerate(zip(graph.ea, graph.eb, graph.ekind)):
            a, b, kind = int(a), int(b), int(kind)
            if kind == KIND_LEFT:
                term(a, b, c1, nn_base, CAT_LEFT, bi)
            elif kind == KIND_RIGHT:
                term(a, b, c1, lam * nn_base, CAT_RIGHT, bi)
            elif params.interface_rule == RULE_MU:
                term(a, b, c1, params.mu, CAT_INTERFACE, bi)
            else:
                term(a, b, 0.5 * c1, nn_base, CAT_INTERFACE, bi)
                term(a, b, 0.5 * c1, lam * nn_base, CAT_INTERFACE, bi)
        self.n_bonds = graph.n_edges
        if params.mode == MODE_NN_PLUS_NNN:
            if graph.nnn_ea is None:
                raise ValueError(
                    "mode 'nn+nnn' needs a bond graph with NNN edges; "
                    "use BondGraph.with_nnn()")
            c2 = params.c2
            base = SQRT3 * nn_base
            for off, (a, b, kind) in enumerate(
                    zip(graph.nnn_ea, graph.nnn_eb, graph.nnn_kind)):
                a, b, kind = int(a), int(b), int(kind)
                bi = self.n_bonds + off
                if kind == KIND_LEFT:
                    term(a, b, c2, base, CAT_NNN, bi)
                elif kind == KIND_RIGHT:
                    term(a, b, c2, lam * base, CAT_NNN, bi)
                else:
                    term(a, b, 0.5 * c2, base, CAT_NNN, bi)
                    term(a, b, 0.5 * c2, lam * base, CAT_NNN, bi)
            self.n_bonds += len(graph.nnn_ea)

        self.ia = np.array(ia, dtype=np.int64)
        self.ib = np.array(ib, dtype=np.int64)
        self.w = np.array(w)
        self.r = np.array(r)
        self.cat = np.array(cat, dtype=np.int8)
        self.bond_index = np.array(bond_index, dtype=np.int64)
        self.n_atoms = graph.lattice.n
        self._cat_masks = [self.cat == c for c in range(4)]

    def lengths(self, positions: np.ndarray) -> np.ndarray:
        d = positions[self.ia] - positions[self.ib]
        return np.sqrt(np.sum(d * d, axis=1))

    def energy(self, positions: np.ndarray) -> float:
        ell = self.lengths(positions)
        return float(np.sum(self.w * (ell - self.r) ** 2))

    def energy_report(self, positions: np.ndarray,
                      per_bond: bool = False) -> EnergyReport:
        ell = self.lengths(positions)
        terms = self.w * (ell - self.r) ** 2
        cats = [float(np.sum(terms[m])) for m in self._cat_masks]
        coincident = sorted(
            {(int(self.ia[i]), int(self.ib[i]))
             for i in np.nonzero(ell == 0.0)[0]})
        pb = None
        if per_bond:
            pb = np.zeros(self.n_bonds)
            np.add.at(pb, self.bond_index, terms)
        return EnergyReport(total=float(np.sum(terms)), left=cats[CAT_LEFT],
                            right=cats[CAT_RIGHT],
                            interface=cats[CAT_INTERFACE], nnn=cats[CAT_NNN],
                            coincident_bonds=coincident, per_bond=pb)

    def energy_and_gradient(self, positions: np.ndarray):
        d = positions[self.ia] - positions[self.ib]
        ell = np.sqrt(np.sum(d * d, axis=1))
        if np.any(ell == 0.0):
            bad = np.nonzero(ell == 0.0)[0][0]
            raise ValueError(
                "gradient undefined: bonded atoms "
                f"{int(self.ia[bad])} and {int(self.ib[bad])} coincide")
        diff = ell - self.r
        e = float(np.sum(self.w * diff * diff))
        coef = (2.0 * self.w * diff / ell)[:, None]
        g = np.zeros_like(positions)
        np.add.at(g, self.ia, coef * d)
        np.add.at(g, self.ib, -coef * d)
        return e, g


def total_energy(graph: BondGraph, deformation, params: EnergyParams,
                 per_bond: bool = False) -> EnergyReport:
    """Energy of a deformation, split by bond category.

    Coincident bonded atoms are legal here (the energy stays finite) and are
    listed in the report.
    """
    model = EnergyModel(graph, params)
    return model.energy_report(_positions(deformation, graph), per_bond)


def energy_gradient(graph: BondGraph, deformation,
                    params: EnergyParams) -> np.ndarray:
    """Analytic gradient of the total energy, one 2-vector per atom."""
    model = EnergyModel(graph, params)
    _, g = model.energy_and_gradient(_positions(deformation, graph))
    return g


def _positions(deformation, graph: BondGraph) -> np.ndarray:
    pos = getattr(deformation, "positions", deformation)
    pos = np.asarray(pos, dtype=float)
    if pos.shape[0] != graph.lattice.n:
        raise ValueError("deformation does not assign a position to every atom")
    if not np.all(np.isfinite(pos)):
        raise ValueError("deformation has non-finite entries")
    return pos


# ---------------------------------------------------------------------------
# Cell energy and rigidity sampling
# ---------------------------------------------------------------------------

_W = np.array([[1.0, 0.0], [0.5, SQRT3 / 2.0], [-0.5, SQRT3 / 2.0]])


def cell_energy(F: np.ndarray, rest: float = 1.0) -> float:
    """Energy of one affinely deformed triangular cell:
    sum_i (|F w_i| - rest)^2 over the three cell directions."""
    Fw = np.asarray(F) @ _W.T
    return float(np.sum((np.sqrt(np.sum(Fw * Fw, axis=0)) - rest) ** 2))


def dist2_rotations(F: np.ndarray, scale: float = 1.0) -> float:
    """Squared Frobenius distance from a 2x2 matrix with positive
    determinant to scale*SO(2)."""
    F = np.asarray(F, dtype=float)
    n2 = float(np.sum(F * F))
    det = F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0]
    if det <= 0:
        raise ValueError("dist2_rotations expects det F > 0")
    sing_sum = math.sqrt(n2 + 2.0 * det)
    return n2 + 2.0 * scale * scale - 2.0 * scale * sing_sum


@dataclass
class RigiditySample:
    sup_ratio: float
    argmax: np.ndarray
    sup_ratio_scaled_well: float
    argmax_scaled_well: np.ndarray
    n_kept: int
    seed: int


def rigidity_ratio_sample(n_samples: int, energy_cap: float, seed: int = 0,
                          lam: float = 0.8) -> RigiditySample:
    """Empirical sup of dist^2(F, SO(2)) / cell_energy(F) over seeded random
    F in GL+(2) with cell energy at most energy_cap, together with the
    analogous ratio for the lambda-scaled well.

    Sampler: F = R(theta) (I + E) with theta uniform and E uniform in a box
    scaled to the energy cap; samples with det <= 0 or zero energy are
    rejected.
    """
    rng = np.random.default_rng(seed)
    box = min(1.0, 0.5 * math.sqrt(energy_cap))
    theta = rng.uniform(-math.pi, math.pi, n_samples)
    E = rng.uniform(-box, box, (n_samples, 2, 2))
    ct, st = np.cos(theta), np.sin(theta)
    R = np.empty((n_samples, 2, 2))
    R[:, 0, 0] = ct
    R[:, 0, 1] = -st
    R[:, 1, 0] = st
    R[:, 1, 1] = ct
    F = R @ (np.eye(2)[None, :, :] + E)

    det = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    Fw = F @ _W.T  # (n, 2, 3)
    lens = np.sqrt(np.sum(Fw * Fw, axis=1))
    cell = np.sum((lens - 1.0) ** 2, axis=1)
    cell_lam = np.sum((lens - lam) ** 2, axis=1)

    n2 = np.sum(F * F, axis=(1, 2))
    sing_sum = np.sqrt(n2 + 2.0 * det, where=det > 0, out=np.zeros_like(n2))
    d2 = n2 + 2.0 - 2.0 * sing_sum
    d2_lam = n2 + 2.0 * lam * lam - 2.0 * lam * sing_sum

    keep = (det > 0) & (cell > 0) & (cell <= energy_cap)
    ratio = d2[keep] / cell[keep]
    i = int(np.argmax(ratio))
    keep_lam = (det > 0) & (cell_lam > 0) & (cell_lam <= energy_cap)
    ratio_lam = d2_lam[keep_lam] / cell_lam[keep_lam]
    j = int(np.argmax(ratio_lam))
    return RigiditySample(
        sup_ratio=float(ratio[i]),
        argmax=F[keep][i],
        sup_ratio_scaled_well=float(ratio_lam[j]),
        argmax_scaled_well=F[keep_lam][j],
        n_kept=int(np.sum(keep)),
        seed=seed,
    )


def tree_sum(values: np.ndarray) -> float:
    """Deterministic pairwise reduction, for bit-reproducible totals."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0])
