"""Piecewise-affine interpolation on the reference triangulation:
per-triangle deformation gradients and the non-interpenetration check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import BondGraph

NEAR_SINGULAR = 1e-14


@dataclass
class Deformation:
    """Per-atom image positions; the optimization variable."""

    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)

    @classmethod
    def identity(cls, graph: BondGraph) -> "Deformation":
        return cls(graph.lattice.pos.copy())

    def copy(self) -> "Deformation":
        return Deformation(self.positions.copy())

    def to_dict(self) -> dict:
        return {str(i): [float(x) for x in row]
                for i, row in enumerate(self.positions)}

    def to_csv(self) -> str:
        lines = ["atom_id,x,y" if self.positions.shape[1] == 2
                 else "atom_id,x,y,z"]
        for i, row in enumerate(self.positions):
            lines.append(",".join([str(i)] + [f"{x:.17g}" for x in row]))
        return "\n".join(lines) + "\n"


@dataclass
class TriangleGradients:
    """Deformation gradient F and det F on every reference triangle."""

    F: np.ndarray      # (m, 2, 2)
    det: np.ndarray    # (m,)

    def __len__(self):
        return len(self.det)

    def __getitem__(self, i):
        return self.F[i], self.det[i]


def gradients(graph: BondGraph, deformation) -> TriangleGradients:
    """Per-triangle F solving F * (reference edges) = (image edges)."""
    pos = _pos(deformation)
    t = graph.triangles
    e1 = pos[t[:, 1]] - pos[t[:, 0]]
    e2 = pos[t[:, 2]] - pos[t[:, 0]]
    E = np.stack([e1, e2], axis=2)          # columns are image edges
    F = E @ graph.tri_ref_inv.transpose(0, 2, 1)
    det = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) / graph.tri_ref_det
    return TriangleGradients(F=F, det=det)


def triangle_dets(graph: BondGraph, positions: np.ndarray) -> np.ndarray:
    """det F per triangle without assembling F; the line-search hot path."""
    t = graph.triangles
    e1 = positions[t[:, 1]] - positions[t[:, 0]]
    e2 = positions[t[:, 2]] - positions[t[:, 0]]
    return (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) / graph.tri_ref_det


@dataclass
class Admissibility:
    admissible: bool
    violations: list = field(default_factory=list)   # triangle indices, det<=0
    near_singular: list = field(default_factory=list)
    min_det: float = float("inf")

    def __bool__(self):
        return self.admissible


def is_admissible(graph: BondGraph, deformation) -> Admissibility:
    """Orientation check: det F > 0 on every triangle.  No tolerance slack
    on the sign; dets in (0, 1e-14) are admissible but flagged."""
    det = triangle_dets(graph, _pos(deformation))
    bad = np.nonzero(det <= 0.0)[0]
    near = np.nonzero((det > 0.0) & (det < NEAR_SINGULAR))[0]
    return Admissibility(
        admissible=bad.size == 0,
        violations=bad.tolist(),
        near_singular=near.tolist(),
        min_det=float(np.min(det)) if det.size else float("inf"),
    )


def _pos(deformation) -> np.ndarray:
    return np.asarray(getattr(deformation, "positions", deformation),
                      dtype=float)
