"""Structured triangulations of rectangular channel domains.

Domains are rectangles (0, L) x (-H/2, H/2).  An nx-by-ny grid of cells is
split along the bottom-left to top-right diagonal, giving 2*nx*ny
counterclockwise triangles of uniform size.  Every boundary edge carries a
tag: solid wall (homogeneous Dirichlet), external pressure side (Neumann),
or a circuit interface identified by an (l, m, k) triple.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

SIDES = ("left", "right", "top", "bottom")


class TagKind(Enum):
    DIRICHLET_WALL = "wall"
    NEUMANN_EXTERNAL = "external"
    INTERFACE = "interface"


@dataclass(frozen=True)
class BoundaryTag:
    kind: TagKind
    interface_id: Optional[tuple] = None  # (l, m, k), interfaces only

    def __post_init__(self):
        if self.kind is TagKind.INTERFACE and self.interface_id is None:
            raise ValueError("interface tag requires an interface_id")
        if self.kind is not TagKind.INTERFACE and self.interface_id is not None:
            raise ValueError("interface_id only valid on interface tags")


def wall() -> BoundaryTag:
    return BoundaryTag(TagKind.DIRICHLET_WALL)


def external() -> BoundaryTag:
    return BoundaryTag(TagKind.NEUMANN_EXTERNAL)


def interface(l: int, m: int, k: int) -> BoundaryTag:
    return BoundaryTag(TagKind.INTERFACE, (l, m, k))


@dataclass(frozen=True)
class RectDomain:
    """Rectangle (0, length) x (-height/2, height/2), lengths in cm."""
    length: float
    height: float

    def __post_init__(self):
        if self.length <= 0 or self.height <= 0:
            raise ValueError("domain dimensions must be positive")


@dataclass
class TriangleMesh:
    """Conforming triangulation with tagged boundary edges.

    vertices      (V, 2) coordinates
    triangles     (T, 3) vertex indices, counterclockwise
    edges         (E, 2) vertex index pairs, sorted within each pair
    edge_index    map (v0, v1) sorted pair -> edge id
    boundary_edges  map edge id -> BoundaryTag
    """
    domain: RectDomain
    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_index: dict
    boundary_edges: dict

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edge_midpoints(self) -> np.ndarray:
        return 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])

    def triangle_edges(self) -> np.ndarray:
        """(T, 3) edge ids; local edge i is opposite local vertex i."""
        tri = self.triangles
        out = np.empty((len(tri), 3), dtype=np.int64)
        for loc, (a, b) in enumerate(((1, 2), (2, 0), (0, 1))):
            for t in range(len(tri)):
                key = (min(tri[t, a], tri[t, b]), max(tri[t, a], tri[t, b]))
                out[t, loc] = self.edge_index[key]
        return out

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))

    def edges_with_kind(self, kind: TagKind, interface_id: tuple | None = None):
        """Boundary edge ids carrying the given tag kind (and id, if given)."""
        out = []
        for eid, tag in self.boundary_edges.items():
            if tag.kind is not kind:
                continue
            if interface_id is not None and tag.interface_id != interface_id:
                continue
            out.append(eid)
        return sorted(out)

    def interface_ids(self):
        seen = []
        for tag in self.boundary_edges.values():
            if tag.kind is TagKind.INTERFACE and tag.interface_id not in seen:
                seen.append(tag.interface_id)
        return sorted(seen)


def build_rect_mesh(domain: RectDomain, nx: int, ny: int, layout: dict) -> TriangleMesh:
    """Triangulate the rectangle with 2*nx*ny elements and tag its boundary.

    `layout` maps each side name in {"left", "right", "top", "bottom"} to a
    BoundaryTag; all four sides must be present.
    """
    if nx < 1 or ny < 1:
        raise ValueError(f"subdivision counts must be >= 1, got nx={nx}, ny={ny}")
    missing = [s for s in SIDES if s not in layout]
    if missing:
        raise ValueError(f"boundary layout leaves sides untagged: {missing}")
    unknown = [s for s in layout if s not in SIDES]
    if unknown:
        raise ValueError(f"unknown sides in layout: {unknown}")

    L, H = domain.length, domain.height
    xs = np.linspace(0.0, L, nx + 1)
    ys = np.linspace(-0.5 * H, 0.5 * H, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    t = 0
    for j in range(ny):
        for i in range(nx):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            # split along the v00 -> v11 diagonal; both triangles CCW
            triangles[t] = (v00, v10, v11)
            triangles[t + 1] = (v00, v11, v01)
            t += 2

    edge_index: dict = {}
    edge_list: list = []
    for tri in triangles:
        for a, b in ((tri[1], tri[2]), (tri[2], tri[0]), (tri[0], tri[1])):
            key = (min(a, b), max(a, b))
            if key not in edge_index:
                edge_index[key] = len(edge_list)
                edge_list.append(key)
    edges = np.asarray(edge_list, dtype=np.int64)

    boundary_edges: dict = {}

    def tag_side(pairs, side):
        for a, b in pairs:
            key = (min(a, b), max(a, b))
            boundary_edges[edge_index[key]] = layout[side]

    tag_side([(vid(0, j), vid(0, j + 1)) for j in range(ny)], "left")
    tag_side([(vid(nx, j), vid(nx, j + 1)) for j in range(ny)], "right")
    tag_side([(vid(i, ny), vid(i + 1, ny)) for i in range(nx)], "top")
    tag_side([(vid(i, 0), vid(i + 1, 0)) for i in range(nx)], "bottom")

    # interface ids must be unique over the boundary pieces of this mesh
    ids = [tag.interface_id for tag in layout.values() if tag.kind is TagKind.INTERFACE]
    if len(ids) != len(set(ids)):
        raise ValueError(f"duplicate interface ids in layout: {ids}")

    return TriangleMesh(domain, vertices, triangles, edges, edge_index, boundary_edges)


def write_mesh(mesh: TriangleMesh, path) -> None:
    """Dump a mesh as plain text: VERTICES, TRIANGLES and BOUNDARY sections."""
    with open(path, "w") as f:
        f.write("VERTICES\n")
        for i, (x, y) in enumerate(mesh.vertices):
            f.write(f"{i} {x!r} {y!r}\n")
        f.write("TRIANGLES\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        f.write("BOUNDARY\n")
        for eid in sorted(mesh.boundary_edges):
            tag = mesh.boundary_edges[eid]
            a, b = mesh.edges[eid]
            if tag.kind is TagKind.INTERFACE:
                l, m, k = tag.interface_id
                f.write(f"{a} {b} {tag.kind.value} {l} {m} {k}\n")
            else:
                f.write(f"{a} {b} {tag.kind.value}\n")
