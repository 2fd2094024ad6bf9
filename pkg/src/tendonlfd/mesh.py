"""Triangle meshes: STL/OBJ ingestion and exact nearest-point projection."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyMesh, ParseError


@dataclass
class Mesh:
    vertices: np.ndarray  # (V, 3) m
    triangles: np.ndarray  # (T, 3) int indices

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=np.int64)
        if len(self.triangles) == 0:
            raise EmptyMesh("mesh has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
            raise ParseError("triangle index out of range")

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def diameter(self) -> float:
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    def corners(self):
        """Per-triangle corner arrays (a, b, c), each (T, 3)."""
        return (self.vertices[self.triangles[:, 0]],
                self.vertices[self.triangles[:, 1]],
                self.vertices[self.triangles[:, 2]])

    def transformed(self, scale: float, anchor: np.ndarray, target: np.ndarray) -> "Mesh":
        """Scale about `anchor` and translate so the anchor lands on `target`."""
        v = target + scale * (self.vertices - np.asarray(anchor, dtype=float))
        return Mesh(v, self.triangles.copy())


def _drop_degenerate(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    area2 = np.linalg.norm(np.cross(b - a, c - a), axis=1)
    return triangles[area2 > 1e-16]


def load_mesh(path) -> Mesh:
    """Load an STL (ASCII or binary) or OBJ triangle mesh.

    Degenerate (zero-area) triangles are dropped after load.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    suffix = path.suffix.lower()
    if suffix == ".obj":
        vertices, triangles = _load_obj(path)
    elif suffix == ".stl":
        vertices, triangles = _load_stl(path)
    else:
        raise ParseError(f"{path}: unsupported mesh format {suffix!r}")
    if len(triangles) == 0:
        raise EmptyMesh(f"{path}: no triangles")
    triangles = _drop_degenerate(vertices, triangles)
    if len(triangles) == 0:
        raise EmptyMesh(f"{path}: only degenerate triangles")
    return Mesh(vertices, triangles)


def _load_obj(path: Path):
    vertices = []
    faces = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                try:
                    vertices.append([float(x) for x in parts[1:4]])
                except (ValueError, IndexError):
                    raise ParseError(f"{path}:{lineno}: bad vertex line {line.rstrip()!r}")
                if len(parts) < 4:
                    raise ParseError(f"{path}:{lineno}: bad vertex line {line.rstrip()!r}")
            elif parts[0] == "f":
                try:
                    idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad face line {line.rstrip()!r}")
                if len(idx) < 3:
                    raise ParseError(f"{path}:{lineno}: face needs >= 3 vertices")
                for i in range(1, len(idx) - 1):  # fan-triangulate
                    faces.append([idx[0], idx[i], idx[i + 1]])
    return np.array(vertices, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)


def _load_stl(path: Path):
    raw = path.read_bytes()
    if raw[:5] == b"solid" and b"facet" in raw[:1024]:
        return _load_stl_ascii(path, raw)
    return _load_stl_binary(path, raw)


def _load_stl_ascii(path: Path, raw: bytes):
    tri_vertices = []
    current = []
    for lineno, line in enumerate(raw.decode("ascii", errors="replace").splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "vertex":
            try:
                current.append([float(x) for x in parts[1:4]])
            except (ValueError, IndexError):
                raise ParseError(f"{path}:{lineno}: bad vertex line {line.strip()!r}")
            if len(parts) != 4:
                raise ParseError(f"{path}:{lineno}: bad vertex line {line.strip()!r}")
        elif parts[0] == "endfacet":
            if len(current) != 3:
                raise ParseError(f"{path}:{lineno}: facet with {len(current)} vertices")
            tri_vertices.append(current)
            current = []
    return _dedupe(np.array(tri_vertices, dtype=float).reshape(-1, 3))


def _load_stl_binary(path: Path, raw: bytes):
    if len(raw) < 84:
        raise ParseError(f"{path}: truncated binary STL header")
    (count,) = struct.unpack_from("<I", raw, 80)
    expected = 84 + count * 50
    if len(raw) < expected:
        raise ParseError(f"{path}: binary STL truncated ({len(raw)} < {expected} bytes)")
    data = np.frombuffer(raw, dtype=np.uint8, count=count * 50, offset=84)
    floats = data.reshape(count, 50)[:, :48].copy().view("<f4").reshape(count, 12)
    verts = floats[:, 3:12].astype(float).reshape(-1, 3)
    return _dedupe(verts)


def _dedupe(verts: np.ndarray):
    """Merge exactly repeated vertices; triangles index the merged set."""
    uniq, inverse = np.unique(verts.round(12), axis=0, return_inverse=True)
    return uniq, inverse.reshape(-1, 3).astype(np.int64)


def save_stl_binary(mesh: Mesh, path) -> None:
    a, b, c = mesh.corners()
    normals = np.cross(b - a, c - a)
    norm = np.linalg.norm(normals, axis=1, keepdims=True)
    normals = normals / np.where(norm > 0, norm, 1.0)
    count = len(mesh.triangles)
    buf = bytearray(b"\0" * 80)
    buf += struct.pack("<I", count)
    rec = np.zeros((count, 50), dtype=np.uint8)
    packed = np.hstack([normals, a, b, c]).astype("<f4")
    rec[:, :48] = packed.view(np.uint8).reshape(count, 48)
    buf += rec.tobytes()
    Path(path).write_bytes(bytes(buf))


def closest_points_on_triangles(a, b, c, p):
    """Closest point to p on each triangle (a, b, c); all arrays (T, 3)."""
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = d1 / (d1 - d3)
        w_ac = d2 / (d2 - d6)
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        denom = va + vb + vc
        v_in = vb / denom
        w_in = vc / denom

    out = a + v_in[:, None] * ab + w_in[:, None] * ac  # interior (default)
    m_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    out[m_bc] = b[m_bc] + w_bc[m_bc, None] * (c - b)[m_bc]
    m_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    out[m_ac] = a[m_ac] + w_ac[m_ac, None] * ac[m_ac]
    m_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    out[m_ab] = a[m_ab] + v_ab[m_ab, None] * ab[m_ab]
    m_c = (d6 >= 0) & (d5 <= d6)
    out[m_c] = c[m_c]
    m_b = (d3 >= 0) & (d4 <= d3)
    out[m_b] = b[m_b]
    m_a = (d1 <= 0) & (d2 <= 0)
    out[m_a] = a[m_a]
    return out


def project_to_surface(mesh: Mesh, p) -> np.ndarray:
    """Globally nearest point on the mesh surface (exact, linear scan)."""
    p = np.asarray(p, dtype=float)
    a, b, c = mesh.corners()
    candidates = closest_points_on_triangles(a, b, c, p)
    d2 = np.einsum("ij,ij->i", candidates - p, candidates - p)
    return candidates[int(np.argmin(d2))]
