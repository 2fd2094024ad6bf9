#!/usr/bin/env python3
"""Regenerate the shipped synthetic cavity mesh fixture (deterministic)."""

from pathlib import Path

from tendonlfd.mesh import save_stl_binary
from tendonlfd.tasks import synthetic_cavity_mesh

out = Path(__file__).resolve().parents[1] / "src/tendonlfd/assets/meshes/pleural_cavity.stl"
mesh = synthetic_cavity_mesh()
save_stl_binary(mesh, out)
print(f"wrote {out}: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles")
