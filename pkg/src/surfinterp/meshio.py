"""OBJ mesh export with a CSV sidecar for per-vertex scalars."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _fmt(x: float) -> str:
    s = f"{x:.9f}"
    # avoid "-0.000000000" so mirrored surfaces export identically
    return "0.000000000" if s.lstrip("-") == "0.000000000" else s


def obj_text(positions: np.ndarray) -> str:
    """Vertices in row-major grid order, then 1-indexed quads."""
    nu, nv = positions.shape[:2]
    lines = [f"# grid {nu}x{nv}"]
    for p in positions.reshape(-1, 3):
        lines.append("v " + " ".join(_fmt(float(c)) for c in p))
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            lines.append(f"f {a} {a + nv} {a + nv + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def scalars_text(H: np.ndarray, margin: np.ndarray) -> str:
    lines = ["vertex_index,H,margin"]
    for k, (h, m) in enumerate(zip(H.ravel(), margin.ravel()), start=1):
        lines.append(f"{k},{h:.9e},{m:.9e}")
    return "\n".join(lines) + "\n"


def export_mesh(patch, path) -> tuple[Path, Path]:
    """Write ``path`` (OBJ) and ``path`` with a ``.csv`` suffix (scalars)."""
    if patch.positions.size == 0:
        raise ValueError("empty patch")
    path = Path(path)
    sidecar = path.with_suffix(".csv")
    with open(path, "w", newline="\n") as fh:
        fh.write(obj_text(patch.positions))
    with open(sidecar, "w", newline="\n") as fh:
        fh.write(scalars_text(patch.H, patch.margin))
    return path, sidecar


def read_obj(path):
    """Return ``(vertices (n, 3), faces (m, 4) 0-indexed)`` from an OBJ file."""
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=int)
