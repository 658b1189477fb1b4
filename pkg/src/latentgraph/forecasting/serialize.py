"""Flat float64 parameter blob plus a JSON manifest of (name, shape, offset)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..nn import Module


def _named_arrays(source) -> list[tuple[str, np.ndarray]]:
    if isinstance(source, Module):
        return [(name, p.data) for name, p in source.named_parameters()]
    return [(name, np.asarray(a)) for name, a in source.items()]


def save_params(source, blob_path, manifest_path=None) -> list[dict]:
    """Write little-endian float64 values back to back; offsets count elements.

    ``source`` is a Module or a mapping of name to array.
    """
    blob_path = Path(blob_path)
    manifest_path = Path(manifest_path) if manifest_path else blob_path.with_suffix(".manifest.json")
    entries, chunks, offset = [], [], 0
    for name, a in _named_arrays(source):
        entries.append({"name": name, "shape": list(a.shape), "offset": offset})
        chunks.append(np.ascontiguousarray(a, dtype="<f8").ravel())
        offset += a.size
    blob = np.concatenate(chunks) if chunks else np.zeros(0, dtype="<f8")
    blob.tofile(blob_path)
    manifest_path.write_text(json.dumps({"dtype": "float64-le", "count": offset, "params": entries}, indent=1))
    return entries


def read_params(blob_path, manifest_path=None) -> dict[str, np.ndarray]:
    """Saved parameters as an ordered name -> array mapping."""
    blob_path = Path(blob_path)
    manifest_path = Path(manifest_path) if manifest_path else blob_path.with_suffix(".manifest.json")
    manifest = json.loads(manifest_path.read_text())
    blob = np.fromfile(blob_path, dtype="<f8")
    if blob.size != manifest["count"]:
        raise ValueError(f"blob holds {blob.size} values, manifest says {manifest['count']}")
    out = {}
    for e in manifest["params"]:
        size = int(np.prod(e["shape"], dtype=np.int64))
        out[e["name"]] = blob[e["offset"]:e["offset"] + size].astype(np.float64).reshape(e["shape"])
    return out


def assign_params(module: Module, values: dict[str, np.ndarray]) -> None:
    """Copy ``values`` into ``module``; names and shapes must match exactly."""
    params = dict(module.named_parameters())
    if set(values) != set(params):
        differ = sorted(set(params) ^ set(values))
        raise ValueError(f"parameter names differ: {differ[:5]}")
    for name, p in params.items():
        if values[name].shape != p.shape:
            raise ValueError(f"{name}: saved shape {values[name].shape} != {p.shape}")
        p.data[...] = values[name]


def load_params(module: Module, blob_path, manifest_path=None) -> None:
    assign_params(module, read_params(blob_path, manifest_path))
