"""File formats: binary matrix files with JSON sidecars, grayscale mode
images, and the report serializer.

Matrix payloads are little-endian 64-bit floats in column-major order;
complex matrices interleave real and imaginary parts per entry.  All
writes go through a temp file and an atomic rename.
"""

import json
import os

import numpy as np

from .errors import DimensionError

REPORT_SCHEMA = "csdmd-report/1"


def atomic_write_bytes(path, payload: bytes):
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def _json_fragment(obj):
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return '{"re": %s, "im": %s}' % (
            _json_fragment(z.real),
            _json_fragment(z.imag),
        )
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _json_fragment(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_fragment(v) for v in obj) + "]"
    if isinstance(obj, dict):
        parts = (f"{json.dumps(str(k))}: {_json_fragment(v)}" for k, v in obj.items())
        return "{" + ", ".join(parts) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj) -> str:
    """Serialize to JSON with 17-significant-digit floats and stable
    (insertion) key order."""
    return _json_fragment(obj) + "\n"


def write_matrix(directory, name, M, grid=None, dt=None):
    """Write a matrix as ``name.bin`` plus ``name.json`` sidecar."""
    M = np.asarray(M)
    if M.ndim == 1:
        M = M[:, None]
    if np.iscomplexobj(M):
        payload = np.asarray(M, dtype="<c16").tobytes(order="F")
        dtype = "c128"
    else:
        payload = np.asarray(M, dtype="<f8").tobytes(order="F")
        dtype = "f64"
    sidecar = {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "dtype": dtype}
    if grid is not None:
        sidecar["grid"] = [int(grid[0]), int(grid[1])]
    if dt is not None:
        sidecar["dt"] = float(dt)
    os.makedirs(directory, exist_ok=True)
    atomic_write_bytes(os.path.join(directory, f"{name}.bin"), payload)
    atomic_write_text(
        os.path.join(directory, f"{name}.json"), dumps_report(sidecar)
    )


def read_matrix(directory, name):
    """Read a matrix written by write_matrix; returns (array, sidecar)."""
    with open(os.path.join(directory, f"{name}.json"), "r", encoding="utf-8") as fh:
        sidecar = json.load(fh)
    rows, cols, dtype = sidecar["rows"], sidecar["cols"], sidecar["dtype"]
    np_dtype = {"f64": "<f8", "c128": "<c16"}.get(dtype)
    if np_dtype is None:
        raise DimensionError(f"unknown dtype {dtype!r} in {name}.json")
    raw = np.fromfile(os.path.join(directory, f"{name}.bin"), dtype=np_dtype)
    if raw.size != rows * cols:
        raise DimensionError(
            f"{name}.bin holds {raw.size} entries, sidecar says {rows}x{cols}"
        )
    M = raw.reshape((rows, cols), order="F")
    return M, sidecar


def write_mode_image(path, field, grid, component="real"):
    """Write one mode as a binary PGM with a min-max rescale sidecar.

    field is a length-n complex (or real) vector over the (nx, ny) grid;
    the chosen component is affinely mapped onto 0..255.
    """
    nx, ny = grid
    vec = np.asarray(field).reshape(-1)
    if vec.shape[0] != nx * ny:
        raise DimensionError(f"field length {vec.shape[0]} != grid size {nx * ny}")
    img = (vec.imag if component == "imag" else vec.real).reshape(ny, nx)
    lo = float(img.min())
    hi = float(img.max())
    if hi > lo:
        scaled = np.round((img - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(img)
    data = scaled.astype(np.uint8).tobytes(order="C")
    header = f"P5\n{nx} {ny}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + data)
    atomic_write_text(
        f"{path}.json",
        dumps_report(
            {"nx": nx, "ny": ny, "min": lo, "max": hi, "component": component}
        ),
    )


def read_pgm(path):
    """Parse a binary PGM written by write_mode_image (testing helper)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    parts = blob.split(b"\n", 3)
    if parts[0] != b"P5":
        raise DimensionError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    img = np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)
    return img, maxval
