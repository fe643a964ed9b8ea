"""On-disk containers for fields and trajectories, plus CSV/manifest helpers.

Field container (.qpf): little-endian flat record
    magic "QPF1" | int64 nmax | int64 grid_size | float64 omega1, omega2 |
    uint8 is_real | complex128 coefficients, row-major over the block.
A JSON sidecar (<name>.json) carries the same metadata human-readably.

Trajectory container (.qpt): little-endian flat record
    magic "QPT1" | int64 nmax | int64 grid_size | float64 omega1, omega2 |
    int64 n_slices | float64 times[n] | complex128 coeffs[n, block, block].

CSV emission fixes the dialect: comma separator, '.' decimal point,
header row, LF line endings, floats at 17 significant digits, so equal
inputs produce byte-identical bodies.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .fields import FrequencyVector, Lattice, SpectralField

__all__ = [
    "save_field",
    "load_field",
    "field_to_json",
    "field_from_json",
    "save_trajectory",
    "load_trajectory_data",
    "atomic_write_bytes",
    "atomic_write_text",
    "write_csv",
    "format_float",
    "sha256_file",
]

_FIELD_MAGIC = b"QPF1"
_TRAJ_MAGIC = b"QPT1"

_I8 = np.dtype("<i8")
_F8 = np.dtype("<f8")
_C16 = np.dtype("<c16")


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def format_float(x: float) -> str:
    """Fixed 17-significant-digit decimal form (round-trips doubles)."""
    return format(float(x), ".17g")


def write_csv(path: str | Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(format_float(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _header_bytes(magic: bytes, lattice: Lattice) -> bytes:
    w1, w2 = lattice.freq.omega
    return (magic
            + np.array([lattice.nmax, lattice.grid_size], dtype=_I8).tobytes()
            + np.array([w1, w2], dtype=_F8).tobytes())


def _read_header(buf: bytes, magic: bytes) -> tuple[Lattice, int]:
    if buf[:4] != magic:
        raise ValueError(f"bad container magic {buf[:4]!r}")
    nmax, grid = np.frombuffer(buf, dtype=_I8, count=2, offset=4)
    w1, w2 = np.frombuffer(buf, dtype=_F8, count=2, offset=4 + 16)
    lattice = Lattice(int(nmax), int(grid), FrequencyVector((float(w1), float(w2))))
    return lattice, 4 + 16 + 16


def save_field(path: str | Path, f: SpectralField, metadata: dict | None = None) -> None:
    """Binary field container plus JSON sidecar at <path>.json."""
    payload = (_header_bytes(_FIELD_MAGIC, f.lattice)
               + np.array([1 if f.is_real else 0], dtype=np.uint8).tobytes()
               + np.ascontiguousarray(f.coeffs, dtype=_C16).tobytes())
    atomic_write_bytes(path, payload)
    sidecar = {
        "container": "field",
        "nmax": f.lattice.nmax,
        "grid_size": f.lattice.grid_size,
        "omega": list(f.lattice.freq.omega),
        "is_real": f.is_real,
        "coefficient_count": int(f.coeffs.size),
        "payload_sha256": sha256_file(path),
    }
    if metadata:
        sidecar["metadata"] = metadata
    atomic_write_text(str(path) + ".json", json.dumps(sidecar, indent=2, sort_keys=True))


def load_field(path: str | Path) -> SpectralField:
    buf = Path(path).read_bytes()
    lattice, off = _read_header(buf, _FIELD_MAGIC)
    off += 1  # is_real flag is re-derived from the coefficients
    n = lattice.block_size
    coeffs = np.frombuffer(buf, dtype=_C16, count=n * n, offset=off).reshape(n, n)
    return SpectralField(lattice, coeffs.copy())


def field_to_json(f: SpectralField) -> str:
    """Human-readable JSON form for small fields."""
    return json.dumps({
        "container": "field",
        "nmax": f.lattice.nmax,
        "grid_size": f.lattice.grid_size,
        "omega": list(f.lattice.freq.omega),
        "is_real": f.is_real,
        "coefficients": [[float(z.real), float(z.imag)] for z in f.coeffs.ravel()],
    }, sort_keys=True)


def field_from_json(text: str) -> SpectralField:
    doc = json.loads(text)
    lattice = Lattice(int(doc["nmax"]), int(doc["grid_size"]),
                      FrequencyVector(tuple(doc["omega"])))
    n = lattice.block_size
    c = np.array([complex(re, im) for re, im in doc["coefficients"]],
                 dtype=np.complex128).reshape(n, n)
    return SpectralField(lattice, c)


def save_trajectory(path: str | Path, times: np.ndarray,
                    states: list[SpectralField], metadata: dict | None = None) -> None:
    if len(times) != len(states) or not states:
        raise ValueError("times/states length mismatch or empty trajectory")
    lattice = states[0].lattice
    blocks = np.stack([s.coeffs for s in states])
    payload = (_header_bytes(_TRAJ_MAGIC, lattice)
               + np.array([len(states)], dtype=_I8).tobytes()
               + np.ascontiguousarray(times, dtype=_F8).tobytes()
               + np.ascontiguousarray(blocks, dtype=_C16).tobytes())
    atomic_write_bytes(path, payload)
    sidecar = {
        "container": "trajectory",
        "nmax": lattice.nmax,
        "grid_size": lattice.grid_size,
        "omega": list(lattice.freq.omega),
        "n_slices": len(states),
        "t_first": float(times[0]),
        "t_last": float(times[-1]),
        "payload_sha256": sha256_file(path),
    }
    if metadata:
        sidecar["metadata"] = metadata
    atomic_write_text(str(path) + ".json", json.dumps(sidecar, indent=2, sort_keys=True))


def load_trajectory_data(path: str | Path) -> tuple[np.ndarray, list[SpectralField]]:
    buf = Path(path).read_bytes()
    lattice, off = _read_header(buf, _TRAJ_MAGIC)
    count = int(np.frombuffer(buf, dtype=_I8, count=1, offset=off)[0])
    off += 8
    times = np.frombuffer(buf, dtype=_F8, count=count, offset=off).copy()
    off += 8 * count
    n = lattice.block_size
    blocks = np.frombuffer(buf, dtype=_C16, count=count * n * n,
                           offset=off).reshape(count, n, n)
    states = [SpectralField(lattice, blocks[i].copy()) for i in range(count)]
    return times, states
