"""Binary ``.gsb`` files holding a graph-spectral basis and its site list.

Layout, little-endian throughout::

    b"GSB1"  u32 version  u32 n  f64 threshold_mi  32-byte site fingerprint
    n x (u16 id length, UTF-8 id, f64 latitude, f64 longitude)
    n x f64 eigenvalues, ascending
    n*n x f64 eigenvectors, column-major
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import ArgumentError, CompatibilityError, CorruptionError, FormatError, UnsupportedVersionError
from .scene import SiteIndex, encode_sites
from .spectral import GraphSpectralBasis

MAGIC = b"GSB1"
VERSION = 1
_HEADER = struct.Struct("<4sIId32s")
HEADER_SIZE = _HEADER.size  # 52


def encode_basis(basis: GraphSpectralBasis, sites: SiteIndex) -> bytes:
    if basis.site_fingerprint != sites.fingerprint:
        raise CompatibilityError("basis fingerprint does not match the site list",
                                 expected=sites.fingerprint, actual=basis.site_fingerprint)
    n = basis.n
    if n == 0 or len(sites) != n:
        raise ArgumentError(f"cannot store basis of size {n} for {len(sites)} sites")
    return b"".join([
        _HEADER.pack(MAGIC, VERSION, n, float(basis.threshold_mi), sites.fingerprint),
        encode_sites(sites.entries),
        np.asarray(basis.eigenvalues, dtype="<f8").tobytes(),
        np.asarray(basis.eigenvectors, dtype="<f8").tobytes(order="F"),
    ])


def save_basis(basis: GraphSpectralBasis, sites: SiteIndex, destination) -> int:
    """Write atomically (temp file, then rename); return the byte count."""
    payload = encode_basis(basis, sites)
    destination = Path(destination)
    fd, tmp = tempfile.mkstemp(prefix=destination.name + ".", suffix=".tmp",
                               dir=destination.parent if str(destination.parent) else ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, destination)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return len(payload)


def decode_basis(data: bytes):
    """Inverse of encode_basis. Returns ``(GraphSpectralBasis, SiteIndex)``."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise FormatError(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}")
    if len(data) < HEADER_SIZE:
        raise FormatError(f"truncated header: file ends at byte offset {len(data)}, "
                          f"header needs {HEADER_SIZE}")
    _, version, n, threshold, fingerprint = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported .gsb version {version}")
    if n == 0:
        raise FormatError("header declares zero sites")

    pos = HEADER_SIZE

    def need(count, what):
        if pos + count > len(data):
            raise FormatError(f"truncated file reading {what}: needed {count} bytes at byte offset "
                              f"{pos}, file ends at {len(data)}")

    entries = []
    for i in range(n):
        need(2, f"site {i} id length")
        (length,) = struct.unpack_from("<H", data, pos)
        pos += 2
        need(length + 16, f"site {i}")
        try:
            sid = bytes(data[pos:pos + length]).decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"site {i} id at byte offset {pos} is not UTF-8") from None
        pos += length
        lat, lon = struct.unpack_from("<dd", data, pos)
        pos += 16
        entries.append((sid, lat, lon))

    need(8 * n, "eigenvalues")
    w = np.frombuffer(data, dtype="<f8", count=n, offset=pos).astype(np.float64)
    pos += 8 * n
    need(8 * n * n, "eigenvector matrix")
    V = np.frombuffer(data, dtype="<f8", count=n * n, offset=pos).reshape((n, n), order="F")
    pos += 8 * n * n
    if pos != len(data):
        raise FormatError(f"{len(data) - pos} trailing bytes after byte offset {pos}")

    recomputed = hashlib.sha256(encode_sites(entries)).digest()
    if recomputed != fingerprint:
        raise CorruptionError(f"site fingerprint mismatch: header {fingerprint.hex()}, "
                              f"recomputed {recomputed.hex()}")
    try:
        sites = SiteIndex(tuple(entries))
    except ArgumentError as exc:
        raise FormatError(f"invalid site table: {exc}") from None
    basis = GraphSpectralBasis(w, np.ascontiguousarray(V, dtype=np.float64), fingerprint, threshold)
    return basis, sites


def load_basis(source):
    with open(source, "rb") as fh:
        data = fh.read()
    return decode_basis(data)
