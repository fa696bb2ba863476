"""Scene vectors: one weather quantity sampled over an ordered list of stations."""

from __future__ import annotations

import csv
import hashlib
import struct
from dataclasses import dataclass
from enum import Enum
from typing import TextIO

import numpy as np

from .errors import ArgumentError, EmptySceneError, FormatError
from .metar import FlightCategory

MAX_VISIBILITY_MI = 10.0


class WeatherQuantity(str, Enum):
    TEMPERATURE = "temperature"
    FLIGHT_CATEGORY = "flight-category"
    VISIBILITY_REDUCTION = "visibility-reduction"

    @property
    def categorical(self) -> bool:
        return self is WeatherQuantity.FLIGHT_CATEGORY


def encode_sites(entries) -> bytes:
    """Canonical byte encoding of a site list: per site u16 id length, UTF-8
    id, f64 latitude, f64 longitude, all little-endian."""
    parts = []
    for sid, lat, lon in entries:
        raw = sid.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(struct.pack("<dd", lat, lon))
    return b"".join(parts)


@dataclass(frozen=True)
class SiteIndex:
    """Ordered stations; position i is vertex i of every downstream matrix."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((str(s), float(a), float(b)) for s, a, b in self.entries)
        object.__setattr__(self, "entries", entries)
        ids = [e[0] for e in entries]
        if len(set(ids)) != len(ids):
            raise ArgumentError("duplicate station ids in site index")
        for sid, lat, lon in entries:
            if not sid:
                raise ArgumentError("empty station id in site index")
            if len(sid.encode("utf-8")) > 0xFFFF:
                raise ArgumentError(f"station id too long: {sid[:20]!r}...")
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise ArgumentError(f"site {sid} has invalid coordinates ({lat}, {lon})")
        object.__setattr__(self, "fingerprint", hashlib.sha256(encode_sites(entries)).digest())

    def __len__(self):
        return len(self.entries)

    @property
    def station_ids(self):
        return [e[0] for e in self.entries]

    @property
    def latitudes(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=np.float64)

    @property
    def longitudes(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries], dtype=np.float64)

    @classmethod
    def from_coordinates(cls, lat, lon, prefix="S"):
        """Site index with synthetic ids, mostly for tests and simulations."""
        width = len(str(max(len(lat) - 1, 0)))
        return cls(tuple((f"{prefix}{i:0{width}d}", a, b) for i, (a, b) in enumerate(zip(lat, lon))))


@dataclass(frozen=True)
class SceneVector:
    quantity: WeatherQuantity
    site_fingerprint: bytes
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ArgumentError("scene values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("scene values must be finite")
        if self.quantity is WeatherQuantity.FLIGHT_CATEGORY and not np.all((values == 0) | (values == 1)):
            raise ArgumentError("flight-category scene must be binary")
        if self.quantity is WeatherQuantity.VISIBILITY_REDUCTION and (
                values.size and (values.min() < 0 or values.max() > MAX_VISIBILITY_MI)):
            raise ArgumentError("visibility reduction must lie in [0, 10]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.shape[0]


def _scene_value(obs, quantity):
    if quantity is WeatherQuantity.TEMPERATURE:
        return obs.temperature_c
    if quantity is WeatherQuantity.FLIGHT_CATEGORY:
        if obs.flight_category is None:
            return None
        return 0.0 if obs.flight_category is FlightCategory.VFR else 1.0
    if obs.visibility_mi is None:
        return None
    return MAX_VISIBILITY_MI - min(obs.visibility_mi, MAX_VISIBILITY_MI)


def build_scene(observations, quantity):
    """Build ``(SiteIndex, SceneVector)`` for one quantity.

    The latest report per station wins (input order breaks timestamp ties),
    stations lacking the needed field are dropped, and sites are ordered by
    station id.
    """
    quantity = WeatherQuantity(quantity)
    latest = {}
    for obs in observations:
        if not obs.located:
            continue
        cur = latest.get(obs.station_id)
        if cur is None or _later_or_equal(obs, cur):
            latest[obs.station_id] = obs
    rows = []
    for sid in sorted(latest):
        obs = latest[sid]
        value = _scene_value(obs, quantity)
        if value is None or not np.isfinite(value):
            continue
        rows.append(((sid, obs.latitude, obs.longitude), value))
    if not rows:
        raise EmptySceneError(f"no station reports a usable {quantity.value} value")
    sites = SiteIndex(tuple(r[0] for r in rows))
    scene = SceneVector(quantity, sites.fingerprint, np.array([r[1] for r in rows]))
    return sites, scene


def _later_or_equal(a, b):
    if a.observation_time is None:
        return b.observation_time is None
    if b.observation_time is None:
        return True
    return a.observation_time >= b.observation_time


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_scene_csv(sites: SiteIndex, values, stream: TextIO):
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (len(sites),):
        raise ArgumentError(f"{values.shape[0]} values for {len(sites)} sites")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["station_id", "latitude", "longitude", "value"])
    for (sid, lat, lon), v in zip(sites.entries, values):
        w.writerow([sid, _fmt(lat), _fmt(lon), _fmt(v)])


def read_scene_csv(stream: TextIO, quantity=None):
    """Read a scene CSV. Returns ``(SiteIndex, SceneVector)`` when ``quantity``
    is given, else ``(SiteIndex, values)``."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["station_id", "latitude", "longitude", "value"]:
        raise FormatError(f"scene file header must be station_id,latitude,longitude,value; got {header}")
    entries, values = [], []
    for number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise FormatError(f"scene file line {number}: expected 4 fields, got {len(row)}")
        try:
            entries.append((row[0], float(row[1]), float(row[2])))
            values.append(float(row[3]))
        except ValueError as exc:
            raise FormatError(f"scene file line {number}: {exc}") from None
    if not entries:
        raise EmptySceneError("scene file has no sites")
    try:
        sites = SiteIndex(tuple(entries))
    except ArgumentError as exc:
        raise FormatError(f"scene file: {exc}") from None
    values = np.array(values)
    if quantity is None:
        return sites, values
    return sites, SceneVector(WeatherQuantity(quantity), sites.fingerprint, values)
