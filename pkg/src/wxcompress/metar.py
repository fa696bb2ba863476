"""Decoding of METAR reports and AWC-style CSV exports into station observations."""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, TextIO

from .errors import ArgumentError, FormatError, MetarParseError

log = logging.getLogger(__name__)


class FlightCategory(str, Enum):
    VFR = "VFR"
    MVFR = "MVFR"
    IFR = "IFR"
    LIFR = "LIFR"

    @property
    def rank(self) -> int:
        """0 for LIFR up to 3 for VFR; higher is better weather."""
        return _RANK[self]


_RANK = {
    FlightCategory.LIFR: 0,
    FlightCategory.IFR: 1,
    FlightCategory.MVFR: 2,
    FlightCategory.VFR: 3,
}


@dataclass(frozen=True)
class StationObservation:
    station_id: str
    latitude: Optional[float] = None
    longitude: Optional[float] = None
    observation_time: Optional[datetime] = None
    temperature_c: Optional[float] = None
    visibility_mi: Optional[float] = None
    ceiling_ft: Optional[float] = None
    flight_category: Optional[FlightCategory] = None

    def __post_init__(self):
        if not self.station_id:
            raise ArgumentError("station_id must be non-empty")
        if self.latitude is not None and not -90.0 <= self.latitude <= 90.0:
            raise ArgumentError(f"latitude {self.latitude} out of range")
        if self.longitude is not None and not -180.0 <= self.longitude <= 180.0:
            raise ArgumentError(f"longitude {self.longitude} out of range")
        if self.visibility_mi is not None and not self.visibility_mi >= 0:
            raise ArgumentError(f"visibility {self.visibility_mi} is negative")
        if self.ceiling_ft is not None and not self.ceiling_ft >= 0:
            raise ArgumentError(f"ceiling {self.ceiling_ft} is negative")

    @property
    def located(self) -> bool:
        return self.latitude is not None and self.longitude is not None


@dataclass
class IngestReport:
    accepted_count: int = 0
    skipped_count: int = 0
    skip_reasons: list = field(default_factory=list)

    def accept(self):
        self.accepted_count += 1

    def skip(self, record: int, reason: str):
        self.skipped_count += 1
        self.skip_reasons.append((record, reason))
        log.debug("record %d skipped: %s", record, reason)

    def merge(self, other: "IngestReport") -> "IngestReport":
        return IngestReport(
            self.accepted_count + other.accepted_count,
            self.skipped_count + other.skipped_count,
            self.skip_reasons + other.skip_reasons,
        )

    @property
    def total(self) -> int:
        return self.accepted_count + self.skipped_count


@dataclass(frozen=True)
class BoundingBox:
    south: float
    north: float
    west: float
    east: float

    def __post_init__(self):
        if self.south > self.north:
            raise ArgumentError(f"inverted latitude bounds: south {self.south} > north {self.north}")
        if self.west > self.east:
            raise ArgumentError(f"inverted longitude bounds: west {self.west} > east {self.east}")

    def contains(self, lat: float, lon: float) -> bool:
        return self.south <= lat <= self.north and self.west <= lon <= self.east


# Contiguous-US box used for the published scenes. The northern bound as
# published (45.4) cuts off the northern tier; pass a wider box if needed.
CONUS_BOX = BoundingBox(south=25.1, north=45.4, west=-124.8, east=-66.9)


def derive_flight_category(ceiling_ft=None, visibility_mi=None) -> Optional[FlightCategory]:
    """Worse of the ceiling-implied and visibility-implied categories.

    MVFR covers ceilings of 1000-3000 ft and visibilities of 3-5 mi, both
    inclusive. A missing input does not constrain the result.
    """
    if ceiling_ft is not None and ceiling_ft < 0:
        raise ArgumentError(f"negative ceiling: {ceiling_ft}")
    if visibility_mi is not None and visibility_mi < 0:
        raise ArgumentError(f"negative visibility: {visibility_mi}")
    if ceiling_ft is None and visibility_mi is None:
        return None
    cats = []
    if ceiling_ft is not None:
        if ceiling_ft < 500:
            cats.append(FlightCategory.LIFR)
        elif ceiling_ft < 1000:
            cats.append(FlightCategory.IFR)
        elif ceiling_ft <= 3000:
            cats.append(FlightCategory.MVFR)
        else:
            cats.append(FlightCategory.VFR)
    if visibility_mi is not None:
        if visibility_mi < 1:
            cats.append(FlightCategory.LIFR)
        elif visibility_mi < 3:
            cats.append(FlightCategory.IFR)
        elif visibility_mi <= 5:
            cats.append(FlightCategory.MVFR)
        else:
            cats.append(FlightCategory.VFR)
    return min(cats, key=lambda c: c.rank)


# --- raw METAR text -------------------------------------------------------

_STATION_RE = re.compile(r"^[A-Z][A-Z0-9]{2,3}$")
_TIME_RE = re.compile(r"^(\d{2})(\d{2})(\d{2})Z$")
_TEMP_RE = re.compile(r"^(M?)(\d{2})/(M?\d{2})?$")
_VIS_RE = re.compile(r"^([MP]?)(\d{1,2}(?:/\d{1,2})?)SM$")
_WHOLE_RE = re.compile(r"^\d$")
_LAYER_RE = re.compile(r"^(BKN|OVC|VV)(\d{3})(?:CB|TCU)?$")


def _fraction(text: str) -> float:
    value = Fraction(text)
    if value < 0:
        raise ValueError(text)
    return float(value)


def _resolve_day(day: int, hour: int, minute: int, reference: datetime) -> datetime:
    # A METAR stamp carries only day/hour/minute; take the candidate in the
    # previous, current or next month of ``reference`` closest to it.
    ref = _utc(reference)
    candidates = []
    for shift in (-1, 0, 1):
        month0 = ref.year * 12 + ref.month - 1 + shift
        try:
            candidates.append(datetime(month0 // 12, month0 % 12 + 1, day, hour, minute, tzinfo=timezone.utc))
        except ValueError:
            continue
    if not candidates:
        raise ValueError(f"day {day} does not fit near {reference:%Y-%m}")
    return min(candidates, key=lambda c: abs(c - ref))


def parse_metar_text(line: str, reference_time: Optional[datetime] = None) -> StationObservation:
    """Decode one METAR report line into an observation without coordinates.

    Extracts temperature, prevailing visibility in statute miles and the
    ceiling (lowest BKN/OVC/VV layer). Tokens after ``RMK`` and any token not
    understood are ignored. When ``reference_time`` is given the ``ddhhmmZ``
    stamp is resolved to a full UTC timestamp near it.

    Raises MetarParseError when the line is blank or has no station id.
    """
    if not isinstance(line, str):
        raise MetarParseError("report is not text")
    tokens = line.strip().upper().split()
    while tokens and tokens[0] in ("METAR", "SPECI"):
        tokens.pop(0)
    if not tokens:
        raise MetarParseError("empty report")
    station = tokens[0]
    if not _STATION_RE.match(station):
        raise MetarParseError(f"bad station id token {station!r}")

    when = temp = vis = None
    ceiling = None
    prev = None
    for tok in tokens[1:]:
        if tok == "RMK":
            break
        try:
            if when is None and (m := _TIME_RE.match(tok)):
                day, hour, minute = (int(g) for g in m.groups())
                if reference_time is not None and hour < 24 and minute < 60:
                    when = _resolve_day(day, hour, minute, reference_time)
            elif vis is None and (m := _VIS_RE.match(tok)):
                qualifier, amount = m.groups()
                vis = _fraction(amount)
                if prev is not None and _WHOLE_RE.match(prev) and "/" in amount:
                    vis += int(prev)
            elif temp is None and (m := _TEMP_RE.match(tok)):
                sign, digits, _ = m.groups()
                temp = -float(digits) if sign else float(digits)
            elif m := _LAYER_RE.match(tok):
                height = float(int(m.group(2)) * 100)
                ceiling = height if ceiling is None else min(ceiling, height)
        except (ValueError, ZeroDivisionError, OverflowError):
            pass
        prev = tok

    return StationObservation(
        station_id=station,
        observation_time=when,
        temperature_c=temp,
        visibility_mi=vis,
        ceiling_ft=ceiling,
        flight_category=derive_flight_category(ceiling, vis),
    )


def parse_metar_lines(lines: Iterable[str], reference_time=None):
    """Decode many reports; unparseable lines are recorded, never raised."""
    report = IngestReport()
    out = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            out.append(parse_metar_text(line, reference_time))
        except MetarParseError as exc:
            report.skip(number, str(exc))
        else:
            report.accept()
    return out, report


def read_station_table(stream: TextIO) -> dict:
    """Read a ``station_id,latitude,longitude`` CSV into ``{id: (lat, lon)}``."""
    reader = csv.DictReader(stream)
    missing = [c for c in ("station_id", "latitude", "longitude") if c not in (reader.fieldnames or [])]
    if missing:
        raise FormatError(f"station table missing column {missing[0]!r}")
    table = {}
    for row in reader:
        sid = (row["station_id"] or "").strip().upper()
        try:
            lat, lon = float(row["latitude"]), float(row["longitude"])
        except (TypeError, ValueError):
            log.warning("station table: bad coordinates for %r", sid)
            continue
        if sid and -90 <= lat <= 90 and -180 <= lon <= 180:
            table[sid] = (lat, lon)
    return table


def join_locations(partials, table):
    """Attach coordinates from ``table``; reports for unknown stations are skipped."""
    report = IngestReport()
    out = []
    for number, obs in enumerate(partials, start=1):
        loc = table.get(obs.station_id)
        if loc is None:
            report.skip(number, "unknown station")
            continue
        out.append(replace(obs, latitude=loc[0], longitude=loc[1]))
        report.accept()
    return out, report


# --- AWC-style CSV --------------------------------------------------------

@dataclass(frozen=True)
class ColumnMap:
    """Header names for the AWC-style CSV. Sky cover/base columns may repeat."""

    station_id: str = "station_id"
    observation_time: str = "observation_time"
    latitude: str = "latitude"
    longitude: str = "longitude"
    temperature: str = "temp_c"
    visibility: str = "visibility_statute_mi"
    flight_category: str = "flight_category"
    ceiling: str = "ceiling_ft"
    sky_cover: str = "sky_cover"
    cloud_base: str = "cloud_base_ft_agl"
    max_sky_layers: int = 4

    def mandatory(self):
        return (self.station_id, self.observation_time, self.latitude, self.longitude)


def parse_time(text: str) -> datetime:
    """Parse an RFC-3339 timestamp; naive values are taken as UTC."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    stamp = datetime.fromisoformat(text)
    if stamp.tzinfo is None:
        return stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def _opt_float(text):
    if text is None:
        return None
    text = text.strip().rstrip("+")
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if value == value and abs(value) != float("inf") else None


def _ceiling_from_layers(row, cover_idx, base_idx):
    ceiling = None
    for ci, bi in zip(cover_idx, base_idx):
        if ci >= len(row) or bi >= len(row):
            continue
        if row[ci].strip().upper() not in ("BKN", "OVC", "OVX", "VV"):
            continue
        base = _opt_float(row[bi])
        if base is not None and base >= 0:
            ceiling = base if ceiling is None else min(ceiling, base)
    return ceiling


def _rows(reader, report):
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            report.skip(reader.line_num, f"unreadable line: {exc}")
            continue
        yield row


def parse_awc_csv(stream: TextIO, columns: ColumnMap = ColumnMap()):
    """Read observations from an AWC-style CSV export.

    Single-cell lines before the header (the AWC preamble) are ignored.
    Rows with an unusable station id, coordinate or timestamp are skipped
    and recorded in the returned IngestReport. Absent or unparseable optional
    fields become None; a missing flight category is derived from ceiling
    and visibility when possible.
    """
    reader = csv.reader(line.replace("\0", "") for line in stream)
    report = IngestReport()
    header = None
    for row in _rows(reader, report):
        if len(row) > 1:
            header = [h.strip() for h in row]
            break
    if header is None:
        raise FormatError(f"no header row; missing column {columns.station_id!r}")
    for name in columns.mandatory():
        if name not in header:
            raise FormatError(f"header missing mandatory column {name!r}")

    def idx(name):
        return header.index(name) if name in header else None

    i_sid, i_time = idx(columns.station_id), idx(columns.observation_time)
    i_lat, i_lon = idx(columns.latitude), idx(columns.longitude)
    i_temp, i_vis = idx(columns.temperature), idx(columns.visibility)
    i_cat, i_ceil = idx(columns.flight_category), idx(columns.ceiling)
    cover_idx = [i for i, h in enumerate(header) if h == columns.sky_cover][: columns.max_sky_layers]
    base_idx = [i for i, h in enumerate(header) if h == columns.cloud_base][: columns.max_sky_layers]

    def cell(row, i):
        return row[i] if i is not None and i < len(row) else None

    out = []
    for number, row in enumerate(_rows(reader, report), start=1):
        if not any(c.strip() for c in row):
            continue
        sid = (cell(row, i_sid) or "").strip().upper()
        if not sid:
            report.skip(number, "missing station id")
            continue
        lat, lon = _opt_float(cell(row, i_lat)), _opt_float(cell(row, i_lon))
        if lat is None or not -90 <= lat <= 90:
            report.skip(number, f"bad latitude {cell(row, i_lat)!r}")
            continue
        if lon is None or not -180 <= lon <= 180:
            report.skip(number, f"bad longitude {cell(row, i_lon)!r}")
            continue
        try:
            when = parse_time(cell(row, i_time) or "")
        except (ValueError, OverflowError):
            report.skip(number, f"bad observation time {cell(row, i_time)!r}")
            continue

        vis = _opt_float(cell(row, i_vis))
        if vis is not None and vis < 0:
            vis = None
        ceiling = _opt_float(cell(row, i_ceil))
        if ceiling is None or ceiling < 0:
            ceiling = _ceiling_from_layers(row, cover_idx, base_idx)
        raw_cat = (cell(row, i_cat) or "").strip().upper()
        try:
            category = FlightCategory(raw_cat)
        except ValueError:
            category = derive_flight_category(ceiling, vis)

        out.append(StationObservation(
            station_id=sid,
            latitude=lat,
            longitude=lon,
            observation_time=when,
            temperature_c=_opt_float(cell(row, i_temp)),
            visibility_mi=vis,
            ceiling_ft=ceiling,
            flight_category=category,
        ))
        report.accept()
    return out, report


def filter_observations(observations, box: BoundingBox = CONUS_BOX, window=None):
    """Keep located observations inside ``box`` and the half-open ``window``.

    ``window`` is ``(start, end)`` or None for no time restriction.
    Observations without a timestamp never pass a time window.
    """
    if window is not None:
        start, end = (_utc(t) for t in window)
        if not start < end:
            raise ArgumentError(f"empty time window: {start} .. {end}")
    kept = []
    for obs in observations:
        if not obs.located or not box.contains(obs.latitude, obs.longitude):
            continue
        if window is not None:
            if obs.observation_time is None or not start <= _utc(obs.observation_time) < end:
                continue
        kept.append(obs)
    return kept


def _utc(t: datetime) -> datetime:
    return t.replace(tzinfo=timezone.utc) if t.tzinfo is None else t.astimezone(timezone.utc)


OBSERVATION_COLUMNS = (
    "station_id", "observation_time", "latitude", "longitude",
    "temp_c", "visibility_statute_mi", "ceiling_ft", "flight_category",
)


def write_observations_csv(observations, stream: TextIO):
    """Write the canonical observation CSV (readable back by parse_awc_csv)."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(OBSERVATION_COLUMNS)

    def num(v):
        return "" if v is None else format(float(v), ".17g")

    for o in observations:
        w.writerow([
            o.station_id,
            "" if o.observation_time is None else _utc(o.observation_time).strftime("%Y-%m-%dT%H:%M:%SZ"),
            num(o.latitude), num(o.longitude), num(o.temperature_c),
            num(o.visibility_mi), num(o.ceiling_ft),
            "" if o.flight_category is None else o.flight_category.value,
        ])
