"""HITRAN line-list ingestion.

Reads the 160-character HITRAN 2004 ``.par`` record format into
:class:`SpectralLine` objects and assembles frequency-sorted
:class:`LineCatalog` instances.

Column layout (1-based, inclusive)::

    1-2     molecule id             I2
    3       isotopologue id         I1
    4-15    vacuum wavenumber       F12.6   cm^-1
    16-25   intensity at 296 K      E10.3   cm^-1/(molecule cm^-2)
    26-35   Einstein A              E10.3   (ignored)
    36-40   air-broadened HWHM      F5.4    cm^-1/atm
    41-45   self-broadened HWHM     F5.3    cm^-1/atm
    46-55   lower-state energy      F10.4   cm^-1
    56-59   T-dependence of air HWHM F4.2
    60-67   air pressure shift      F8.6    (ignored)
    68-160  quantum numbers, error codes, references (ignored)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

__all__ = [
    "RECORD_LENGTH",
    "WAVENUMBER_TO_GHZ",
    "SpectroscopyError",
    "MalformedRecord",
    "NonPositiveWidth",
    "EmptyBand",
    "SpectralLine",
    "LineCatalog",
    "parse_line_record",
    "format_line_record",
    "load_catalog",
    "read_catalog",
    "bundled_catalog_path",
    "load_bundled_catalog",
]

RECORD_LENGTH = 160

# speed of light in cm/ns: 1 cm^-1 == 29.9792458 GHz
WAVENUMBER_TO_GHZ = 29.9792458

WATER = 1

BUNDLED_CATALOG = "h2o_0-1100ghz.par"

# (name, start, stop) as 0-based python slices
_FIELDS = (
    ("molecule_id", 0, 2),
    ("isotopologue_id", 2, 3),
    ("wavenumber", 3, 15),
    ("intensity", 15, 25),
    ("einstein_a", 25, 35),
    ("air_halfwidth", 35, 40),
    ("self_halfwidth", 40, 45),
    ("lower_state_energy", 45, 55),
    ("temperature_exponent", 55, 59),
    ("pressure_shift", 59, 67),
)


class SpectroscopyError(ValueError):
    """Base class for line-list errors."""


class MalformedRecord(SpectroscopyError):
    """A record is not a well-formed 160-character HITRAN line.

    ``line_index`` is the 1-based line number within the source stream
    when the record came from :func:`load_catalog`, otherwise ``None``.
    """

    def __init__(self, message: str, line_index: Optional[int] = None):
        self.line_index = line_index
        if line_index is not None:
            message = f"line {line_index}: {message}"
        super().__init__(message)


class NonPositiveWidth(MalformedRecord):
    """Air-broadened half width is zero or negative."""


class EmptyBand(SpectroscopyError):
    """Frequency band has ``f_lo >= f_hi``."""


@dataclass(frozen=True)
class SpectralLine:
    """One absorption line.

    ``center_frequency`` is in GHz; intensity and widths keep their
    HITRAN units (cm^-1/(molecule cm^-2) and cm^-1/atm at 296 K).
    """

    molecule_id: int
    isotopologue_id: int
    center_frequency: float
    intensity: float
    air_halfwidth: float
    self_halfwidth: float
    lower_state_energy: float
    temperature_exponent: float

    def __post_init__(self) -> None:
        if not self.center_frequency >= 0:
            raise SpectroscopyError(f"negative line frequency {self.center_frequency}")
        if not self.intensity >= 0:
            raise SpectroscopyError(f"negative line intensity {self.intensity}")
        if not self.air_halfwidth > 0:
            raise NonPositiveWidth(f"air half width must be > 0, got {self.air_halfwidth}")
        if not self.self_halfwidth >= 0:
            raise SpectroscopyError(f"negative self half width {self.self_halfwidth}")

    @property
    def wavenumber(self) -> float:
        """Line position in cm^-1."""
        return self.center_frequency / WAVENUMBER_TO_GHZ


@dataclass(frozen=True)
class LineCatalog:
    """Immutable, frequency-sorted collection of :class:`SpectralLine`."""

    lines: Tuple[SpectralLine, ...] = ()
    source_label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))
        freqs = [ln.center_frequency for ln in self.lines]
        if any(a > b for a, b in zip(freqs, freqs[1:])):
            raise SpectroscopyError("catalog lines must be sorted by center frequency")

    @classmethod
    def from_lines(cls, lines: Iterable[SpectralLine], source_label: str = "") -> "LineCatalog":
        """Build a catalog from lines in any order."""
        return cls(tuple(sorted(lines, key=lambda ln: ln.center_frequency)), source_label)

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[SpectralLine]:
        return iter(self.lines)

    def __getitem__(self, i: int) -> SpectralLine:
        return self.lines[i]

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(ln.center_frequency for ln in self.lines)


def _field(record: str, name: str, start: int, stop: int, kind: type):
    text = record[start:stop]
    try:
        value = kind(text)
    except ValueError:
        raise MalformedRecord(
            f"field {name} (columns {start + 1}-{stop}) is not numeric: {text!r}"
        ) from None
    if kind is float and not math.isfinite(value):
        raise MalformedRecord(f"field {name} (columns {start + 1}-{stop}) is not finite: {text!r}")
    return value


def parse_line_record(record: str) -> SpectralLine:
    """Parse one HITRAN 2004 ``.par`` record.

    A single trailing newline is tolerated; anything else must be exactly
    160 characters long.

    Raises
    ------
    MalformedRecord
        Wrong length or a non-numeric mandatory field.
    NonPositiveWidth
        Air-broadened half width <= 0.
    """
    record = record.rstrip("\r\n")
    if len(record) != RECORD_LENGTH:
        raise MalformedRecord(f"expected {RECORD_LENGTH} characters, got {len(record)}")

    values = {}
    for name, start, stop in _FIELDS:
        if name in ("einstein_a", "pressure_shift"):
            continue
        kind = int if name in ("molecule_id", "isotopologue_id") else float
        values[name] = _field(record, name, start, stop, kind)

    wavenumber = values.pop("wavenumber")
    if wavenumber < 0:
        raise MalformedRecord(f"negative wavenumber {wavenumber}")
    if values["air_halfwidth"] <= 0:
        raise NonPositiveWidth(f"air half width must be > 0, got {values['air_halfwidth']}")
    try:
        return SpectralLine(center_frequency=wavenumber * WAVENUMBER_TO_GHZ, **values)
    except NonPositiveWidth:
        raise
    except SpectroscopyError as exc:
        raise MalformedRecord(str(exc)) from None


def _fortran_f(value: float, width: int, decimals: int) -> str:
    # Fortran Fw.d drops the leading zero when the field would overflow.
    text = f"{value:{width}.{decimals}f}"
    if len(text) > width:
        text = text.replace("0.", ".", 1)
    if len(text) != width:
        raise ValueError(f"{value} does not fit F{width}.{decimals}")
    return text


def _fortran_e(value: float, width: int, decimals: int) -> str:
    text = f"{value:{width}.{decimals}E}"
    if len(text) != width:
        raise ValueError(f"{value} does not fit E{width}.{decimals}")
    return text


def format_line_record(
    line: SpectralLine,
    einstein_a: float = 0.0,
    pressure_shift: float = 0.0,
    tail: str = "",
) -> str:
    """Serialize a line back into a 160-character ``.par`` record.

    ``tail`` fills columns 68-160 (quantum labels, error codes, references)
    and is padded with blanks.
    """
    head = (
        f"{line.molecule_id:2d}"
        f"{line.isotopologue_id:1d}"
        + _fortran_f(line.wavenumber, 12, 6)
        + _fortran_e(line.intensity, 10, 3)
        + _fortran_e(einstein_a, 10, 3)
        + _fortran_f(line.air_halfwidth, 5, 4)
        + _fortran_f(line.self_halfwidth, 5, 3)
        + _fortran_f(line.lower_state_energy, 10, 4)
        + _fortran_f(line.temperature_exponent, 4, 2)
        + _fortran_f(pressure_shift, 8, 6)
    )
    if len(tail) > RECORD_LENGTH - len(head):
        raise ValueError("tail too long")
    return head + tail.ljust(RECORD_LENGTH - len(head))


def load_catalog(
    records: Iterable[str],
    molecule_filter: Optional[int] = WATER,
    band: Sequence[float] = (0.0, 1100.0),
    source_label: str = "",
) -> LineCatalog:
    """Parse a stream of ``.par`` records into a sorted catalog.

    Blank lines are skipped. Every other line must parse; the first failure
    is raised as :class:`MalformedRecord` carrying its 1-based line number.
    Lines are kept when their molecule id equals ``molecule_filter`` (any
    molecule when ``None``) and ``f_lo <= center_frequency <= f_hi``.
    """
    f_lo, f_hi = float(band[0]), float(band[1])
    if f_lo < 0:
        raise SpectroscopyError(f"band lower edge must be >= 0, got {f_lo}")
    if f_lo >= f_hi:
        raise EmptyBand(f"empty band [{f_lo}, {f_hi}]")

    kept = []
    for index, raw in enumerate(records, start=1):
        if not raw.strip():
            continue
        try:
            line = parse_line_record(raw)
        except MalformedRecord as exc:
            raise type(exc)(str(exc), line_index=index) from None
        if molecule_filter is not None and line.molecule_id != molecule_filter:
            continue
        if f_lo <= line.center_frequency <= f_hi:
            kept.append(line)
    return LineCatalog.from_lines(kept, source_label)


def read_catalog(
    path: Union[str, Path],
    molecule_filter: Optional[int] = WATER,
    band: Sequence[float] = (0.0, 1100.0),
) -> LineCatalog:
    """Load a ``.par`` file from disk."""
    path = Path(path)
    with path.open("r", encoding="ascii", newline="") as fh:
        return load_catalog(fh, molecule_filter, band, source_label=str(path))


def bundled_catalog_path() -> Path:
    """Path of the water-vapour mini catalog shipped with the package."""
    return Path(str(resources.files("thzlink") / "data" / BUNDLED_CATALOG))


def load_bundled_catalog(band: Sequence[float] = (0.0, 1100.0)) -> LineCatalog:
    return read_catalog(bundled_catalog_path(), WATER, band)
