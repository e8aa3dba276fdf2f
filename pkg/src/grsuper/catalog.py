"""Oscillator catalog: entries, file format and the characteristic-size model.

Catalog files are JSON Lines: one JSON object per oscillator, blank lines and
lines starting with ``#`` ignored. See ``docs/catalog_format.md``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .physics import NucleusModel, OscillatorMode, nucleus_model, zero_point_fluctuation

__all__ = [
    "CatalogError",
    "CatalogEntry",
    "RModel",
    "DEFAULT_T_BATH",
    "REQUIRED_KEYS",
    "OPTIONAL_KEYS",
    "mass_number",
    "load_catalog",
    "load_catalog_file",
    "builtin_catalog",
    "builtin_catalog_text",
    "serialize_catalog",
    "parse_r_model",
    "characteristic_size",
]

DEFAULT_T_BATH = 0.01

REQUIRED_KEYS = ("id", "label", "f_m_hz", "mass_kg", "q_factor", "material")
OPTIONAL_KEYS = ("t_bath_k", "notes")

_MATERIALS = {"Si": 28, "Al": 27, "SiN": 28}


class CatalogError(ValueError):
    """Invalid catalog document. ``problems`` lists ``(line, field, message)``."""

    def __init__(self, problems):
        self.problems = list(problems)
        text = "; ".join(f"line {ln}: {fld}: {msg}" if fld else f"line {ln}: {msg}" for ln, fld, msg in self.problems)
        super().__init__(text)


def mass_number(material: str) -> int:
    """Mass number used for the nucleus of ``material`` (``Si``, ``Al``, ``SiN`` or ``other:A``)."""
    if material in _MATERIALS:
        return _MATERIALS[material]
    if material.startswith("other:"):
        try:
            A = int(material.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad mass number in material {material!r}") from None
        if A < 1:
            raise ValueError(f"mass number must be >= 1 in {material!r}")
        return A
    raise ValueError(f"unknown material {material!r}; expected Si, Al, SiN or other:A")


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    label: str
    f_m: float
    mass: float
    Q: float
    material: str
    T_bath: float = DEFAULT_T_BATH
    notes: str = ""

    def __post_init__(self):
        for name in ("f_m", "mass", "Q", "T_bath"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        mass_number(self.material)

    @property
    def A(self) -> int:
        return mass_number(self.material)

    @property
    def nucleus(self) -> NucleusModel:
        return nucleus_model(self.A)

    @property
    def mode(self) -> OscillatorMode:
        return OscillatorMode(self.f_m, self.mass, self.Q, self.T_bath)


@dataclass(frozen=True)
class RModel:
    """How the characteristic size ``R`` of the displaced mass is chosen.

    ``nucleus``: nuclear radius of the material; ``zpf``: zero-point spread of
    the mode; ``fixed``: the given radius ``R`` in metres.
    """

    kind: str = "nucleus"
    R: float | None = None

    def __post_init__(self):
        if self.kind not in ("nucleus", "zpf", "fixed"):
            raise ValueError(f"unknown R model {self.kind!r}")
        if self.kind == "fixed":
            if self.R is None or not self.R > 0:
                raise ValueError("fixed R model needs R > 0")
        elif self.R is not None:
            raise ValueError(f"R model {self.kind!r} takes no radius")

    def __str__(self):
        return f"fixed:{self.R!r}" if self.kind == "fixed" else self.kind


def parse_r_model(text: str) -> RModel:
    """Parse ``nucleus``, ``zpf`` or ``fixed:VALUE``."""
    text = text.strip()
    if text.startswith("fixed:"):
        try:
            R = float(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad radius in R model {text!r}") from None
        return RModel("fixed", R)
    return RModel(text)


def characteristic_size(entry: CatalogEntry, model: RModel) -> float:
    if model.kind == "nucleus":
        return entry.nucleus.a
    if model.kind == "zpf":
        return zero_point_fluctuation(entry.mode)
    return model.R


_FIELD_MAP = {
    "f_m_hz": "f_m",
    "mass_kg": "mass",
    "q_factor": "Q",
    "t_bath_k": "T_bath",
}


def _number(value):
    if isinstance(value, bool):
        raise ValueError("expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(value)
    raise ValueError(f"expected a number, got {type(value).__name__}")


def _parse_record(obj, line_no: int):
    problems = []
    if not isinstance(obj, dict):
        return None, [(line_no, "", "record must be a JSON object")]
    for key in REQUIRED_KEYS:
        if key not in obj:
            problems.append((line_no, key, "missing required key"))
    for key in obj:
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            problems.append((line_no, key, "unknown key"))
    kwargs = {}
    for key in ("id", "label", "material", "notes"):
        if key in obj:
            if not isinstance(obj[key], str):
                problems.append((line_no, key, "must be a string"))
            else:
                kwargs[key] = obj[key]
    if "id" in kwargs and not kwargs["id"].strip():
        problems.append((line_no, "id", "must not be empty"))
    if "material" in kwargs:
        try:
            mass_number(kwargs["material"])
        except ValueError as exc:
            problems.append((line_no, "material", str(exc)))
    for key, attr in _FIELD_MAP.items():
        if key not in obj:
            continue
        try:
            v = _number(obj[key])
        except ValueError as exc:
            problems.append((line_no, key, str(exc)))
            continue
        if not (math.isfinite(v) and v > 0):
            problems.append((line_no, key, f"must be positive and finite, got {obj[key]!r}"))
            continue
        kwargs[attr] = v
    if problems:
        return None, problems
    return CatalogEntry(**kwargs), []


def load_catalog(source: str) -> list[CatalogEntry]:
    """Parse and validate a catalog document; raises :class:`CatalogError` listing every problem."""
    entries, problems, seen = [], [], {}
    # only \n separates records; other Unicode line breaks may sit inside strings
    for line_no, raw in enumerate(source.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append((line_no, "", f"malformed JSON: {exc.msg}"))
            continue
        entry, errs = _parse_record(obj, line_no)
        problems.extend(errs)
        if entry is None:
            continue
        if entry.id in seen:
            problems.append((line_no, "id", f"duplicate id {entry.id!r} (first on line {seen[entry.id]})"))
            continue
        seen[entry.id] = line_no
        entries.append(entry)
    if problems:
        raise CatalogError(problems)
    return entries


def load_catalog_file(path) -> list[CatalogEntry]:
    return load_catalog(Path(path).read_text(encoding="utf-8"))


def serialize_catalog(entries) -> str:
    """Canonical text: fixed key order, shortest round-trip floats, ``\\n`` line ends."""
    lines = []
    for e in entries:
        rec = {
            "id": e.id,
            "label": e.label,
            "f_m_hz": e.f_m,
            "mass_kg": e.mass,
            "q_factor": e.Q,
            "material": e.material,
            "t_bath_k": e.T_bath,
            "notes": e.notes,
        }
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def builtin_catalog_text() -> str:
    return resources.files("grsuper").joinpath("data/builtin_catalog.jsonl").read_text(encoding="utf-8")


def builtin_catalog() -> list[CatalogEntry]:
    """The ten bundled oscillators, labelled (a) to (j)."""
    return load_catalog(builtin_catalog_text())
