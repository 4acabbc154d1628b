"""Spin species definitions and their JSON serialization.

A species couples one electron spin (S = 1/2) to one nuclear spin I via
an isotropic hyperfine constant A, stated as a frequency A/h in MHz.
A = 0 or I = 0 degrades gracefully to a bare spin-1/2 paramagnet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class UnsupportedSpeciesError(ValueError):
    """Raised for spin systems outside the supported S = 1/2 family."""


def _is_half_integer(value: float) -> bool:
    return abs(2.0 * value - round(2.0 * value)) < 1e-9


@dataclass(frozen=True)
class SpinSpecies:
    """One impurity type: quantum numbers and coupling constants.

    Attributes:
        name: text label used in file names and reports.
        S: electron spin quantum number; only 1/2 is supported.
        I: nuclear spin quantum number, half-integer >= 0.
        g: electron g-factor, > 0.
        A: isotropic hyperfine constant as a frequency A/h in MHz, >= 0.
    """

    name: str
    S: float
    I: float
    g: float
    A: float

    def __post_init__(self):
        if not _is_half_integer(self.S) or self.S < 0:
            raise ValueError(f"S must be a non-negative half-integer, got {self.S}")
        if not _is_half_integer(self.I) or self.I < 0:
            raise ValueError(f"I must be a non-negative half-integer, got {self.I}")
        if abs(self.S - 0.5) > 1e-9:
            raise UnsupportedSpeciesError(f"only S = 1/2 species are supported, got S={self.S}")
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.A < 0:
            raise ValueError(f"A must be non-negative, got {self.A}")

    @property
    def dimension(self) -> int:
        """Hilbert-space dimension (2S+1)(2I+1)."""
        return int(round(2 * self.S + 1)) * int(round(2 * self.I + 1))

    @property
    def has_hyperfine(self) -> bool:
        return self.A > 0 and self.I > 0

    def to_dict(self) -> dict:
        return {"name": self.name, "S": self.S, "I": self.I, "g": self.g, "A_MHz": self.A}

    @classmethod
    def from_dict(cls, entry: dict) -> "SpinSpecies":
        try:
            return cls(
                name=str(entry["name"]),
                S=float(entry["S"]),
                I=float(entry["I"]),
                g=float(entry["g"]),
                A=float(entry["A_MHz"]),
            )
        except KeyError as exc:
            raise ValueError(f"species definition missing field {exc}") from exc


# Bundled defaults: the bismuth donor and a bare spin-1/2 reference system.
BUILTIN_SPECIES = {
    "Bi": SpinSpecies(name="Bi", S=0.5, I=4.5, g=2.0003, A=1475.4),
    "e12": SpinSpecies(name="e12", S=0.5, I=0.0, g=2.0, A=0.0),
}


def resolve_species(entry) -> SpinSpecies:
    """Resolve a species from a builtin name, a dict, or pass one through."""
    if isinstance(entry, SpinSpecies):
        return entry
    if isinstance(entry, str):
        if entry in BUILTIN_SPECIES:
            return BUILTIN_SPECIES[entry]
        raise ValueError(f"unknown species name {entry!r}; builtins are {sorted(BUILTIN_SPECIES)}")
    if isinstance(entry, dict):
        return SpinSpecies.from_dict(entry)
    raise ValueError(f"cannot interpret species entry {entry!r}")


def load_species_file(path) -> list[SpinSpecies]:
    """Load species definitions from a JSON document (one object or a list)."""
    raw = json.loads(Path(path).read_text())
    entries = raw if isinstance(raw, list) else [raw]
    return [SpinSpecies.from_dict(e) for e in entries]
