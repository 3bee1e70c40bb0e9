"""Paths to the problem and Hamiltonian files shipped with the package."""

from __future__ import annotations

from pathlib import Path

_DIR = Path(__file__).parent / "examples"

BUNDLED = (
    "prisoners_dilemma",
    "matching_pennies",
    "coordination",
    "pairwise_chain",
    "harmonic_oscillator",
)


def bundled_path(name: str) -> Path:
    path = _DIR / f"{name}.json"
    if not path.exists():
        raise KeyError(f"no bundled file {name!r}; choose one of {', '.join(BUNDLED)}")
    return path
