"""Shipped example frames and the code that regenerates them.

The JSON files under ``etfforge/data`` are produced by :func:`build_fixture`;
tests rebuild them and compare, and re-certify the loaded frames instead of
trusting the files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .frames import ExactEntry, Frame, dumps, frame_from_json, frame_to_json, harmonic_frame, naimark_complement
from .groups import AbelianGroup

FIXTURES = {
    "etf_2_3": "ETF(2,3): characters of Z_3 restricted to {1, 2}",
    "sic_3_9": "SIC(3,9): Weyl-Heisenberg orbit of (0, 1, -1)/sqrt(2)",
    "etf_6_9": "ETF(6,9): Naimark complement of sic_3_9",
}


def etf_2_3() -> Frame:
    """``(1/sqrt 2) [[1, w^5, w^10], [1, w^10, w^5]]`` with ``w = exp(2 pi i / 15)``."""
    return harmonic_frame(AbelianGroup.cyclic(3), [1, 2])


def sic_3_9() -> Frame:
    """Columns ``X^a Z^b v`` for ``(a, b)`` in ``Z_3 x Z_3``, ``a`` major.

    ``X`` is the cyclic shift ``e_j -> e_{j+1}`` and ``Z`` the clock
    ``e_j -> w^j e_j`` with ``w = exp(2 pi i / 3)``.
    """
    fiducial = [ExactEntry(0, 0), ExactEntry(Fraction(1, 2), 0), ExactEntry(Fraction(1, 2), Fraction(1, 2))]
    exact = np.empty((3, 9), dtype=object)
    for a in range(3):
        for b in range(3):
            col = 3 * a + b
            for j in range(3):
                src = fiducial[(j - a) % 3]
                # Z^b acts after the shift, on the target coordinate j
                exact[j, col] = ExactEntry(src.amp_sq, src.phase + Fraction(b * j, 3))
    return Frame.from_exact(exact)


def etf_6_9() -> Frame:
    return naimark_complement(sic_3_9())


_BUILDERS = {"etf_2_3": etf_2_3, "sic_3_9": sic_3_9, "etf_6_9": etf_6_9}


def build_fixture(name: str) -> Frame:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def fixture_text(name: str) -> str:
    """Canonical JSON text of a shipped fixture."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return resources.files("etfforge").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Frame:
    return frame_from_json(json.loads(fixture_text(name)))


def write_fixtures(directory) -> None:
    """Regenerate every fixture file in ``directory``."""
    for name in _BUILDERS:
        Path(directory, f"{name}.json").write_text(dumps(frame_to_json(build_fixture(name))), encoding="utf-8")
