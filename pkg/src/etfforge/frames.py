"""Finite frames in C^D: Gram matrices, Welch bound, certificates, Naimark complements.

A :class:`Frame` stores its synthesis operator as a ``D x N`` complex array whose
columns are the frame vectors.  Frames built from characters also carry an
exact form, one :class:`ExactEntry` per entry, so that phases can be compared
without rounding.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import jsonschema
import numpy as np

from .errors import (
    BadParameters,
    EmptySubset,
    NonUnitColumnsWarning,
    NotTall,
    NotTight,
    ParseError,
    RankMismatch,
    SchemaError,
    ShapeMismatch,
)
from .groups import AbelianGroup, phase_matrix

DEFAULT_TOL = 1e-8

ETF = "ETF"
UNTF_ONLY = "UNTF_only"
NEITHER = "neither"


@dataclass(frozen=True)
class ExactEntry:
    """``sqrt(amp_sq) * exp(2 pi i phase)`` with rational ``amp_sq`` and ``phase``."""

    amp_sq: Fraction
    phase: Fraction

    def __post_init__(self):
        phase = Fraction(self.phase) % 1
        amp = Fraction(self.amp_sq)
        if amp < 0:
            raise ValueError("amp_sq must be nonnegative")
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "amp_sq", amp)

    def __complex__(self):
        return complex(math.sqrt(self.amp_sq) * np.exp(2j * np.pi * float(self.phase)))

    def __mul__(self, other: ExactEntry) -> ExactEntry:
        return ExactEntry(self.amp_sq * other.amp_sq, self.phase + other.phase)

    def to_json(self) -> dict[str, str]:
        return {"amp_sq": str(self.amp_sq), "phase": str(self.phase)}

    @classmethod
    def from_json(cls, data: dict[str, str]) -> ExactEntry:
        return cls(Fraction(data["amp_sq"]), Fraction(data["phase"]))


def exact_to_complex(exact: np.ndarray) -> np.ndarray:
    amp = np.vectorize(lambda e: math.sqrt(e.amp_sq), otypes=[float])(exact)
    ph = np.vectorize(lambda e: float(e.phase), otypes=[float])(exact)
    return amp * np.exp(2j * np.pi * ph)


@dataclass(frozen=True, eq=False)
class Frame:
    entries: np.ndarray
    exact: np.ndarray | None = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ShapeMismatch("frame entries must be a D x N matrix")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.exact is not None:
            exact = np.asarray(self.exact, dtype=object)
            if exact.shape != entries.shape:
                raise ShapeMismatch("exact entries do not match the frame shape")
            exact.setflags(write=False)
            object.__setattr__(self, "exact", exact)
            drift = np.max(np.abs(exact_to_complex(exact) - entries), initial=0.0)
            if drift > 1e-12:
                raise ValueError(f"exact entries disagree with floats by {drift:.3g}")

    @classmethod
    def from_exact(cls, exact: np.ndarray) -> Frame:
        exact = np.asarray(exact, dtype=object)
        return cls(exact_to_complex(exact), exact)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def count(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def column(self, n: int) -> np.ndarray:
        return self.entries[:, n]

    def columns(self, idx: Sequence[int]) -> Frame:
        idx = list(idx)
        return Frame(self.entries[:, idx], None if self.exact is None else self.exact[:, idx])

    def __repr__(self):
        kind = "exact" if self.exact is not None else "float"
        return f"Frame(D={self.dim}, N={self.count}, {kind})"


def gram(frame: Frame) -> np.ndarray:
    """``G[n, n'] = <phi_n, phi_n'>``, conjugate-linear in the first slot."""
    Phi = frame.entries
    return Phi.conj().T @ Phi


def frame_operator(frame: Frame) -> np.ndarray:
    Phi = frame.entries
    return Phi @ Phi.conj().T


def welch_bound_sq(D: int, N: int) -> Fraction:
    """Squared Welch bound ``(N - D) / (D (N - 1))``."""
    if not (N >= D >= 1 and N > 1):
        raise BadParameters(f"Welch bound needs N >= D >= 1 and N > 1, got D={D}, N={N}")
    return Fraction(N - D, D * (N - 1))


@dataclass(frozen=True)
class EtfCertificate:
    dim: int
    count: int
    welch_sq: Fraction
    tightness_residual: float
    equiangular_dev: float
    coherence: float
    norm_dev: float
    verdict: str
    warnings: tuple[str, ...] = ()

    @property
    def is_etf(self) -> bool:
        return self.verdict == ETF

    @property
    def is_untf(self) -> bool:
        return self.verdict in (ETF, UNTF_ONLY)

    def to_json(self) -> dict[str, Any]:
        out = {
            "dim": self.dim,
            "count": self.count,
            "welch_sq": str(self.welch_sq),
            "coherence": self.coherence,
            "tightness_residual": self.tightness_residual,
            "equiangular_dev": self.equiangular_dev,
            "norm_dev": self.norm_dev,
            "verdict": self.verdict,
        }
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def certify(frame: Frame, tol: float = DEFAULT_TOL) -> EtfCertificate:
    """Measure how far ``frame`` is from a unit norm tight frame and from an ETF.

    ``verdict`` is ``ETF`` when columns are unit norm, the frame operator is
    ``(N/D) I`` and every off-diagonal ``|<phi_n, phi_n'>|^2`` equals the
    squared Welch bound, all to within ``tol``.
    """
    if tol <= 0:
        raise BadParameters("tol must be positive")
    D, N = frame.shape
    G = gram(frame)
    norm_dev = float(np.max(np.abs(np.diag(G).real - 1.0), initial=0.0))
    S = frame_operator(frame)
    tight = float(np.max(np.abs(S - (N / D) * np.eye(D)), initial=0.0))
    # a single vector has no pairs; treat the bound as vacuous
    welch = welch_bound_sq(D, N) if N > 1 else Fraction(0)
    if N > 1:
        off = ~np.eye(N, dtype=bool)
        mags = np.abs(G[off])
        coherence = float(mags.max())
        equi = float(np.max(np.abs(mags**2 - float(welch))))
    else:
        coherence = 0.0
        equi = 0.0
    notes = []
    if norm_dev >= tol:
        notes.append("NonUnitColumns")
    if norm_dev < tol and tight < tol:
        verdict = ETF if equi < tol else UNTF_ONLY
    else:
        verdict = NEITHER
    if norm_dev < 1e-10:
        assert coherence >= math.sqrt(welch) - 1e-9, "Welch bound violated"
    return EtfCertificate(D, N, welch, tight, equi, coherence, norm_dev, verdict, tuple(notes))


def harmonic_frame(group: AbelianGroup, subset: Sequence) -> Frame:
    """Characters of ``group`` restricted to ``subset``, scaled by ``D^{-1/2}``.

    Rows follow ``subset`` order, columns the characters in lexicographic order.
    """
    rows = [group.element(d) for d in subset]
    if not rows:
        raise EmptySubset("harmonic frame needs a nonempty subset")
    if len(set(rows)) != len(rows):
        raise ValueError("subset has repeated elements")
    num, L = phase_matrix(group, rows, group.elements())
    return frame_from_phases(num, L, len(rows))


def frame_from_phases(num: np.ndarray, L: int, D: int) -> Frame:
    amp = Fraction(1, D)
    exact = np.empty(num.shape, dtype=object)
    cache: dict[int, ExactEntry] = {}
    for idx, v in np.ndenumerate(num):
        e = cache.get(int(v))
        if e is None:
            e = cache[int(v)] = ExactEntry(amp, Fraction(int(v), L))
        exact[idx] = e
    entries = np.exp(2j * np.pi * (num % L) / L) / math.sqrt(D)
    return Frame(entries, exact)


def naimark_complement(frame: Frame, tol: float = DEFAULT_TOL) -> Frame:
    """An ``(N - D) x N`` unit norm tight frame with Gram ``(N/(N-D)) I - (D/(N-D)) G``.

    The target Gram is factored with a Hermitian eigendecomposition; the result
    is unique only up to a unitary change of basis.
    """
    D, N = frame.shape
    if N <= D:
        raise NotTall(f"Naimark complement needs N > D, got D={D}, N={N}")
    cert = certify(frame, tol)
    if not cert.is_untf:
        raise NotTight(
            f"frame is not a unit norm tight frame (tightness {cert.tightness_residual:.3g},"
            f" norms {cert.norm_dev:.3g})"
        )
    target = (N / (N - D)) * np.eye(N) - (D / (N - D)) * gram(frame)
    target = (target + target.conj().T) / 2
    vals, vecs = np.linalg.eigh(target)
    keep = vals > tol * vals.max()
    if keep.sum() != N - D:
        raise RankMismatch(f"target Gram has rank {keep.sum()}, expected {N - D}")
    vals, vecs = vals[keep][::-1], vecs[:, keep][:, ::-1]
    return Frame(np.sqrt(vals)[:, None] * vecs.conj().T)


# -- serialization -------------------------------------------------------------

_EXACT_SCHEMA = {
    "type": "object",
    "required": ["amp_sq", "phase"],
    "properties": {"amp_sq": {"type": "string"}, "phase": {"type": "string"}},
}

FRAME_SCHEMA = {
    "type": "object",
    "required": ["dim", "count", "entries"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "count": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "exact": {"type": "array", "items": {"type": "array", "items": _EXACT_SCHEMA}},
    },
}


def frame_to_json(frame: Frame) -> dict[str, Any]:
    out: dict[str, Any] = {
        "dim": frame.dim,
        "count": frame.count,
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in frame.entries],
    }
    if frame.exact is not None:
        out["exact"] = [[e.to_json() for e in row] for row in frame.exact]
    return out


def frame_from_json(data: Any) -> Frame:
    try:
        jsonschema.validate(data, FRAME_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"frame JSON: {exc.message}") from exc
    D, N = data["dim"], data["count"]
    rows = data["entries"]
    if len(rows) != D or any(len(r) != N for r in rows):
        raise SchemaError(f"entries are not {D} x {N}")
    arr = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    exact = None
    if "exact" in data:
        ex = data["exact"]
        if len(ex) != D or any(len(r) != N for r in ex):
            raise SchemaError(f"exact entries are not {D} x {N}")
        try:
            exact = np.array([[ExactEntry.from_json(e) for e in row] for row in ex], dtype=object)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad exact entry: {exc}") from exc
        exact = exact.reshape(D, N)
    try:
        frame = Frame(arr, exact)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    norms = np.linalg.norm(arr, axis=0)
    if np.max(np.abs(norms - 1.0)) > 1e-9:
        warnings.warn("frame has non-unit columns", NonUnitColumnsWarning, stacklevel=2)
    return frame


def dumps(obj: Any) -> str:
    """Canonical JSON text used for every file this package writes."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def export_frame(frame: Frame, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(frame_to_json(frame)))


def import_frame(path) -> Frame:
    return frame_from_json(read_json(path))
