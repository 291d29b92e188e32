"""Mutually unbiased ETFs: harmonic construction from an RDS, verification, bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import BadParameters, DomainError, InvalidRds, SchemaError, TakeTooMany
from .field import PrimePower
from .frames import (
    ExactEntry,
    Frame,
    dumps,
    frame_from_json,
    frame_from_phases,
    frame_to_json,
    read_json,
)
from .groups import Element, annihilator, phase_matrix, transversal
from .rds import RdsSpec, singer_rds, verify_rds


@dataclass(frozen=True, eq=False)
class MuetfBundle:
    """``M`` ETFs of ``N`` vectors in ``C^D``, one per transversal representative.

    ``frames[m][:, n]`` is the vector indexed by ``(transversal[m], annihilator[n])``.
    When ``standard_basis`` is set the last frame is the identity basis appended
    to a flat MUB system and has no transversal entry.
    """

    frames: tuple[Frame, ...]
    transversal: tuple[Element, ...] = ()
    annihilator: tuple[Element, ...] = ()
    prototype: int | None = 0
    standard_basis: bool = False

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise DomainError("a bundle needs at least one frame")
        shape = frames[0].shape
        if any(f.shape != shape for f in frames):
            raise DomainError("all frames in a bundle must share D and N")
        object.__setattr__(self, "frames", frames)

    @property
    def dim(self) -> int:
        return self.frames[0].dim

    @property
    def per_etf(self) -> int:
        return self.frames[0].count

    @property
    def families(self) -> int:
        return len(self.frames)

    def index_of(self, m: int, n: int) -> tuple[Element, Element]:
        """``(alpha_m, beta_n)`` for the ``n``-th vector of family ``m``."""
        return self.transversal[m], self.annihilator[n]

    def take(self, M: int) -> MuetfBundle:
        if not 1 <= M <= self.families:
            raise TakeTooMany(f"requested {M} families, bundle has {self.families}")
        std = self.standard_basis and M == self.families
        return MuetfBundle(self.frames[:M], self.transversal[:M], self.annihilator,
                           self.prototype if self.prototype is not None and self.prototype < M else None,
                           std)

    def subset(self, ms: Sequence[int]) -> MuetfBundle:
        ms = list(ms)
        return MuetfBundle(tuple(self.frames[m] for m in ms),
                           tuple(self.transversal[m] for m in ms if m < len(self.transversal)),
                           self.annihilator, None, False)

    def synthesis(self) -> np.ndarray:
        """All vectors side by side, family-major: a ``D x MN`` matrix."""
        return np.hstack([f.entries for f in self.frames])

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "per_etf": self.per_etf,
            "families": self.families,
            "frames": [frame_to_json(f) for f in self.frames],
            "index": {
                "transversal": [list(a) for a in self.transversal],
                "annihilator": [list(b) for b in self.annihilator],
            },
            "prototype": self.prototype,
            "standard_basis": self.standard_basis,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> MuetfBundle:
        try:
            frames = tuple(frame_from_json(f) for f in data["frames"])
            index = data.get("index", {})
            bundle = cls(
                frames,
                tuple(tuple(a) for a in index.get("transversal", [])),
                tuple(tuple(b) for b in index.get("annihilator", [])),
                data.get("prototype"),
                bool(data.get("standard_basis", False)),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad bundle JSON: {exc}") from exc
        for key, value in (("dim", bundle.dim), ("per_etf", bundle.per_etf), ("families", bundle.families)):
            if key in data and data[key] != value:
                raise SchemaError(f"bundle header {key}={data[key]} disagrees with frames ({value})")
        return bundle


def export_bundle(bundle: MuetfBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(bundle.to_json()))


def import_bundle(path) -> MuetfBundle:
    return MuetfBundle.from_json(read_json(path))


def harmonic_muetf(spec: RdsSpec, *, standard_basis: bool = False,
                   require_rds: bool = True) -> MuetfBundle:
    """Bundle ``psi_{alpha, beta}(d) = D^{-1/2} alpha(d) beta(d)``.

    ``alpha`` runs over a transversal of the annihilator of the forbidden
    subgroup and ``beta`` over the annihilator itself.  The result is an
    MUETF exactly when ``spec`` is a relative difference set; pass
    ``require_rds=False`` to build the bundle for an arbitrary subset.

    ``standard_basis`` appends the identity basis, which is unbiased to every
    flat basis; it is only allowed when ``N == D``.
    """
    if require_rds and not verify_rds(spec).valid:
        raise InvalidRds("subset is not a relative difference set")
    group = spec.group
    perp = annihilator(group, spec.forbidden)
    reps = transversal(group, perp)
    betas = perp.elements
    rows = spec.subset
    D = len(rows)
    beta_num, L = phase_matrix(group, rows, betas)
    alpha_num, _ = phase_matrix(group, rows, reps)
    frames = [frame_from_phases((beta_num + alpha_num[:, [m]]) % L, L, D) for m in range(len(reps))]
    if standard_basis:
        if len(betas) != D:
            raise DomainError("standard basis augmentation needs N == D")
        frames.append(_identity_frame(D))
    proto = reps.index(group.identity)
    return MuetfBundle(tuple(frames), tuple(reps), tuple(betas), proto, standard_basis)


def _identity_frame(D: int) -> Frame:
    exact = np.empty((D, D), dtype=object)
    for i in range(D):
        for j in range(D):
            exact[i, j] = ExactEntry(Fraction(int(i == j)), Fraction(0))
    return Frame.from_exact(exact)


def singer_muetf(Q: int | PrimePower, J: int, take: int | None = None) -> MuetfBundle:
    """``Q - 1`` mutually unbiased ETF(Q^{J-1}, (Q^J-1)/(Q-1)) from the trace-one RDS.

    Family ``m`` is ``Delta^m Psi`` with ``Delta = diag(exp(2 pi i d / (Q^J - 1)))``.
    """
    spec = singer_rds(Q, J)
    q = spec.forbidden.order + 1
    if take is not None and not 1 <= take <= q - 1:
        raise TakeTooMany(f"only {q - 1} families exist for Q={q}, requested {take}")
    bundle = harmonic_muetf(spec, require_rds=False)
    return bundle if take is None else bundle.take(take)


@dataclass(frozen=True)
class MuetfCertificate:
    intra_dev: float
    cross_dev: float
    norm_dev: float
    valid: bool
    witness: dict | None = field(default=None, compare=False)

    def to_json(self) -> dict[str, Any]:
        out = {"intra_dev": self.intra_dev, "cross_dev": self.cross_dev,
               "norm_dev": self.norm_dev, "valid": self.valid}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def verify_muetf(bundle: MuetfBundle, tol: float = 1e-9) -> MuetfCertificate:
    """Check every pair of vectors against the two branches of the MUETF identity.

    Within a family ``|<psi, psi'>|^2`` must equal ``(N - D) / (D (N - 1))``;
    across families it must equal ``1 / D``.  For bases (``N == D``) the
    within-family deviation is the largest ``|<psi, psi'>|`` instead, which is
    the orthonormality residual.
    """
    D, N, M = bundle.dim, bundle.per_etf, bundle.families
    Psi = bundle.synthesis()
    G = Psi.conj().T @ Psi
    mag2 = np.abs(G) ** 2
    fam = np.repeat(np.arange(M), N)
    same = fam[:, None] == fam[None, :]
    off = ~np.eye(M * N, dtype=bool)
    norm_dev = float(np.max(np.abs(np.diag(G).real - 1.0)))

    intra_mask = same & off
    if N == D:
        intra = np.sqrt(mag2)
    else:
        intra = np.abs(mag2 - (N - D) / (D * (N - 1)))
    intra = np.where(intra_mask, intra, 0.0)
    cross = np.where(~same, np.abs(mag2 - 1.0 / D), 0.0)
    intra_dev = float(intra.max(initial=0.0))
    cross_dev = float(cross.max(initial=0.0))
    valid = intra_dev < tol and cross_dev < tol and norm_dev < tol

    witness = None
    if not valid:
        worst = intra if intra_dev >= cross_dev else cross
        i, j = np.unravel_index(int(np.argmax(worst)), worst.shape)
        witness = {
            "first": [int(i // N), int(i % N)],
            "second": [int(j // N), int(j % N)],
            "abs_sq": float(mag2[i, j]),
        }
        if norm_dev >= tol:
            k = int(np.argmax(np.abs(np.diag(G).real - 1.0)))
            witness["non_unit"] = [k // N, k % N]
    return MuetfCertificate(intra_dev, cross_dev, norm_dev, valid, witness)


def gerzon_muetf_bound(D: int, N: int, field: str = "complex") -> int:
    """Largest ``M`` allowed for an MUETF(D, N, M) by the rank argument."""
    if N <= 1 or D < 1:
        raise BadParameters(f"need N > 1 and D >= 1, got D={D}, N={N}")
    if field == "complex":
        return (D * D - 1) // (N - 1)
    if field == "real":
        return ((D - 1) * (D + 2)) // (2 * (N - 1))
    raise BadParameters(f"field must be 'complex' or 'real', got {field!r}")


def flat_muetf_bound(D: int, N: int) -> int:
    """Refined complex bound for MUETFs whose entries all have modulus ``D^{-1/2}``."""
    if N <= 1 or D < 1:
        raise BadParameters(f"need N > 1 and D >= 1, got D={D}, N={N}")
    return (D * (D - 1)) // (N - 1)
