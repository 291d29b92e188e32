"""New ETFs from old: ETF (x) MUETF tensor products and the parameter algebra around them.

Every parameter identity here is evaluated with integers and
:class:`~fractions.Fraction`; floating point only enters when frames are
built and certified.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .errors import (
    DomainError,
    InconsistentParameters,
    InputNotEtf,
    InvalidMuetf,
    NonIntegralD,
    NotEnoughFamilies,
    NotPrimePower,
    RedundancyOutOfRange,
    SizeLimit,
)
from .field import MAX_FIELD_SIZE, finite_field, is_prime_power
from .frames import DEFAULT_TOL, Frame, certify
from .groups import AbelianGroup
from .muetf import MuetfBundle, singer_muetf, verify_muetf
from .rds import RdsSpec, verify_rds


@dataclass(frozen=True)
class EtfParams:
    D: int
    N: int

    def __post_init__(self):
        if not 1 <= self.D <= self.N:
            raise DomainError(f"need 1 <= D <= N, got D={self.D}, N={self.N}")

    @property
    def welch_sq(self) -> Fraction:
        return Fraction(self.N - self.D, self.D * (self.N - 1))

    def complement(self) -> EtfParams:
        return EtfParams(self.N - self.D, self.N)


def _frac(x) -> str:
    return str(Fraction(x))


def consistency_check(p1: EtfParams, p2: EtfParams) -> bool:
    """Welch ratio of the outer ETF against the MUETF ratio ``(N2 - D2) / (N2 - 1)``."""
    if p1.N < 2 or p2.N < 2:
        raise DomainError("consistency needs N > 1 on both sides")
    return Fraction(p1.N - p1.D, p1.D * (p1.N - 1)) == Fraction(p2.N - p2.D, p2.N - 1)


def tensor_checks(p1: EtfParams, p2: EtfParams) -> dict[str, Any]:
    """Exact parameter identities satisfied by the tensor ETF(D1 D2, N1 N2)."""
    D1, N1, D2, N2 = p1.D, p1.N, p2.D, p2.N
    D3, N3 = D1 * D2, N1 * N2
    gap = N3 - D3
    checks: dict[str, Any] = {"D3": D3, "N3": N3}
    checks["tensor1"] = gap == D1 * N1 * (N2 - D2) + (N1 - D1)
    checks["tensor2"] = Fraction(gap, D3 * (N3 - 1)) == Fraction(N2 - D2, D2 * (N2 - 1))
    checks["tensor3"] = Fraction(D3 * gap, N3 - 1) == D1**2 * Fraction(D2 * (N2 - D2), N2 - 1)
    a = Fraction(D2 * (N2 - D2), N2 - 1)
    b = Fraction(gap * (N3 - 1), D3)
    both_integral = a.denominator == 1 and b.denominator == 1
    checks["divisibility_premise"] = both_integral
    checks["divisibility"] = (not both_integral) or N1 % D1 == 0
    return checks


def tensor_etf(etf: Frame, bundle: MuetfBundle, *, shuffle: bool = False,
               tol: float = DEFAULT_TOL) -> Frame:
    """Columns ``phi_{n1} (x) psi_{n1, n2}``, ordered with ``n1`` major.

    The ``n1``-th vector of ``etf`` is paired with family ``n1`` of ``bundle``.
    ``shuffle=True`` reorders the columns with ``n2`` major instead.
    """
    if not certify(etf, tol).is_etf:
        raise InputNotEtf("outer frame does not certify as an ETF")
    D1, N1 = etf.shape
    D2, N2 = bundle.dim, bundle.per_etf
    if bundle.families < N1:
        raise NotEnoughFamilies(f"need {N1} mutually unbiased families, bundle has {bundle.families}")
    bundle = bundle.take(N1)
    if not verify_muetf(bundle, tol).valid:
        raise InvalidMuetf("bundle is not a mutually unbiased ETF family")
    p1, p2 = EtfParams(D1, N1), EtfParams(D2, N2)
    if N1 > 1 and not consistency_check(p1, p2):
        raise InconsistentParameters(
            f"(N1-D1)/(D1(N1-1)) = {p1.welch_sq} but (N2-D2)/(N2-1) = {Fraction(N2 - D2, N2 - 1)}"
        )
    checks = tensor_checks(p1, p2)
    failed = [k for k in ("tensor1", "tensor2", "tensor3", "divisibility") if not checks[k]]
    assert not failed, f"tensor identities failed: {failed}"

    blocks = [np.kron(etf.entries[:, [n1]], bundle.frames[n1].entries) for n1 in range(N1)]
    entries = np.hstack(blocks)
    exact = None
    if etf.exact is not None and all(f.exact is not None for f in bundle.frames):
        exact = np.hstack([_exact_kron(etf.exact[:, [n1]], bundle.frames[n1].exact)
                           for n1 in range(N1)])
    if shuffle:
        order = [n1 * N2 + n2 for n2 in range(N2) for n1 in range(N1)]
        entries = entries[:, order]
        if exact is not None:
            exact = exact[:, order]
    if exact is not None:
        return Frame(entries, exact)
    return Frame(entries)


def _exact_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for l in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out


@dataclass(frozen=True)
class MainResult:
    input: EtfParams
    J: int
    Q: int
    out: EtfParams
    checks: dict[str, Any] = field(compare=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "input": {"D": self.input.D, "N": self.input.N},
            "J": self.J,
            "Q": self.Q,
            "out": {"D": self.out.D, "N": self.out.N},
            "checks": {k: (_frac(v) if isinstance(v, Fraction) else v) for k, v in self.checks.items()},
        }


def main_result_params(params: EtfParams, J: int) -> MainResult:
    """Parameters ``(D Q^{J-1}, N (Q^J - 1)/(Q - 1))`` with ``Q = D(N-1)/(N-D)``.

    ``checks`` holds the exact identities: the gap formula for every ``J``;
    for ``J >= 2`` also ``D'(N'-1)/(N'-D') = Q^J``, the harmonic index
    ``D'(N'-D')/(N'-1) = D^2 Q^{J-2}``, non-integrality of
    ``(N'-D')(N'-1)/D'`` and ``D' + 1 < N' < 2 D'``.
    """
    D, N = params.D, params.N
    if J < 1:
        raise DomainError("J must be a positive integer")
    if not D < N < 2 * D:
        raise RedundancyOutOfRange(f"need D < N < 2D, got D={D}, N={N}")
    Qf = Fraction(D * (N - 1), N - D)
    if Qf.denominator != 1 or is_prime_power(Qf.numerator) is None:
        raise NotPrimePower(f"D(N-1)/(N-D) = {Qf} is not a prime power")
    Q = Qf.numerator
    Dj = D * Q ** (J - 1)
    Nj = N * (Q**J - 1) // (Q - 1)
    gap = Nj - Dj
    checks: dict[str, Any] = {
        "gap_identity": gap == D * N * ((Q ** (J - 1) - 1) // (Q - 1)) + (N - D),
        "gap": gap,
    }
    if J >= 2:
        ratio = Fraction(Dj * (Nj - 1), gap)
        index = Fraction(Dj * gap, Nj - 1)
        dual = Fraction(gap * (Nj - 1), Dj)
        checks.update({
            "redundancy_value": ratio,
            "redundancy_is_power": ratio == Q**J,
            "index_value": index,
            "index_matches": index == D * D * Q ** (J - 2),
            "dual_value": dual,
            "dual_nonintegral": dual.denominator != 1,
            "size_window": Dj + 1 < Nj < 2 * Dj,
            "not_real": dual.denominator != 1 and Dj + 1 < Nj < 2 * Dj,
        })
    return MainResult(params, J, Q, EtfParams(Dj, Nj), checks)


def main_result_construct(etf: Frame, J: int, tol: float = DEFAULT_TOL) -> Frame:
    """Tensor ``etf`` with ``N`` of the ``Q - 1`` Singer MUETF families over GF(Q^J)."""
    cert = certify(etf, tol)
    if not cert.is_etf:
        raise InputNotEtf("input frame does not certify as an ETF")
    res = main_result_params(EtfParams(etf.dim, etf.count), J)
    if J == 1:
        return etf
    if res.Q**J > MAX_FIELD_SIZE:
        raise SizeLimit(f"Q^J = {res.Q ** J} exceeds {MAX_FIELD_SIZE}")
    bundle = singer_muetf(res.Q, J, take=etf.count)
    return tensor_etf(etf, bundle, tol=tol)


# -- type (K, L, S) parameters ---------------------------------------------------

@dataclass(frozen=True)
class KlsType:
    K: int
    L: int
    S: int

    def __post_init__(self):
        if self.L not in (1, -1):
            raise DomainError("L must be +1 or -1")
        if self.K < 1 or self.S < 2:
            raise DomainError("need K >= 1 and S >= 2")


def kls_params(t: KlsType) -> EtfParams:
    """``D = (S/K)(S(K-1) + L)``, ``N = (S + L)(S(K-1) + L)``."""
    base = t.S * (t.K - 1) + t.L
    D = Fraction(t.S, t.K) * base
    if D.denominator != 1:
        raise NonIntegralD(f"type {t} gives non-integral D = {D}")
    N = (t.S + t.L) * base
    if not 1 <= D <= N:
        raise DomainError(f"type {t} gives no frame: D = {D}, N = {N}")
    return EtfParams(D.numerator, N)


def kls_types(params: EtfParams) -> list[KlsType]:
    """All types ``(K, L, S)`` an ETF with these parameters has (possibly none)."""
    D, N = params.D, params.N
    if not N > D > 1:
        return []
    S2 = Fraction(D * (N - 1), N - D)
    if S2.denominator != 1:
        return []
    S = math.isqrt(S2.numerator)
    if S * S != S2.numerator:
        return []
    out = []
    for L in (1, -1):
        K = Fraction(N * S, D * (S + L))
        if K.denominator == 1 and K >= 1 and S >= 2:
            out.append(KlsType(K.numerator, L, S))
    return out


# -- enumeration of the positive/negative families -------------------------------

def _pos_neg_cases(Q: int) -> Iterable[tuple[str, int, int]]:
    for K in (2, 3, 4, 5):
        m = K * (K - 1)
        if Q >= K * K and Q % m in (K % m, (2 * K - 1) % m):
            yield "i", K, 1
    r = math.isqrt(Q)
    if r * r == Q and r >= 2 and is_prime_power(r) is not None:
        yield "ii", r, 1
    if Q >= 7 and Q % 6 in (1, 3):
        yield "iii", 3, -1
    if Q % 24 == 5:
        yield "iv", 4, -1


def pos_neg_enumerate(max_Q: int, J_list: Iterable[int]) -> list[dict[str, Any]]:
    """Parameter records for Naimark complements of positive/negative ETFs fed to the main result.

    Here ``Q = S(K-1) + KL`` is the prime power of the family.  The base ETF
    (complement of the type ``(K, L, S)`` ETF) has ``D(N-1)/(N-D) = Q^2``, so
    the Singer MUETF lives over GF(Q^{2J}) and each record is cross-checked
    against :func:`main_result_params`.  Values are exact decimal strings.
    """
    if max_Q > 2**16:
        raise SizeLimit("max_Q is limited to 2^16")
    J_list = sorted(set(int(j) for j in J_list))
    if not J_list or J_list[0] < 1:
        raise DomainError("J values must be positive integers")
    records = []
    for Q in range(2, max_Q + 1):
        if is_prime_power(Q) is None:
            continue
        for case, K, L in _pos_neg_cases(Q):
            S = Fraction(Q - K * L, K - 1)
            assert S.denominator == 1
            t = KlsType(K, L, S.numerator)
            base = kls_params(t).complement()
            for J in J_list:
                records.append(_pos_neg_record(case, t, Q, J, base))
    order = {"i": 0, "ii": 1, "iii": 2, "iv": 3}
    records.sort(key=lambda r: (order[r["case"]], int(r["K"]), int(r["Q"]), int(r["J"])))
    return records


def _pos_neg_record(case: str, t: KlsType, Q: int, J: int, base: EtfParams) -> dict[str, Any]:
    K, L = t.K, t.L
    core = Q - (K - 1) * L
    D = Fraction(core * Q ** (2 * J - 1), K)
    N = Fraction(core, K - 1) * Fraction(Q ** (2 * J) - 1, Q + L)
    gap = Fraction(Q ** (2 * J - 1) * core**2 - K * core, K * (K - 1) * (Q + L))
    assert D.denominator == 1 and N.denominator == 1 and gap.denominator == 1
    res = main_result_params(base, J)
    assert res.Q == Q * Q
    assert (res.out.D, res.out.N) == (D, N), (case, K, Q, J)
    divisible = None
    if J >= 2:
        q = res.Q
        inner = EtfParams(q ** (J - 1), (q**J - 1) // (q - 1))
        divisible = tensor_checks(base, inner)["divisibility"]
        assert divisible, (case, K, Q, J)
    D, N, gap = D.numerator, N.numerator, gap.numerator
    return {
        "case": case,
        "K": str(K),
        "L": str(L),
        "S": str(t.S),
        "Q": str(Q),
        "J": str(J),
        "base_D": str(base.D),
        "base_N": str(base.N),
        "field_size": str(res.Q),
        "D_J": str(D),
        "N_J": str(N),
        "gap_J": str(gap),
        "gap_matches": gap == N - D,
        "size_window": (D + 1 < N < 2 * D) if J >= 2 else None,
        "dual_nonintegral": res.checks.get("dual_nonintegral"),
        "divisibility": divisible,
    }


# -- Gordon-Mills-Welch factorization --------------------------------------------

@dataclass(frozen=True)
class GmwResult:
    Q: int
    K: int
    J: int
    modulus: int
    D1: tuple[int, ...]
    D2: tuple[int, ...]
    D3: tuple[int, ...]
    holds: bool
    unique: bool
    sizes: dict[str, int] = field(compare=False)
    d3_certificate: dict = field(compare=False, default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "Q": self.Q, "K": self.K, "J": self.J, "modulus": self.modulus,
            "D1": list(self.D1), "D2": list(self.D2), "D3": list(self.D3),
            "holds": self.holds, "unique": self.unique, "sizes": self.sizes,
            "D3_certificate": self.d3_certificate,
        }


def gmw_check(Q: int, K: int, J: int) -> GmwResult:
    """Check ``D1 = D2 + D3`` with unique decompositions in ``Z_{(Q^{JK}-1)/(Q-1)}``.

    ``D1`` and ``D2`` are the trace-one hyperplanes of GF(Q^{JK}) and GF(Q^K)
    over GF(Q), ``D3`` the hyperplane of the relative trace GF(Q^{JK}) ->
    GF(Q^K); all three are reduced modulo the exponents of GF(Q)^x.
    """
    pp = is_prime_power(Q)
    if pp is None:
        raise NotPrimePower(f"{Q} is not a prime power")
    if K < 2 or J < 2:
        raise DomainError("need K >= 2 and J >= 2")
    if Q ** (J * K) > MAX_FIELD_SIZE:
        raise SizeLimit(f"Q^(JK) = {Q ** (J * K)} exceeds {MAX_FIELD_SIZE}")
    k = pp.k
    F = finite_field(pp.p, k * J * K)
    n = Q ** (J * K) - 1
    N1 = n // (Q - 1)
    N2 = (Q**K - 1) // (Q - 1)
    N3 = N1 // N2

    e1 = np.flatnonzero(F.trace_of_powers(k) == 1)
    step = n // (Q**K - 1)
    sub = np.arange(Q**K - 1, dtype=np.int64) * step
    e2 = sub[F.trace_of_powers(k, exponents=sub, from_degree=k * K) == 1]
    e3 = np.flatnonzero(F.trace_of_powers(k * K) == 1)

    products = Counter(int(a + b) % n for a in e2 for b in e3)
    unique_e = set(products) == set(int(x) for x in e1) and all(c == 1 for c in products.values())

    D1 = tuple(sorted({int(x) % N1 for x in e1}))
    D2 = tuple(sorted({int(x) % N1 for x in e2}))
    D3 = tuple(sorted({int(x) % N1 for x in e3}))
    sums = Counter((a + b) % N1 for a in D2 for b in D3)
    holds = set(sums) == set(D1)
    unique = holds and all(c == 1 for c in sums.values()) and len(D1) == len(D2) * len(D3)
    assert all(d % N3 == 0 for d in D2)

    group = AbelianGroup.cyclic(N1)
    spec3 = RdsSpec(group, group.subgroup([N3]), tuple((d,) for d in D3))
    sizes = {"E1": int(e1.size), "E2": int(e2.size), "E3": int(e3.size),
             "D1": len(D1), "D2": len(D2), "D3": len(D3), "unique_E": unique_e}
    return GmwResult(Q, K, J, N1, D1, D2, D3, holds and unique_e, unique,
                     sizes, verify_rds(spec3).to_json())


def abs_gram_multiset(frame: Frame) -> np.ndarray:
    """Sorted ``|<phi_n, phi_n'>|`` over all ordered pairs, for comparing frames up to symmetries."""
    Phi = frame.entries
    return np.sort(np.abs(Phi.conj().T @ Phi).ravel())
