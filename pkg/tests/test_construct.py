from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etfforge.construct import (
    EtfParams,
    KlsType,
    abs_gram_multiset,
    consistency_check,
    gmw_check,
    kls_params,
    kls_types,
    main_result_construct,
    main_result_params,
    pos_neg_enumerate,
    tensor_checks,
    tensor_etf,
)
from etfforge.errors import (
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
from etfforge.field import finite_field, is_prime_power
from etfforge.fixtures import load_fixture
from etfforge.frames import Frame, certify, harmonic_frame, welch_bound_sq
from etfforge.groups import AbelianGroup
from etfforge.muetf import MuetfBundle, harmonic_muetf, singer_muetf
from etfforge.rds import quadratic_rds


def test_consistency_examples():
    assert consistency_check(EtfParams(2, 3), EtfParams(4, 5))
    assert consistency_check(EtfParams(6, 9), EtfParams(16, 17))
    assert not consistency_check(EtfParams(2, 3), EtfParams(3, 4))


@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 40), st.integers(1, 40))
def test_tensor_identities_hold_whenever_consistent(D1, e1, D2, e2):
    p1, p2 = EtfParams(D1, D1 + e1), EtfParams(D2, D2 + e2)
    if not consistency_check(p1, p2):
        return
    c = tensor_checks(p1, p2)
    assert c["tensor1"] and c["tensor2"] and c["tensor3"] and c["divisibility"]


def test_tensor_identities_on_consistent_grid():
    hits = 0
    for D1 in range(1, 40):
        for N1 in range(D1 + 1, 120):
            r = Fraction(N1 - D1, D1 * (N1 - 1))
            for N2 in range(2, 300):
                D2 = N2 - r * (N2 - 1)  # solves the consistency equation for D2
                if D2.denominator != 1 or not 1 <= D2 < N2:
                    continue
                p1, p2 = EtfParams(D1, N1), EtfParams(int(D2), N2)
                assert consistency_check(p1, p2)
                hits += 1
                c = tensor_checks(p1, p2)
                assert all(c[k] for k in ("tensor1", "tensor2", "tensor3", "divisibility"))
    assert hits > 500


def test_tensor_8_15():
    etf = load_fixture("etf_2_3")
    b = singer_muetf(4, 2, take=3)
    out = tensor_etf(etf, b)
    assert out.shape == (8, 15)
    c = certify(out)
    assert c.verdict == "ETF" and abs(c.coherence - 0.25) < 1e-10
    assert out.exact is not None
    # column (n1, n2) is phi_{n1} (x) psi_{n1, n2}
    for n1 in range(3):
        for n2 in range(5):
            want = np.kron(etf.column(n1), b.frames[n1].column(n2))
            assert np.allclose(out.column(5 * n1 + n2), want, atol=1e-15)
    harmonic = harmonic_frame(AbelianGroup.cyclic(15), [6, 11, 7, 12, 13, 3, 9, 14])
    shuffled = tensor_etf(etf, b, shuffle=True)
    assert np.max(np.abs(abs_gram_multiset(shuffled) - abs_gram_multiset(harmonic))) < 1e-9
    # shuffle is a pure column permutation
    assert np.allclose(shuffled.column(1), out.column(5))


def test_tensor_6_9_with_16_17_9():
    out = tensor_etf(load_fixture("etf_6_9"), singer_muetf(16, 2, take=9))
    c = certify(out)
    assert out.shape == (96, 153) and c.verdict == "ETF"
    assert abs(c.coherence - math.sqrt(welch_bound_sq(96, 153))) < 1e-8


def test_tensor_with_single_vector_is_bundle_etf_up_to_phase():
    phi = Frame(np.array([[np.exp(0.3j)]]))
    b = singer_muetf(3, 2, take=1)
    out = tensor_etf(phi, b)
    assert np.allclose(out.entries, np.exp(0.3j) * b.frames[0].entries)


def test_tensor_errors():
    b = singer_muetf(4, 2, take=3)
    rng = np.random.default_rng(0)
    A = rng.normal(size=(2, 3)) + 0j
    with pytest.raises(InputNotEtf):
        tensor_etf(Frame(A / np.linalg.norm(A, axis=0)), b)
    with pytest.raises(NotEnoughFamilies):
        tensor_etf(load_fixture("etf_2_3"), b.take(2))
    with pytest.raises(NotEnoughFamilies):
        tensor_etf(load_fixture("etf_2_3"), singer_muetf(3, 2))
    with pytest.raises(InconsistentParameters):
        tensor_etf(load_fixture("etf_2_3"), singer_muetf(5, 2))  # 1/4 vs 1/5
    with pytest.raises(InconsistentParameters):
        tensor_etf(load_fixture("etf_2_3"), harmonic_muetf(quadratic_rds(3)))
    bad = MuetfBundle((b.frames[0], b.frames[0], b.frames[1]))
    with pytest.raises(InvalidMuetf):
        tensor_etf(load_fixture("etf_2_3"), bad)


def test_main_result_params_examples():
    r = main_result_params(EtfParams(6, 9), 2)
    assert r.Q == 16 and r.out == EtfParams(96, 153)
    assert r.checks["redundancy_value"] == 256 and r.checks["redundancy_is_power"]
    assert r.checks["index_value"] == 36 and r.checks["index_matches"]
    assert r.checks["dual_value"] == Fraction(361, 4) and r.checks["dual_nonintegral"]
    assert r.checks["size_window"] and r.checks["gap_identity"]
    r = main_result_params(EtfParams(10, 16), 2)
    assert r.Q == 25 and r.out == EtfParams(250, 416)
    assert main_result_params(EtfParams(10, 16), 1).out == EtfParams(10, 16)


def test_main_result_errors():
    with pytest.raises(RedundancyOutOfRange):
        main_result_params(EtfParams(3, 9), 2)
    with pytest.raises(RedundancyOutOfRange):
        main_result_params(EtfParams(4, 4), 2)
    with pytest.raises(NotPrimePower):
        main_result_params(EtfParams(6, 7), 2)  # 36
    with pytest.raises(NotPrimePower):
        main_result_params(EtfParams(6, 11), 2)  # 60/5 = 12


@given(st.integers(2, 60), st.integers(1, 60), st.integers(1, 4))
def test_main_result_identities(D, extra, J):
    N = D + extra
    if N >= 2 * D:
        return
    Q = Fraction(D * (N - 1), N - D)
    if Q.denominator != 1 or is_prime_power(Q.numerator) is None:
        return
    r = main_result_params(EtfParams(D, N), J)
    Qn = Q.numerator
    Dj, Nj = r.out.D, r.out.N
    # independent recomputation
    assert Dj == D * Qn ** (J - 1)
    assert Nj * (Qn - 1) == N * (Qn**J - 1)
    assert r.checks["gap_identity"]
    if J >= 2:
        assert Fraction(Dj * (Nj - 1), Nj - Dj) == Qn**J
        assert Fraction(Dj * (Nj - Dj), Nj - 1) == D * D * Qn ** (J - 2)
        assert r.checks["redundancy_is_power"] and r.checks["index_matches"]
        if N > D + 1:
            assert r.checks["dual_nonintegral"] and r.checks["size_window"]


def test_main_result_fixed_point_on_singer_complements():
    for Q in (2, 3, 4, 5):
        for K in (2, 3):
            for J in (1, 2, 3):
                p = EtfParams(Q ** (K - 1), (Q**K - 1) // (Q - 1))
                if not p.D < p.N < 2 * p.D:
                    continue
                r = main_result_params(p, J)
                assert r.Q == Q**K
                assert r.out == EtfParams(Q ** (J * K - 1), (Q ** (J * K) - 1) // (Q - 1))


def test_main_result_construct_examples():
    out = main_result_construct(load_fixture("etf_2_3"), 2)
    assert out.shape == (8, 15) and certify(out).verdict == "ETF"
    big = main_result_construct(load_fixture("etf_6_9"), 2)
    c = certify(big)
    assert big.shape == (96, 153) and c.verdict == "ETF"
    assert c.welch_sq == Fraction(1, 256)
    refed = main_result_construct(out, 2)
    assert refed.shape == (128, 255) and certify(refed).verdict == "ETF"
    assert main_result_construct(load_fixture("etf_2_3"), 1) is not None


def test_main_result_construct_size_limit():
    with pytest.raises(SizeLimit):
        main_result_construct(load_fixture("etf_6_9"), 6)  # 16^6 > 2^20


# -- type (K, L, S) --------------------------------------------------------------

def test_kls_examples():
    assert kls_params(KlsType(2, 1, 2)) == EtfParams(3, 9)
    assert kls_params(KlsType(6, -1, 2)) == EtfParams(3, 9)
    assert kls_params(KlsType(1, 1, 2)) == EtfParams(2, 3)
    assert kls_params(KlsType(3, -1, 5)) == EtfParams(15, 36)
    with pytest.raises(NonIntegralD):
        kls_params(KlsType(3, 1, 2))
    assert set(kls_types(EtfParams(3, 9))) == {KlsType(2, 1, 2), KlsType(6, -1, 2)}


@given(st.integers(1, 12), st.sampled_from([1, -1]), st.integers(2, 30))
def test_kls_round_trip(K, L, S):
    t = KlsType(K, L, S)
    D = Fraction(S * (S * (K - 1) + L), K)
    try:
        p = kls_params(t)
    except NonIntegralD:
        assert D.denominator != 1
        return
    except DomainError:
        assert D < 1
        return
    if p.N > p.D > 1:
        assert t in kls_types(p)


def brute_pos_neg(max_Q):
    """Positive-negative cases from the conditions on (K, L, S) directly: scan types."""
    out = set()
    for Q in range(2, max_Q + 1):
        if is_prime_power(Q) is None:
            continue
        for K in (2, 3, 4, 5):
            m = K * (K - 1)
            if Q >= K * K and Q % m in {K % m, (2 * K - 1) % m}:
                out.add(("i", K, 1, Q))
        for P in range(2, Q):
            if P * P == Q and is_prime_power(P):
                out.add(("ii", P, 1, Q))
        if Q >= 7 and Q % 6 in (1, 3):
            out.add(("iii", 3, -1, Q))
        if Q % 24 == 5:
            out.add(("iv", 4, -1, Q))
    return out


def test_pos_neg_examples():
    recs = pos_neg_enumerate(5, [2])
    pairs = {(r["case"], r["K"], r["Q"]): (int(r["D_J"]), int(r["N_J"]), int(r["gap_J"])) for r in recs}
    assert pairs[("i", "2", "4")] == (96, 153, 57)
    assert pairs[("i", "2", "5")][1:] == (416, 166)
    assert all(r["size_window"] for r in recs)
    assert all(isinstance(r["D_J"], str) for r in recs)


def test_pos_neg_case_ii_smallest_member():
    recs = [r for r in pos_neg_enumerate(4, [1]) if r["case"] == "ii"]
    assert len(recs) == 1
    r = recs[0]
    assert (r["K"], r["Q"], r["S"]) == ("2", "4", "2")
    # J = 1 returns the complement of the type-(2,1,2) ETF(3,9)
    kls = kls_params(KlsType(2, 1, 2))
    assert (int(r["D_J"]), int(r["N_J"])) == (kls.N - kls.D, kls.N) == (6, 9)


def test_pos_neg_gq_family_matches_closed_form():
    for r in pos_neg_enumerate(81, [1, 2, 3]):
        if r["case"] != "ii":
            continue
        P, J = int(r["K"]), int(r["J"])
        N = Fraction(P**3 + 1, P**4 - 1) * (P ** (4 * J) - 1)
        gap = Fraction(P**3 + 1, P**4 - 1) * (Fraction(P**3 + 1, P + 1) * P ** (4 * J - 3) - 1)
        assert int(r["N_J"]) == N and int(r["gap_J"]) == gap


def test_pos_neg_two_positive_family_matches_closed_form():
    for r in pos_neg_enumerate(64, [1, 2, 3]):
        if r["case"] == "i" and r["K"] == "2":
            Q, J = int(r["Q"]), int(r["J"])
            gap = Fraction(Q - 1, Q + 1) * (Fraction(Q - 1, 2) * Q ** (2 * J - 1) - 1)
            N = Fraction(Q - 1, Q + 1) * (Q ** (2 * J) - 1)
            assert int(r["gap_J"]) == gap and int(r["N_J"]) == N


def test_pos_neg_enumerates_exactly_the_brute_force_cases():
    recs = pos_neg_enumerate(200, [1, 2])
    got = {(r["case"], int(r["K"]), int(r["L"]), int(r["Q"])) for r in recs}
    assert got == brute_pos_neg(200)
    for r in recs:
        assert r["gap_matches"] and r["divisibility"] in (True, None)
        t = KlsType(int(r["K"]), int(r["L"]), int(r["S"]))
        base = kls_params(t)
        assert (int(r["base_D"]), int(r["base_N"])) == (base.N - base.D, base.N)
        if r["J"] == "2":
            assert r["size_window"] and r["dual_nonintegral"]


def test_cases_iii_and_iv_members():
    recs = pos_neg_enumerate(29, [2])
    cases = {(r["case"], r["Q"]) for r in recs}
    assert ("iii", "7") in cases and ("iii", "9") in cases and ("iv", "5") in cases and ("iv", "29") in cases
    r = next(r for r in recs if r["case"] == "iii" and r["Q"] == "7")
    assert (r["base_D"], r["base_N"]) == ("21", "36")


# -- Gordon-Mills-Welch ------------------------------------------------------------

def test_gmw_2_2_2():
    r = gmw_check(2, 2, 2)
    assert r.modulus == 15
    assert set(r.D1) == {6, 11, 7, 12, 13, 3, 9, 14}
    assert set(r.D2) == {5, 10}
    assert set(r.D3) == {1, 2, 8, 4}
    assert r.holds and r.unique


@pytest.mark.parametrize("Q,K,J", [(2, 2, 2), (3, 2, 2), (2, 3, 2), (4, 2, 2), (2, 2, 3), (5, 2, 2)])
def test_gmw_against_brute_force(Q, K, J):
    r = gmw_check(Q, K, J)
    pp = is_prime_power(Q)
    F = finite_field(pp.p, pp.k * J * K)
    n = F.q - 1
    N1 = n // (Q - 1)
    k = pp.k
    tr = lambda d, sub, top=None: F.trace(F.alpha_pow(d), sub, from_degree=top)  # noqa: E731
    E1 = {d for d in range(n) if tr(d, k) == F.one}
    step = n // (Q**K - 1)
    E2 = {d for d in range(0, n, step) if tr(d, k, k * K) == F.one}
    E3 = {d for d in range(n) if tr(d, k * K) == F.one}
    assert (len(E1), len(E2), len(E3)) == (Q ** (J * K - 1), Q ** (K - 1), Q ** (J * K - K))
    assert set(r.D1) == {d % N1 for d in E1}
    assert set(r.D2) == {d % N1 for d in E2}
    assert set(r.D3) == {d % N1 for d in E3}
    sums = [(a + b) % N1 for a in r.D2 for b in r.D3]
    assert len(sums) == len(set(sums)) == len(r.D1)
    assert set(sums) == set(r.D1)
    assert r.holds and r.unique


def test_gmw_errors():
    with pytest.raises(SizeLimit):
        gmw_check(4, 3, 4)
    with pytest.raises(NotPrimePower):
        gmw_check(6, 2, 2)
