from __future__ import annotations

import json
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etfforge.errors import (
    BadParameters,
    EmptySubset,
    NonUnitColumnsWarning,
    NotTall,
    NotTight,
    ParseError,
    SchemaError,
)
from etfforge.fixtures import FIXTURES, build_fixture, fixture_text, load_fixture, sic_3_9
from etfforge.frames import (
    ExactEntry,
    Frame,
    certify,
    dumps,
    export_frame,
    frame_to_json,
    gram,
    harmonic_frame,
    import_frame,
    naimark_complement,
    welch_bound_sq,
)
from etfforge.groups import AbelianGroup

W15 = np.exp(2j * np.pi / 15)


def random_unit_frame(D, N, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(D, N)) + 1j * rng.normal(size=(D, N))
    return Frame(A / np.linalg.norm(A, axis=0))


def test_welch_bound_examples():
    assert welch_bound_sq(1, 5) == 1
    assert welch_bound_sq(4, 5) == Fraction(1, 16)
    assert welch_bound_sq(96, 153) == Fraction(1, 256)
    assert welch_bound_sq(6, 9) == Fraction(1, 16)
    for bad in ((3, 2), (1, 1), (0, 3)):
        with pytest.raises(BadParameters):
            welch_bound_sq(*bad)


def test_identity_frame():
    I = Frame(np.eye(5))
    assert np.array_equal(gram(I), np.eye(5))
    c = certify(I)
    assert c.verdict == "ETF" and c.coherence == 0 and c.welch_sq == 0


def test_paper_etf_2_3_matrix():
    Phi = np.array([[1, W15**5, W15**10], [1, W15**10, W15**5]]) / math.sqrt(2)
    f = load_fixture("etf_2_3")
    assert np.max(np.abs(f.entries - Phi)) < 1e-15
    G = gram(f)
    assert abs(G[0, 1] - (W15**5 + W15**10) / 2) < 1e-15
    off = np.abs(G[~np.eye(3, dtype=bool)]) ** 2
    assert np.allclose(off, 0.25)


def test_certify_random_frame_is_neither():
    f = random_unit_frame(4, 8, seed=1234)
    c = certify(f)
    assert c.verdict == "neither"
    assert c.coherence > 1 / math.sqrt(7)
    assert c.coherence**2 >= float(welch_bound_sq(4, 8))


def test_certify_untf_only():
    # 4 vectors: orthonormal basis of C^2 twice is tight but not equiangular
    f = Frame(np.hstack([np.eye(2), np.eye(2)]))
    c = certify(f)
    assert c.verdict == "UNTF_only"


def test_certify_flags_non_unit_columns():
    c = certify(Frame(2 * np.eye(3)))
    assert c.verdict == "neither" and "NonUnitColumns" in c.warnings
    with pytest.raises(BadParameters):
        certify(Frame(np.eye(2)), tol=0)


def test_certificate_json_fields():
    c = certify(load_fixture("etf_2_3")).to_json()
    assert c["welch_sq"] == "1/4"
    assert c["verdict"] == "ETF"
    for key in ("coherence", "tightness_residual", "equiangular_dev"):
        assert isinstance(c[key], float)


random_cyclic_subset = st.integers(2, 512).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(0, n - 1), min_size=1, max_size=min(n, 40)))
)


@given(random_cyclic_subset)
def test_harmonic_frames_are_untf(data):
    n, sub = data
    f = harmonic_frame(AbelianGroup.cyclic(n), sorted(sub))
    S = f.entries @ f.entries.conj().T
    assert np.max(np.abs(S - (n / len(sub)) * np.eye(len(sub)))) < 1e-10
    c = certify(f)
    assert c.is_untf
    assert c.coherence**2 >= float(c.welch_sq) - 1e-9


@given(st.integers(1, 6), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_welch_inequality_on_random_frames(D, extra, seed):
    N = D + extra
    f = random_unit_frame(D, N, seed)
    c = certify(f)
    assert c.coherence**2 >= float(welch_bound_sq(D, N)) - 1e-9
    G = gram(f)
    assert abs(np.trace(G).real - N) < 1e-9
    assert np.max(np.abs(G - G.conj().T)) < 1e-12


def test_harmonic_examples():
    f = harmonic_frame(AbelianGroup.cyclic(5), [1, 2, 3, 4])
    assert certify(f).verdict == "ETF" and f.shape == (4, 5)
    f = harmonic_frame(AbelianGroup.cyclic(15), [6, 11, 7, 12, 13, 3, 9, 14])
    c = certify(f)
    assert c.verdict == "ETF" and abs(c.coherence - 0.25) < 1e-12
    full = harmonic_frame(AbelianGroup((2, 3)), AbelianGroup((2, 3)).elements())
    assert np.allclose(full.entries @ full.entries.conj().T, np.eye(6))
    with pytest.raises(EmptySubset):
        harmonic_frame(AbelianGroup.cyclic(5), [])


def test_harmonic_exact_entries_match_characters():
    G = AbelianGroup((3, 5))
    sub = [(0, 1), (1, 2), (2, 4)]
    f = harmonic_frame(G, sub)
    assert f.exact is not None
    for i, d in enumerate(sub):
        for j, g in enumerate(G.elements()):
            e = f.exact[i, j]
            assert e.amp_sq == Fraction(1, 3)
            assert e.phase == (Fraction(d[0] * g[0], 3) + Fraction(d[1] * g[1], 5)) % 1


def test_harmonic_gram_is_a_group_convolution():
    G = AbelianGroup.cyclic(13)
    sub = [1, 3, 9]
    f = harmonic_frame(G, sub)
    Gm = gram(f)
    for a in range(13):
        for b in range(13):
            assert abs(Gm[a, b] - Gm[(a - b) % 13, 0]) < 1e-12


def test_frame_potential_identity():
    for f in (load_fixture("sic_3_9"), harmonic_frame(AbelianGroup.cyclic(21), [3, 6, 7, 12, 14])):
        D, N = f.shape
        fp = np.sum(np.abs(gram(f)) ** 2)
        assert abs(fp - N * N / D) / (N * N / D) < 1e-7


def test_exact_entries_must_agree_with_floats():
    exact = np.array([[ExactEntry(1, 0)]], dtype=object)
    Frame(np.array([[1.0]]), exact)
    with pytest.raises(ValueError):
        Frame(np.array([[1.0j]]), exact)


def test_exact_entry_arithmetic():
    a = ExactEntry(Fraction(1, 2), Fraction(2, 3))
    b = ExactEntry(Fraction(1, 3), Fraction(2, 3))
    c = a * b
    assert c.amp_sq == Fraction(1, 6) and c.phase == Fraction(1, 3)
    assert abs(complex(c) - complex(a) * complex(b)) < 1e-15
    assert ExactEntry.from_json(c.to_json()) == c


# -- Naimark --------------------------------------------------------------------

def test_naimark_of_etf_2_3_is_etf_1_3():
    c = naimark_complement(load_fixture("etf_2_3"))
    assert c.shape == (1, 3)
    G = gram(c)
    assert np.allclose(np.abs(G), 1.0)
    assert certify(c).verdict == "ETF"


@pytest.mark.parametrize("frame", [
    load_fixture("sic_3_9"),
    harmonic_frame(AbelianGroup.cyclic(15), [3, 6, 7, 9, 11, 12, 13, 14]),
    harmonic_frame(AbelianGroup.cyclic(7), [1, 2, 4]),
    harmonic_frame(AbelianGroup.cyclic(12), [0, 1, 5]),  # UNTF, not ETF
])
def test_naimark_gram_identity_and_involution(frame):
    D, N = frame.shape
    comp = naimark_complement(frame)
    assert comp.shape == (N - D, N)
    target = (N / (N - D)) * np.eye(N) - (D / (N - D)) * gram(frame)
    assert np.max(np.abs(gram(comp) - target)) < 1e-8
    cc = certify(comp)
    assert cc.is_untf
    assert cc.is_etf == certify(frame).is_etf
    back = naimark_complement(comp)
    assert np.max(np.abs(gram(back) - gram(frame))) < 1e-8


def test_naimark_errors():
    with pytest.raises(NotTall):
        naimark_complement(Frame(np.eye(3)))
    with pytest.raises(NotTight):
        naimark_complement(random_unit_frame(2, 5, seed=3))


# -- fixtures and serialization --------------------------------------------------

def test_shipped_fixtures_match_builders_and_certify():
    for name in FIXTURES:
        shipped = load_fixture(name)
        built = build_fixture(name)
        assert np.max(np.abs(shipped.entries - built.entries)) < 1e-15
        assert fixture_text(name) == dumps(frame_to_json(built))
        assert certify(shipped).verdict == "ETF"
    assert certify(load_fixture("sic_3_9")).welch_sq == Fraction(1, 4)
    assert certify(load_fixture("etf_6_9")).welch_sq == Fraction(1, 16)


def test_sic_is_weyl_heisenberg_orbit():
    f = sic_3_9()
    w = np.exp(2j * np.pi / 3)
    X = np.roll(np.eye(3), 1, axis=0)
    Z = np.diag([1, w, w * w])
    v = np.array([0, 1, -1]) / math.sqrt(2)
    cols = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) @ v
            for a in range(3) for b in range(3)]
    # same lines, possibly different phases
    for k, col in enumerate(cols):
        assert abs(abs(np.vdot(col, f.column(k))) - 1) < 1e-12


def test_export_import_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(5)
    A = rng.normal(size=(3, 6)) + 1j * rng.normal(size=(3, 6))
    f = Frame(A / np.linalg.norm(A, axis=0))
    p = tmp_path / "f.json"
    export_frame(f, p)
    g = import_frame(p)
    assert np.array_equal(f.entries, g.entries)
    export_frame(g, tmp_path / "g.json")
    assert p.read_text() == (tmp_path / "g.json").read_text()
    for name in FIXTURES:
        q = tmp_path / f"{name}.json"
        q.write_text(fixture_text(name))
        export_frame(import_frame(q), tmp_path / "again.json")
        assert (tmp_path / "again.json").read_text() == fixture_text(name)


def test_import_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        import_frame(bad)
    bad.write_text(json.dumps({"dim": 2, "count": 1}))
    with pytest.raises(SchemaError):
        import_frame(bad)
    bad.write_text(json.dumps({"dim": 2, "count": 1, "entries": [[[1, 0]]]}))
    with pytest.raises(SchemaError):
        import_frame(bad)
    bad.write_text(json.dumps({"dim": 1, "count": 1, "entries": [[[2, 0]]]}))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = import_frame(bad)
    assert any(issubclass(w.category, NonUnitColumnsWarning) for w in caught)
    assert "NonUnitColumns" in certify(f).warnings
