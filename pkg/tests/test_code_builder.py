import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcodes.code_builder import (
    BadExponent,
    InvalidParameters,
    NotCoprime,
    NotSorted,
    OddProduct,
    Surd,
    TooFewStates,
    TooSmall,
    WeightOverflow,
    descriptor,
    dump_descriptor,
    gram_matrix,
    index_set,
    load_descriptor,
    logical_state,
    overlap,
    parameters_from_descriptor,
    toy_parameters,
    validate,
)
from permcodes.number_theory import build_coprime_sequence, is_prime


@pytest.fixture(scope="module")
def code567():
    return validate((5, 6, 7), 3)


def test_validate_567(code567):
    assert code567.N == 210
    assert code567.g == (42, 35, 30)
    assert code567.m == 9261000 == 210**3
    assert code567.D == 3


@pytest.mark.parametrize(
    "n, q, error, kind",
    [
        ((4, 6, 7), 3, NotCoprime, "NotCoprime: (4,6)"),
        ((5, 6, 7), 2, BadExponent, "BadExponent: q=2 < 3"),
        ((6, 5, 7), 3, NotSorted, "NotSorted: (6, 5, 7)"),
        ((3, 4, 5), 3, TooSmall, "TooSmall: n_d < 4: (3,)"),
        ((5, 7, 9), 3, OddProduct, "OddProduct: N=315 is odd"),
        ((5, 6), 3, TooFewStates, "TooFewStates: D=2 < 3 requires legacy mode"),
    ],
)
def test_validate_errors(n, q, error, kind):
    with pytest.raises(error) as info:
        validate(n, q)
    assert str(info.value.violations[0]) == kind


def test_validate_reports_every_violation():
    with pytest.raises(InvalidParameters) as info:
        validate((6, 4, 9), 1)
    kinds = {v.kind for v in info.value.violations}
    assert kinds == {"NotSorted", "NotCoprime", "BadExponent"}


def test_legacy_and_odd_overrides():
    assert validate((5, 6), 3, legacy=True).D == 2
    assert validate((5, 7, 9), 3, allow_odd_N=True).N == 315
    assert validate((5, 6), 1, legacy=True).m == 30


@pytest.mark.parametrize("n_d, expected", [(5, [1, 3, 5]), (6, [1, 3, 5]), (7, [1, 3, 5, 7]), (1, [1]), (2, [1])])
def test_index_set(n_d, expected):
    assert index_set(n_d) == expected


def test_logical_states_567(code567):
    s1 = logical_state(1, code567)
    assert s1.weights == (42, 126, 210)
    assert s1.squared_amplitudes == (Fraction(5, 16), Fraction(10, 16), Fraction(1, 16))
    s2 = logical_state(2, code567)
    assert s2.weights == (35, 105, 175)
    assert s2.squared_amplitudes == (Fraction(6, 32), Fraction(20, 32), Fraction(6, 32))
    for d in (1, 2, 3):
        assert sum(logical_state(d, code567).squared_amplitudes) == 1


def brute_intersection(params, d, d2):
    return set(logical_state(d, params).weights) & set(logical_state(d2, params).weights)


@pytest.mark.parametrize("d, d2, expected", [(1, 2, Fraction(0)), (1, 3, Fraction(1, 32)), (2, 3, Fraction(0))])
def test_overlap_examples(code567, d, d2, expected):
    inter = brute_intersection(code567, d, d2)
    a, b = logical_state(d, code567).as_dict(), logical_state(d2, code567).as_dict()
    # independent: product of square roots via perfect-square detection
    brute = sum((Fraction(math.isqrt((a[w] * b[w]).numerator), math.isqrt((a[w] * b[w]).denominator)) for w in inter), Fraction(0))
    assert overlap(d, d2, code567) == expected == brute
    if expected:
        assert inter == {210}
        assert expected == Fraction(1, 2**2) * Fraction(1, 2**3)


def test_gram_matrix_567(code567):
    gm = gram_matrix(code567)
    assert [gm.entries[i][i] for i in range(3)] == [1, 1, 1]
    assert gm.entries[0][2] == gm.entries[2][0] == Fraction(1, 32)
    assert gm.entries[0][1] == gm.entries[1][2] == 0
    assert gm.max_off_diagonal == Fraction(1, 32) <= Fraction(1, 2 ** (5 - 1))
    assert gm.argmax == (1, 3)


def test_gram_halves_along_prime_family():
    # closed form 2^-((n_d - 1)/2 + (n_d' - 1)/2) for the odd pair (n_1, n_3)
    previous = None
    for p in (7, 11, 13):
        params = validate(build_coprime_sequence_for(p), 3)
        worst = gram_matrix(params).max_off_diagonal
        n1, n3 = params.n[0], params.n[2]
        assert worst == Fraction(1, 2 ** ((n1 - 1) // 2 + (n3 - 1) // 2))
        if previous is not None:
            assert worst < previous
        previous = worst


def build_coprime_sequence_for(p):
    from permcodes.number_theory import prime_index

    return build_coprime_sequence(prime_index(p), 3).values


def valid_parameter_sets(limit=10**4):
    """All coprime sorted triples/quads with n_d >= 4, even N <= limit."""
    out = []
    for D in (3, 4):
        for n in itertools.combinations(range(4, 40), D):
            N = math.prod(n)
            if N > limit or N % 2:
                continue
            if all(math.gcd(a, b) == 1 for a, b in itertools.combinations(n, 2)):
                if all(N // x >= 3 for x in n):
                    out.append(n)
    return out


def test_collisions_only_at_N_exhaustive():
    sets = valid_parameter_sets()
    assert len(sets) > 20
    for n in sets:
        params = validate(n, 3)
        for d, d2 in itertools.combinations(range(1, params.D + 1), 2):
            inter = brute_intersection(params, d, d2)
            both_odd = params.n[d - 1] % 2 == 1 and params.n[d2 - 1] % 2 == 1
            assert inter == ({params.N} if both_odd else set())


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(valid_parameter_sets()))
def test_support_spacing(n):
    params = validate(n, 3)
    for d in range(1, params.D + 1):
        w = logical_state(d, params).weights
        assert w[0] == params.g[d - 1]
        assert all(b - a == 2 * params.g[d - 1] for a, b in zip(w, w[1:]))
        assert sum(logical_state(d, params).squared_amplitudes) == 1


def test_toy_parameters_and_surd():
    toy = toy_parameters((2, 3), (3, 2), 8)
    assert logical_state(1, toy).weights == (3,)
    assert logical_state(2, toy).weights == (2, 6)
    assert overlap(1, 2, toy) == 0
    with pytest.raises(WeightOverflow):
        toy_parameters((3,), (3,), 8)
    # non-square amplitude product: weight 2 in both with 1/2 and 3/4
    odd = toy_parameters((3, 2), (2, 2), 8)
    v = overlap(1, 2, odd)
    assert isinstance(v, Surd)
    assert v.radicands == (Fraction(3, 4),)
    assert float(v) == pytest.approx(math.sqrt(0.75))


def test_descriptor_roundtrip(tmp_path, code567):
    doc = descriptor(code567)
    assert doc["N"] == 210 and doc["m"] == 9261000 and doc["g"] == [42, 35, 30]
    assert doc["states"][0]["squared_amplitudes"] == ["5/16", "5/8", "1/16"]
    text = json.dumps(doc)
    assert "." not in text.replace('".', "")  # no floats anywhere
    path = tmp_path / "code.json"
    dump_descriptor(code567, path)
    assert load_descriptor(path) == code567


def test_descriptor_tamper_detected(code567):
    doc = descriptor(code567)
    doc["states"][0]["squared_amplitudes"][0] = "1/4"
    with pytest.raises(ValueError):
        parameters_from_descriptor(doc)


def test_descriptor_toy_roundtrip():
    toy = toy_parameters((2, 3), (4, 2), 8)
    assert parameters_from_descriptor(json.loads(json.dumps(descriptor(toy)))) == toy


def test_primes_in_family_are_prime():
    assert all(is_prime(x) for x in (5, 7))
