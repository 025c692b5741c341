import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitkit import dense_linalg, sampling
from orbitkit.errors import ReferenceTooShort, UnsortedInput
from orbitkit.expectations import conditional_expectation
from orbitkit.symmetric_norms import NormSpec, ideal_norm, ky_fan_majorizes, maximal_norm, norm_of

HARMONIC = NormSpec.parse("ratio:harmonic:64")
SPECS = [
    NormSpec.operator(),
    NormSpec.trace(),
    NormSpec.schatten(1.5),
    NormSpec.schatten(2),
    NormSpec.schatten(7),
    NormSpec.kyfan(1),
    NormSpec.kyfan(3),
    HARMONIC,
]


def test_unsorted():
    with pytest.raises(UnsortedInput):
        ideal_norm([3, 4], NormSpec.operator())


def test_schatten_345():
    assert ideal_norm([4, 3], NormSpec.schatten(2)) == pytest.approx(5.0, abs=1e-15)


def test_ratio_example():
    value = ideal_norm([1, 1, 1], NormSpec.ratio([1, 1 / 2, 1 / 3]))
    assert value == pytest.approx(3 / (1 + 1 / 2 + 1 / 3), abs=1e-15)
    assert value == pytest.approx(1.6363636363636, abs=1e-12)


def test_ratio_reference_too_short():
    with pytest.raises(ReferenceTooShort):
        ideal_norm([1, 1, 1], NormSpec.ratio([1, 0.5]))


def test_majorization_examples():
    assert ky_fan_majorizes([1, 1], [2, 0]).dominated
    rep = ky_fan_majorizes([2, 0], [1, 1])
    assert not rep.dominated and rep.first_violation == 1


def test_majorization_expectation(gen):
    x = sampling.complex_matrix(gen, 7)
    fam = sampling.family(gen, 7)
    sx = dense_linalg.singular_values_of(conditional_expectation(x, fam))
    assert ky_fan_majorizes(sx, dense_linalg.singular_values_of(x), tol=1e-9).dominated


def test_maximal_norm_examples(gen):
    value, partials = maximal_norm(np.diag([2.0, 1.0]), NormSpec.kyfan(2))
    assert value == 3 and partials.tolist() == [2, 3]
    assert maximal_norm(np.zeros((3, 3)), NormSpec.trace())[0] == 0
    x = sampling.complex_matrix(gen, 8)
    assert maximal_norm(x, NormSpec.schatten(1))[0] == pytest.approx(
        np.linalg.svd(x, compute_uv=False).sum(), abs=1e-9
    )


def test_parse_and_dict_round_trip():
    for text in ["operator", "trace", "schatten:2", "kyfan:3", "ratio:1,0.5,0.25"]:
        spec = NormSpec.parse(text)
        assert NormSpec.from_dict(spec.to_dict()) == spec
    assert HARMONIC.bi_normalizing
    assert not NormSpec.ratio([2.0 ** -k for k in range(1, 40)]).bi_normalizing
    with pytest.raises(ValueError):
        NormSpec.parse("schatten:0.5")
    with pytest.raises(ValueError):
        NormSpec.ratio([1, 2])


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind + str(s.p or s.k or ""))
def test_rank_one_projection_has_norm_one(spec):
    assert ideal_norm([1.0], spec) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind + str(s.p or s.k or ""))
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
def test_norm_properties(spec, seed, n):
    gen = np.random.default_rng(seed)
    x = sampling.complex_matrix(gen, n)
    y = sampling.complex_matrix(gen, n)
    u, v = sampling.unitary(gen, n), sampling.unitary(gen, n)
    nx = norm_of(x, spec)
    assert norm_of(u @ x @ v, spec) == pytest.approx(nx, rel=1e-9, abs=1e-9)
    assert norm_of(x + y, spec) <= nx + norm_of(y, spec) + 1e-9
    s = dense_linalg.singular_values_of(x)
    assert s[0] - 1e-9 <= nx <= s.sum() + 1e-9
    assert norm_of(2.5 * x, spec) == pytest.approx(2.5 * nx, rel=1e-12)


@pytest.mark.parametrize("spec", [NormSpec.kyfan(2), HARMONIC], ids=["kyfan", "ratio"])
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10))
def test_dominance(spec, seed, n):
    gen = np.random.default_rng(seed)
    x = sampling.complex_matrix(gen, n)
    ex = conditional_expectation(x, sampling.family(gen, n))
    sx, se = dense_linalg.singular_values_of(x), dense_linalg.singular_values_of(ex)
    assert ky_fan_majorizes(se, sx, tol=1e-9).dominated
    assert ideal_norm(se, spec) <= ideal_norm(sx, spec) + 1e-9


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
def test_maximal_partials_non_decreasing(seed, n):
    x = sampling.complex_matrix(np.random.default_rng(seed), n)
    for spec in SPECS:
        value, partials = maximal_norm(x, spec)
        assert np.all(np.diff(partials) >= -1e-12)
        assert value == pytest.approx(norm_of(x, spec), rel=1e-12)
