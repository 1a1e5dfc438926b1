import pytest
from hypothesis import given, settings

from irrper.connection import (
    admissibility,
    check_regularization_index,
    eigenvalues,
    printed_variant_diagnostic,
    pushforward_legendre,
    rank_one,
    regularize,
    tensor_exponential,
    trace,
    twist_by_divisor,
)
from irrper.curve import critical_data, exceptional_root
from irrper.period import exceptional_regularized, generic_regularized

from strategies import generic_lambda


def test_printed_variants():
    diag = printed_variant_diagnostic()
    assert diag["second"]["matches"]
    assert not diag["first"]["matches"]
    assert diag["first"]["mismatched_entries"] == ["(1,2)"]


@settings(max_examples=25)
@given(generic_lambda())
def test_residue_eigenvalues_zero_half(lam):
    cd = critical_data(lam)
    _, rank2 = pushforward_legendre(cd)
    assert len(rank2.points) == 4
    for b in rank2.residues:
        e = eigenvalues(b, cd.ctx)
        assert abs(e[0]) < 1e-8 and abs(e[1] - 0.5) < 1e-8
    assert rank2.residue_sum_defect() < 1e-12
    inf = eigenvalues(rank2.residue_at_infinity(), cd.ctx)
    assert abs(inf[0] + 4 / 3) < 1e-8 and abs(inf[1] + 2 / 3) < 1e-8


@pytest.mark.parametrize("sign", [1, -1])
def test_exceptional_pushforward(fp, sign):
    cd = critical_data(exceptional_root(fp, sign), fp)
    _, rank2 = pushforward_legendre(cd)
    assert len(rank2.points) == 2
    for b in rank2.residues:
        e = eigenvalues(b, fp)
        assert abs(e[0] - 1 / 3) < 1e-10 and abs(e[1] - 2 / 3) < 1e-10
        assert abs(trace(b) - 1) < 1e-10
    assert admissibility(tensor_exponential(rank2)).points


def test_twist_and_regularize(fp):
    cd = critical_data(2, fp)
    _, rank2 = pushforward_legendre(cd)
    assert not admissibility(rank2).admissible
    tw = twist_by_divisor(rank2, cd)
    assert admissibility(tw).admissible
    reg = generic_regularized(cd, 10)
    assert reg.points[-1] == -10
    assert reg.residues[-1] == [[11, 0], [0, 11]]
    assert not reg.irregular or reg.irregular_degree == 0
    assert reg.scalar_shifts[-1] == 11


def test_regularize_requires_exponential(fp):
    c = rank_one([0.5], [0.3], fp)
    with pytest.raises(ValueError):
        regularize(c, 5)
    r = regularize(tensor_exponential(c), 5)
    assert r.n == 2


@pytest.mark.parametrize("m", [1, 0, 2.5, -3])
def test_bad_regularization_index(m):
    with pytest.raises(ValueError):
        check_regularization_index(m)


def test_exceptional_regularized(fp):
    cd = critical_data(exceptional_root(fp, 1), fp)
    reg = exceptional_regularized(cd, 10)
    assert len(reg.points) == 3


def test_matrix_has_simple_poles(fp):
    cd = critical_data(3 + 1j, fp)
    _, rank2 = pushforward_legendre(cd)
    q = rank2.points[0]
    eps = 1e-6
    a = rank2.matrix(q + eps)
    b = rank2.residues[0]
    assert max(abs(a[i][j] * eps - b[i][j]) for i in range(2) for j in range(2)) < 1e-4


def test_to_json(fp):
    _, rank2 = pushforward_legendre(critical_data(2, fp))
    js = rank2.to_json()
    assert js["rank"] == 2 and len(js["points"]) == 4
