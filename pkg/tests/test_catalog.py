import numpy as np
import pytest

from veelab.catalog import CATALOG, F4_FAMILY, build_named, get_entry, list_catalog
from veelab.errors import BadParameter, MissingParameter, UnknownName
from veelab.prepotential import TRIGONOMETRIC, residuals_at_points, sample_points
from veelab.vee_check import condition2_residual, euclidean_vee_residual


@pytest.mark.parametrize("name, count", [("F4+", 24), ("G2+", 6), ("F4_A1_1", 13), ("F4_A1_2", 16),
                                         ("F4_A2_1", 9), ("F4_A1sq", 8)])
def test_vector_counts(name, count):
    params = {"p": 1, "q": 1} if name == "G2+" else {"r": 1, "q": 1}
    cfg = build_named(name, params)
    assert len(cfg) == count and cfg.exact


def test_bcn_with_unit_m_is_the_positive_half_of_bcn():
    cfg = build_named("BCn", {"q": 1, "r": 2, "s": 3, "n": 3})
    assert len(cfg) == 3 + 3 + 2 * 3
    vectors = {tuple(np.real(v)) for v in cfg.array}
    assert (1.0, 0.0, 0.0) in vectors and (2.0, 0.0, 0.0) in vectors and (0.0, 1.0, -1.0) in vectors
    assert build_named("BCn", {"q": 1, "r": 2, "s": 3, "m": (1, 1, 1)}) == cfg


def test_bcn_exactness_depends_on_m():
    assert build_named("BCn", {"q": 1, "r": 2, "s": 3, "m": (3, 1, 2)}).exact
    assert not build_named("BCn", {"q": 1, "r": 2, "s": 3, "m": (5, 1)}).exact


@pytest.mark.parametrize("name", sorted(n for n, e in CATALOG.items() if e.relations))
def test_every_relation_gives_a_solution(name):
    base = {"q": 1, "s": 1, "m": (2, 1)} if name == "BCn" else {"q": 1}
    for relation in get_entry(name).relations:
        params = relation.apply({**base, "r": 0, "p": 0})
        cfg = build_named(name, params)
        assert euclidean_vee_residual(cfg).verdict
        assert condition2_residual(cfg) < 1e-10
        pts = sample_points(cfg, TRIGONOMETRIC, 20, 7)
        assert max(residuals_at_points(cfg, TRIGONOMETRIC, pts)) < 1e-9


def test_g2_generic_passes_vee_but_not_condition2():
    cfg = build_named("G2+", {"p": 1, "q": 1})
    assert euclidean_vee_residual(cfg).max_residual == 0
    assert condition2_residual(cfg) > 0


def test_f4_family_relations_are_shared():
    for name in F4_FAMILY:
        assert get_entry(name).relation_labels == ["r=-2q", "r=-4q"]


def test_listing_and_summaries():
    names = [e.name for e in list_catalog()]
    assert names[:4] == ["BCn", "BC1", "F4+", "G2+"] and "poly2d" in names
    summary = get_entry("F4+").summary()
    assert summary["dim"] == "4" and set(summary["params"]) == {"r", "q"}


def test_errors():
    with pytest.raises(UnknownName) as info:
        build_named("E8", {})
    assert "F4+" in str(info.value)
    with pytest.raises(MissingParameter):
        build_named("F4+", {"r": 1})
    with pytest.raises(BadParameter):
        build_named("F4+", {"r": "x", "q": 1})
    with pytest.raises(BadParameter):
        build_named("BCn", {"q": 1, "r": 1, "s": 1, "m": (1, 0)})
    with pytest.raises(BadParameter):
        build_named("poly2d", {"k": 2.5})


def test_polynomial_tensor():
    poly = build_named("poly2d", {"k": 4, "a": 2})
    T = poly.tensor([0.1, 0.5])
    assert T.F[0, 0, 1] == T.F[0, 1, 0] == T.F[1, 0, 0] == 1
    assert T.F[1, 1, 1] == pytest.approx(2 * 4 * 3 * 2 * 0.5)
    assert T.F[0, 0, 0] == 0 and T.F[0, 1, 1] == 0
