import numpy as np
import pytest

from veelab.catalog import build_named
from veelab.errors import ConditionOneFails, NoRootInInterval, SingularJacobian
from veelab.geometry import build_config
from veelab.prepotential import TRIGONOMETRIC, residuals_at_points, sample_points
from veelab.solver import newton_refine, relation_scan


def test_f4_roots():
    scan = relation_scan("F4+", {"q": 1}, "r", (-5, -1))
    assert scan.roots == pytest.approx([-4, -2], abs=1e-10)
    assert all(r < 1e-10 for r in scan.root_residuals)


def test_g2_roots():
    assert relation_scan("G2+", {"q": 1}, "p", (-10, -1)).roots == pytest.approx([-9, -3], abs=1e-10)


def test_bc2_root():
    scan = relation_scan("BCn", {"q": 1, "s": 1, "m": (1, 1)}, "r", (-12, -5))
    assert scan.roots == pytest.approx([-8], abs=1e-10)


def test_every_root_commutes():
    scan = relation_scan("F4_A1_2", {"q": 1}, "r", (-5, -1))
    for r in scan.roots:
        cfg = build_named("F4_A1_2", {"q": 1, "r": r})
        assert max(residuals_at_points(cfg, TRIGONOMETRIC, sample_points(cfg, TRIGONOMETRIC, 20, 7))) < 1e-8


def test_one_dimensional_residual_is_identically_zero():
    scan = relation_scan("BCn", {"q": 1, "s": 1, "m": (1,)}, "r", (-5, 5))
    assert scan.identically_zero and scan.roots == []


def test_scan_errors():
    with pytest.raises(NoRootInInterval):
        relation_scan("F4+", {"q": 1}, "r", (0.5, 3))
    with pytest.raises(ValueError):
        relation_scan("F4+", {"q": 1}, "r", (-5, -1), grid_size=4)
    with pytest.raises(ValueError):
        relation_scan("F4+", {"q": 1}, "r", (1, -1))

    def bent(params):
        return build_config(2, [[1, 0], [1, 1]], [1, params["t"]])

    with pytest.raises(ConditionOneFails):
        relation_scan(bent, {}, "t", (0.5, 2))


def test_newton_lands_on_bc3_line():
    res = newton_refine("BCn", {"q": 1, "m": (1, 1, 1)}, ["r", "s"], [-8.1, 0.9])
    r, s = res.values
    assert abs(r - (-8 * s - 2)) < 1e-9 and res.residual < 1e-11
    assert res.history[0] > res.residual


def test_newton_on_the_relation_takes_no_steps():
    res = newton_refine("BCn", {"q": 1, "m": (1, 1, 1)}, ["r", "s"], [-10.0, 1.0])
    assert res.iterations == 0 and res.residual < 1e-11


def test_newton_dead_parameter():
    def ignores_scale(params):
        return build_named("F4+", {"r": params["r"], "q": 1})

    with pytest.raises(SingularJacobian):
        newton_refine(ignores_scale, {}, ["r", "scale"], [-2.2, 1.0])
    with pytest.raises(ValueError):
        newton_refine("F4+", {"q": 1}, ["r"], np.array([1.0, 2.0]))
