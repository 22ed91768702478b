import numpy as np
import pytest

from veelab.catalog import build_named, closed_form_case
from veelab.errors import IsotropicComplement
from veelab.geometry import build_config, inner, to_numeric
from veelab.restriction import (
    gram_equivalence,
    project_case,
    restrict,
    restrict_along,
    restricted_commutativity,
    restricted_identity_residual,
    subsystem,
    tangency_check,
)

F4 = build_named("F4+", {"r": -2, "q": 1})
B2 = build_config(2, [[1, 0], [0, 1], [1, 1], [1, -1]], [1, 1, 1, 1])


def _bc(m, q=1.0, s=1.0, r=None):
    if r is None:
        r = -8 * s - 2 * q * (sum(m) - 2)
    return build_named("BCn", {"q": q, "r": r, "s": s, "m": m})


def test_subsystem_examples():
    (idx,) = subsystem(F4, [[0, 0, 1, -1]])
    assert [complex(x) for x in F4.vectors[idx]] == [0, 0, 1, -1]
    assert subsystem(B2, [[1, 0], [0, 1]]) == (0, 1, 2, 3)
    assert subsystem(B2, [[1, 2]]) == ()
    assert subsystem(to_numeric(B2), [[1, 1]]) == (2,)
    with pytest.raises(ValueError):
        subsystem(B2, [])


def test_frame_is_orthonormal_and_normal_to_subsystem():
    frame = restrict_along(F4, [[0, 1, -1, 0], [0, 0, 1, -1]])
    assert frame.exact and frame.config.dim == 2
    for a, f in enumerate(frame.basis):
        for b, g in enumerate(frame.basis):
            assert inner(f, g) == (1 if a == b else 0)
        for k in frame.subsystem:
            assert inner(F4.vectors[k], f) == 0


def test_empty_subsystem_keeps_everything():
    frame = restrict(B2, ())
    assert frame.config == B2
    assert np.allclose(frame.basis_array, np.eye(2))


def test_bc3_along_a1_gives_bc2_with_m_21():
    q, r, s = 1.5, -0.7, 2.0
    frame = restrict_along(_bc((1, 1, 1), q, s, r), [[1, -1, 0]])
    target = _bc((2, 1), q, s, r)
    assert gram_equivalence(frame.config, target) is not None


def test_f4_along_short_root_matches_table():
    frame = restrict_along(F4, [[0, 0, 0, 1]])
    assert len(frame.config) == 13
    assert gram_equivalence(frame.config, build_named("F4_A1_1", {"r": -2, "q": 1})) is not None
    assert gram_equivalence(frame.config, build_named("F4_A1_1", {"r": -4, "q": 1})) is None


def test_whole_space_subsystem_raises():
    with pytest.raises(IsotropicComplement):
        restrict_along(B2, [[1, 0], [0, 1]])


def test_isotropic_complement_raises():
    cfg = build_config(3, [[1, 1j, 0], [0, 0, 1], [1, 0, 0]], [1, 1, 1])
    with pytest.raises(IsotropicComplement):
        restrict(cfg, (0,))


def test_restricted_commutativity():
    e4 = subsystem(F4, [[0, 0, 0, 1]])
    assert restricted_commutativity(F4, e4).passed
    off = build_named("F4+", {"r": 1, "q": 1})
    rep = restricted_commutativity(off, subsystem(off, [[0, 0, 0, 1]]))
    assert rep.checks[0].residual > 1e-3 and not rep.passed
    bc = _bc((1, 1, 1, 1))
    for chain in ([[1, -1, 0, 0]], [[1, -1, 0, 0], [0, 1, -1, 0]], [[1, 0, 0, 0]]):
        assert restricted_commutativity(bc, subsystem(bc, chain)).passed


def test_zero_class_weight_warns():
    cfg = build_config(2, [[1, 0], [2, 0], [0, 1], [1, 1]], [4, -1, 1, 1])
    rep = restricted_commutativity(cfg, (0, 1))
    assert rep.warnings


def test_tangency():
    case5 = closed_form_case("BCn", {"q": 1, "s": 1, "m": (1, 1, 1), "r": -10})
    wall = restrict_along(case5.config, [[1, -1, 0]])
    assert tangency_check(case5, wall).tangent
    case1 = closed_form_case("F4+", {"r": -2, "q": 1})
    for mirror in ([[0, 0, 0, 1]], [[0, 1, -1, 0]]):
        assert tangency_check(case1, restrict_along(F4, mirror)).tangent
    constant = tangency_check(lambda x: np.array([1, 0, 0]), restrict_along(case5.config, [[1, 0, 0]]))
    assert not constant.tangent and constant.max_normal == pytest.approx(1)


def test_restricted_field_is_identity_of_projection():
    case1 = closed_form_case("F4+", {"r": -2, "q": 1})
    frame = restrict_along(F4, [[0, 0, 0, 1]])
    assert restricted_identity_residual(case1, frame) < 1e-9
    projected = project_case(case1, frame)
    assert len(projected.reduced) == len(frame.config)
    assert sum(projected.reduced) == pytest.approx(sum(case1.reduced[i] for i, k in enumerate(frame.source_map)
                                                       if k is not None))


def test_gram_equivalence_with_signs_and_scale():
    flipped = build_config(2, [[-1, 0], [0, 1], [1, 1], [-1, 1]], [1, 1, 1, 1])
    eq = gram_equivalence(B2, flipped)
    assert eq is not None and -1 in eq.signs
    doubled = build_config(2, [[2, 0], [0, 2], [2, 2], [2, -2]], [1, 1, 1, 1])
    assert gram_equivalence(B2, doubled) is None
    assert gram_equivalence(B2, doubled, allow_scale=True).scale == 4
    assert gram_equivalence(B2, B2.with_mults([1, 1, 1, 2])) is None
    assert gram_equivalence(to_numeric(B2), to_numeric(flipped)) is not None
