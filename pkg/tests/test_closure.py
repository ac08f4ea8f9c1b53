import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holotet.closure import (EDGE13_PERM, ClosureConfig, CurvatureClass, SpecialEdge,
                             classify, dihedral_24, fix_signs, gram, gram_for_config,
                             gram_from_json, gram_to_json, validate_closure, validate_gram)
from holotet.errors import (ClosureViolated, DegenerateConfiguration, InvalidGram,
                            InvalidInput)
from holotet.forward import closure_from_vertices
from holotet.reconstruction import lemma_minors
from holotet.rotor import AxisAngle, Rotor, exp_su2, random_rotor
from holotet.sampling import VertexKind, forward_sample, octant_config, random_closure
from oracles import regular_vertices

seeds = st.integers(0, 2**32 - 1)


def uniform_gram(c: float) -> np.ndarray:
    return np.full((4, 4), c) + (1 - c) * np.eye(4)


def test_four_half_turns_close():
    q = exp_su2(AxisAngle(np.pi, (0.0, 0.0, 1.0)))
    rep = validate_closure([q] * 4)
    assert rep.defect == pytest.approx(0, abs=1e-15)
    assert rep.center_sign == 1


def test_constructed_inverse_and_twisted_closure():
    rng = np.random.default_rng(0)
    h1, h2, h3 = (random_rotor(rng) for _ in range(3))
    h4 = (h3 * h2 * h1).inverse()
    assert validate_closure([h1, h2, h3, h4]).center_sign == 1
    rep = validate_closure([h1, h2, h3, -h4])
    assert rep.defect < 1e-7
    assert rep.center_sign == -1


def test_broken_closure_raises():
    rng = np.random.default_rng(1)
    hs = [random_rotor(rng) for _ in range(4)]
    with pytest.raises(ClosureViolated):
        validate_closure(hs)
    with pytest.raises(InvalidInput):
        validate_closure(hs[:3])


def test_octant_signs_and_gram():
    sn = fix_signs(octant_config())
    assert np.allclose(sn.triples, 1.0, atol=1e-12)
    assert np.allclose(sn.angles, np.pi / 2, atol=1e-12)
    G = gram(sn)
    assert np.allclose(G, np.eye(4), atol=1e-12)
    c = classify(G, sn)
    assert c.curvature is CurvatureClass.SPHERICAL
    assert c.det == pytest.approx(1.0)


def test_lift_sign_flip_is_invisible():
    cfg = octant_config()
    h1, h2, h3, h4 = cfg.holonomies
    flipped = ClosureConfig((h1, -h2, -h3, h4))
    a, b = fix_signs(cfg), fix_signs(flipped)
    assert np.allclose(a.angles, b.angles)
    assert np.allclose(a.normals, b.normals)


def test_coplanar_axes_are_degenerate():
    x, y = (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)
    h1, h2 = exp_su2(AxisAngle(0.8, x)), exp_su2(AxisAngle(1.1, y))
    cfg = ClosureConfig((h1, h2, h2.inverse(), h1.inverse()))
    with pytest.raises(DegenerateConfiguration):
        fix_signs(cfg)


def test_small_regular_tetrahedron_is_nearly_flat():
    cfg = closure_from_vertices(regular_vertices(0.01, 1), 1)
    G = gram(fix_signs(cfg))
    off = G[~np.eye(4, dtype=bool)]
    assert np.allclose(off, -1 / 3, atol=1e-3)


def test_gram_minus_point_six_is_invalid():
    G = uniform_gram(-0.6)
    # (1 + 2c)(1 - c)^2 at c = -0.6
    assert np.linalg.det(G[:3, :3]) == pytest.approx(-0.512)
    with pytest.raises(InvalidGram):
        validate_gram(G)


def test_validate_gram_shape_checks():
    with pytest.raises(InvalidGram):
        validate_gram(np.eye(3))
    bad = np.eye(4)
    bad[0, 0] = 2
    with pytest.raises(InvalidGram):
        validate_gram(bad)


@pytest.mark.parametrize("c, expected", [
    (-1 / 3, CurvatureClass.DEGENERATE),
    (0.0, CurvatureClass.SPHERICAL),
    (-0.4, CurvatureClass.HYPERBOLIC),
])
def test_classify_uniform_grams(c, expected):
    res = classify(uniform_gram(c))
    assert res.curvature is expected
    if c == -0.4:
        assert res.det == pytest.approx(-0.5488)


def test_gram_json_roundtrip():
    G = uniform_gram(-0.2)
    assert np.array_equal(gram_from_json(gram_to_json(G)), G)
    with pytest.raises(InvalidInput):
        gram_from_json([1, 2, 3])


def test_config_json_roundtrip():
    cfg = random_closure(np.random.default_rng(3), radius=2.0)
    back = ClosureConfig.from_json(cfg.to_json())
    assert back == cfg
    with pytest.raises(InvalidInput):
        ClosureConfig.from_json({"holonomies": [[1, 0, 0, 0]] * 4, "special_edge": "12"})


@settings(max_examples=60, deadline=None)
@given(seeds, seeds)
def test_conjugation_invariance(seed, rseed):
    cfg = random_closure(np.random.default_rng(seed))
    r = random_rotor(np.random.default_rng(rseed))
    assert np.allclose(gram(fix_signs(cfg.conjugated(r))), gram(fix_signs(cfg)), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_theta24_consistency(seed):
    sn = fix_signs(random_closure(np.random.default_rng(seed)))
    a, b = dihedral_24(sn)
    assert abs(a - b) < 1e-10


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_signs_and_minors_on_random_closures(seed):
    sn = fix_signs(random_closure(np.random.default_rng(seed)))
    assert np.all(sn.triples > 0)
    assert sn.signs == tuple(int(np.sign(np.sin(a))) for a in sn.angles)
    G = gram(sn)
    c = classify(G, sn)
    assert np.sign(c.det) == np.sign(c.n4_criterion)
    # cofactors of a valid Gram matrix are positive in either curvature
    assert np.all(lemma_minors(G) > 0)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([VertexKind.SPHERICAL, VertexKind.HYPERBOLIC]))
def test_edge13_is_gauge_equivalent(seed, kind):
    sample = forward_sample(np.random.default_rng(seed), kind)
    G24 = gram(fix_signs(sample.config))
    # same tetrahedron with vertex 2 as base: swap labels 1<->2 and 3<->4
    p = list(EDGE13_PERM)
    other = closure_from_vertices(sample.vertices[:, p], kind.s)
    hs = tuple(other.holonomies[i] for i in p)
    cfg13 = ClosureConfig(hs, SpecialEdge.EDGE13)
    assert np.allclose(gram_for_config(cfg13), G24, atol=1e-10)
