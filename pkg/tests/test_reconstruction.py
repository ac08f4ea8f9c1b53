import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holotet.closure import CurvatureClass, classify, fix_signs, gram
from holotet.errors import (Degenerate, InvalidGram, InvalidInput, SingularNormalMatrix,
                            VertexFigureDegenerate)
from holotet.forward import closure_from_vertices
from holotet.reconstruction import (EDGES, edge_lengths, face_data, inner, lemma_minors,
                                    metric, normals4, reconstruct, tetrahedron_from_gram,
                                    vertices)
from holotet.rotor import random_rotor
from holotet.sampling import VertexKind, forward_sample, octant_config, random_closure
from oracles import (OCTANT_AREA, OCTANT_EDGE, regular_hyperbolic_values,
                     regular_spherical_values, regular_vertices)

seeds = st.integers(0, 2**32 - 1)

# (face, vertex) pairs with the vertex on the face: face l misses vertex l only
INCIDENT = [(l, m) for l in range(4) for m in range(4) if l != m]


def uniform_gram(c: float) -> np.ndarray:
    return np.full((4, 4), c) + (1 - c) * np.eye(4)


def test_octant_reconstruction():
    tet = reconstruct(octant_config())
    assert tet.s == 1
    assert np.allclose(tet.edge_lengths, OCTANT_EDGE, atol=1e-12)
    assert np.allclose(tet.areas, OCTANT_AREA, atol=1e-12)
    off = ~np.eye(4, dtype=bool)
    assert np.allclose(tet.face_angles[off], np.pi / 2, atol=1e-12)
    # vertices are an orthonormal frame of R^4
    assert np.allclose(tet.V.T @ tet.V, np.eye(4), atol=1e-12)


def test_octant_normals():
    N = normals4(np.eye(4), 1)
    assert np.allclose(N[1:, :3].T @ N[1:, :3], np.eye(3), atol=1e-12)
    assert np.allclose(N[:, 3], [N[0, 3], 0, 0, 0], atol=1e-12)
    assert abs(N[0, 3]) == pytest.approx(1.0)


@pytest.mark.parametrize("theta", [1.35, 1.5, 1.9, 2.3])
def test_regular_spherical_against_cosine_laws(theta):
    edge, alpha, area = regular_spherical_values(theta)
    tet = reconstruct(closure_from_vertices(regular_vertices(edge, 1), 1))
    assert tet.curvature_class == "spherical"
    assert np.allclose(tet.edge_lengths, edge, atol=1e-9)
    assert np.allclose(tet.areas, area, atol=1e-9)
    off = ~np.eye(4, dtype=bool)
    assert np.allclose(tet.face_angles[off], alpha, atol=1e-9)
    assert np.allclose(tet.gram[off], -np.cos(theta), atol=1e-9)


@pytest.mark.parametrize("theta", [1.1, 1.15, 1.2])
def test_regular_hyperbolic_against_cosine_laws(theta):
    edge, alpha, area = regular_hyperbolic_values(theta)
    tet = reconstruct(closure_from_vertices(regular_vertices(edge, -1), -1))
    assert tet.curvature_class == "hyperbolic"
    assert len(set(tet.sheets)) == 1
    assert np.allclose(tet.edge_lengths, edge, atol=1e-9)
    assert np.allclose(tet.areas, area, atol=1e-9)


def test_gram_entry_minus_point_two():
    # internal dihedral cos 0.2 sits above the flat value 1/3: spherical
    edge, alpha, area = regular_spherical_values(np.arccos(0.2))
    tet = tetrahedron_from_gram(uniform_gram(-0.2))
    assert tet.s == 1
    assert np.allclose(tet.edge_lengths, edge, atol=1e-10)
    assert np.allclose(tet.areas, area, atol=1e-10)


def test_gram_minus_third_is_degenerate():
    with pytest.raises(Degenerate):
        tetrahedron_from_gram(uniform_gram(-1 / 3))


@pytest.mark.parametrize("c", [-0.5, -0.6])
def test_ideal_vertex_is_reported(c):
    with pytest.raises(VertexFigureDegenerate):
        tetrahedron_from_gram(uniform_gram(c))
    with pytest.raises(VertexFigureDegenerate):
        face_data(uniform_gram(c), -1)


def test_from_gram_rejects_bad_shape():
    with pytest.raises(InvalidInput):
        tetrahedron_from_gram(np.eye(3))
    with pytest.raises(InvalidGram):
        tetrahedron_from_gram(uniform_gram(0.999999999999999))


@pytest.mark.parametrize("offset", [1e-3, 1e-5])
def test_near_flat_normal_time_part(offset):
    # det G = s det(N)^2 and det N = N4^0 det(spatial 3x3 block)
    G = uniform_gram(-1 / 3 + offset)
    N = normals4(G, 1)
    want = np.sqrt(np.linalg.det(G) / np.linalg.det(G[:3, :3]))
    assert abs(N[0, 3]) == pytest.approx(want, rel=1e-9)
    assert abs(N[0, 3]) < 4 * np.sqrt(offset)


def test_hyperbolic_normal_time_component():
    N = normals4(uniform_gram(-0.4), -1)
    sp = N[1:, 3]
    assert N[0, 3] ** 2 == pytest.approx(sp @ sp - 1, rel=1e-12)
    assert inner(N[:, 3], N[:, 3], -1) == pytest.approx(1.0)


def test_singular_normals_rejected():
    with pytest.raises(SingularNormalMatrix):
        vertices(np.zeros((4, 4)), 1)


def test_edge_lengths_flags():
    V = np.eye(4)
    V[:, 1] = -V[:, 0]
    e = edge_lengths(V, 1)
    assert e[0].length == pytest.approx(np.pi)
    assert e[0].degenerate
    up = np.array([1.0, 0, 0, 0])
    low = np.array([-np.cosh(0.5), np.sinh(0.5), 0, 0])
    W = np.column_stack([up, low, [np.cosh(1), 0, np.sinh(1), 0], [np.cosh(1), 0, 0, np.sinh(1)]])
    e = edge_lengths(W, -1)
    assert e[0].generalized and np.isinf(e[0].length)
    assert e[0].diagnostic == pytest.approx(0.5)
    assert not e[1].generalized


def test_radius_scales_lengths_only():
    cfg = random_closure(np.random.default_rng(5))
    a = reconstruct(cfg)
    b = reconstruct(type(cfg)(cfg.holonomies, cfg.special_edge, 3.0))
    assert np.allclose(b.edge_lengths, 3 * a.edge_lengths)
    assert np.allclose(b.areas, a.areas)
    assert b.to_json()["areas"] == pytest.approx((9 * a.areas).tolist())


def _check_invariants(tet):
    g = metric(tet.s)
    assert np.allclose(tet.N.T @ g @ tet.N, tet.gram, atol=1e-9)
    assert np.allclose(np.einsum("il,ij,jl->l", tet.V, g, tet.V), tet.s, atol=1e-10)
    for l, m in INCIDENT:
        assert abs(inner(tet.N[:, l], tet.V[:, m], tet.s)) < 1e-9
    for l in range(4):
        assert abs(inner(tet.N[:, l], tet.V[:, l], tet.s)) > 1e-6
    assert np.all(lemma_minors(tet.gram) > 0)
    assert np.all((tet.areas > 0) & (tet.areas < 2 * np.pi))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_random_closure_invariants(seed):
    _check_invariants(reconstruct(random_closure(np.random.default_rng(seed))))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(list(VertexKind)))
def test_forward_reconstruct_is_identity_on_geometry(seed, kind):
    sample = forward_sample(np.random.default_rng(seed), kind)
    tet = reconstruct(sample.config)
    _check_invariants(tet)
    V, s = sample.vertices, sample.s
    for (a, b), e in zip(EDGES, tet.edges):
        c = inner(V[:, a], V[:, b], s)
        if s > 0:
            assert e.length == pytest.approx(np.arccos(c), abs=1e-8)
        elif c < 0:
            assert e.length == pytest.approx(np.arccosh(-c), abs=1e-8)
        else:
            assert e.generalized
    if kind is VertexKind.HYPERBOLIC:
        assert len(set(tet.sheets)) == 1
    if kind is VertexKind.TWO_SHEETED:
        assert tet.two_sheeted


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_isometry_invariance(seed, rseed):
    cfg = random_closure(np.random.default_rng(seed))
    r = random_rotor(np.random.default_rng(rseed))
    a, b = reconstruct(cfg), reconstruct(cfg.conjugated(r))
    assert np.allclose(a.edge_lengths, b.edge_lengths, atol=1e-10)
    assert np.allclose(a.areas, b.areas, atol=1e-10)
    off = ~np.eye(4, dtype=bool)
    assert np.allclose(a.face_angles[off], b.face_angles[off], atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_classification_matches_metric_sign(seed):
    cfg = random_closure(np.random.default_rng(seed))
    sn = fix_signs(cfg)
    c = classify(gram(sn), sn)
    tet = reconstruct(cfg)
    want = CurvatureClass.SPHERICAL if tet.s > 0 else CurvatureClass.HYPERBOLIC
    assert c.curvature is want
