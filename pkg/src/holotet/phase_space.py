"""Quasi-Poisson phase space of four holonomies.

Each factor is charted by logarithmic coordinates ``a = r^2 * angle * axis``
with ``H = exp((a / r^2) . tau)``.  The single-factor bracket is
``{a^i, a^j} = f(|a| / r^2) eps_ijk a^k`` with ``f(x) = (x/2) cot(x/2)``.
Fusion adds the twist built from the conjugation fields ``y -> y x a``.
The reduced shape coordinates are the diagonal angle ``A21`` of ``H2 H1``
and the bending angle ``phi21``; the bending flow rotates factors 1 and 2
rigidly about the diagonal axis.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .closure import closure_product
from .errors import DiagonalDegenerate, InvalidInput, OutOfChart, PhiUndefined
from .rotor import (AxisAngle, Rotor, exp_su2, log_su2, rotation_angle,
                    rotor_to_rotation)

CHART_TOL = 1e-12
CROSS_TOL = 1e-10
FD_STEP = 1e-6
MC_CHUNK = 1 << 16
VOLUME_ROUNDING = 1e-12
JACOBIATOR_RATIO = -0.5

EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k] = 1.0
    EPS[_j, _i, _k] = -1.0


class VolumeForm(Enum):
    SYMPLECTIC = "symplectic"
    LIOUVILLE = "liouville"


# --- single factor ----------------------------------------------------------

def _chart_angle(a: np.ndarray, r: float) -> float:
    x = float(np.linalg.norm(a)) / r**2
    if x <= CHART_TOL or x >= 2 * np.pi - CHART_TOL:
        raise OutOfChart(f"|a|/r^2 = {x:.6g} is outside (0, 2pi)")
    return x


def bracket_coefficient(x: float) -> float:
    """(x/2) cot(x/2), the deformation of the flat bracket."""
    h = 0.5 * x
    return h * np.cos(h) / np.sin(h)


def bracket_coefficient_derivative(x: float) -> float:
    h = 0.5 * x
    return 0.5 * np.cos(h) / np.sin(h) - 0.5 * h / np.sin(h) ** 2


def qp_bracket_matrix(a, r: float = 1.0) -> np.ndarray:
    """Matrix of ``{a^i, a^j}`` for one factor at radius ``r``."""
    a = np.asarray(a, dtype=float).reshape(3)
    x = _chart_angle(a, r)
    return bracket_coefficient(x) * np.einsum("ijk,k->ij", EPS, a)


def _qp_bracket_gradient(a: np.ndarray, r: float) -> np.ndarray:
    # d/da^l of P_ij, indexed [l, i, j]
    x = _chart_angle(a, r)
    n = np.linalg.norm(a)
    f = bracket_coefficient(x)
    fp = bracket_coefficient_derivative(x) / r**2
    ea = np.einsum("ijk,k->ij", EPS, a)
    return fp * np.einsum("l,ij->lij", a / n, ea) + f * np.transpose(EPS, (2, 0, 1))


def conjugation_field(y, a) -> np.ndarray:
    """Tangent vector of ``a`` under the infinitesimal conjugation by ``y``."""
    return np.cross(np.asarray(y, dtype=float), np.asarray(a, dtype=float))


def adjoint_half_determinant(q: Rotor) -> float:
    """det((1 + Ad_H) / 2) computed on the 3x3 adjoint matrix."""
    return float(np.linalg.det(0.5 * (np.eye(3) + rotor_to_rotation(q))))


# --- states -----------------------------------------------------------------

@dataclass(frozen=True)
class ShapeState:
    """Four holonomies together with the curvature radius."""

    rotors: tuple[Rotor, Rotor, Rotor, Rotor]
    radius: float = 1.0

    def __post_init__(self):
        if len(self.rotors) != 4:
            raise InvalidInput("a shape state has four rotors")
        if not self.radius > 0:
            raise InvalidInput("radius must be positive")
        object.__setattr__(self, "rotors", tuple(self.rotors))

    @classmethod
    def from_coords(cls, coords, radius: float = 1.0) -> "ShapeState":
        coords = np.asarray(coords, dtype=float).reshape(4, 3)
        return cls(tuple(rotor_from_coords(c, radius) for c in coords), radius)

    @property
    def coords(self) -> np.ndarray:
        """(4, 3) array of logarithmic coordinates."""
        return np.array([coords_from_rotor(q, self.radius) for q in self.rotors])

    @property
    def areas(self) -> np.ndarray:
        return np.linalg.norm(self.coords, axis=1)

    @property
    def closure_defect(self) -> float:
        return rotation_angle(rotor_to_rotation(closure_product(self.rotors)))

    def conjugated(self, q: Rotor) -> "ShapeState":
        qi = q.inverse()
        return ShapeState(tuple(q * h * qi for h in self.rotors), self.radius)


def rotor_from_coords(a, r: float = 1.0) -> Rotor:
    a = np.asarray(a, dtype=float).reshape(3)
    x = _chart_angle(a, r)
    return exp_su2(AxisAngle(x, tuple(a / np.linalg.norm(a))))


def coords_from_rotor(q: Rotor, r: float = 1.0) -> np.ndarray:
    aa = log_su2(q)
    return r**2 * aa.angle * aa.vec


# --- fusion -----------------------------------------------------------------

def twist_block(a_m, a_l) -> np.ndarray:
    """Block ``{a_m^i, a_l^j}`` of the fusion twist for factors m > l."""
    a_m = np.asarray(a_m, dtype=float)
    a_l = np.asarray(a_l, dtype=float)
    return 0.5 * (np.outer(a_l, a_m) - (a_m @ a_l) * np.eye(3))


def fused_bracket_from_coords(coords, r: float = 1.0) -> np.ndarray:
    """3L x 3L bracket of the fusion product of L factors, in given order."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    L = len(coords)
    P = np.zeros((3 * L, 3 * L))
    for l in range(L):
        P[3 * l:3 * l + 3, 3 * l:3 * l + 3] = qp_bracket_matrix(coords[l], r)
        for m in range(l + 1, L):
            blk = twist_block(coords[m], coords[l]) / r**2
            P[3 * m:3 * m + 3, 3 * l:3 * l + 3] = blk
            P[3 * l:3 * l + 3, 3 * m:3 * m + 3] = -blk.T
    return P


def fused_bracket_matrix(state: ShapeState) -> np.ndarray:
    return fused_bracket_from_coords(state.coords, state.radius)


def _fused_bracket_gradient(coords: np.ndarray, r: float) -> np.ndarray:
    # d/dx^w of P_uv, indexed [w, u, v]
    L = len(coords)
    D = np.zeros((3 * L, 3 * L, 3 * L))
    eye = np.eye(3)
    for l in range(L):
        sl = slice(3 * l, 3 * l + 3)
        D[sl, sl, sl] = _qp_bracket_gradient(coords[l], r)
        for m in range(l + 1, L):
            sm = slice(3 * m, 3 * m + 3)
            a_m, a_l = coords[m], coords[l]
            # derivative of the (m, l) block w.r.t. a_m^p and a_l^p
            d_m = 0.5 * (np.einsum("i,jp->pij", a_l, eye) - np.einsum("p,ij->pij", a_l, eye))
            d_l = 0.5 * (np.einsum("ip,j->pij", eye, a_m) - np.einsum("p,ij->pij", a_m, eye))
            D[sm, sm, sl] = d_m / r**2
            D[sl, sm, sl] = d_l / r**2
            D[sm, sl, sm] = -np.transpose(d_m, (0, 2, 1)) / r**2
            D[sl, sl, sm] = -np.transpose(d_l, (0, 2, 1)) / r**2
    return D


def _fd_gradient(coords: np.ndarray, r: float, h: float) -> np.ndarray:
    flat = coords.reshape(-1)
    D = np.zeros((flat.size,) * 3)
    for w in range(flat.size):
        up, dn = flat.copy(), flat.copy()
        up[w] += h
        dn[w] -= h
        D[w] = (fused_bracket_from_coords(up, r) - fused_bracket_from_coords(dn, r)) / (2 * h)
    return D


def jacobiator_tensor(coords, r: float = 1.0, finite_difference: bool = False,
                      h: float = FD_STEP) -> np.ndarray:
    """``J[x, y, z] = {x, {y, z}} + cyclic`` for all coordinate functions."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    P = fused_bracket_from_coords(coords, r)
    D = _fd_gradient(coords, r, h) if finite_difference else _fused_bracket_gradient(coords, r)
    # {x, {y, z}} = sum_w P[x, w] dP[y, z]/dx^w
    T = np.einsum("xw,wyz->xyz", P, D)
    return T + np.transpose(T, (1, 2, 0)) + np.transpose(T, (2, 0, 1))


def jacobiator(state: ShapeState, f: int, g: int, h: int,
               finite_difference: bool = False) -> float:
    """Jacobiator of three coordinate functions, indexed 0..11."""
    J = jacobiator_tensor(state.coords, state.radius, finite_difference)
    return float(J[f, g, h])


def diagonal_fields(coords) -> np.ndarray:
    """Generators of the diagonal conjugation action, shape (3, 3L)."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    return np.array([np.concatenate([conjugation_field(e, a) for a in coords])
                     for e in np.eye(3)])


def trivector(coords, r: float = 1.0) -> np.ndarray:
    """(1/12) eps^{ijk} X_i ^ X_j ^ X_k on coordinate differentials.

    ``X_i`` are the diagonal conjugation fields and the wedge of three vectors
    evaluates to the 3x3 determinant.  The bracket at radius r is the unit
    bracket scaled by ``r^-2``, so the tri-vector carries ``r^-4``.  With
    ``{f, g} = df . P . dg`` the Jacobiator equals ``JACOBIATOR_RATIO`` times
    this tensor, for any radial coefficient functions.
    """
    X = diagonal_fields(coords).T  # rows: coordinates, cols: generators
    # det of rows x, y, z of X
    T = np.einsum("xi,yj,zk,ijk->xyz", X, X, X, EPS)
    return 0.5 * T / r**4


# --- reduced coordinates -----------------------------------------------------

@dataclass(frozen=True)
class DiagonalCoords:
    A21: float
    axis: tuple[float, float, float]
    phi21: float
    phi21_signed: float

    @property
    def delta21(self) -> float:
        return 2.0 * np.cos(0.5 * self.A21)


def _diagonal(state: ShapeState) -> tuple[float, np.ndarray]:
    h1, h2 = state.rotors[:2]
    prod = h2 * h1
    s = np.linalg.norm(prod.vec)
    if s <= CHART_TOL:
        raise DiagonalDegenerate("H2 H1 is central")
    return 2.0 * np.arctan2(s, prod.w), prod.vec / s


def diagonal_coords(state: ShapeState) -> DiagonalCoords:
    h1, _, _, h4 = state.rotors
    A, n21 = _diagonal(state)
    c1 = np.cross(log_su2(h1).vec, n21)
    c4 = np.cross(log_su2(h4).vec, n21)
    l1, l4 = np.linalg.norm(c1), np.linalg.norm(c4)
    if l1 <= CROSS_TOL or l4 <= CROSS_TOL:
        raise PhiUndefined("a face normal is parallel to the diagonal axis")
    c1, c4 = c1 / l1, c4 / l4
    cos_phi = float(np.clip(c1 @ c4, -1.0, 1.0))
    signed = float(np.arctan2(n21 @ np.cross(c4, c1), c1 @ c4))
    return DiagonalCoords(float(A), tuple(n21), float(np.arccos(cos_phi)), signed)


def _rotor_axis_angle(t: float, axis) -> Rotor:
    axis = np.asarray(axis, dtype=float)
    return Rotor.from_array([np.cos(0.5 * t), *(np.sin(0.5 * t) * axis)])


def bending_flow(state: ShapeState, t: float) -> ShapeState:
    """Conjugate H1 and H2 by ``exp(t n21 . tau)``."""
    g = _rotor_axis_angle(t, _diagonal(state)[1])
    gi = g.inverse()
    h1, h2, h3, h4 = state.rotors
    return ShapeState((g * h1 * gi, g * h2 * gi, h3, h4), state.radius)


FLOW_COLUMNS = ("t", "A21", "phi21", "a1", "a2", "a3", "a4", "closure_defect")


@dataclass
class FlowTrace:
    rows: list[tuple[float, ...]] = field(default_factory=list)
    final: ShapeState | None = None

    def max_drift(self) -> dict[str, float]:
        arr = np.array(self.rows)
        d = np.abs(arr - arr[0])
        return {"areas": float(d[:, 3:7].max()),
                "delta21": float(np.abs(2 * np.cos(0.5 * arr[:, 1])
                                        - 2 * np.cos(0.5 * arr[0, 1])).max()),
                "closure": float(arr[:, 7].max())}


def flow_trace(state: ShapeState, t_max: float = 2 * np.pi, steps: int = 10_000,
               record_every: int = 100) -> FlowTrace:
    """Integrate the bending flow by composing ``steps`` exact sub-steps."""
    dt = t_max / steps
    trace = FlowTrace()

    def record(t, st):
        dc = diagonal_coords(st)
        trace.rows.append((t, dc.A21, dc.phi21, *st.areas, st.closure_defect))

    cur = state
    record(0.0, cur)
    for k in range(1, steps + 1):
        cur = bending_flow(cur, dt)
        if k % record_every == 0 or k == steps:
            record(k * dt, cur)
    trace.final = cur
    return trace


def reduced_gradients(state: ShapeState, h: float = FD_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradients of A21 and phi21 in the 12 coordinates."""
    base = state.coords.reshape(-1)
    gA = np.zeros(12)
    gphi = np.zeros(12)
    for w in range(12):
        vals = []
        for step in (h, -h):
            c = base.copy()
            c[w] += step
            dc = diagonal_coords(ShapeState.from_coords(c, state.radius))
            vals.append((dc.A21, dc.phi21_signed))
        gA[w] = (vals[0][0] - vals[1][0]) / (2 * h)
        gphi[w] = np.angle(np.exp(1j * (vals[0][1] - vals[1][1]))) / (2 * h)
    return gA, gphi


def hamiltonian_field(state: ShapeState, grad: np.ndarray) -> np.ndarray:
    """P#(dF) = P . dF, the field whose flow F generates."""
    return fused_bracket_matrix(state) @ grad


def reduced_bracket(state: ShapeState) -> float:
    """{A21, phi21}: the rate of change of phi21 along the field of A21."""
    gA, gphi = reduced_gradients(state)
    return float(gphi @ hamiltonian_field(state, gA))


# --- leaf volumes -----------------------------------------------------------

def leaf_density(a: float, r: float, form: VolumeForm) -> float:
    """Density with respect to the unit-sphere measure."""
    x = a / r**2
    if x <= 0 or x >= 2 * np.pi:
        raise OutOfChart("leaf angle outside (0, 2pi)")
    if form is VolumeForm.SYMPLECTIC:
        return float(r**2 * np.sin(x))
    return float(2.0 * r**2 * np.sin(0.5 * x))


def leaf_volume_analytic(a: float, r: float, form: VolumeForm) -> float:
    return float(4.0 * np.pi * leaf_density(a, r, form))


def _sample_density(normals: np.ndarray, a: float, r: float, form: VolumeForm) -> np.ndarray:
    # quasi-symplectic pairing of the conjugation fields of two tangent
    # generators, divided by the unit-sphere area they span
    x = a / r**2
    helper = np.where(np.abs(normals[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
    y = np.cross(normals, helper)
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    z = np.cross(normals, y)
    pts = x * normals
    fy = np.cross(y, pts)
    fz = np.cross(z, pts)
    omega = (np.sin(x) / x) * np.einsum("ij,ij->i", np.cross(y, z), pts)
    area = np.einsum("ij,ij->i", np.cross(fy, fz), normals) / x**2
    density = r**2 * omega / area
    if form is VolumeForm.LIOUVILLE:
        # signed root of det((1 + Ad)/2) = cos^2(x/2)
        density = density / np.cos(0.5 * x)
    return density


@dataclass(frozen=True)
class VolumeEstimate:
    estimate: float
    stderr: float
    analytic: float
    samples: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr,
                "analytic": self.analytic, "samples": self.samples}


def _chunk_moments(seed_seq: np.random.SeedSequence, n: int, a: float, r: float,
                   form: VolumeForm) -> tuple[int, float, float]:
    rng = np.random.default_rng(seed_seq)
    g = rng.standard_normal((n, 3))
    normals = g / np.linalg.norm(g, axis=1, keepdims=True)
    d = 4.0 * np.pi * _sample_density(normals, a, r, form)
    mean = float(d.mean())
    return n, mean, float(((d - mean) ** 2).sum())


def _merge_moments(parts) -> tuple[int, float, float]:
    # pairwise update of count, mean and sum of squared deviations
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta**2 * n * nb / tot
        n = tot
    return n, mean, m2


def leaf_volume_mc(a: float, r: float, form: VolumeForm, n: int, seed: int,
                   workers: int = 1) -> VolumeEstimate:
    """Monte Carlo leaf volume with uniform sphere sampling.

    Samples are split into fixed chunks, each with its own spawned seed, and
    merged in chunk order, so the result does not depend on how chunks are
    distributed over workers.
    """
    if n < 2:
        raise InvalidInput("need at least two samples")
    analytic = leaf_volume_analytic(a, r, form)
    sizes = [MC_CHUNK] * (n // MC_CHUNK)
    if n % MC_CHUNK:
        sizes.append(n % MC_CHUNK)
    jobs = list(zip(np.random.SeedSequence(seed).spawn(len(sizes)), sizes))
    run = lambda job: _chunk_moments(job[0], job[1], a, r, form)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    count, mean, m2 = _merge_moments(parts)
    stderr = float(np.sqrt(m2 / (count - 1) / count))
    return VolumeEstimate(mean, stderr, analytic, count)


def within_stderr(est: VolumeEstimate, k: float = 3.0) -> bool:
    """|estimate - analytic| <= k * stderr, plus a floating-point floor.

    The leaf is a homogeneous space, so the sampled density is constant and
    the statistical error vanishes; the floor absorbs summation rounding.
    """
    floor = VOLUME_ROUNDING * max(1.0, abs(est.analytic))
    return abs(est.estimate - est.analytic) <= k * est.stderr + floor


def leaf_volume(a: float, r: float = 1.0, form: VolumeForm | str = VolumeForm.LIOUVILLE,
                method: str = "analytic", n: int = 10**6, seed: int = 0,
                workers: int = 1) -> VolumeEstimate:
    form = VolumeForm(form)
    if method == "analytic":
        v = leaf_volume_analytic(a, r, form)
        return VolumeEstimate(v, 0.0, v, 0)
    if method == "monte_carlo":
        return leaf_volume_mc(a, r, form, n, seed, workers)
    raise InvalidInput(f"unknown method {method!r}")


def flat_limit_errors(a, radii: Sequence[float]) -> np.ndarray:
    """Max deviation of the r-scaled bracket from eps_ijk a^k."""
    a = np.asarray(a, dtype=float)
    flat = np.einsum("ijk,k->ij", EPS, a)
    return np.array([np.max(np.abs(qp_bracket_matrix(a, r) - flat)) for r in radii])


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
