"""Command-line interface.

Exit codes: 0 success, 1 tolerance failure (verify), 2 invalid input or a
library error.  On failure the machine-readable reason is the first line
written to standard error.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import io
from .closure import SpecialEdge, classify, fix_signs, gram, gram_to_json
from .errors import HolotetError, InvalidInput
from .flat_limit import DEFAULT_RADII, flat_limit_study
from .forward import closure_from_vertices, roundtrip_check
from .phase_space import FLOW_COLUMNS, ShapeState, VolumeForm, flow_trace, leaf_volume
from .reconstruction import reconstruct, same_sheet_from_gram
from .sampling import (VertexKind, check_seed, forward_sample, random_closure,
                       regular_flat_tetrahedron)

MODES = ("random_closure", "from_vertices", "two_sheeted")


def _fail(reason: str, message: str, code: int = 2):
    click.echo(reason, err=True)
    if message:
        click.echo(message, err=True)
    sys.exit(code)


def _run(fn):
    try:
        return fn()
    except HolotetError as exc:
        _fail(exc.reason, str(exc))


def _single(items):
    return items[0] if len(items) == 1 else items


input_opt = click.option("--input", "input_path", default=None,
                         help="Input file ('-' or omitted for stdin).")
output_opt = click.option("--output", "output_path", default=None,
                          help="Output file (default stdout).")


@click.group()
def main():
    """Curved tetrahedra from four closed holonomies."""


@main.command()
@click.option("--mode", type=click.Choice(MODES), default="random_closure")
@click.option("--seed", default=0, type=int)
@click.option("--count", default=1, type=int)
@click.option("--radius", default=1.0, type=float)
@click.option("--special-edge", type=click.Choice(["24", "13"]), default="24")
@click.option("--curvature", type=click.Choice(["spherical", "hyperbolic"]),
              default="spherical", help="Model space for random from_vertices samples.")
@click.option("--input", "input_path", default=None,
              help="Vertex JSON for from_vertices/two_sheeted ('-' for stdin).")
@output_opt
def generate(mode, seed, count, radius, special_edge, curvature, input_path, output_path):
    """Generate closure configurations."""

    def work():
        if count < 1:
            raise InvalidInput("count must be positive")
        rng = np.random.default_rng(check_seed(seed))
        edge = SpecialEdge(special_edge)
        out = []
        if mode == "random_closure":
            out = [random_closure(rng, radius, edge).to_json() for _ in range(count)]
        elif input_path is not None:
            data = io.read_json(input_path)
            try:
                V = np.asarray(data["vertices"], dtype=float).T
                s = -1 if mode == "two_sheeted" else int(data.get("s", 1))
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise InvalidInput(f"malformed vertex input: {exc}") from exc
            cfg = closure_from_vertices(V, s, radius)
            out = [_with_vertices(cfg, V, s)]
        else:
            kind = VertexKind.TWO_SHEETED if mode == "two_sheeted" else VertexKind(curvature)
            for _ in range(count):
                smp = forward_sample(rng, kind, radius)
                out.append(_with_vertices(smp.config, smp.vertices, smp.s))
        io.write_json(_single(out), output_path)

    _run(work)


def _with_vertices(cfg, V, s) -> dict:
    d = cfg.to_json()
    d["vertices"] = V.T.tolist()
    d["s"] = int(s)
    d["two_sheeted"] = bool(s < 0 and len(set(np.sign(V[0]))) > 1)
    return d


def _classify_one(cfg) -> dict:
    canon = cfg.canonical()
    sn = fix_signs(canon)
    g = gram(sn)
    c = classify(g, sn)
    out = {
        "class": c.curvature.value,
        "det_gram": c.det,
        "n4_criterion": c.n4_criterion,
        "gram": gram_to_json(g),
        "signs": list(sn.signs),
    }
    if c.curvature.sign < 0:
        out["same_sheet"] = same_sheet_from_gram(g)
    return out


@main.command("classify")
@input_opt
@output_opt
def classify_cmd(input_path, output_path):
    """Classify configurations as spherical, hyperbolic or degenerate."""
    _run(lambda: io.write_json(
        _single([_classify_one(c) for c in io.configs_from_json(io.read_json(input_path))]),
        output_path))


@main.command("reconstruct")
@input_opt
@output_opt
def reconstruct_cmd(input_path, output_path):
    """Reconstruct the curved tetrahedron of each configuration."""
    _run(lambda: io.write_json(
        _single([reconstruct(c).to_json()
                 for c in io.configs_from_json(io.read_json(input_path))]),
        output_path))


@main.command()
@click.option("--tol", default=1e-8, type=float)
@input_opt
@output_opt
def verify(tol, input_path, output_path):
    """Round-trip check; exit 1 when an error exceeds the tolerance."""

    def work():
        reps = [roundtrip_check(c) for c in io.configs_from_json(io.read_json(input_path))]
        io.write_json(_single([r.to_json() for r in reps]), output_path)
        return all(max(r.max_angle_error, r.max_area_error) <= tol for r in reps)

    if not _run(work):
        _fail("ToleranceExceeded", f"round-trip error above {tol:g}", 1)


@main.command()
@click.option("--seed", default=0, type=int)
@click.option("--t-max", default=2 * np.pi, type=float)
@click.option("--steps", default=10_000, type=int)
@click.option("--record-every", default=100, type=int)
@click.option("--radius", default=1.0, type=float)
@click.option("--input", "input_path", default=None,
              help="Closure config to flow (default: random closure from --seed).")
@output_opt
def flow(seed, t_max, steps, record_every, radius, input_path, output_path):
    """Bending flow of the (2,1) diagonal as a CSV trace."""

    def work():
        if steps < 1 or record_every < 1:
            raise InvalidInput("steps and record-every must be positive")
        if input_path is None:
            cfg = random_closure(np.random.default_rng(check_seed(seed)), radius)
        else:
            cfg = io.configs_from_json(io.read_json(input_path))[0]
        state = ShapeState(cfg.holonomies, cfg.radius)
        tr = flow_trace(state, t_max, steps, record_every)
        io.write_text(io.csv_text(FLOW_COLUMNS, tr.rows), output_path)

    _run(work)


@main.command()
@click.option("--area", "a", required=True, type=float)
@click.option("--radius", default=1.0, type=float)
@click.option("--form", type=click.Choice([f.value for f in VolumeForm]), default="liouville")
@click.option("--method", type=click.Choice(["analytic", "monte_carlo"]), default="monte_carlo")
@click.option("--count", default=10**6, type=int, help="Monte Carlo samples.")
@click.option("--seed", default=0, type=int)
@click.option("--workers", default=1, type=int)
@output_opt
def volume(a, radius, form, method, count, seed, workers, output_path):
    """Volume of a conjugacy-class leaf."""
    _run(lambda: io.write_json(
        leaf_volume(a, radius, form, method, count, check_seed(seed), workers).to_json(),
        output_path))


@main.command()
@click.option("--radii", default=",".join(f"{r:g}" for r in DEFAULT_RADII),
              help="Comma-separated radii.")
@click.option("--edge", default=1.0, type=float, help="Edge of the regular flat tetrahedron.")
@click.option("--input", "input_path", default=None,
              help='JSON {"points": [[x, y, z] x4]} for a custom flat tetrahedron.')
@output_opt
def flatlimit(radii, edge, input_path, output_path):
    """Edge-length error against the flat tetrahedron as the radius grows."""

    def work():
        try:
            rs = [float(x) for x in radii.split(",") if x.strip()]
        except ValueError as exc:
            raise InvalidInput("radii must be comma-separated numbers") from exc
        if input_path is None:
            P = regular_flat_tetrahedron(edge)
        else:
            try:
                P = np.asarray(io.read_json(input_path)["points"], dtype=float)
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidInput(f"malformed flat tetrahedron: {exc}") from exc
        study = flat_limit_study(P, rs)
        rows = [(p.radius, p.error, p.curvature_class) for p in study.points]
        io.write_text(io.csv_text(("radius", "error", "class"), rows), output_path)

    _run(work)


if __name__ == "__main__":
    main()
