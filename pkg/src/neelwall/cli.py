"""Command line front end: study runs with manifests and flat-file configs.

Subcommands
    renorm    closed-form interaction energies for a wall configuration
    minimize  one constrained minimization (full or linear model)
    core      single-wall core ladder and the extrapolated constant
    sweep     absolute Q ladder for one configuration
    diff      difference experiment between two position sets
    validate  identity suite (closed forms, routes, Euler-Lagrange, rings)

Every command reads a flat dotted-key config file, writes its products into
--out, and finishes with a manifest.json recording hashes of everything; a
failed run leaves a FAILED marker and returns a nonzero exit code.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (DEFAULT_LADDER, difference_experiment, grid_for_epsilon,
                          sweep as run_sweep)
from .closedform import (cross_energy, cross_energy_quadrature, estar_quadrature,
                         h1_annulus_deviation, invert_F, limit_field_star,
                         renormalized_W, tail_star)
from .corelab import DEFAULT_CORE_LADDER, extract_core_energy
from .domain import Scales, WallConfig, lift_and_wind, mobius_metric, mobius_transform
from .minimizer import (MinimizeOptions, construction_energy_bound, construction_profile,
                        el_residual, exchange_energy, minimize as run_minimize,
                        pohozaev_check)
from .runio import RunManifest, parse_config_file, write_csv, write_json
from .strayfield import (ExtendedTrace, SpectralOperator, extension_energy,
                         gagliardo_energy)


def _as_tuple(v):
    if isinstance(v, (list, tuple)):
        return tuple(v)
    return (v,)


def _walls_from_config(cfg: dict) -> WallConfig:
    try:
        alpha = float(cfg["walls.alpha"])
        positions = tuple(float(p) for p in _as_tuple(cfg["walls.positions"]))
        signs = tuple(int(s) for s in _as_tuple(cfg["walls.signs"]))
    except KeyError as exc:
        raise KeyError(f"config key {exc} is required") from None
    branches = tuple(int(b) for b in _as_tuple(cfg.get("walls.branches", ()))) \
        if "walls.branches" in cfg else ()
    return WallConfig(alpha=alpha, positions=positions, signs=signs, branches=branches)


def _ladder_from_config(cfg: dict, default=DEFAULT_LADDER):
    eps = cfg.get("ladder.epsilons")
    if eps is None:
        return tuple(default)
    return tuple(float(e) for e in _as_tuple(eps))


def _options_from_config(cfg: dict) -> MinimizeOptions:
    opt = MinimizeOptions()
    if "solver.maxiter" in cfg:
        opt.maxiter = int(cfg["solver.maxiter"])
    if "solver.gtol" in cfg:
        opt.gtol = float(cfg["solver.gtol"])
    if "solver.end_sign" in cfg:
        opt.end_sign = int(cfg["solver.end_sign"])
    return opt


def cmd_renorm(cfg, out, manifest, args):
    walls = _walls_from_config(cfg)
    ren = renormalized_W(walls)
    payload = {
        "W1": ren.W1,
        "W2": ren.W2,
        "W": ren.W,
        "per_wall": [float(v) for v in ren.per_wall_boundary],
        "per_pair": [[float(v) for v in row] for row in ren.per_pair],
    }
    manifest.add_output(write_json(out / "renorm.json", payload))
    if cfg.get("renorm.trace", False):
        npts = int(cfg.get("renorm.trace_points", 512))
        field = limit_field_star(walls)
        tail = tail_star(walls)
        x = np.linspace(-1.0, 1.0, npts + 2)[1:-1]
        keep = np.ones(x.size, dtype=bool)
        for a in walls.positions:
            keep &= np.abs(x - a) > 1e-9
        x = x[keep]
        mu = np.asarray(tail.mu_star(x), dtype=float)
        us = np.array([float(field.u_star(complex(xi, 0.0))) for xi in x])
        rows = zip(x.tolist(), mu.tolist(), us.tolist())
        manifest.add_output(write_csv(out / "renorm_trace.csv",
                                      ["x1", "mu_star", "u_star_trace"], rows))
    return 0


def cmd_minimize(cfg, out, manifest, args):
    walls = _walls_from_config(cfg)
    scales = Scales(float(cfg.get("scales.epsilon", 1e-3)))
    model = str(cfg.get("model", "full"))
    M = int(cfg["grid.size"]) if "grid.size" in cfg else grid_for_epsilon(scales.epsilon)
    rep = run_minimize(walls, scales, model=model, options=_options_from_config(cfg),
                       grid_size=M)
    payload = {
        "model": rep.model,
        "epsilon": scales.epsilon,
        "delta": scales.delta,
        "grid_size": rep.grid_size,
        "E": rep.E,
        "exchange": rep.energy.exchange,
        "magnetostatic": rep.energy.magnetostatic,
        "lam": rep.lam,
        "Q": rep.Q,
        "converged": rep.converged,
        "iterations": rep.iterations,
        "grad_sup": rep.grad_sup,
        "constraint_violation": rep.constraint_violation,
        "solver": rep.solver,
        "narrow_regime": rep.narrow_regime,
    }
    manifest.add_output(write_json(out / "minimize.json", payload))
    if rep.phase is not None:
        ph = rep.phase
        rows = zip(ph.x.tolist(), ph.phi.tolist(), ph.m1.tolist(), ph.m2.tolist(),
                   rep.trace.g.tolist())
        manifest.add_output(write_csv(out / "profile.csv",
                                      ["x1", "phi", "m1", "m2", "g"], rows))
    manifest.add_output(write_csv(out / "trace.csv", ["x", "g"],
                                  zip(rep.trace.x.tolist(), rep.trace.g.tolist())))
    if not rep.converged:
        raise RuntimeError(f"minimization did not converge: grad_sup={rep.grad_sup:.3e}")
    return 0


def cmd_core(cfg, out, manifest, args):
    gamma = float(cfg.get("core.gamma", 1.0))
    ladder = tuple(float(e) for e in _as_tuple(cfg.get("core.epsilons",
                                                       list(DEFAULT_CORE_LADDER))))
    res = extract_core_energy(
        gamma, ladder,
        ds=float(cfg.get("core.ds", 0.125)),
        n_t=int(cfg.get("core.n_t", 64)),
        rmin_factor=float(cfg.get("core.rmin_factor", 20.0)))
    payload = {
        "gamma": gamma,
        "e_gamma": res.e_gamma,
        "uncertainty": res.uncertainty,
        "e_drop_largest": res.e_drop_largest,
        "e_two_term": res.e_two_term,
    }
    manifest.add_output(write_json(out / "core.json", payload))
    rows = [(float(e), float(e) * math.log(1.0 / e), float(E), float(f))
            for e, E, f in zip(res.epsilons, res.inf_energies, res.f_values)]
    manifest.add_output(write_csv(out / "core.csv",
                                  ["epsilon", "delta", "infE", "f"], rows))
    return 0


def _ladder_rows(points):
    return [(p.epsilon, p.delta, p.E, p.Q) for p in points]


def cmd_sweep(cfg, out, manifest, args):
    walls = _walls_from_config(cfg)
    ladder = _ladder_from_config(cfg)
    model = str(cfg.get("model", "full"))
    target = cfg.get("sweep.target")
    target = float(target) if target is not None else None
    res = run_sweep(walls, ladder, model=model, target=target,
                    options=_options_from_config(cfg))
    payload = {
        "extrapolated": res.extrapolated,
        "uncertainty": res.uncertainty,
        "target_closed_form": res.target_closed_form,
        "pass": res.passed,
    }
    manifest.add_output(write_json(out / "sweep.json", payload))
    manifest.add_output(write_csv(out / "sweep.csv",
                                  ["epsilon", "delta", "E", "Q"],
                                  _ladder_rows(res.points)))
    if any(not p.converged for p in res.points):
        raise RuntimeError("one or more ladder rungs did not converge")
    return 0


def cmd_diff(cfg, out, manifest, args):
    walls_a = _walls_from_config(cfg)
    if "diff.positions_b" not in cfg:
        raise KeyError("config key 'diff.positions_b' is required")
    pos_b = tuple(float(p) for p in _as_tuple(cfg["diff.positions_b"]))
    walls_b = WallConfig(alpha=walls_a.alpha, positions=pos_b, signs=walls_a.signs)
    ladder = _ladder_from_config(cfg)
    model = str(cfg.get("model", "full"))
    res = difference_experiment(walls_a, walls_b, ladder, model=model,
                                options=_options_from_config(cfg),
                                threads=args.threads)
    payload = {
        "extrapolated": res.extrapolated,
        "uncertainty": res.uncertainty,
        "target_closed_form": res.target_closed_form,
        "pass": res.passed,
    }
    manifest.add_output(write_json(out / "diff.json", payload))
    manifest.add_output(write_csv(out / "diff_a.csv", ["epsilon", "delta", "E", "Q"],
                                  _ladder_rows(res.points_a)))
    manifest.add_output(write_csv(out / "diff_b.csv", ["epsilon", "delta", "E", "Q"],
                                  _ladder_rows(res.points_b)))
    return 0


def _validate_checks(seed: int):
    rng = np.random.default_rng(seed)
    checks = []

    def record(name, value, threshold, passed=None):
        if passed is None:
            passed = bool(value <= threshold)
        checks.append({"name": name, "value": float(value),
                       "threshold": float(threshold), "pass": bool(passed)})

    # hyperbolic distance is invariant under disk automorphisms
    worst = 0.0
    for _ in range(200):
        b, c, m = rng.uniform(-0.95, 0.95, size=3)
        if abs(b - c) < 1e-6:
            continue
        worst = max(worst, abs(mobius_metric(mobius_transform(m, b).real,
                                             mobius_transform(m, c).real)
                               - mobius_metric(b, c)))
    record("mobius_invariance", worst, 1e-12)

    # conformal map inversion residual on a ring of field points
    theta = np.linspace(0.1, np.pi - 0.1, 40)
    z = 0.6 * np.exp(1j * theta) + 0.1
    w = invert_F(z)
    record("invert_F_residual",
           float(np.max(np.abs(-1.0 / np.cosh(w) - z) / (1.0 + np.abs(z)))), 1e-12)

    # plateau identity for the limit field at the walls
    walls = WallConfig(alpha=2.0, positions=(-0.52, 0.11, 0.64), signs=(1, -1, 1))
    field = limit_field_star(walls)
    om = np.array([0.5 * (field.sigma[n] + field.sigma[n + 1])
                   for n in range(walls.N)])
    record("omega_plateau_identity", float(np.max(np.abs(om - field.omega))), 1e-12)

    # Gaussian trace energy is exactly 1/2 (dilation invariance)
    op = SpectralOperator(4096)
    record("gaussian_energy", abs(op.energy(np.exp(-36.0 * op.x ** 2)) - 0.5), 1e-4)

    # three independent routes to the trace energy
    coef = rng.normal(size=3) * 0.3
    gfun = lambda x: np.where(np.abs(x) < 1, (1.0 - np.minimum(x * x, 1.0)) ** 3 *
                              (coef[0] + coef[1] * x + coef[2] * x * x), 0.0)
    e1 = op.energy(gfun(op.x))
    e2 = gagliardo_energy(gfun)
    e3 = extension_energy(gfun)
    record("three_route_spread", (max(e1, e2, e3) - min(e1, e2, e3)) / abs(e1), 5e-3)

    # closed-form pair energy vs 2D gradient-product quadrature
    worst = 0.0
    for b, c in ((0.0, 0.8), (0.2, 0.55), (-0.6, 0.3)):
        exact = cross_energy(b, c)
        worst = max(worst, abs(cross_energy_quadrature(b, c) - exact) / abs(exact))
    record("cross_energy_quadrature_rel", worst, 1e-2)

    # renormalized self-energy quadrature vs closed-form W1
    cfg2 = WallConfig(alpha=math.pi / 2, positions=(-0.5, 0.5), signs=(1, -1))
    res = estar_quadrature(cfg2)
    W1 = renormalized_W(cfg2).W1
    record("estar_quadrature_rel", abs(res.extrapolated - W1) / abs(W1), 1e-2)

    # excised-ball energy of a single tail field: log law plus O(r) deviation
    ratios = []
    for b in (0.0, 0.5):
        devs = [h1_annulus_deviation(b, r) for r in (0.2, 0.1, 0.05, 0.025)]
        ratios += [devs[i + 1] / devs[i] for i in range(len(devs) - 1)]
    record("h1_decay_halving_ratio", max(ratios), 0.5)

    # one coarse minimization: bracket, first-order residual, ring identity
    cfg1 = WallConfig(alpha=math.pi / 2, positions=(0.0,), signs=(1,))
    sc = Scales(1e-2)
    rep = run_minimize(cfg1, sc, grid_size=2048)
    prof = construction_profile(cfg1, sc, 2048)
    e_prof = exchange_energy(prof, sc) + SpectralOperator(2048).energy(
        ExtendedTrace.from_phase(prof).g)
    bound = construction_energy_bound(cfg1, sc)
    record("construction_bracket",
           0.0 if rep.E <= e_prof <= bound else 1.0, 0.5,
           passed=rep.E <= e_prof <= bound)
    record("el_residual_rel", el_residual(rep)[1], 1e-6)
    # end_sign=+1 closes m up for this config (winding 0); the default -1 does not
    closed = construction_profile(cfg1, sc, 2048, end_sign=+1)
    wind_ok = lift_and_wind(closed) == 0 and lift_and_wind(prof) is None
    record("winding_integer", 0.0 if wind_ok else 1.0, 0.5, passed=wind_ok)

    defects = []
    for M in (1024, 2048, 4096):
        r = run_minimize(cfg1, sc, grid_size=M)
        defects.append(float(np.max(pohozaev_check(r).rel_defects)))
    ratios = [defects[i + 1] / defects[i] for i in range(len(defects) - 1)]
    record("pohozaev_refinement_ratio", max(ratios), 0.75)
    return checks, {"pohozaev_defects": defects}


def cmd_validate(cfg, out, manifest, args):
    checks, extras = _validate_checks(args.seed)
    all_ok = all(c["pass"] for c in checks)
    payload = {"checks": checks, "all_passed": all_ok}
    payload.update(extras)
    manifest.add_output(write_json(out / "validate.json", payload))
    width = max(len(c["name"]) for c in checks)
    for c in checks:
        print(f"{c['name']:<{width}}  {c['value']:12.4e}  <= {c['threshold']:8.1e}  "
              f"{'pass' if c['pass'] else 'FAIL'}")
    if not all_ok:
        raise RuntimeError("validation suite failed")
    return 0


COMMANDS = {
    "renorm": cmd_renorm,
    "minimize": cmd_minimize,
    "core": cmd_core,
    "sweep": cmd_sweep,
    "diff": cmd_diff,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="neelwall",
                                 description="numerical laboratory for 1D wall energies")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, default=None,
                    help="flat dotted-key config file")
    ap.add_argument("--out", type=Path, required=True, help="output directory")
    ap.add_argument("--threads", type=int, default=1,
                    help="parallel ladder chains where applicable")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized validation checks")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    command_line = sys.argv if argv is None else ["neelwall"] + list(argv)
    try:
        cfg = parse_config_file(args.config) if args.config is not None else {}
    except Exception as exc:
        RunManifest(out, command_line, {}, __version__).fail(
            f"{type(exc).__name__}: {exc}")
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(out, command_line, cfg, __version__)
    if args.config is not None:
        manifest.add_input(args.config)
    try:
        rc = COMMANDS[args.command](cfg, out, manifest, args)
    except Exception as exc:
        manifest.fail(f"{type(exc).__name__}: {exc}")
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    manifest.finalize()
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
