"""
Command Handlers
One handler per subcommand: validated RunConfig in, ResultRecord plus the
primary table out
"""
import time
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List

import numpy as np
from loguru import logger

from glstep.config import Discretization, settings
from glstep.functionals.strip import StripDisc
from glstep.schemas.run import (
    BarrierConfig,
    DegennesConfig,
    FiberConfig,
    Gl1dConfig,
    PhaseConfig,
    ResultRecord,
    RunConfig,
    StripConfig,
    SurfaceConfig,
)
from glstep.services import barrier, fiber, gl1d, halfline, phase, strip2d
from glstep.utils.output import dump_strip_state
from glstep.utils.sweep import run_grid

# Fields that only route output and stay out of the echoed inputs
ROUTING_FIELDS = {"out", "stdout", "format", "timing"}


@dataclass
class CommandResult:
    record: ResultRecord
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)


def _discretization(config: RunConfig, tol_field: str) -> Discretization:
    overrides = {}
    if config.spacing is not None:
        overrides["spacing"] = config.spacing
    if config.tol is not None:
        overrides[tol_field] = config.tol
    return Discretization.from_settings(**overrides)


def _record(command: str, config: RunConfig, outputs: Dict[str, Any], provenance: Dict[str, Any]) -> ResultRecord:
    return ResultRecord(
        command=command,
        inputs=config.model_dump(mode="json", exclude=ROUTING_FIELDS),
        outputs=outputs,
        provenance=provenance,
    )


def cmd_degennes(config: DegennesConfig) -> CommandResult:
    """Theta(gamma), its minimizer and phi_gamma(0) across a gamma grid."""
    disc = _discretization(config, "scalar_tol")
    points = run_grid(partial(halfline.theta, disc=disc), config.grid, config.threads)
    rows = [{"gamma": p.gamma, "theta": p.theta, "xi_star": p.xi_star, "phi0": p.phi0} for p in points]

    outputs: Dict[str, Any] = {
        "max_identity_residual": max(abs(p.identity_residual) for p in points),
    }
    zero = [p for p in points if p.gamma == 0.0]
    if zero:
        outputs["theta0"] = zero[0].theta
        outputs["xi0_squared"] = zero[0].xi_star ** 2
    provenance = {"spacing": disc.spacing, "evaluations": [p.evaluations for p in points]}
    return CommandResult(_record("degennes", config, outputs, provenance), ["gamma", "theta", "xi_star", "phi0"], rows)


def cmd_fiber(config: FiberConfig) -> CommandResult:
    """Dispersion samples of mu_a plus beta_a and the data at its minimizer."""
    disc = _discretization(config, "scalar_tol")
    curve = fiber.beta(config.a, disc)
    mus = run_grid(partial(fiber.mu_fiber, config.a, disc=disc), config.grid, config.threads)
    rows = [{"xi": xi, "mu": mu} for xi, mu in zip(config.grid, mus)]

    outputs: Dict[str, Any] = {
        "beta": curve.beta,
        "zeta": curve.zeta,
        "f0": curve.f0,
        "nu": curve.nu,
        "near_ties": curve.near_ties,
    }
    if -1.0 < config.a < 0.0:
        outputs["trial_upper_bound"] = fiber.trial_upper_bound(config.a, disc).value
    provenance = {"spacing": disc.spacing, "scan": [settings.xi_scan_lo, settings.xi_scan_hi, settings.xi_scan_step]}
    return CommandResult(_record("fiber", config, outputs, provenance), ["xi", "mu"], rows)


def cmd_gl1d(config: Gl1dConfig) -> CommandResult:
    """E1D_{a,b} at its optimal momentum and the minimizing profile."""
    disc = _discretization(config, "descent_tol")
    curve = fiber.beta(config.a, disc.for_profiles())
    provenance: Dict[str, Any] = {"profile_spacing": disc.profile_spacing, "beta": curve.beta}
    if config.b * curve.beta >= 1.0:
        logger.info(f"b = {config.b:g} >= 1/beta = {1.0 / curve.beta:g}: zero profile")
        outputs = {"energy": 0.0, "xi0": None, "mass": 0.0, "trivial": True}
        return CommandResult(_record("gl1d", config, outputs, provenance), ["t", "f"])

    xi0, energy, profile = gl1d.optimal_xi(config.a, config.b, disc)
    outputs = {
        "energy": energy,
        "xi0": xi0,
        "mass": gl1d.profile_mass(profile),
        "moment_residual": gl1d.moment_identity_residual(config.a, config.b, xi0, profile),
        "trivial": False,
    }
    provenance["nodes"] = profile.grid.n
    provenance["iterations"] = profile.report.iterations if profile.report else 0
    rows = [{"t": t, "f": f} for t, f in zip(profile.grid.nodes, profile.values)]
    return CommandResult(_record("gl1d", config, outputs, provenance), ["t", "f"], rows)


def cmd_surface(config: SurfaceConfig) -> CommandResult:
    disc = _discretization(config, "descent_tol")
    samples = run_grid(partial(gl1d.surface_energy, disc=disc), config.grid, config.threads)
    rows = [{"b": s.b, "value": s.value, "xi0": s.xi0} for s in samples]
    theta0 = halfline.theta0(disc.for_profiles())
    outputs = {"theta0": theta0, "inv_theta0": 1.0 / theta0}
    provenance = {"profile_spacing": disc.profile_spacing}
    return CommandResult(_record("surface", config, outputs, provenance), ["b", "value", "xi0"], rows)


def cmd_strip(config: StripConfig) -> CommandResult:
    """
    One strip minimization at fixed (R, m). The table holds the modulus
    along the middle column and the x1-averaged density, row by row in x2.
    """
    disc = StripDisc.build(
        config.a,
        config.b,
        config.R,
        config.m,
        config.hx or settings.strip_spacing,
        config.hy or settings.strip_spacing,
    )
    state = strip2d.minimize_strip(disc, tol=config.tol)
    decay = strip2d.decay_diagnostics(state)
    if config.dump:
        dump_strip_state(state, config.dump)

    modulus = np.abs(state.psi)
    middle = modulus[disc.nx // 2]
    density = np.mean(modulus**2, axis=0)
    rows = [{"x2": x, "modulus": m, "density": d} for x, m, d in zip(disc.x2, middle, density)]
    outputs = {
        "g": state.energy,
        "g_over_R": state.energy / disc.R,
        "sup_norm": state.sup_norm,
        "virial_residual": strip2d.virial_residual(state),
        "euler_lagrange_residual": strip2d.euler_lagrange_residual(state),
        "mass_constant": decay.mass_constant,
        "l2_constant": decay.l2_constant,
        "l4_constant": decay.l4_constant,
    }
    provenance = {
        "R": disc.R,
        "m": disc.m,
        "hx": disc.hx,
        "hy": disc.hy,
        "nx": disc.nx,
        "ny": disc.ny,
        "iterations": state.report.iterations if state.report else 0,
    }
    return CommandResult(_record("strip", config, outputs, provenance), ["x2", "modulus", "density"], rows)


def cmd_barrier(config: BarrierConfig) -> CommandResult:
    """Schedule of g_a(b, R)/R, the bracket on e_a(b) and its comparison with E1D_{a,b}."""
    disc = _discretization(config, "descent_tol")
    estimate = barrier.barrier_energy(
        config.a, config.b, config.schedule, config.hx, config.hy, threads=config.threads, tol=config.tol
    )
    rows = [{"R": p.R, "g": p.g, "g_over_R": p.g_over_R} for p in estimate.schedule]
    outputs: Dict[str, Any] = {
        "e_lower": estimate.e_lower,
        "e_best": estimate.e_best,
        "e_upper": estimate.e_upper,
        "tail_constant": estimate.tail_constant,
        "tail_constant_scaled": estimate.tail_constant_scaled,
        "inverse_fit": estimate.inverse_fit,
        "analytic_bounds": estimate.analytic,
        "trivial": estimate.trivial,
        "e1d": 0.0,
        "gap": 0.0,
    }
    if config.a < 0 and not estimate.trivial:
        gap = barrier.conjecture_gap(config.a, config.b, disc, estimate=estimate)
        outputs.update({"e1d": gap.e1d, "gap": gap.gap, "half_line": gap.half_line, "notes": gap.notes})
    provenance = {
        "hx": config.hx or settings.strip_spacing,
        "hy": config.hy or settings.strip_spacing,
        "m_schedule": [p.m for p in estimate.schedule],
        "iterations": [p.iterations for p in estimate.schedule],
    }
    return CommandResult(_record("barrier", config, outputs, provenance), ["R", "g", "g_over_R"], rows)


def cmd_phase(config: PhaseConfig) -> CommandResult:
    """Phase map over the (a, b) grid, sign-only unless energies are requested."""
    disc = _discretization(config, "descent_tol")
    geom = phase.DomainGeometry(*config.geometry)
    verdicts = phase.phase_map(config.a, config.grid, config.energies, config.source.value, geom, disc)
    theta0 = halfline.theta0(disc)
    limits = [phase.thresholds(a, theta0=theta0, disc=disc) for a in config.a]
    outputs = {
        "theta0": theta0,
        "thresholds": [
            {
                "a": t.a,
                "family": t.family(),
                "order": [name for name, _ in t.ordered()],
                **{name: value for name, value in t.ordered()},
            }
            for t in limits
        ],
        "cells": len(verdicts),
    }
    provenance = {
        "mode": "energy" if config.energies else "sign",
        "source": config.source.value if config.energies else None,
        "leading_order_only": True,
        "spacing": disc.spacing,
    }
    columns = ["a", "b", "barrier", "bnd1", "bnd2", "regime", "EL"]
    return CommandResult(_record("phase", config, outputs, provenance), columns, phase.verdict_rows(verdicts))


COMMANDS: Dict[str, Callable[[Any], CommandResult]] = {
    "degennes": cmd_degennes,
    "fiber": cmd_fiber,
    "gl1d": cmd_gl1d,
    "surface": cmd_surface,
    "strip": cmd_strip,
    "barrier": cmd_barrier,
    "phase": cmd_phase,
}


def run_command(name: str, config: RunConfig) -> CommandResult:
    """Dispatch to the handler; wall time goes into provenance only when timing is on."""
    started = time.perf_counter()
    result = COMMANDS[name](config)
    if config.timing:
        result.record.provenance["wall_time"] = time.perf_counter() - started
    return result
