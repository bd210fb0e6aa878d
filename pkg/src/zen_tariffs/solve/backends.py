"""Solver backends.

``highs`` (reference) runs the HiGHS command-line solver on an LP file in a
private temporary directory and parses its raw solution file.  The
executable is taken from ``BackendConfig.executable``, then the
``ZEN_TARIFFS_HIGHS`` environment variable, then ``highs`` on ``PATH``, then
the binary shipped by the ``highsbox`` wheel.

``scipy`` solves in-process through :func:`scipy.optimize.linprog` (or
:func:`scipy.optimize.milp` when the model has binaries).
"""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BackendUnavailable, ParseError
from ..model import ModelInstance
from .lpfile import export_lp
from .solution import SolveResult, parse_solution_file

log = logging.getLogger(__name__)

ENV_HIGHS = "ZEN_TARIFFS_HIGHS"
ENV_BACKEND = "ZEN_TARIFFS_BACKEND"


@dataclass(frozen=True)
class BackendConfig:
    name: str = "highs"
    executable: str | None = None
    time_limit: float | None = None
    mip_rel_gap: float = 1e-6
    options: dict = field(default_factory=dict)
    keep_dir: str | None = None  # copy LP/solution files here for inspection

    @classmethod
    def from_env(cls, name: str | None = None, **kw) -> "BackendConfig":
        return cls(name=name or os.environ.get(ENV_BACKEND, "highs"), **kw)


def find_highs(executable: str | None = None) -> tuple[str, dict]:
    """Locate a HiGHS executable; returns ``(path, extra_env)``."""
    for candidate in (executable, os.environ.get(ENV_HIGHS)):
        if candidate:
            if not Path(candidate).is_file():
                raise BackendUnavailable(f"HiGHS executable {candidate!r} not found")
            return candidate, {}
    on_path = shutil.which("highs")
    if on_path:
        return on_path, {}
    try:
        import highsbox
    except ImportError:
        raise BackendUnavailable("no HiGHS executable: set ZEN_TARIFFS_HIGHS or install highsbox") from None
    exe = highsbox.highs_bin_path()
    if not Path(exe).is_file():
        raise BackendUnavailable(f"highsbox binary missing at {exe}")
    libdir = highsbox.highs_lib_dir()
    ld = os.pathsep.join(p for p in (libdir, os.environ.get("LD_LIBRARY_PATH", "")) if p)
    return exe, {"LD_LIBRARY_PATH": ld, "DYLD_LIBRARY_PATH": ld}


def _highs_options(cfg: BackendConfig, extra: dict) -> str:
    opts = {"write_solution_style": 0, "mip_rel_gap": cfg.mip_rel_gap, "random_seed": 0}
    if cfg.time_limit is not None:
        opts["time_limit"] = cfg.time_limit
    opts.update(cfg.options)
    opts.update(extra)
    return "".join(f"{k} = {v}\n" for k, v in opts.items())


def _run_highs(model: ModelInstance, cfg: BackendConfig, extra: dict | None = None) -> SolveResult:
    exe, env_extra = find_highs(cfg.executable)
    env = dict(os.environ, **env_extra)
    with tempfile.TemporaryDirectory(prefix="zen_highs_") as tmp:
        tmp = Path(tmp)
        lp, sol, opt = tmp / "model.lp", tmp / "model.sol", tmp / "highs.opt"
        export_lp(model, lp)
        opt.write_text(_highs_options(cfg, extra or {}))
        cmd = [exe, "--model_file", str(lp), "--options_file", str(opt), "--solution_file", str(sol)]
        start = time.perf_counter()
        try:
            proc = subprocess.run(cmd, cwd=tmp, env=env, capture_output=True, text=True)
        except OSError as exc:
            raise BackendUnavailable(f"cannot run {exe}: {exc}") from exc
        elapsed = time.perf_counter() - start
        log.debug("highs output:\n%s", proc.stdout)
        if cfg.keep_dir:
            keep = Path(cfg.keep_dir)
            keep.mkdir(parents=True, exist_ok=True)
            for f in (lp, sol, opt):
                if f.exists():
                    shutil.copy(f, keep / f.name)
        if not sol.exists():
            raise BackendUnavailable(f"HiGHS produced no solution file (exit {proc.returncode}):\n"
                                     f"{proc.stdout[-2000:]}{proc.stderr[-2000:]}")
        result = parse_solution_file(sol, "highs", model)
    result.solve_time = elapsed
    return result


def solve_highs(model: ModelInstance, cfg: BackendConfig) -> SolveResult:
    result = _run_highs(model, cfg)
    if result.status == "infeasible_or_unbounded":
        # presolve could not tell; the plain simplex can
        result = _run_highs(model, cfg, {"presolve": "off"})
        if result.status == "infeasible_or_unbounded":
            result.status = "infeasible"
    return result


def solve_scipy(model: ModelInstance, cfg: BackendConfig) -> SolveResult:
    from scipy.optimize import Bounds, LinearConstraint, linprog, milp

    c = model.objective_vector()
    if model.sense == "max":
        c = -c
    lb, ub = model.bounds()
    A = model.matrix()
    rlo, rhi = model.row_bounds()
    opts = {"time_limit": cfg.time_limit} if cfg.time_limit else {}
    start = time.perf_counter()
    duals = None
    if model.has_binaries:
        integrality = np.array([1 if v.kind == "binary" else 0 for v in model.variables])
        cons = [LinearConstraint(A, rlo, rhi)] if model.n_rows else []
        res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(lb, ub),
                   options=dict(opts, mip_rel_gap=cfg.mip_rel_gap))
        code = res.status
        status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(code, "error")
    else:
        eq = rlo == rhi
        le = ~eq & np.isfinite(rhi)
        ge = ~eq & np.isfinite(rlo)
        A_ub = sp_vstack([A[le], -A[ge]])
        b_ub = np.concatenate([rhi[le], -rlo[ge]])
        res = linprog(c, A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if A_ub.shape[0] else None,
                      A_eq=A[eq] if eq.any() else None, b_eq=rhi[eq] if eq.any() else None,
                      bounds=np.column_stack([lb, ub]), method="highs", options=opts)
        status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
        if status == "optimal":
            duals = _linprog_duals(model, res, eq, le, ge)
    elapsed = time.perf_counter() - start
    if status != "optimal":
        return SolveResult(status, solve_time=elapsed, backend="scipy", message=res.message)
    values = {v.name: float(val) for v, val in zip(model.variables, res.x)}
    obj = float(res.fun) * (-1 if model.sense == "max" else 1)
    return SolveResult("optimal", obj, values, duals, elapsed, "scipy", res.message)


def sp_vstack(blocks):
    import scipy.sparse as sp

    return sp.vstack(blocks, format="csr")


def _linprog_duals(model, res, eq, le, ge) -> dict[str, float]:
    duals = np.zeros(model.n_rows)
    if eq.any():
        duals[eq] = res.eqlin.marginals
    n_le = int(le.sum())
    if n_le or ge.any():
        marg = res.ineqlin.marginals
        duals[le] = marg[:n_le]
        duals[ge] = -marg[n_le:]
    return {row.name: float(d) for row, d in zip(model.constraints, duals)}


BACKENDS = {"highs": solve_highs, "scipy": solve_scipy}


def solve(model: ModelInstance, backend: BackendConfig | str | None = None) -> SolveResult:
    """Solve ``model``; the result's ``objective_value`` excludes ``model.constants``."""
    if backend is None or isinstance(backend, str):
        backend = BackendConfig.from_env(backend)
    if backend.name not in BACKENDS:
        raise BackendUnavailable(f"unknown backend {backend.name!r}; expected one of {sorted(BACKENDS)}")
    if model.n_vars == 0:
        from ..errors import EmptyModel

        raise EmptyModel("model has no variables")
    result = BACKENDS[backend.name](model, backend)
    log.info("%s: %s, objective %.10g, %.2fs", backend.name, result.status, result.objective_value,
             result.solve_time)
    return result


__all__ = ["BackendConfig", "solve", "find_highs", "BACKENDS", "ParseError"]
