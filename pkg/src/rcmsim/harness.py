"""Configuration-driven simulation scenarios with deterministic CSV output.

All floating-point values are serialized in scientific notation with 17
significant digits so golden-file comparisons round-trip exactly; files are
UTF-8 with LF line endings.  Every scenario is a pure function of its config
and seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import euclidean as euc
from . import graph as graphs
from .errors import ConfigError, SolverError, VerificationError
from .geometry import ConvexityParams, Euclidean, SO3
from .rcm import karcher_mean
from .solvers import METHODS, SolverConfig, run

DEFAULT_SOLVERS = ("algorithm1", "tron", "penalty", "lagrangian")

# "random" draws a shared starting configuration from the same ball as the
# target points, which is how the comparison scenario initializes its agents.
HARNESS_INIT_MODES = ("at_z", "at_identity", "random")

SCENARIO1_HEADER = "solver,iteration,consensus_error,rcm_error"
SCENARIO2_HEADER = "iteration,min,q1,median,q3,max"
VERIFY_HEADER = (
    "graph,n_agents,zero_multiplicity,max_nonzero_real_part,"
    "lemma_holds,limit_error,passed,eigenvalues"
)


@dataclass
class ScenarioConfig:
    group: str = "so3"  # "so3" or "euclidean:<n>"
    n_agents: int = 10
    topology: str = "erdos_renyi:0.4"
    sampling_radius: float = math.pi / 4
    step_size: float = 0.1
    iterations: int = 200
    instances: int = 100
    seed: int = 0
    init_mode: str = "at_z"
    solvers: tuple = DEFAULT_SOLVERS
    penalty_inner: int = 50
    dual_step: float = 0.01
    augmentation: float = 0.0


_SCHEMA = {
    "group": str,
    "n_agents": int,
    "topology": str,
    "sampling_radius": (int, float),
    "step_size": (int, float),
    "iterations": int,
    "instances": int,
    "seed": int,
    "init_mode": str,
    "solvers": list,
    "penalty_inner": int,
    "dual_step": (int, float),
    "augmentation": (int, float),
}


def make_group(spec: str):
    name, _, arg = spec.partition(":")
    if name == "so3":
        if arg:
            raise ConfigError("group 'so3' takes no parameter")
        return SO3()
    if name == "euclidean":
        try:
            n = int(arg) if arg else 3
        except ValueError:
            raise ConfigError(f"bad euclidean dimension {arg!r}") from None
        if n < 1:
            raise ConfigError("euclidean dimension must be positive")
        return Euclidean(n)
    raise ConfigError(f"unknown group {spec!r}; expected 'so3' or 'euclidean:<n>'")


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    make_group(cfg.group)
    try:
        graphs.parse_topology(cfg.topology)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.n_agents < 1:
        raise ConfigError("n_agents must be at least 1")
    if cfg.step_size <= 0:
        raise ConfigError("step_size must be positive")
    if cfg.iterations < 0:
        raise ConfigError("iterations must be nonnegative")
    if cfg.instances < 1:
        raise ConfigError("instances must be at least 1")
    if cfg.init_mode not in HARNESS_INIT_MODES:
        raise ConfigError(f"init_mode must be one of {HARNESS_INIT_MODES}")
    if not cfg.solvers:
        raise ConfigError("solver list must be non-empty")
    for name in cfg.solvers:
        if name not in METHODS:
            raise ConfigError(f"unknown solver {name!r}; valid names: {', '.join(METHODS)}")
    if cfg.group == "so3":
        r_star = ConvexityParams.so3_default().r_star
        if not 0 < cfg.sampling_radius < r_star:
            raise ConfigError(
                f"sampling_radius must lie in (0, r*={r_star:.6g}) for so3"
            )
    elif cfg.sampling_radius <= 0:
        raise ConfigError("sampling_radius must be positive")
    if cfg.penalty_inner < 1:
        raise ConfigError("penalty_inner must be at least 1")
    if cfg.dual_step <= 0 or cfg.augmentation < 0:
        raise ConfigError("dual_step must be positive and augmentation nonnegative")
    return cfg


def parse_config(path) -> ScenarioConfig:
    """Load a TOML or JSON config; unknown keys and bad values are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    unknown = sorted(set(raw) - set(_SCHEMA))
    if unknown:
        raise ConfigError(f"{path}: unknown keys: {', '.join(unknown)}")
    for key, value in raw.items():
        expected = _SCHEMA[key]
        if not isinstance(value, expected) or isinstance(value, bool):
            raise ConfigError(f"{path}: key {key!r} has wrong type {type(value).__name__}")
    if "solvers" in raw:
        raw["solvers"] = tuple(raw["solvers"])
    return validate_config(ScenarioConfig(**raw))


def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def _solver_config(cfg: ScenarioConfig, method: str) -> SolverConfig:
    init_mode = "explicit" if cfg.init_mode == "random" else cfg.init_mode
    return SolverConfig(
        method=method,
        step_size=cfg.step_size,
        iterations=cfg.iterations,
        init_mode=init_mode,
        penalty_inner=cfg.penalty_inner,
        dual_step=cfg.dual_step,
        augmentation=cfg.augmentation,
    )


def sample_instance(group, cfg: ScenarioConfig, rng):
    """Draw a connected graph, a point cloud inside the sampling ball, and the
    shared starting configuration (None unless init_mode is "random")."""
    g = graphs.generate(cfg.topology, cfg.n_agents, rng=rng)
    center = group.random_point(rng)
    z = np.stack(
        [group.sample_in_ball(center, cfg.sampling_radius, rng) for _ in range(cfg.n_agents)]
    )
    x0 = None
    if cfg.init_mode == "random":
        x0 = np.stack(
            [
                group.sample_in_ball(center, cfg.sampling_radius, rng)
                for _ in range(cfg.n_agents)
            ]
        )
    return g, z, x0


def scenario1(cfg: ScenarioConfig, out_path) -> Path:
    """Four-solver comparison on one shared instance; one CSV row per iteration.

    Rows for each completed solver are flushed before the next starts, so a
    numerical failure leaves a valid partial file behind.
    """
    validate_config(cfg)
    group = make_group(cfg.group)
    rng = np.random.default_rng(cfg.seed)
    g, z, x0 = sample_instance(group, cfg, rng)
    z_bar = karcher_mean(group, z)
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCENARIO1_HEADER + "\n")
        for method in cfg.solvers:
            traces, _ = run(group, z, g, _solver_config(cfg, method), x0=x0, z_bar=z_bar)
            for t in traces:
                fh.write(
                    f"{method},{t.iteration},{_fmt(t.consensus_error)},{_fmt(t.rcm_error)}\n"
                )
            fh.flush()
    return out_path


def splitmix64(x: int) -> int:
    """One round of the splitmix64 mixer; the per-instance seed rule."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def instance_seed(master_seed: int, index: int) -> int:
    return splitmix64((master_seed + index) & 0xFFFFFFFFFFFFFFFF)


def scenario2(cfg: ScenarioConfig, out_path) -> Path:
    """Per-iteration quartile statistics of the rcm_error over many instances.

    Runs algorithm1 only.  Quartile convention: q1/q3 by nearest rank (lower /
    higher), median by linear interpolation; with two instances this makes
    q1 = min and q3 = max.  Failed instances are excluded; more than 5%
    failures aborts the run.
    """
    validate_config(cfg)
    if cfg.instances < 2:
        raise ConfigError("scenario2 needs at least 2 instances")
    group = make_group(cfg.group)
    solver_cfg = _solver_config(cfg, "algorithm1")
    errors = []
    failures = []
    for i in range(cfg.instances):
        rng = np.random.default_rng(instance_seed(cfg.seed, i))
        g, z, x0 = sample_instance(group, cfg, rng)
        try:
            traces, _ = run(group, z, g, solver_cfg, x0=x0)
        except SolverError as exc:
            failures.append((i, str(exc)))
            continue
        errors.append([t.rcm_error for t in traces])
    if len(failures) > 0.05 * cfg.instances:
        detail = "; ".join(f"instance {i}: {msg}" for i, msg in failures[:3])
        raise SolverError(f"{len(failures)}/{cfg.instances} instances failed: {detail}")
    data = np.asarray(errors)  # (instances_ok, iterations + 1)
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCENARIO2_HEADER + "\n")
        for k in range(data.shape[1]):
            col = data[:, k]
            row = (
                np.min(col),
                np.percentile(col, 25, method="lower"),
                np.percentile(col, 50),
                np.percentile(col, 75, method="higher"),
                np.max(col),
            )
            fh.write(f"{k}," + ",".join(_fmt(v) for v in row) + "\n")
    return out_path


def _fmt_eig(lam: complex) -> str:
    if abs(lam.imag) <= 1e-12:
        return _fmt(lam.real)
    sign = "+" if lam.imag >= 0 else "-"
    return f"{_fmt(lam.real)}{sign}{_fmt(abs(lam.imag))}j"


def euclidean_verify(cfg: ScenarioConfig, out_path, sweep_size=100, negative_test=False) -> Path:
    """Spectral sweep plus convergence-to-the-average checks; CSV report.

    Each random connected graph gets its system matrix analyzed (simple zero
    eigenvalue, all others strictly stable) and its dense trajectory compared
    against the closed-form limit from a random start.  negative_test injects
    one disconnected graph, which must be reported as failing.
    """
    validate_config(cfg)
    group = make_group(cfg.group)
    if not isinstance(group, Euclidean):
        raise ConfigError("euclidean-verify requires an euclidean group")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    all_pass = True
    cases = []
    for i in range(sweep_size):
        n = int(rng.integers(2, 11))
        cases.append(graphs.generate("erdos_renyi:0.5", n, rng=rng))
    if negative_test:
        cases.append(graphs.Graph(4, frozenset({(0, 1), (2, 3)})))
    for i, g in enumerate(cases):
        lap = g.laplacian_matrix()
        report = euc.analyze_spectrum(euc.build_system_matrix(lap))
        if report.lemma_holds:
            # Horizon scaled to the slowest stable mode so the Euler
            # trajectory has provably reached the limit set.
            eps = 0.05
            horizon = 30.0 / abs(report.max_nonzero_real_part)
            iterations = min(int(math.ceil(horizon / eps)), 500_000)
            z = rng.standard_normal(g.n_agents * group.n)
            x0 = rng.standard_normal(g.n_agents * group.n)
            _, x_traj = euc.simulate_euclidean(lap, z, x0, eps, iterations)
            x_star, _ = euc.predicted_limit(x0, z, g.n_agents)
            limit_error = float(np.max(np.abs(x_traj[-1] - x_star)))
            passed = limit_error <= 1e-8
        else:
            limit_error = float("nan")
            passed = False
        all_pass = all_pass and passed
        rows.append(
            f"{i},{g.n_agents},{report.zero_multiplicity},"
            f"{_fmt(report.max_nonzero_real_part)},"
            f"{'true' if report.lemma_holds else 'false'},"
            f"{_fmt(limit_error)},{'true' if passed else 'false'},"
            + ";".join(_fmt_eig(lam) for lam in report.eigenvalues)
        )
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(VERIFY_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    expected_failures = 1 if negative_test else 0
    failed = sum(1 for row in rows if row.split(",")[6] == "false")
    if failed != expected_failures:
        raise VerificationError(
            f"{failed} of {len(rows)} graphs failed verification (report: {out_path})"
        )
    if negative_test and rows[-1].split(",")[6] != "false":
        raise VerificationError("disconnected graph was not reported as failing")
    return out_path
