"""Configuration-driven experiment runners.

Each experiment validates its parameters up front, computes a results
table plus named plot series, and leaves serialization to the writers in
``cli``.  Runs are deterministic given the seed: the only randomness comes
from one ``numpy.random.default_rng(seed)`` stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fock as fk
from . import majorization as mj
from . import quantum as qt
from .classical import (
    Boundary,
    WalkLattice,
    check_pd,
    delta_matrix,
    evolve_pd,
    gillis,
    gillis2d,
    ls_walk,
    point_mass,
    polya,
    random_pd,
    uniform_pd,
)
from .crt import coassoc_check, compose_pd, crt_split, factorization_check
from .errors import ConfigError
from .linalg import DensityMatrix
from .quantum import Scheme

EXPERIMENTS = (
    "classical",
    "zn-factor",
    "qrw",
    "cs-qrw",
    "master-eq",
    "diffusion-limit",
    "majorization-audit",
)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict
    output_path: str = "."
    output_format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"experiment: unknown value {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
            )
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output.format: must be 'csv' or 'json', got {self.output_format!r}")
        if not isinstance(self.parameters, dict):
            raise ConfigError("parameters: must be a JSON object")


@dataclass
class RunResult:
    columns: list[str]
    rows: list[list]
    series: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


class _Params:
    """Field-checked view of the parameter map."""

    def __init__(self, raw: dict):
        self.raw = dict(raw)

    def get(self, name, default=None, kind=None, check=None, msg=""):
        val = self.raw.get(name, default)
        if val is None:
            raise ConfigError(f"parameters.{name}: required")
        if kind is not None:
            try:
                val = kind(val)
            except (TypeError, ValueError):
                raise ConfigError(f"parameters.{name}: expected {kind.__name__}, got {val!r}")
        if check is not None and not check(val):
            raise ConfigError(f"parameters.{name}: {msg} (got {val!r})")
        return val


def _initial_pd(params: _Params, n: int, rng: np.random.Generator) -> np.ndarray:
    p0 = params.raw.get("p0", "point")
    if isinstance(p0, str):
        if p0 == "point":
            return point_mass(n, params.get("point_site", n // 2, int))
        if p0 == "uniform":
            return uniform_pd(n)
        if p0 == "random":
            return random_pd(rng, n)
        raise ConfigError(f"parameters.p0: unknown preset {p0!r}")
    try:
        return check_pd(np.asarray(p0, dtype=float))
    except ValueError as exc:
        raise ConfigError(f"parameters.p0: {exc}")


def _run_classical(params: _Params, rng) -> RunResult:
    size = params.get("size", 21, int, lambda v: v >= 2, "size must be >= 2")
    boundary = params.get(
        "boundary", "cyclic", str, lambda v: v in ("cyclic", "truncated"), "cyclic or truncated"
    )
    steps = params.get("steps", 10, int, lambda v: v >= 0, "steps must be >= 0")
    walk = params.get(
        "walk",
        "polya",
        str,
        lambda v: v in ("polya", "gillis", "ls", "gillis2d", "delta"),
        "one of polya, gillis, ls, gillis2d, delta",
    )
    lat = WalkLattice(size, Boundary(boundary))
    if walk == "polya":
        d = polya(lat)
    elif walk == "gillis":
        eps = params.get("eps", None, float, lambda v: -1.0 < v < 1.0, "eps must lie in (-1, 1)")
        d = gillis(lat, eps)
    elif walk == "ls":
        eps = params.get("eps", None, float, lambda v: v > 0.0, "eps must be positive")
        d = ls_walk(lat, eps)
    elif walk == "gillis2d":
        args = [
            params.get("eps1", None, float, lambda v: -1.0 < v < 1.0, "eps1 must lie in (-1, 1)"),
            params.get("m1", 0, int),
            params.get("a1", 1, int, lambda v: v >= 1, "a1 must be a positive integer"),
            params.get("eps2", None, float, lambda v: -1.0 < v < 1.0, "eps2 must lie in (-1, 1)"),
            params.get("m2", 0, int),
            params.get("a2", 1, int, lambda v: v >= 1, "a2 must be a positive integer"),
            params.get("q", 0.5, float, lambda v: 0.0 <= v <= 1.0, "q must lie in [0, 1]"),
        ]
        d = gillis2d(lat, *args)
    else:
        step_pd = _initial_pd(_Params({"p0": params.raw.get("step_pd", "uniform")}), size, rng)
        d = delta_matrix(step_pd, lat)
    dim = d.dim
    p0 = _initial_pd(params, dim, rng)
    traj = evolve_pd(d, p0, steps)

    columns = ["step", "entropy", "relation_to_prev"] + [f"p{i}" for i in range(dim)]
    rows = []
    pd_rows, ent_rows = [], []
    prev = None
    for k in range(steps + 1):
        pd_k = traj[k]
        ent = mj.shannon_entropy(pd_k / pd_k.sum())
        rel = "" if prev is None else mj.majorizes(prev, pd_k).relation.value
        rows.append([k, ent, rel] + [float(x) for x in pd_k])
        ent_rows.append((k, ent))
        for site in range(dim):
            pd_rows.append((site, float(pd_k[site]), k))
        prev = pd_k
    return RunResult(
        columns,
        rows,
        series={
            "pd": (("site", "probability", "step"), pd_rows),
            "entropy": (("step", "entropy"), ent_rows),
        },
        summary={"walk": walk, "dim": dim},
    )


def _run_zn_factor(params: _Params, rng) -> RunResult:
    n = params.get("n", None, int, lambda v: v >= 4, "modulus must be >= 4")
    factors = params.raw.get("factors")
    if not isinstance(factors, (list, tuple)) or len(factors) not in (2, 3):
        raise ConfigError("parameters.factors: need a list of 2 or 3 coprime factors")
    steps = params.get("steps", 20, int, lambda v: v >= 1, "steps must be >= 1")
    try:
        split = crt_split(n, factors)
    except ValueError as exc:
        raise ConfigError(f"parameters.factors: {exc}")
    pd_spec = params.raw.get("pd", "random-factorable")
    if pd_spec == "uniform":
        p = uniform_pd(n)
    elif pd_spec == "random-factorable":
        p = compose_pd(split, [random_pd(rng, f) for f in split.factors])
    else:
        p = check_pd(np.asarray(pd_spec, dtype=float))
    rows = []
    dev_rows = []
    if len(split.factors) == 2:
        report = factorization_check(p, split, steps)
        rows.append(["matrix", 0, report.matrix_deviation])
        for k, dev in enumerate(report.step_deviations, start=1):
            rows.append(["pd", k, dev])
            dev_rows.append((k, dev, "pd"))
        summary = {"max_deviation": max(report.matrix_deviation, report.max_step_deviation)}
    else:
        report = coassoc_check(p, split, steps)
        rows.append(["permutations-equal", 0, 0.0 if report.permutations_equal else 1.0])
        for k, dev in enumerate(report.step_deviations, start=1):
            rows.append(["bracketings", k, dev])
            dev_rows.append((k, dev, "bracketings"))
        summary = {
            "permutations_equal": report.permutations_equal,
            "max_deviation": report.max_step_deviation,
        }
    return RunResult(
        ["check", "step", "deviation"],
        rows,
        series={"deviation": (("step", "deviation", "check"), dev_rows)},
        summary=summary,
    )


def _coin_from_params(params: _Params) -> qt.CoinSpec:
    kind = params.get(
        "coin", "hadamard-symmetric", str,
        lambda v: v in ("hadamard-symmetric", "hadamard", "pq"),
        "one of hadamard-symmetric, hadamard, pq",
    )
    if kind == "hadamard-symmetric":
        return qt.hadamard_coin()
    if kind == "pq":
        p = params.get("p", 0.5, float, lambda v: 0.0 <= v <= 1.0, "p must lie in [0, 1]")
        return qt.pq_coin(p)
    psi = np.array(
        [
            params.get("a_re", None, float) + 1j * params.get("a_im", 0.0, float),
            params.get("b_re", None, float) + 1j * params.get("b_im", 0.0, float),
        ]
    )
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-9:
        raise ConfigError("parameters.a/b: coin amplitudes must be normalized")
    return qt.hadamard_coin(psi / nrm)


def _run_qrw(params: _Params, rng) -> RunResult:
    scheme = Scheme(
        params.get("scheme", "qrw2", str, lambda v: v in ("crw", "qrw1", "qrw2"), "crw, qrw1 or qrw2")
    )
    steps = params.get("steps", 5, int, lambda v: v >= 0, "steps must be >= 0")
    hops = {Scheme.CRW: 1, Scheme.QRW1: 1, Scheme.QRW2: 2}[scheme] * steps
    default_size = 2 * hops + 3
    if default_size % 2 == 0:
        default_size += 1
    size = params.get("size", default_size, int, lambda v: v >= 3, "size must be >= 3")
    coin = _coin_from_params(params)
    lat = WalkLattice(size, Boundary.CYCLIC)
    _, _, l_op = qt.shift_operators(lat)
    rho0 = qt.point_mass_density(size, params.get("site", lat.center, int))

    densities = qt.walk_densities(scheme, coin, lat, rho0, steps)
    crw = qt.walk_densities(Scheme.CRW, coin, lat, rho0, steps)
    columns = ["step", "sigma", "sigma_crw", "sigma_ratio", "mean", "entropy", "relation_to_prev"]
    rows, sig_rows, ent_rows, pd_rows = [], [], [], []
    prev = None
    for k in range(steps + 1):
        st = qt.WalkState(densities[k], k, scheme)
        st_c = qt.WalkState(crw[k], k, Scheme.CRW)
        sig = qt.sigma(st, l_op)
        sig_c = qt.sigma(st_c, l_op)
        mean = qt.distance_moment(st, l_op, 1)
        pd_k = qt.position_pd(st)
        ent = mj.shannon_entropy(pd_k / pd_k.sum())
        rel = "" if prev is None else mj.majorizes(prev, pd_k).relation.value
        ratio = sig / sig_c if sig_c > 0 else float("nan")
        rows.append([k, sig, sig_c, ratio, mean, ent, rel])
        sig_rows.append((k, sig, scheme.value))
        sig_rows.append((k, sig_c, "crw"))
        ent_rows.append((k, ent))
        for site in range(size):
            pd_rows.append((int(lat.labels[site]), float(pd_k[site]), k))
        prev = pd_k
    return RunResult(
        columns,
        rows,
        series={
            "sigma": (("step", "sigma", "scheme"), sig_rows),
            "entropy": (("step", "entropy"), ent_rows),
            "pd": (("site", "probability", "step"), pd_rows),
        },
        summary={"scheme": scheme.value, "size": size},
    )


def _run_cs_qrw(params: _Params, rng) -> RunResult:
    m = params.get("m", 64, int, lambda v: v >= 8, "truncation must be >= 8")
    p = params.get("p", 0.5, float, lambda v: 0.0 <= v <= 1.0, "p must lie in [0, 1]")
    beta = params.get("beta_re", 0.1, float) + 1j * params.get("beta_im", 0.0, float)
    steps = params.get("steps", 10, int, lambda v: v >= 0, "steps must be >= 0")
    f = fk.FockSpace(m)
    vac = np.zeros((m, m), dtype=np.complex128)
    vac[0, 0] = 1.0
    rho = DensityMatrix(vac)
    columns = ["step", "trace", "mean_a_re", "mean_a_im", "mean_n", "top_population"]
    rows = []
    mom_rows = []
    for k in range(steps + 1):
        tr = float(np.real(np.trace(rho.mat)))
        mean_a = complex(np.trace(f.a @ rho.mat))
        mean_n = float(np.real(np.trace(f.num @ rho.mat)))
        top = float(np.sum(rho.diagonal()[int(0.9 * m):]))
        rows.append([k, tr, mean_a.real, mean_a.imag, mean_n, top])
        mom_rows.append((k, mean_n))
        if k < steps:
            rho = fk.cs_qrw_step(rho, p, beta, f)
    return RunResult(
        columns,
        rows,
        series={"moments": (("step", "mean_n"), mom_rows)},
        summary={"m": m},
    )


def _run_master_eq(params: _Params, rng) -> RunResult:
    m = params.get("m", 40, int, lambda v: v >= 8, "truncation must be >= 8")
    c = params.get("c_re", 0.0, float) + 1j * params.get("c_im", 0.0, float)
    gamma = params.get("gamma_re", 0.05, float) + 1j * params.get("gamma_im", 0.0, float)
    t = params.get("t", 1.0, float, lambda v: v >= 0.0, "t must be >= 0")
    dt = params.get("dt", 1e-3, float, lambda v: v > 0.0, "dt must be positive")
    samples = params.get("samples", 10, int, lambda v: v >= 1, "samples must be >= 1")
    f = fk.FockSpace(m)
    pars = fk.MasterEqParams(c=c, gamma=gamma)
    if dt * (abs(c) + abs(gamma) * m) >= 0.05:
        raise ConfigError("parameters.dt: violates dt * (|c| + |gamma| m) < 0.05")
    vac = np.zeros((m, m), dtype=np.complex128)
    vac[0, 0] = 1.0
    rho = DensityMatrix(vac)
    columns = ["t", "trace", "trace_drift", "mean_a_re", "mean_a_im", "mean_n"]
    rows = []
    mom_rows = []
    t_grid = np.linspace(0.0, t, samples + 1)
    for i, tk in enumerate(t_grid):
        if i > 0:
            rho = fk.integrate_master_eq(rho, pars, t_grid[i] - t_grid[i - 1], dt, f)
        tr = float(np.real(np.trace(rho.mat)))
        mean_a = complex(np.trace(f.a @ rho.mat))
        mean_n = float(np.real(np.trace(f.num @ rho.mat)))
        rows.append([float(tk), tr, abs(tr - 1.0), mean_a.real, mean_a.imag, mean_n])
        mom_rows.append((float(tk), mean_n))
    return RunResult(
        columns,
        rows,
        series={"moments": (("t", "mean_n"), mom_rows)},
        summary={"m": m},
    )


def _run_diffusion_limit(params: _Params, rng) -> RunResult:
    m = params.get("m", 40, int, lambda v: v >= 8, "truncation must be >= 8")
    c = params.get("c", 0.0, float)
    gamma = params.get("gamma", 0.05, float, lambda v: v > 0.0, "gamma must be positive")
    t = params.get("t", 1.0, float, lambda v: v > 0.0, "t must be positive")
    dt = params.get("dt", 1e-3, float, lambda v: v > 0.0, "dt must be positive")
    n_list = params.raw.get("n_list", [8, 16, 32, 64])
    if not isinstance(n_list, (list, tuple)) or not all(int(n) >= 1 for n in n_list):
        raise ConfigError("parameters.n_list: need a list of positive step counts")
    f = fk.FockSpace(m)
    report = fk.diffusion_limit_check(c, gamma, t, [int(n) for n in n_list], f, dt=dt)
    rows = [[e.n, e.alpha, e.p, e.deviation] for e in report.entries]
    dev_rows = [(e.n, e.deviation) for e in report.entries]
    return RunResult(
        ["n", "alpha", "p", "deviation"],
        rows,
        series={"deviation": (("n", "deviation"), dev_rows)},
        summary={
            "strictly_decreasing": report.strictly_decreasing,
            "reference_trace_drift": report.reference_trace_drift,
        },
    )


def _run_majorization_audit(params: _Params, rng) -> RunResult:
    size = params.get("size", 31, int, lambda v: v >= 2, "size must be >= 2")
    steps = params.get("steps", 30, int, lambda v: v >= 1, "steps must be >= 1")
    trials = params.get("trials", 100, int, lambda v: v >= 1, "trials must be >= 1")
    lat = WalkLattice(size, Boundary.CYCLIC)
    columns = ["trial", "majorization_monotone", "entropy_monotone", "min_entropy_increment"]
    rows = []
    all_ok = True
    for trial in range(trials):
        d = delta_matrix(random_pd(rng, size), lat)
        traj = evolve_pd(d, random_pd(rng, size), steps)
        maj_ok, ent_ok = True, True
        min_inc = np.inf
        prev_e = mj.shannon_entropy(traj[0])
        for k in range(steps):
            verdict = mj.majorizes(traj[k], traj[k + 1])
            if verdict.relation not in (mj.Relation.X_MAJORIZES_Y, mj.Relation.EQUAL):
                maj_ok = False
            e = mj.shannon_entropy(traj[k + 1] / traj[k + 1].sum())
            inc = e - prev_e
            min_inc = min(min_inc, inc)
            if inc < -1e-12:
                ent_ok = False
            prev_e = e
        all_ok = all_ok and maj_ok and ent_ok
        rows.append([trial, int(maj_ok), int(ent_ok), float(min_inc)])
    return RunResult(columns, rows, summary={"all_monotone": all_ok})


_RUNNERS = {
    "classical": _run_classical,
    "zn-factor": _run_zn_factor,
    "qrw": _run_qrw,
    "cs-qrw": _run_cs_qrw,
    "master-eq": _run_master_eq,
    "diffusion-limit": _run_diffusion_limit,
    "majorization-audit": _run_majorization_audit,
}


def run_experiment(config: ExperimentConfig) -> RunResult:
    rng = np.random.default_rng(config.seed)
    return _RUNNERS[config.experiment](_Params(config.parameters), rng)
