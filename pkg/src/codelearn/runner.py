"""Reproducible experiment campaigns over the simulation engines.

A campaign is described by a flat INI config (sections [experiment],
[grid], [engine], [output]); running it writes CSV data files plus a JSON
manifest.  Every CSV starts with a comment block carrying the manifest
hash, and data sections are bit-identical across reruns of the same
(config, master_seed): per-task RNG streams are derived as
SeedSequence((master_seed, point_index, trajectory_index)) and the task
decomposition is independent of the worker count.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .duality import is_self_dual, kw_explicit
from .floquet import (FloquetPoint, heff_classify, quasi_energies,
                      steady_state_density)
from .lattice import CapacityError, make_layout
from .majorana import fit_arc, run_trajectory
from .protocol import ProtocolPoint, is_projective
from .sphere import kl_from_counts, pixelize
from .statevector import coherent_information, sample_record

LOG2 = math.log(2.0)

KINDS = ("entropy_scan", "coherent_info", "ensemble", "floquet_scan", "duality_table")

MAX_STATEVECTOR_D = 4
MAX_CHAIN_L = 512


class ConfigError(ValueError):
    """Malformed experiment config; the message carries the field path."""


def parse_angle(text: str) -> float:
    """Parse '0.25pi', 'pi/4', or a plain float literal."""
    s = text.strip().lower().replace(" ", "")
    if not s:
        raise ConfigError(f"empty angle literal {text!r}")
    if s == "pi":
        return math.pi
    if s.endswith("pi"):
        head = s[:-2]
        return math.pi if head in ("", "+") else float(head) * math.pi
    if s.startswith("pi/"):
        return math.pi / float(s[3:])
    return float(s)


def parse_angle_list(text: str) -> tuple[float, ...]:
    return tuple(parse_angle(tok) for tok in text.split(",") if tok.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    thetas: tuple
    phis: tuple
    ts: tuple
    master_seed: int
    out: Path
    zip_angles: bool = False
    L: int = 64
    depth: int | None = None
    boundary: str = "open"
    n_trajectories: int = 100
    d: int = 2
    plan: str = "exhaustive"
    n_samples: int = 1000
    orders: tuple = (2,)
    kl_checkpoints: tuple = ()
    L_k: int = 2048

    def grid(self):
        if self.zip_angles:
            if len(self.thetas) != len(self.phis):
                raise ConfigError(
                    "grid: zip mode needs equal-length theta and phi lists")
            pairs = list(zip(self.thetas, self.phis))
        else:
            pairs = [(th, ph) for th in self.thetas for ph in self.phis]
        pts = [(th, ph, t) for th, ph in pairs for t in self.ts]
        if not pts:
            raise ConfigError("grid: empty (theta x phi x t) product")
        return pts

    def canonical(self) -> str:
        items = []
        for key in sorted(self.__dataclass_fields__):
            if key == "out":
                continue
            items.append(f"{key}={getattr(self, key)!r}")
        return ";".join(items)

    def manifest_hash(self) -> str:
        payload = f"codelearn/{__version__}|{self.canonical()}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def parse_config(path, overrides: dict | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    overrides = overrides or {}

    def get(section, key, default=None, required=False):
        if not cp.has_option(section, key):
            if required:
                raise ConfigError(f"{section}.{key}: missing required field")
            return default
        return cp.get(section, key)

    kind = get("experiment", "kind", required=True)
    if kind not in KINDS:
        raise ConfigError(f"experiment.kind: {kind!r} not one of {KINDS}")
    try:
        master_seed = overrides.get("master_seed")
        if master_seed is None:
            master_seed = int(get("experiment", "master_seed", "0"))
        out = overrides.get("out") or get("output", "path", "out")
        thetas = parse_angle_list(get("grid", "theta", "0"))
        phis = parse_angle_list(get("grid", "phi", "0"))
        ts = parse_angle_list(get("grid", "t", "0.25pi"))
        kw = dict(
            kind=kind, thetas=thetas, phis=phis, ts=ts,
            zip_angles=get("grid", "zip", "false").strip().lower()
            in ("1", "true", "yes"),
            master_seed=master_seed, out=Path(out),
            L=int(get("engine", "L", "64")),
            boundary=get("engine", "boundary", "open"),
            n_trajectories=int(get("engine", "trajectories", "100")),
            d=int(get("engine", "d", "2")),
            plan=get("engine", "plan", "exhaustive"),
            n_samples=int(get("engine", "samples", "1000")),
            orders=tuple(int(x) for x in get("engine", "orders", "2").split(",")),
            L_k=int(get("engine", "momenta", "2048")),
        )
        depth = get("engine", "depth")
        kw["depth"] = int(depth) if depth is not None else None
        ckpt = get("engine", "kl_checkpoints", "")
        kw["kl_checkpoints"] = tuple(int(x) for x in ckpt.split(",") if x.strip())
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config value error: {exc}") from exc
    return ExperimentConfig(**kw)


@dataclass
class ValidationReport:
    ok: bool
    messages: list
    estimates: dict

    def __str__(self):
        status = "OK" if self.ok else "REJECTED"
        lines = [f"validation: {status}"]
        lines += [f"  - {m}" for m in self.messages]
        lines += [f"  {k} = {v}" for k, v in self.estimates.items()]
        return "\n".join(lines)


def validate(config: ExperimentConfig) -> ValidationReport:
    """Dry-run resource check: amplitude/covariance memory and task counts."""
    messages, ok = [], True
    grid = config.grid()
    est = {"grid_points": len(grid)}
    if config.kind in ("coherent_info", "ensemble"):
        n_qubits = config.d ** 2 + (config.d - 1) ** 2 + 1
        est["statevector_qubits"] = n_qubits
        est["statevector_amplitudes"] = f"2^{n_qubits}"
        est["statevector_bytes"] = (1 << n_qubits) * 16
        if config.d > MAX_STATEVECTOR_D:
            ok = False
            messages.append(
                f"d={config.d} exceeds the dense-statevector limit d={MAX_STATEVECTOR_D}")
        if config.plan == "exhaustive" and n_qubits - 1 > 13:
            messages.append(
                f"exhaustive plan needs <= 13 data qubits, got {n_qubits - 1}; "
                "only monte_carlo will work")
    if config.kind == "entropy_scan":
        est["covariance_entries"] = (2 * config.L) ** 2
        est["covariance_bytes_per_trajectory"] = (2 * config.L) ** 2 * 8
        est["tasks"] = len(grid) * config.n_trajectories
        if config.L > MAX_CHAIN_L:
            ok = False
            messages.append(f"L={config.L} exceeds the chain limit L={MAX_CHAIN_L}")
        if config.L % 2 or config.L < 4:
            ok = False
            messages.append(f"L={config.L} must be even and >= 4")
    if config.kind == "floquet_scan":
        est["momenta"] = config.L_k
    if ok:
        messages.insert(0, "within capacity")
    return ValidationReport(ok=ok, messages=messages, estimates=est)


@dataclass
class RunManifest:
    kind: str
    manifest_hash: str
    master_seed: int
    version: str
    config: str
    files: dict = field(default_factory=dict)   # name -> row count
    wall_clock_s: float = 0.0
    seed_rule: str = "SeedSequence((master_seed, point_index, trajectory_index))"
    failed_tasks: list = field(default_factory=list)

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        payload = {k: getattr(self, k) for k in
                   ("kind", "manifest_hash", "master_seed", "version", "config",
                    "files", "wall_clock_s", "seed_rule", "failed_tasks")}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        return path


def task_seed(master_seed: int, point_index: int, traj_index: int) -> int:
    ss = np.random.SeedSequence((master_seed, point_index, traj_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _fmt(x) -> str:
    if isinstance(x, float):  # includes np.float64; plain repr would tag it
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _write_csv(path: Path, header: list, rows: list, manifest_hash: str,
               kind: str, master_seed: int, extra_comments=()) -> int:
    with open(path, "w") as fh:
        fh.write(f"# codelearn {kind}\n")
        fh.write(f"# manifest_hash: {manifest_hash}\n")
        fh.write(f"# master_seed: {master_seed}\n")
        for line in extra_comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return len(rows)


def _run_entropy_scan(config: ExperimentConfig, threads: int):
    depth = config.depth or config.L
    traj_rows, profile_rows, arc_rows = [], [], []
    tasks = []
    for p_idx, (theta, phi, t) in enumerate(config.grid()):
        if not is_projective(ProtocolPoint.at(theta, phi, t).strength.beta):
            raise ConfigError("entropy_scan: grid must sit at t = 0.25pi "
                              "(the fermion engine is projective-only)")
        for k in range(config.n_trajectories):
            tasks.append((p_idx, theta, phi, k,
                          task_seed(config.master_seed, p_idx, k)))

    packed = [(t, config.L, depth, config.boundary) for t in tasks]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_entropy_task, packed, chunksize=4))
    else:
        results = [_entropy_task(p) for p in packed]

    by_point = {}
    for (p_idx, theta, phi, k, seed), profile, log_weight in results:
        half = config.L // 2
        traj_rows.append((seed, config.L, depth, theta, phi, depth, half,
                          float(profile[half - 1]), log_weight))
        by_point.setdefault(p_idx, []).append(profile)

    grid = config.grid()
    for p_idx, profiles in sorted(by_point.items()):
        theta, phi, _ = grid[p_idx]
        stack = np.vstack(profiles)
        mean = stack.mean(axis=0)
        sem = stack.std(axis=0, ddof=1) / math.sqrt(len(profiles))
        for l in range(1, config.L):
            profile_rows.append((theta, phi, config.L, depth, l,
                                 float(mean[l - 1]), float(sem[l - 1]),
                                 len(profiles)))
        fit = fit_arc(mean * LOG2, config.L, unit="nats")
        arc_rows.append((theta, phi, config.L, depth, len(profiles), fit.unit,
                         fit.v, fit.c_prime, fit.c, fit.a, fit.residual_rms))
    files = {
        "trajectories.csv": (
            ["seed", "L", "depth", "theta", "phi", "layer", "cut",
             "entropy_bits", "log_weight"], traj_rows),
        "profiles.csv": (
            ["theta", "phi", "L", "depth", "l", "S_mean_bits", "S_sem_bits",
             "n_traj"], profile_rows),
        "arcs.csv": (
            ["theta", "phi", "L", "depth", "n_traj", "unit", "v", "c_prime",
             "c", "a", "residual_rms"], arc_rows),
    }
    return files


def _entropy_task(packed):
    (p_idx, theta, phi, k, seed), L, depth, boundary = packed
    point = ProtocolPoint.at(theta, phi, math.pi / 4)
    rec = run_trajectory(point, L, depth, seed=seed, boundary=boundary,
                         track_history=False)
    return (p_idx, theta, phi, k, seed), rec.entropy_profile, rec.log_weight


def _run_coherent_info(config: ExperimentConfig):
    layout = make_layout(config.d, MAX_STATEVECTOR_D)
    rows = []
    for p_idx, (theta, phi, t) in enumerate(config.grid()):
        point = ProtocolPoint.at(theta, phi, t)
        seed = task_seed(config.master_seed, p_idx, 0)
        ic, err = coherent_information(point, layout, config.plan,
                                       config.n_samples, seed)
        rows.append((config.d, theta, phi, t, config.plan, config.n_samples,
                     ic, err))
    return {"coherent.csv": (
        ["d", "theta", "phi", "t", "plan", "n_samples", "I_c_bits", "std_err"],
        rows)}


def _run_ensemble(config: ExperimentConfig):
    layout = make_layout(config.d, MAX_STATEVECTOR_D)
    record_rows, kl_rows = [], []
    for p_idx, (theta, phi, t) in enumerate(config.grid()):
        point = ProtocolPoint.at(theta, phi, t)
        seed = task_seed(config.master_seed, p_idx, 0)
        if not point.projective:
            rng = np.random.default_rng(seed)
            records = [sample_record(point, layout, rng.integers(2 ** 63))
                       for _ in range(config.n_samples)]
            bloch = np.array([r.bloch for r in records])
        else:
            # projective fast path: one categorical draw over the rotated
            # amplitudes gives records and Bloch vectors together
            records = None
            from .statevector import rotated_entangled_state
            state = rotated_entangled_state(point, layout)
            amps = state.psi.reshape(-1, 2)
            probs = np.sum(np.abs(amps) ** 2, axis=1)
            rng = np.random.default_rng(seed)
            draws = rng.choice(len(probs), size=config.n_samples,
                               p=probs / probs.sum())
            a0, a1 = amps[draws, 0], amps[draws, 1]
            norm = np.abs(a0) ** 2 + np.abs(a1) ** 2
            cross = a0 * np.conj(a1)
            bloch = np.column_stack([2.0 * cross.real / norm,
                                     -2.0 * cross.imag / norm,
                                     (np.abs(a0) ** 2 - np.abs(a1) ** 2) / norm])
            a_plus = a0 + a1
            a_minus = a0 - a1
            p_pp = np.abs(a_plus) ** 2
            p_mm = np.abs(a_minus) ** 2
            p_pm = np.conj(a_plus) * a_minus
            sigma = p_pp + p_mm
            for i in range(config.n_samples):
                kappa = ((p_pp[i] - p_mm[i]) / sigma[i],
                         2 * abs(p_pm[i].imag) / sigma[i],
                         2 * abs(p_pm[i].real) / sigma[i])
                c = min(1.0, math.hypot(*kappa))
                i_s = 0.0 if c >= 1.0 else float(
                    -(0.5 * (1 + c)) * math.log2(0.5 * (1 + c))
                    - (0.5 * (1 - c)) * math.log2(0.5 * (1 - c)))
                # kx,ky,kz columns carry the signed Bloch export; the
                # sign-lossy kappa tuple enters C and I_s only
                record_rows.append(
                    (seed, config.d, theta, phi, t, float(p_pp[i]),
                     float(p_mm[i]), float(p_pm[i].real), float(p_pm[i].imag),
                     float(bloch[i, 0]), float(bloch[i, 1]), float(bloch[i, 2]),
                     c, i_s, float(np.log(sigma[i] / 2.0))))
        if records is not None:
            for r in records:
                record_rows.append(
                    (seed, config.d, theta, phi, t, r.P_pp, r.P_mm,
                     r.P_pm.real, r.P_pm.imag, r.bloch[0], r.bloch[1],
                     r.bloch[2], r.C, r.I_s, r.log_weight))
        if point.projective:
            # KL against the uniform sphere applies to the projected
            # (pure-state) ensemble only; weak records live inside the ball
            for order in config.orders:
                pix = pixelize(order)
                checkpoints = config.kl_checkpoints or (config.n_samples,)
                for n in checkpoints:
                    n = min(n, len(bloch))
                    counts = np.bincount(pix.assign(bloch[:n]),
                                         minlength=pix.n_patches)
                    d_val, d_norm = kl_from_counts(counts, pix.n_patches)
                    kl_rows.append((theta, phi, t, order, pix.n_patches, n,
                                    d_val, d_norm))
    return {
        "records.csv": (
            ["seed", "d", "theta", "phi", "t", "P_pp", "P_mm", "RePpm",
             "ImPpm", "kx", "ky", "kz", "C", "I_s", "logP"], record_rows),
        "kl.csv": (
            ["theta", "phi", "t", "order", "N", "samples", "D",
             "D_normalized"], kl_rows),
    }


def _run_floquet_scan(config: ExperimentConfig):
    spectrum_rows, summary_rows = [], []
    for theta, phi, t in config.grid():
        point = ProtocolPoint.at(theta, phi, t)
        fp = FloquetPoint.from_protocol(point)
        table = quasi_energies(fp, config.L_k)
        rho0 = steady_state_density(table)
        for i, k in enumerate(table.momenta):
            for b in range(2):
                spectrum_rows.append((fp.J, fp.phi, fp.J_d, fp.phi_d, float(k),
                                      float(table.eps_re[i, b]),
                                      float(table.eps_im[i, b])))
        try:
            g = fp.heff_field
            h, lam = g.real, g.imag
            label = heff_classify(h, lam)
        except ZeroDivisionError:
            h, lam, label = math.nan, math.nan, "undefined"
        summary_rows.append((fp.J, fp.phi, h, lam, label, rho0))
    return {
        "spectrum.csv": (
            ["J", "phi", "Jd", "phid", "k", "eps_re", "eps_im"], spectrum_rows),
        "floquet_summary.csv": (
            ["J", "phi", "h", "lambda", "label", "rho_0"], summary_rows),
    }


def _run_duality_table(config: ExperimentConfig):
    from .protocol import at_couplings, fold_first_octant, ising_coupling
    rows = []
    for theta, phi, t in config.grid():
        th, ph, _ = fold_first_octant(theta, phi)
        J, K = at_couplings(t, th)
        J_eff = ising_coupling(th)
        if is_projective(J_eff) or (J_eff == 0.0 and ph == 0.0):
            J_d, phi_d = math.nan, math.nan
        else:
            J_d, phi_d = kw_explicit(J_eff, ph)
        _, residual = is_self_dual(th, ph)
        rows.append((theta, phi, t, J, K, J_eff, J_d, phi_d, residual))
    return {"duality.csv": (
        ["theta", "phi", "t", "J", "K", "J_eff", "J_d", "phi_d",
         "self_dual_residual"], rows)}


def run(config: ExperimentConfig, threads: int = 1) -> RunManifest:
    """Execute a campaign; writes CSV data files and manifest.json."""
    report = validate(config)
    if not report.ok:
        raise CapacityError("; ".join(report.messages))
    t0 = time.time()
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.kind == "entropy_scan":
        files = _run_entropy_scan(config, threads)
    elif config.kind == "coherent_info":
        files = _run_coherent_info(config)
    elif config.kind == "ensemble":
        files = _run_ensemble(config)
    elif config.kind == "floquet_scan":
        files = _run_floquet_scan(config)
    elif config.kind == "duality_table":
        files = _run_duality_table(config)
    else:
        raise ConfigError(f"unknown kind {config.kind!r}")
    manifest = RunManifest(kind=config.kind, manifest_hash=config.manifest_hash(),
                           master_seed=config.master_seed, version=__version__,
                           config=config.canonical())
    for name, (header, rows) in files.items():
        extra = ()
        if name == "records.csv":
            from .statevector import BLOCH_CONVENTION
            extra = (f"bloch_convention: {BLOCH_CONVENTION}",)
        n = _write_csv(out_dir / name, header, rows, manifest.manifest_hash,
                       config.kind, config.master_seed, extra)
        manifest.files[name] = n
    manifest.wall_clock_s = round(time.time() - t0, 3)
    manifest.write(out_dir)
    return manifest


def list_recipes() -> list:
    """Names of the bundled desk-scale recipe configs."""
    from importlib import resources
    base = resources.files("codelearn") / "recipes"
    return sorted(p.name for p in base.iterdir() if p.name.endswith(".ini"))


def recipe_path(name: str) -> Path:
    from importlib import resources
    base = resources.files("codelearn") / "recipes"
    p = base / name
    if not p.is_file():
        raise ConfigError(f"unknown recipe {name!r}; run list-recipes")
    return Path(str(p))
