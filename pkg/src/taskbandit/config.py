"""Experiment configuration: YAML document -> validated, fully resolved run.

The schema is strict: unknown sections or keys fail, missing referenced files
fail at load, and the seed is mandatory. The resolved scalar view (defaults
filled in, referenced files replaced by content digests) is hashed; the hash
gates checkpoint resume. Schema reference lives in the README.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .runio import read_embeddings, read_profile_table
from .selector import STRATEGY_NAMES, make_strategy
from .simulator import LinearDrift, PiecewiseDrift, RunConfig

__all__ = ["ExperimentConfig", "load_config", "parse_config_text", "rehash"]

_STRATEGY_OVERRIDES = ("forget", "mix", "sample_posterior", "p_star")


@dataclass(frozen=True)
class ExperimentConfig:
    run: RunConfig
    checkpoint_interval: int
    tau: tuple[float, ...]
    beta: tuple[float, ...]
    config_hash: str
    resolved: dict


def load_config(
    path: Path, seed_override: int | None = None
) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, base_dir=path.parent, seed_override=seed_override)


def parse_config_text(
    text: str, base_dir: Path | None = None, seed_override: int | None = None
) -> ExperimentConfig:
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping of sections")

    _reject_unknown(raw, ("run", "strategy", "plugin", "profile", "learner",
                          "priors", "output"), where="config")

    run_sec = _section(raw, "run", required=True)
    _reject_unknown(run_sec, ("tasks", "steps", "batch_size", "rollouts", "seed"),
                    where="run")
    tasks = _require_int(run_sec, "tasks", "run")
    steps = _require_int(run_sec, "steps", "run")
    batch_size = _require_int(run_sec, "batch_size", "run")
    rollouts = _require_int(run_sec, "rollouts", "run")
    if "seed" not in run_sec:
        raise ConfigError("run.seed is mandatory")
    seed = _require_int(run_sec, "seed", "run")
    if seed_override is not None:
        seed = int(seed_override)

    strat_sec = _section(raw, "strategy", required=True)
    _reject_unknown(strat_sec, ("name",) + _STRATEGY_OVERRIDES, where="strategy")
    name = strat_sec.get("name")
    if name not in STRATEGY_NAMES:
        raise ConfigError(
            f"strategy.name must be one of {list(STRATEGY_NAMES)}, got {name!r}"
        )
    preset = make_strategy(name, batch_size=batch_size, seed=seed, rollouts=rollouts)
    forget = _opt_float(strat_sec, "forget", "strategy", preset.update.forget)
    mix = _opt_float(strat_sec, "mix", "strategy", preset.update.mix)
    sample = _opt_bool(
        strat_sec, "sample_posterior", "strategy", preset.selector.sample_posterior
    )
    p_star = _opt_float(strat_sec, "p_star", "strategy", preset.selector.p_star)

    plug_sec = _section(raw, "plugin", required=False)
    _reject_unknown(plug_sec, ("kind", "gamma", "epsilon", "temperature",
                               "embeddings"), where="plugin")
    plugin = plug_sec.get("kind", "interpolation")
    if plugin not in ("interpolation", "kernel"):
        raise ConfigError(f"plugin.kind must be interpolation or kernel, got {plugin!r}")
    gamma = _opt_float(plug_sec, "gamma", "plugin", 0.9)
    epsilon = _opt_float(plug_sec, "epsilon", "plugin", 1e-6)
    temperature = _opt_float(plug_sec, "temperature", "plugin", 1.0)
    embeddings = None
    emb_digest = None
    if "embeddings" in plug_sec:
        emb_path = _resolve_file(base_dir, plug_sec["embeddings"], "plugin.embeddings")
        embeddings = read_embeddings(emb_path)
        emb_digest = _file_digest(emb_path)
    if plugin == "kernel" and embeddings is None:
        raise ConfigError("plugin.kind kernel requires plugin.embeddings")

    prof_sec = _section(raw, "profile", required=False)
    _reject_unknown(prof_sec, ("kind", "path", "pinned_zero", "pinned_one"),
                    where="profile")
    prof_kind = prof_sec.get("kind", "generated")
    if prof_kind not in ("generated", "file"):
        raise ConfigError(f"profile.kind must be generated or file, got {prof_kind!r}")
    pinned_zero = _opt_float(prof_sec, "pinned_zero", "profile",
                             0.3 if prof_kind == "generated" else 0.0)
    pinned_one = _opt_float(prof_sec, "pinned_one", "profile",
                            0.2 if prof_kind == "generated" else 0.0)
    profile_weak = profile_strong = None
    prof_digest = None
    if prof_kind == "file":
        if "path" not in prof_sec:
            raise ConfigError("profile.kind file requires profile.path")
        prof_path = _resolve_file(base_dir, prof_sec["path"], "profile.path")
        table = read_profile_table(prof_path)
        if table.task_count != tasks:
            raise ConfigError(
                f"profile file has {table.task_count} rows, run.tasks is {tasks}"
            )
        profile_weak, profile_strong = table.p_weak, table.p_strong
        prof_digest = _file_digest(prof_path)
    elif "path" in prof_sec:
        raise ConfigError("profile.path only applies when profile.kind is file")

    learn_sec = _section(raw, "learner", required=False)
    _reject_unknown(learn_sec, ("link", "drift", "noise_sd", "slope"), where="learner")
    link = learn_sec.get("link", "interpolation")
    if link not in ("interpolation", "logistic"):
        raise ConfigError(f"learner.link must be interpolation or logistic, got {link!r}")
    noise_sd = _opt_float(learn_sec, "noise_sd", "learner", 0.0)
    slope = _opt_float(learn_sec, "slope", "learner", 6.0)
    drift, drift_resolved = _parse_drift(learn_sec.get("drift"), steps)

    prior_sec = _section(raw, "priors", required=False)
    _reject_unknown(prior_sec, ("alpha", "beta", "warm_start_weight",
                                "warm_start_mu"), where="priors")
    alpha_base = _opt_float(prior_sec, "alpha", "priors", 1.0)
    beta_base = _opt_float(prior_sec, "beta", "priors", 1.0)
    warm_weight = _opt_float(prior_sec, "warm_start_weight", "priors", 0.0)
    warm_mu = _opt_float(prior_sec, "warm_start_mu", "priors", 0.5)

    out_sec = _section(raw, "output", required=False)
    _reject_unknown(out_sec, ("checkpoint_interval", "tau", "beta"), where="output")
    interval = _opt_int(out_sec, "checkpoint_interval", "output", 25)
    if interval < 0:
        raise ConfigError("output.checkpoint_interval must be >= 0")
    tau = _float_list(out_sec, "tau", "output", (0.5,))
    beta = _float_list(out_sec, "beta", "output", (0.5,))

    try:
        run = RunConfig(
            task_count=tasks,
            steps=steps,
            batch_size=batch_size,
            rollouts=rollouts,
            strategy_name=name,
            mode=preset.mode,
            forget=forget,
            mix=mix,
            sample_posterior=sample,
            p_star=p_star,
            seed=seed,
            plugin=plugin,
            gamma=gamma,
            epsilon=epsilon,
            temperature=temperature,
            embeddings=embeddings,
            profile_weak=profile_weak,
            profile_strong=profile_strong,
            pinned_zero_frac=pinned_zero,
            pinned_one_frac=pinned_one,
            link=link,
            drift=drift,
            noise_sd=noise_sd,
            slope=slope,
            alpha_base=alpha_base,
            beta_base=beta_base,
            warm_start_weight=warm_weight,
            warm_start_mu=warm_mu,
        )
    except (ConfigError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    _embeddings_count_check(run)

    resolved = {
        "run": {"tasks": tasks, "steps": steps, "batch_size": batch_size,
                "rollouts": rollouts, "seed": seed},
        "strategy": {"name": name, "forget": forget, "mix": mix,
                     "sample_posterior": sample, "p_star": p_star},
        "plugin": {"kind": plugin, "gamma": gamma, "epsilon": epsilon,
                   "temperature": temperature, "embeddings_sha256": emb_digest},
        "profile": {"kind": prof_kind, "pinned_zero": pinned_zero,
                    "pinned_one": pinned_one, "file_sha256": prof_digest},
        "learner": {"link": link, "drift": drift_resolved, "noise_sd": noise_sd,
                    "slope": slope},
        "priors": {"alpha": alpha_base, "beta": beta_base,
                   "warm_start_weight": warm_weight, "warm_start_mu": warm_mu},
        "output": {"checkpoint_interval": interval, "tau": list(tau),
                   "beta": list(beta)},
    }
    digest = hashlib.sha256(
        json.dumps(resolved, sort_keys=True).encode()
    ).hexdigest()
    return ExperimentConfig(
        run=run,
        checkpoint_interval=interval,
        tau=tau,
        beta=beta,
        config_hash=digest,
        resolved=resolved,
    )


def rehash(exp: ExperimentConfig, run: RunConfig) -> ExperimentConfig:
    """Rebuild an experiment around a modified run, refreshing the hash.

    Covers the knobs a sweep may override: forget, mix, sample_posterior,
    seed. Anything else must go through a fresh parse.
    """
    resolved = copy.deepcopy(exp.resolved)
    resolved["run"]["seed"] = run.seed
    resolved["strategy"]["forget"] = run.forget
    resolved["strategy"]["mix"] = run.mix
    resolved["strategy"]["sample_posterior"] = run.sample_posterior
    digest = hashlib.sha256(
        json.dumps(resolved, sort_keys=True).encode()
    ).hexdigest()
    return ExperimentConfig(
        run=run,
        checkpoint_interval=exp.checkpoint_interval,
        tau=exp.tau,
        beta=exp.beta,
        config_hash=digest,
        resolved=resolved,
    )


def _parse_drift(node, steps: int):
    if node is None:
        resolved = {"kind": "linear", "start": 0.0, "end": 1.0,
                    "steps": max(steps, 1)}
        return LinearDrift(0.0, 1.0, max(steps, 1)), resolved
    if not isinstance(node, dict):
        raise ConfigError("learner.drift must be a mapping")
    kind = node.get("kind")
    if kind == "linear":
        _reject_unknown(node, ("kind", "start", "end", "steps"), where="learner.drift")
        start = _opt_float(node, "start", "learner.drift", 0.0)
        end = _opt_float(node, "end", "learner.drift", 1.0)
        span = _opt_int(node, "steps", "learner.drift", max(steps, 1))
        try:
            drift = LinearDrift(start, end, span)
        except ConfigError as exc:
            raise ConfigError(f"learner.drift: {exc}") from None
        return drift, {"kind": "linear", "start": start, "end": end, "steps": span}
    if kind == "piecewise":
        _reject_unknown(node, ("kind", "breaks", "values"), where="learner.drift")
        breaks = node.get("breaks")
        values = node.get("values")
        if not isinstance(breaks, list) or not isinstance(values, list):
            raise ConfigError("learner.drift piecewise needs breaks and values lists")
        try:
            drift = PiecewiseDrift(
                tuple(int(b) for b in breaks), tuple(float(v) for v in values)
            )
        except (ConfigError, TypeError, ValueError) as exc:
            raise ConfigError(f"learner.drift: {exc}") from None
        return drift, {"kind": "piecewise", "breaks": [int(b) for b in breaks],
                       "values": [float(v) for v in values]}
    raise ConfigError(
        f"learner.drift.kind must be linear or piecewise, got {kind!r}"
    )


def _section(raw: dict, name: str, required: bool) -> dict:
    node = raw.get(name)
    if node is None:
        if required:
            raise ConfigError(f"missing required section {name!r}")
        return {}
    if not isinstance(node, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return node


def _reject_unknown(node: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key in {where}: {unknown[0]!r}")


def _require_int(node: dict, key: str, where: str) -> int:
    if key not in node:
        raise ConfigError(f"missing required key {where}.{key}")
    return _coerce_int(node[key], f"{where}.{key}")


def _opt_int(node: dict, key: str, where: str, default: int) -> int:
    if key not in node:
        return default
    return _coerce_int(node[key], f"{where}.{key}")


def _coerce_int(value, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{label} must be an integer, got {value!r}")
    return value


def _opt_float(node: dict, key: str, where: str, default: float) -> float:
    if key not in node:
        return float(default)
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _opt_bool(node: dict, key: str, where: str, default: bool) -> bool:
    if key not in node:
        return default
    value = node[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be true or false, got {value!r}")
    return value


def _float_list(node: dict, key: str, where: str, default: tuple) -> tuple:
    if key not in node:
        return tuple(default)
    value = node[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}.{key} must be a non-empty list of numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where}.{key} must contain numbers, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _resolve_file(base_dir: Path, value, label: str) -> Path:
    if not isinstance(value, str):
        raise ConfigError(f"{label} must be a path string, got {value!r}")
    path = Path(value)
    if not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"{label}: no such file: {path}")
    return path


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _embeddings_count_check(run: RunConfig) -> None:
    if run.embeddings is not None and run.embeddings.shape[0] != run.task_count:
        raise ConfigError(
            f"embeddings file has {run.embeddings.shape[0]} rows,"
            f" run.tasks is {run.task_count}"
        )
