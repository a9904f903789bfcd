"""Experiment runner and service launcher.

`obsbox run <kind> --config file.json [--seed N] [--out DIR]` executes one
experiment and emits a report (stdout, plus files under --out). Reports embed
the fully resolved config, so re-running from an embedded config reproduces
the same bytes. `obsbox serve --port P` hosts the instrument session API.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ambiguity, doubleslit, observer, quantum, world
from .errors import ConfigurationError, ContractViolation, DomainError
from .rng import SplitMix64


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{name} must be an integer")
    return value


def _as_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{name} must be a number")
    return float(value)


def _default_world() -> dict:
    # 30 matching-width objects and 70 others, presented uniformly.
    objects = [
        {"id": i, "width_m": 1.0 if i < 30 else 2.0} for i in range(100)
    ]
    return {"objects": objects, "schedule": {"kind": "seeded-uniform", "seed": 7}}


def _session_parts(config: dict, seed):
    """Resolve a world-session config; returns parts plus the resolved dict."""
    world_doc = config.get("world") or _default_world()
    stick_doc = {"target_width_m": 1.0, "tolerance_m": 1e-6}
    stick_doc.update(config.get("stick", {}))
    schedule_doc = dict(world_doc.get("schedule", {"kind": "seeded-uniform"}))
    if seed is not None and schedule_doc.get("kind") == "seeded-uniform":
        schedule_doc["seed"] = seed
    world_doc = {"objects": world_doc["objects"], "schedule": schedule_doc}
    target_width = _as_float(stick_doc["target_width_m"], "target_width_m")
    tolerance = _as_float(stick_doc["tolerance_m"], "tolerance_m")
    stick_doc = {"target_width_m": target_width, "tolerance_m": tolerance}
    spec, schedule = world.load_world(
        world_doc, target_width=target_width, tolerance=tolerance
    )
    stick = observer.MeterStick(target_width=target_width, tolerance=tolerance)
    temperature = _as_float(config.get("temperature_K", 300.0), "temperature_K")
    delta_t = _as_float(config.get("delta_t_s", 1e-3), "delta_t_s")
    ticks = _as_int(config.get("ticks", 1000), "ticks")
    resolved = {
        "world": world.dump_world(spec, schedule),
        "stick": stick_doc,
        "temperature_K": temperature,
        "delta_t_s": delta_t,
        "ticks": ticks,
    }
    return spec, schedule, stick, temperature, delta_t, ticks, resolved


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8", newline="\n")


def _run_stream_session(config, seed):
    spec, schedule, stick, temperature, delta_t, ticks, resolved = _session_parts(
        config, seed
    )
    stream, ledger = observer.run_session(
        spec, schedule, stick, temperature, delta_t, ticks
    )
    return spec, stream, ledger, delta_t, resolved


def run_session_kind(config, seed, out):
    spec, stream, ledger, delta_t, resolved = _run_stream_session(config, seed)
    zeros, ones = stream.counts()
    if out:
        _write(out, "stream.jsonl", stream.to_jsonl())
        _write(
            out,
            "ledger.json",
            json.dumps(ledger.to_dict(delta_t), sort_keys=True, indent=2) + "\n",
        )
    return resolved, {
        "ticks": len(stream),
        "zeros": zeros,
        "ones": ones,
        "ledger": ledger.to_dict(delta_t),
    }


def run_derive_h(config, seed, out):
    temperature = _as_float(config.get("temperature_K", 310.0), "temperature_K")
    delta_t = _as_float(config.get("delta_t_s", 200e-15), "delta_t_s")
    exact_ln2 = bool(config.get("exact_ln2", False))
    action = observer.action_quantum(temperature, delta_t, exact_ln2=exact_ln2)
    ratio = action / observer.PLANCK_H
    print(f"action_quantum_Js = {action!r}")
    print(f"planck_ratio = {ratio!r}")
    resolved = {
        "temperature_K": temperature,
        "delta_t_s": delta_t,
        "exact_ln2": exact_ln2,
    }
    return resolved, {"action_quantum_Js": action, "planck_ratio": ratio}


def run_born(config, seed, out):
    spec, stream, ledger, delta_t, resolved = _run_stream_session(config, seed)
    est = quantum.born_estimate(stream)
    alphas = quantum.infer_amplitudes(est)
    desc = quantum.QuantumDescription(
        alphas=alphas,
        omegas=np.zeros(alphas.size),
        thetas=np.zeros(alphas.size),
    )
    if out:
        _write(out, "stream.jsonl", stream.to_jsonl())
        _write(
            out,
            "description.json",
            json.dumps(desc.to_dict(), sort_keys=True, indent=2) + "\n",
        )
    return resolved, {
        "estimate": est.to_dict(),
        "alphas": [float(a) for a in alphas],
        "matching_objects": spec.n_matching,
        "other_objects": spec.n_other,
    }


def run_surprise(config, seed, out):
    if "prefix" in config:
        try:
            prefix = [int(b) for b in config["prefix"]]
        except (TypeError, ValueError):
            raise ConfigurationError("prefix must be a list of bits")
        if any(b not in (0, 1) for b in prefix):
            raise ConfigurationError("prefix entries must be 0 or 1")
        # Echo generation parameters if present so a report's embedded
        # config resolves to itself on a re-run.
        resolved = {
            key: config[key] for key in ("prefix_length", "seed") if key in config
        }
        resolved["prefix"] = prefix
    else:
        length = _as_int(config.get("prefix_length", 100), "prefix_length")
        if length < 1:
            raise ConfigurationError("prefix_length must be at least 1")
        prefix_seed = seed if seed is not None else _as_int(config.get("seed", 0), "seed")
        gen = SplitMix64(prefix_seed)
        prefix = [gen.next_bit() for _ in range(length)]
        resolved = {"prefix_length": length, "seed": prefix_seed, "prefix": prefix}
    box_a, box_b = ambiguity.surprise_pair(prefix)
    n = len(prefix)
    out_a = box_a.run(n + 1)
    out_b = box_b.run(n + 1)
    agree = int(np.sum(np.cumprod(out_a == out_b)))
    if out:
        _write(out, "box_a.json", json.dumps(box_a.to_dict(), sort_keys=True) + "\n")
        _write(out, "box_b.json", json.dumps(box_b.to_dict(), sort_keys=True) + "\n")
    return resolved, {
        "prefix_length": n,
        "states_a": box_a.n_states,
        "states_b": box_b.n_states,
        "agree_first": agree,
        "differs_at": n,
    }


def run_substitution(config, seed, out):
    spec, stream, ledger, delta_t, resolved = _run_stream_session(config, seed)
    stick = observer.MeterStick(
        target_width=resolved["stick"]["target_width_m"],
        tolerance=resolved["stick"]["tolerance_m"],
    )
    h1, h2 = ambiguity.substitution_pair(stream, spec)
    bits = stream.bits
    match_1 = bool(np.array_equal(h1.replay(stick), bits))
    match_2 = bool(np.array_equal(h2.replay(stick), bits))
    distinct = int(np.sum(h1.object_ids() != h2.object_ids()))
    if out:
        _write(out, "stream.jsonl", stream.to_jsonl())
        _write(out, "history_1.jsonl", h1.to_jsonl())
        _write(out, "history_2.jsonl", h2.to_jsonl())
    return resolved, {
        "ticks": len(stream),
        "replay_match_1": match_1,
        "replay_match_2": match_2,
        "identity_differences": distinct,
    }


def run_reversal(config, seed, out):
    spec, stream, ledger, delta_t, resolved = _run_stream_session(config, seed)
    counts = ambiguity.reversal_counts(stream)
    if out:
        _write(out, "stream.jsonl", stream.to_jsonl())
    return resolved, counts.to_dict()


def _slit_parts(config: dict, extras: tuple):
    payload = dict(config)
    found = {}
    for key in extras:
        if key in payload:
            found[key] = payload.pop(key)
    cfg = doubleslit.SlitConfig.from_dict(payload)
    return cfg, found


def run_doubleslit_pattern(config, seed, out):
    cfg, extras = _slit_parts(config, ("grid",))
    grid = _as_int(extras.get("grid", doubleslit.GRID_POINTS), "grid")
    xs, dens = doubleslit.pattern_table(cfg, grid)
    dx = xs[1] - xs[0]
    integral = float(np.trapezoid(dens, dx=dx))
    spacing = doubleslit.fringe_spacing(cfg) if cfg.coherent else None
    if out:
        _write(out, "pattern.csv", doubleslit.pattern_csv(cfg, grid))
    resolved = {**cfg.to_dict(), "grid": grid}
    return resolved, {
        "grid": grid,
        "integral": integral,
        "fringe_spacing_m": spacing,
        "peak_intensity": float(np.max(dens)),
        "source": doubleslit.source_representation(cfg).to_dict(),
    }


def run_doubleslit_sample(config, seed, out):
    cfg, extras = _slit_parts(config, ("count", "seed", "bin_count"))
    count = _as_int(extras.get("count", 100_000), "count")
    sample_seed = seed if seed is not None else _as_int(extras.get("seed", 0), "seed")
    bin_count = _as_int(extras.get("bin_count", 64), "bin_count")
    events = doubleslit.sample_events(cfg, count, sample_seed)
    vis = None
    if len(events) >= doubleslit.MIN_VISIBILITY_EVENTS:
        vis = doubleslit.visibility(events, bin_count, cfg)
    if out:
        _write(out, "events.jsonl", events.to_jsonl())
    resolved = {
        **cfg.to_dict(),
        "count": count,
        "seed": sample_seed,
        "bin_count": bin_count,
    }
    return resolved, {
        "count": count,
        "seed": sample_seed,
        "bin_count": bin_count,
        "visibility": vis,
        "mean_x_m": float(np.mean(events.x)) if len(events) else None,
        "source": doubleslit.source_representation(cfg).to_dict(),
    }


RUNNERS = {
    "session": run_session_kind,
    "derive-h": run_derive_h,
    "born": run_born,
    "surprise": run_surprise,
    "substitution": run_substitution,
    "reversal": run_reversal,
    "doubleslit-pattern": run_doubleslit_pattern,
    "doubleslit-sample": run_doubleslit_sample,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsbox",
        description="Observer/black-box partition experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment kind")
    runp.add_argument("kind", choices=sorted(RUNNERS))
    runp.add_argument("--config", type=Path, default=None, help="JSON config file")
    runp.add_argument("--seed", type=int, default=None, help="override the seed")
    runp.add_argument("--out", type=Path, default=None, help="output directory")

    servep = sub.add_parser("serve", help="host the instrument session API")
    servep.add_argument("--host", default="127.0.0.1")
    servep.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    return data


def cmd_run(args) -> int:
    config = _load_config(args.config)
    out = args.out
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    resolved, results = RUNNERS[args.kind](config, args.seed, out)
    report = {"kind": args.kind, "config": resolved, "results": results}
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out is not None:
        _write(out, "report.json", text)
        print(f"wrote {args.kind} report to {out / 'report.json'}")
    else:
        print(text, end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_serve(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ContractViolation, DomainError) as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
