"""Command-line interface: ``ostbc-relay {run,slope,validate,selftest}``.

Exit codes: 0 success, 1 configuration or input error, 2 numerical
cross-check failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analytic import (
    SnrModel,
    db_to_linear,
    diversity_order,
    error_rates,
    error_rates_from_mgf,
    mgf_asymptotic_q1,
    slope_estimate,
)
from .config import dump_spec, load_spec
from .errors import ConfigError, CrossCheckFailure, InsufficientData, Unsupported
from .montecarlo import StopRule, run_campaign

SCHEMA = 1
COLUMNS = ("snr_db", "mode", "curve", "constellation", "n_p", "metric", "ber", "ser", "ci95", "trials")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _num(x):
    return repr(float(x))


def _metric(const):
    return "ber" if const.order == 2 else "ser"


def _n_p_label(cfg):
    return str(cfg.n_p1) if cfg.n_p1 == cfg.n_p2 else f"{cfg.n_p1}/{cfg.n_p2}"


def _record(snr_db, mode, cfg, ber, ser, ci95, trials):
    const = cfg.constellation
    return {
        "snr_db": _num(snr_db),
        "mode": mode,
        "curve": f"{mode}:{const.name}:np={_n_p_label(cfg)}",
        "constellation": const.name,
        "n_p": _n_p_label(cfg),
        "metric": _metric(const),
        "ber": _num(ber),
        "ser": _num(ser),
        "ci95": _num(ci95),
        "trials": str(int(trials)),
    }


def _sim_records(spec, cfg, mode, log):
    sim_mode = "perfect" if mode == "sim-perfect-csi" else "estimated"
    stop = StopRule(spec.max_trials, spec.min_errors)
    stats = run_campaign(cfg, spec.snr_db, stop, seed=spec.seed, mode=sim_mode, decoder=spec.decoder,
                         user=spec.user, workers=spec.workers)
    out = []
    for st in stats:
        ci = st.ci95 if _metric(cfg.constellation) == "ber" else st.ser_ci95
        out.append(_record(st.snr_db, mode, cfg, st.ber, st.ser, ci, st.trials))
        log(f"  {mode} {cfg.constellation.name} np={_n_p_label(cfg)} {st.snr_db:g} dB: "
            f"ber={st.ber:.3e} ser={st.ser:.3e} trials={st.trials}")
    return out


def _analytic_records(spec, cfg, mode, log):
    model = SnrModel.from_config(cfg, user=spec.user, perfect=(mode == "analytic-perfect-csi"))
    out = []
    if mode == "analytic-asymptotic" and model.q != 1:
        log(f"  {mode}: skipped, needs min(Nr, Ni) = 1")
        return out
    for snr_db in spec.snr_db:
        m = model.with_gamma_bar(float(db_to_linear(snr_db)))
        if mode == "analytic-asymptotic":
            ber, ser = error_rates_from_mgf(lambda s, m=m: mgf_asymptotic_q1(m, s), cfg.constellation)
        else:
            ber, ser = error_rates(m, cfg.constellation)
        out.append(_record(snr_db, mode, cfg, ber, ser, math.nan, 0))
    log(f"  {mode} {cfg.constellation.name} np={_n_p_label(cfg)}: {len(out)} points")
    return out


def run_spec(spec, log=lambda msg: None):
    """All result records of a campaign, in a fixed order."""
    records = []
    for cfg in spec.scenarios:
        for mode in spec.modes:
            if mode.startswith("sim-"):
                records += _sim_records(spec, cfg, mode, log)
            else:
                records += _analytic_records(spec, cfg, mode, log)
    return records


def format_records(records, fmt):
    buf = io.StringIO()
    if fmt == "jsonl":
        buf.write(json.dumps({"schema": SCHEMA, "columns": list(COLUMNS)}) + "\n")
        for r in records:
            buf.write(json.dumps(r) + "\n")
        return buf.getvalue()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(records)
    return buf.getvalue()


def read_records(path):
    """Load a result file written by ``run`` (CSV or JSON lines)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise InsufficientData(f"{path}: empty result file")
    if lines[0].startswith("{"):
        return [json.loads(line) for line in lines[1:] if line.strip()]
    rows = [line for line in lines if not line.startswith("#")]
    return list(csv.DictReader(rows))


def manifest_path(out_path):
    return f"{out_path}.manifest.ini"


def cmd_run(args):
    out, err = sys.stdout, sys.stderr
    spec = load_spec(args.spec).with_overrides(seed=args.seed, workers=args.workers, out=args.out, fmt=args.format)
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=err))
    records = run_spec(spec, log)
    path = Path(spec.out_path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_records(records, spec.out_format), encoding="utf-8")
    Path(manifest_path(spec.out_path)).write_text(dump_spec(spec), encoding="utf-8")
    print(f"wrote {len(records)} records to {spec.out_path}", file=out)
    return EXIT_OK


def _theory_for(manifest, curve_key):
    try:
        spec = load_spec(manifest)
    except ConfigError:
        return None
    for cfg in spec.scenarios:
        if curve_key.endswith(f":{cfg.constellation.name}:np={_n_p_label(cfg)}"):
            perfect = curve_key.startswith(("sim-perfect-csi", "analytic-perfect-csi"))
            try:
                return diversity_order(SnrModel.from_config(cfg, spec.user, perfect=perfect))
            except Unsupported:
                return None
    return None


def cmd_slope(args):
    out, err = sys.stdout, sys.stderr
    records = read_records(args.results)
    curves = {}
    for r in records:
        curves.setdefault(r["curve"], []).append(r)
    manifest = manifest_path(args.results)
    have_manifest = os.path.exists(manifest)
    if not curves:
        raise InsufficientData("no curves in the result file")
    for key, rows in curves.items():
        metric = rows[0].get("metric", "ber")
        pts = [(float(r["snr_db"]), float(r[metric])) for r in rows]
        pts = [(x, y) for x, y in pts if y > 0 and math.isfinite(y)]
        if len(pts) < 2:
            print(f"{key}: insufficient data", file=out)
            continue
        slope = slope_estimate([p[0] for p in pts], [p[1] for p in pts], k=args.points)
        line = f"{key}: slope={slope:.3f}"
        theory = _theory_for(manifest, key) if have_manifest else None
        if theory is not None:
            line += f" theory={theory.order}" + (" (extrapolated)" if theory.extrapolated else "")
        print(line, file=out)
    return EXIT_OK


def cmd_validate(args):
    out, err = sys.stdout, sys.stderr
    spec = load_spec(args.spec)
    print(
        f"ok: {len(spec.scenarios)} scenario(s), {len(spec.snr_db)} SNR point(s), modes {', '.join(spec.modes)}",
        file=out,
    )
    return EXIT_OK


def cmd_selftest(args):
    out, err = sys.stdout, sys.stderr
    from .selftest import run_selftest

    return run_selftest(out)


def build_parser():
    p = argparse.ArgumentParser(prog="ostbc-relay", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a campaign and write result records")
    run.add_argument("--spec", required=True, help="campaign spec file")
    run.add_argument("--seed", type=int, help="override the spec's seed")
    run.add_argument("--workers", type=int, help="worker processes for simulation")
    run.add_argument("--out", help="override the output path")
    run.add_argument("--format", choices=("csv", "jsonl"), help="override the output format")
    run.add_argument("--quiet", action="store_true", help="no progress on stderr")
    run.set_defaults(func=cmd_run)

    slope = sub.add_parser("slope", help="high-SNR slope of each curve in a result file")
    slope.add_argument("results", help="result file written by run")
    slope.add_argument("--points", type=int, default=2, help="number of top SNR points to fit (default 2)")
    slope.set_defaults(func=cmd_slope)

    val = sub.add_parser("validate", help="check a spec file without running it")
    val.add_argument("--spec", required=True)
    val.set_defaults(func=cmd_validate)

    st = sub.add_parser("selftest", help="run the built-in numerical oracle checks")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CrossCheckFailure as exc:
        print(f"numerical cross-check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
