"""Command line front end for the toolkit.

One executable, one subcommand per operation.  Every parameter can come
from (in order of precedence) a command line flag, an environment
variable LOEWNER_<KEY>, or a flat key=value config file passed with
--config; defaults apply last.  Numeric output is fixed at 12
significant digits and files are written atomically, so identical
configurations produce byte-identical outputs.

Exit codes: 0 success, 1 a checked bound was violated, 2 configuration
error, 3 numerical failure.
"""

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__


class ConfigError(Exception):
    pass


def _fmt(v):
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def _parse_angle(text):
    t = str(text).strip().lower().replace("π", "pi")
    if t.endswith("pi"):
        head = t[:-2].strip()
        try:
            return (float(head) if head else 1.0) * math.pi
        except ValueError:
            raise ConfigError(f"bad angle: {text!r}")
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"bad angle: {text!r}")


def _parse_angle_pairs(text):
    pairs = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        halves = item.split(":")
        if len(halves) != 2:
            raise ConfigError(f"bad angle pair: {item!r}")
        pairs.append((_parse_angle(halves[0]), _parse_angle(halves[1])))
    if not pairs:
        raise ConfigError("empty angle list")
    return pairs


def _parse_floats(text):
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad number list: {text!r}")
    if not vals:
        raise ConfigError("empty number list")
    return vals


def _parse_verts(text):
    items = str(text).replace(";", ",").split(",")
    try:
        return [complex(x.strip()) for x in items if x.strip()]
    except ValueError:
        raise ConfigError(f"bad vertex list: {text!r}")


_CONVERT = {
    "str": lambda s: str(s),
    "int": lambda s: int(str(s), 10),
    "float": lambda s: float(s),
    "angle": _parse_angle,
    "angle_pairs": _parse_angle_pairs,
    "floats": _parse_floats,
    "verts": _parse_verts,
    "flag": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"),
}

_GLOBALS = {
    "seed": ("int", 0),
    "threads": ("int", None),
    "out": ("str", None),
    "gnuplot": ("flag", False),
}

# per-command parameter tables: name -> (type, default); _REQUIRED marks
# parameters with no usable default
_REQUIRED = object()

_PARAMS = {
    "weld": {
        "slit": ("str", None),
        "base": ("float", 0.0),
        "verts": ("verts", None),
        "max-cap-step": ("float", None),
        "max-seg-len": ("float", None),
    },
    "trace": {
        "driving": ("str", _REQUIRED),
        "dt-max": ("float", None),
    },
    "hcap": {
        "method": ("str", _REQUIRED),
        "alpha": ("angle", None),
        "length": ("float", None),
        "slit": ("str", None),
        "base": ("float", 0.0),
        "verts": ("verts", None),
        "n": ("int", 100000),
        "max-cap-step": ("float", None),
        "max-seg-len": ("float", None),
    },
    "branch-sweep": {
        "alphas": ("angle_pairs", _REQUIRED),
        "b1": ("float", _REQUIRED),
        "b2": ("float", _REQUIRED),
    },
    "disjoint-sum": {
        "alpha1": ("angle", 0.5 * math.pi),
        "alpha2": ("angle", 0.5 * math.pi),
        "base1": ("float", -5.0),
        "base2": ("float", 5.0),
        "b1": ("float", 1.0),
        "b2": ("float", 0.5),
        "times": ("floats", [1.0, 0.1, 0.01, 0.001]),
    },
    "counterexample": {
        "eps": ("float", _REQUIRED),
        "levels": ("int", 8),
        "times": ("floats", None),
    },
    "bridge-check": {
        "shape": ("str", _REQUIRED),
        "times": ("floats", [0.01, 0.003, 0.001]),
    },
    "joint-param": {
        "kink-eps": ("float", None),
        "slope": ("float", 0.4),
        "n": ("int", 20),
        "n-grid": ("int", 40),
        "s-max": ("float", 1.0),
        "base1": ("float", -10.0),
        "len1": ("float", 1.2),
        "base2": ("float", 10.0),
        "len2": ("float", 1.5),
    },
    "lambda-check": {
        "t0": ("float", 0.0),
        "deltas": ("floats", [0.01, 0.003, 0.001]),
        "base1": ("float", 0.0),
        "len1": ("float", 0.9),
        "base2": ("float", 1.0),
        "len2": ("float", 1.0),
    },
}

_EXPERIMENTS = ("branch-sweep", "disjoint-sum", "counterexample",
                "bridge-check", "joint-param", "lambda-check")


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str = None


def _read_config_file(path):
    cfg = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln in fh:
                ln = ln.strip()
                if not ln or ln.startswith("#"):
                    continue
                if "=" not in ln:
                    raise ConfigError(f"bad config line: {ln!r}")
                k, v = ln.split("=", 1)
                cfg[k.strip()] = v.strip()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    known = set(_GLOBALS)
    for tbl in _PARAMS.values():
        known.update(tbl)
    for k in cfg:
        if k not in known:
            raise ConfigError(f"unknown config key: {k!r}")
    return cfg


def _resolve(name, spec, flags, filecfg):
    typ, default = spec
    raw = flags.get(name.replace("-", "_"))
    if raw is None:
        raw = os.environ.get("LOEWNER_" + name.upper().replace("-", "_"))
    if raw is None:
        raw = filecfg.get(name)
    if raw is None:
        if default is _REQUIRED:
            raise ConfigError(f"missing required parameter: --{name}")
        return default
    if isinstance(raw, str):
        try:
            return _CONVERT[typ](raw)
        except ConfigError:
            raise
        except (ValueError, TypeError):
            raise ConfigError(f"bad value for --{name}: {raw!r}")
    return raw


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".loewner-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _header_comment(cfg):
    parts = [f"# loewner {__version__} command={cfg.command} seed={cfg.seed}"]
    for k in sorted(cfg.parameters):
        v = cfg.parameters[k]
        if v is None:
            continue
        if isinstance(v, (list, tuple)):
            txt = ",".join(
                ":".join(_fmt(y) for y in x) if isinstance(x, tuple) else _fmt(x)
                for x in v
            )
        else:
            txt = _fmt(v)
        parts.append(f"{k}={txt}")
    return " ".join(parts)


def _write_table(cfg, header, rows):
    lines = [_header_comment(cfg), header]
    for r in rows:
        lines.append(",".join("%.12g" % x for x in r))
    text = "\n".join(lines) + "\n"
    if cfg.output_path:
        _atomic_write(cfg.output_path, text)
    else:
        sys.stdout.write(text)


def _write_json(cfg, payload):
    if not cfg.output_path:
        return
    root, _ = os.path.splitext(cfg.output_path)
    doc = {
        "tool": f"loewner {__version__}",
        "command": cfg.command,
        "seed": cfg.seed,
        "parameters": {k: v for k, v in cfg.parameters.items() if v is not None},
        **payload,
    }
    _atomic_write(root + ".json", json.dumps(doc, indent=2, sort_keys=True,
                                             default=str) + "\n")


def _write_gnuplot(cfg, columns):
    if not (cfg.parameters.get("gnuplot") and cfg.output_path):
        return
    lines = [
        f"# loewner {__version__} plot script for {os.path.basename(cfg.output_path)}",
        'set datafile separator ","',
        "set key autotitle columnhead",
        f'plot "{os.path.basename(cfg.output_path)}" using {columns} with linespoints',
    ]
    _atomic_write(cfg.output_path + ".gp", "\n".join(lines) + "\n")


def _report_checks(checks):
    ok = True
    for name in sorted(checks):
        passed = bool(checks[name])
        ok = ok and passed
        print(f"check {name}: {'PASS' if passed else 'FAIL'}")
    return 0 if ok else 1


def _load_slit(p):
    from .geom import HALF_PLANE, PolylineSlit, read_polyline

    if p.get("slit"):
        try:
            return read_polyline(p["slit"])
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read slit: {e}")
    if p.get("verts") is not None:
        try:
            return PolylineSlit(p.get("base", 0.0), p["verts"], chart=HALF_PLANE)
        except ValueError as e:
            raise ConfigError(f"bad slit: {e}")
    raise ConfigError("need --slit FILE or --verts LIST")


def _vertical(base, length):
    from .geom import PolylineSlit

    try:
        return PolylineSlit(base, (complex(base, length),))
    except ValueError as e:
        raise ConfigError(f"bad slit: {e}")


def _bridge_shape(name):
    """Built-in disk hulls attached at 1 for the bridge check."""
    from .geom import DISK, Hull, PolylineSlit

    name = str(name).strip().lower()
    if name == "radial":
        return Hull((PolylineSlit(1.0 + 0.0j, (0.55 + 0.0j,), chart=DISK),))
    if name == "tilted":
        tip = 1.0 - 0.45 * complex(math.cos(0.35), math.sin(0.35))
        return Hull((PolylineSlit(1.0 + 0.0j, (tip,), chart=DISK),))
    if name == "v":
        mid = 1.0 - 0.28 * complex(math.cos(-0.25), math.sin(-0.25))
        tip = mid - 0.26 * complex(math.cos(0.55), math.sin(0.55))
        return Hull((PolylineSlit(1.0 + 0.0j, (mid, tip), chart=DISK),))
    raise ConfigError(f"unknown shape: {name!r} (choose radial, tilted, v)")


def _cmd_weld(cfg):
    from .chordal import weld, write_driving_csv

    p = cfg.parameters
    slit = _load_slit(p)
    if slit.is_empty:
        raise ConfigError("empty slit: nothing to weld")
    if slit.chart != "half-plane":
        raise ConfigError("weld expects a half-plane slit")
    path, _ = weld(slit, max_cap_step=p["max-cap-step"], max_seg_len=p["max-seg-len"])
    if cfg.output_path:
        tmp = cfg.output_path + ".part"
        write_driving_csv(path, tmp)
        os.replace(tmp, cfg.output_path)
    else:
        print("t,U,b")
        for t, u, b in zip(path.t, path.U, path.b):
            print("%.12g,%.12g,%.12g" % (t, u, b))
    print("welded %d steps, capacity %.12g, final driving %.12g"
          % (len(path) - 1, path.total_capacity, path.U[-1]), file=sys.stderr)
    return 0


def _cmd_trace(cfg):
    from .chordal import read_driving_csv, trace
    from .geom import write_polyline

    p = cfg.parameters
    try:
        path = read_driving_csv(p["driving"])
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read driving path: {e}")
    slit = trace(path, dt_max=p["dt-max"])
    if cfg.output_path:
        tmp = cfg.output_path + ".part"
        write_polyline(slit, tmp)
        os.replace(tmp, cfg.output_path)
    else:
        for v in slit.points():
            print("%.12g,%.12g" % (v.real, v.imag))
    print("traced %d vertices, tip %.12g%+.12gj"
          % (len(slit.verts), slit.tip.real, slit.tip.imag), file=sys.stderr)
    return 0


def _cmd_hcap(cfg):
    p = cfg.parameters
    method = str(p["method"]).strip().lower()
    if method in ("closed-form", "closed_form"):
        from .capacity import segment_capacity

        if p["alpha"] is None:
            raise ConfigError("closed-form needs --alpha")
        length = 1.0 if p["length"] is None else p["length"]
        try:
            val = segment_capacity(p["alpha"], length)
        except ValueError as e:
            raise ConfigError(str(e))
        est = None
    elif method == "zipper":
        from .capacity import hcap_zipper

        slit = _load_slit(p)
        est = hcap_zipper(slit, max_cap_step=p["max-cap-step"],
                          max_seg_len=p["max-seg-len"])
        val = est.value
    elif method in ("mc", "monte-carlo", "monte_carlo"):
        from .capacity import hcap_mc

        slit = _load_slit(p)
        if p["n"] < 1000:
            raise ConfigError("monte carlo needs --n >= 1000")
        est = hcap_mc(slit, p["n"], cfg.seed, threads=p.get("threads"))
        val = est.value
    else:
        raise ConfigError(f"unknown method: {method!r}")
    print("%.12g" % val)
    if est is not None:
        print("err %.12g" % est.err, file=sys.stderr)
    if cfg.output_path and est is not None:
        _atomic_write(cfg.output_path, est.to_json() + "\n")
    elif cfg.output_path:
        _atomic_write(cfg.output_path, "%.12g\n" % val)
    return 0


def _cmd_branch_sweep(cfg):
    from .experiments import branch_sweep

    p = cfg.parameters
    res = branch_sweep(p["alphas"], p["b1"], p["b2"])
    _write_table(cfg, "alpha1,alpha2,b1,b2,cdot0,lower,upper", res.rows)
    _write_json(cfg, {"checks": {k: bool(v) for k, v in res.checks.items()},
                      "errs": list(res.errs)})
    _write_gnuplot(cfg, "2:5")
    return _report_checks(res.checks)


def _cmd_disjoint_sum(cfg):
    from .capacity import SegmentSpec
    from .experiments import disjoint_sum_check

    p = cfg.parameters
    try:
        s1 = SegmentSpec(p["alpha1"], p["base1"], capacity=p["b1"])
        s2 = SegmentSpec(p["alpha2"], p["base2"], capacity=p["b2"])
    except ValueError as e:
        raise ConfigError(str(e))
    tab = disjoint_sum_check(s1, s2, p["times"])
    _write_table(cfg, "t,c,ratio", tab.rows)
    _write_json(cfg, {"checks": {k: bool(v) for k, v in tab.checks.items()},
                      "report": tab.report})
    _write_gnuplot(cfg, "1:3")
    return _report_checks(tab.checks)


def _cmd_counterexample(cfg):
    from .experiments import counterexample_capacity_table

    p = cfg.parameters
    if not 0.0 <= p["eps"] < 0.5:
        raise ConfigError("--eps must lie in [0, 1/2)")
    if p["levels"] < 1:
        raise ConfigError("--levels must be positive")
    tab = counterexample_capacity_table(p["eps"], n_levels=p["levels"],
                                        t_grid=p["times"])
    _write_table(cfg, "t,c,ratio", tab.rows)
    _write_json(cfg, {"checks": {k: bool(v) for k, v in tab.checks.items()},
                      "report": tab.report})
    _write_gnuplot(cfg, "1:3")
    return _report_checks(tab.checks)


def _cmd_bridge_check(cfg):
    from .radial import bridge_check

    p = cfg.parameters
    hull = _bridge_shape(p["shape"])
    rows = bridge_check(hull, p["times"])
    _write_table(cfg, "t,hcap,lmr,ratio", rows)
    final = rows[-1][3]
    checks = {"bridge_ratio": bool(0.98 <= final <= 1.02)}
    _write_json(cfg, {"checks": checks, "report": {"final_ratio": final}})
    _write_gnuplot(cfg, "1:4")
    return _report_checks(checks)


def _cmd_joint_param(cfg):
    from .experiments import _joint_parametrization_full, kinked_reparam_demo

    p = cfg.parameters
    s1 = _vertical(p["base1"], p["len1"])
    s2 = _vertical(p["base2"], p["len2"])
    if p["kink-eps"] is not None:
        rows, report, checks = kinked_reparam_demo(s1, s2, p["kink-eps"],
                                                   n_grid=p["n-grid"])
        _write_table(cfg, "s,u1,v2,total,lambda1,lambda2", rows)
        _write_json(cfg, {"checks": {k: bool(v) for k, v in checks.items()},
                          "report": report})
        _write_gnuplot(cfg, "1:5")
        return _report_checks(checks)
    n = p["n"]
    if n < 2:
        raise ConfigError("--n must be at least 2")
    s = np.linspace(p["s-max"] / n, p["s-max"], n)
    u1 = p["slope"] * s
    v2, lam1, lam2, totals = _joint_parametrization_full(s1, s2, u1, s)
    rows = [
        (s[i], u1[i], v2[i], totals[i],
         lam1[i] if i < len(lam1) else float("nan"),
         lam2[i] if i < len(lam2) else float("nan"))
        for i in range(n)
    ]
    checks = {
        "total_capacity": bool(np.max(np.abs(totals - s)) <= 1e-4),
        "lambda_sum": bool(np.max(np.abs(lam1 + lam2 - 1.0)) <= 2e-3),
    }
    _write_table(cfg, "s,u1,v2,total,lambda1,lambda2", rows)
    _write_json(cfg, {"checks": checks,
                      "report": {"total_dev": float(np.max(np.abs(totals - s)))}})
    _write_gnuplot(cfg, "1:5")
    return _report_checks(checks)


def _cmd_lambda_check(cfg):
    from .experiments import alpha_mu_lambda_check

    p = cfg.parameters
    s1 = _vertical(p["base1"], p["len1"])
    s2 = _vertical(p["base2"], p["len2"])
    if p["t0"] < 0:
        raise ConfigError("--t0 must be nonnegative")
    rows, report, checks = alpha_mu_lambda_check(s1, s2, p["t0"], p["deltas"])
    _write_table(cfg, "delta,ratio", rows)
    _write_json(cfg, {"checks": {k: bool(v) for k, v in checks.items()},
                      "report": report})
    _write_gnuplot(cfg, "1:2")
    return _report_checks(checks)


_HANDLERS = {
    "weld": _cmd_weld,
    "trace": _cmd_trace,
    "hcap": _cmd_hcap,
    "branch-sweep": _cmd_branch_sweep,
    "disjoint-sum": _cmd_disjoint_sum,
    "counterexample": _cmd_counterexample,
    "bridge-check": _cmd_bridge_check,
    "joint-param": _cmd_joint_param,
    "lambda-check": _cmd_lambda_check,
}


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="loewner",
        description="Loewner evolution toolkit: welding, capacity, experiments.",
    )
    ap.add_argument("--version", action="version", version=f"loewner {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    for cmd, params in _PARAMS.items():
        sp = sub.add_parser(cmd)
        for name, (typ, default) in params.items():
            if typ == "flag":
                sp.add_argument(f"--{name}", action="store_const", const="1")
            else:
                sp.add_argument(f"--{name}", type=str, default=None)
        for name, (typ, default) in _GLOBALS.items():
            if typ == "flag":
                sp.add_argument(f"--{name}", action="store_const", const="1")
            else:
                sp.add_argument(f"--{name}", type=str, default=None)
        sp.add_argument("--config", type=str, default=None)
    return ap


def build_config(argv):
    """Parse argv plus environment and config file into a RunConfig."""
    ap = _build_parser()
    ns = ap.parse_args(argv)
    if ns.command is None:
        ap.print_usage(sys.stderr)
        raise ConfigError("no command given")
    flags = vars(ns)
    filecfg = {}
    cfg_path = flags.get("config") or os.environ.get("LOEWNER_CONFIG")
    if cfg_path:
        filecfg = _read_config_file(cfg_path)
    params = {}
    for name, spec in _PARAMS[ns.command].items():
        params[name] = _resolve(name, spec, flags, filecfg)
    for name, spec in _GLOBALS.items():
        params[name] = _resolve(name, spec, flags, filecfg)
    if params.get("threads") is not None and params["threads"] < 1:
        raise ConfigError("--threads must be positive")
    return RunConfig(
        command=ns.command,
        parameters=params,
        seed=params.pop("seed"),
        output_path=params.pop("out"),
    )


def run(config):
    """Execute one configured command; returns the process exit status."""
    handler = _HANDLERS.get(config.command)
    if handler is None:
        print(f"loewner: unknown command {config.command!r}", file=sys.stderr)
        return 2
    try:
        return handler(config)
    except ConfigError as e:
        print(f"loewner: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as e:
        print(f"loewner: numerical failure: {e}", file=sys.stderr)
        return 3


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = build_config(argv)
    except ConfigError as e:
        print(f"loewner: {e}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
