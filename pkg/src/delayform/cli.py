"""Command-line front end.

    delayform <command> --config run.json [--set delay.tau=5.7 ...] [--out DIR]

Commands: classify, acs, spectrum, bifurcation, msf, simulate.  Each run
writes its artifacts plus ``metadata.json`` into the output directory.
Exit status is 0 on success, 2 for an invalid configuration and 3 when the
numerical analysis fails.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import acs as acs_mod
from . import bifurcation as bif
from . import msf as msf_mod
from . import simulate as sim
from . import spectrum as spec
from .errors import (
    ConfigError,
    DelayFormError,
    InvalidParameterError,
    InvalidTopologyError,
    NoStableSeedError,
    TheoremHypothesisError,
    UnsupportedParametersError,
)
from .model import (
    CouplingGainVector,
    FormationSpec,
    GainVector,
    laplacian_eigenvalues,
    laplacian_from_adjacency,
    mode_system,
)

COMMANDS = ("classify", "acs", "spectrum", "bifurcation", "msf", "simulate")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_gain4 = {"type": "array", "items": _num, "minItems": 4, "maxItems": 4}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj(
    {
        "gains": _obj({"p0": _gain4, "pbar": _gain4}, ["p0"]),
        "topology": _obj(
            {"adjacency": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _num}}}
        ),
        "delay": _obj({"tau": {"type": "number", "minimum": 0}}, ["tau"]),
        "classify": _obj({"tolerance": _pos, "horizon": {"type": "number", "minimum": 0}}),
        "acs": _obj({"omega_min": _num, "omega_max": _num, "n": {"type": "integer", "minimum": 2}}),
        "spectrum": _obj(
            {
                "window": _obj({"re_min": _num, "re_max": _num, "im_max": _pos}),
                "order": {"type": "integer", "minimum": 4, "maximum": 512},
            }
        ),
        "bifurcation": _obj(
            {
                "plane": {"enum": ["k0h0", "lambda_h0", "lambda"]},
                "omega_max": _pos,
                "omega_step": _pos,
                "levels": {"type": "array", "items": _num},
            }
        ),
        "msf": _obj(
            {
                "grid": _obj(
                    {
                        "re_min": _num, "re_max": _num, "im_min": _num, "im_max": _num,
                        "n_re": {"type": "integer", "minimum": 2},
                        "n_im": {"type": "integer", "minimum": 2},
                    }
                ),
                "field": {"type": "boolean"},
                "j_max": {"type": "integer", "minimum": 0, "maximum": 50},
            }
        ),
        "simulation": _obj(
            {
                "t_end": _pos,
                "dt": _pos,
                "history": {"enum": list(sim.HISTORY_POLICIES)},
                "offsets": {"type": "array", "items": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}},
                "formation_scale": _pos,
                "trajectory": {"type": "array", "minItems": 3, "maxItems": 3,
                               "items": {"type": "array", "items": _num, "minItems": 1, "maxItems": 5}},
                "perturbation": {"type": "array", "items": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}},
                "record_every": {"type": "integer", "minimum": 1},
            }
        ),
        "output": _obj({"directory": {"type": "string"}, "format": {"enum": ["csv"]}}),
    },
    ["gains", "delay"],
)

DEFAULTS = {
    "gains": {"pbar": [0.0, 0.0, 0.0, 0.0]},
    "topology": {"adjacency": [[0.0]]},
    "classify": {"tolerance": 1e-9, "horizon": 30.0},
    "acs": {"omega_min": 0.0, "omega_max": 10.0, "n": 1001},
    "spectrum": {"order": 64},
    "bifurcation": {"plane": "lambda", "levels": [0.0]},
    "msf": {"field": True, "j_max": 3},
    "simulation": {"t_end": 300.0, "history": "rest", "formation_scale": 1.0,
                   "trajectory": [[0.005, 0.0, 0.005], [0.0, 0.5], [0.0, 0.8]], "record_every": 1},
    "output": {"directory": "delayform-out", "format": "csv"},
}


# ---------------------------------------------------------------------------
# configuration

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg, assignment):
    """Apply ``a.b.c=value`` to the nested dict ``cfg`` (value parsed as JSON when possible)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form path=value", path=assignment)
    path, value = assignment.split("=", 1)
    keys = path.strip().split(".")
    if not all(keys):
        raise ConfigError(f"bad override path {path!r}", path=path)
    node = cfg
    for k in keys[:-1]:
        if not isinstance(node.get(k, {}), dict):
            raise ConfigError(f"override path {path!r} runs through a non-object", path=path)
        node = node.setdefault(k, {})
    node[keys[-1]] = _parse_value(value)
    return cfg


def _merge_defaults(cfg):
    out = copy.deepcopy(DEFAULTS)
    for k, v in cfg.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k].update(v)
        else:
            out[k] = v
    return out


def validate(cfg):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}", path=where) from exc
    return cfg


def load_config(path, overrides=()):
    """Read, override, validate and complete a run configuration."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", path=str(path)) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", path="<root>")
    for ov in overrides:
        apply_override(raw, ov)
    validate(raw)
    resolved = _merge_defaults(raw)
    validate(resolved)
    return resolved


def config_hash(cfg):
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# artifacts

class Artifacts:
    def __init__(self, directory, command, cfg):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.cfg = cfg
        self.sha = config_hash(cfg)
        self.files = []

    def header(self):
        return [f"# delayform {__version__}", f"# command {self.command}", f"# config_sha256 {self.sha}"]

    def csv(self, name, columns, rows):
        buf = io.StringIO()
        for line in self.header():
            buf.write(line + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        (self.dir / name).write_text(buf.getvalue(), encoding="utf-8")
        self.files.append(name)

    def json(self, name, payload):
        doc = {"metadata": self.metadata(), **payload}
        (self.dir / name).write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.files.append(name)

    def metadata(self):
        return {"tool": "delayform", "version": __version__, "command": self.command, "config_sha256": self.sha}

    def finish(self):
        meta = {**self.metadata(), "config": self.cfg, "artifacts": sorted(self.files)}
        (self.dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else _fmt(x)
    return x


# ---------------------------------------------------------------------------
# commands

def _setup(cfg):
    p0 = GainVector.from_sequence(cfg["gains"]["p0"])
    pbar = CouplingGainVector.from_sequence(cfg["gains"]["pbar"])
    topo = laplacian_from_adjacency(cfg["topology"]["adjacency"])
    return p0, pbar, topo, float(cfg["delay"]["tau"])


def _modes(p0, pbar, topo, tau):
    lams = laplacian_eigenvalues(topo)
    return [(complex(l), mode_system(p0, pbar, l, tau)) for l in lams]


def cmd_classify(cfg, out):
    p0, pbar, topo, _ = _setup(cfg)
    tol = cfg["classify"]["tolerance"]
    horizon = cfg["classify"]["horizon"]
    comp = acs_mod.classify_formation(p0, pbar, topo, tol)
    records, rows, lines = [], [], []
    for lam, lab in comp.labels:
        rec = {
            "lambda": lam,
            "class": str(lab.cls),
            "omega_H": list(lab.crossing.frequencies),
            "phi_H": list(lab.crossing.phases),
            "margin": lab.margin,
            "instantaneous_unstable": lab.instantaneous_unstable,
            "sum_matrix_stable": lab.sum_matrix_stable,
        }
        if lab.cls in (acs_mod.UniversalityClass.I, acs_mod.UniversalityClass.II):
            sd = acs_mod.switching_delays(lab, horizon)
            rec["switching"] = {
                "destabilizing": list(sd.destabilizing),
                "stabilizing": list(sd.stabilizing),
                "stable_windows": [list(w) for w in sd.stable_windows()],
                "horizon": horizon,
            }
            rows += [(lam, "destabilizing", j, t) for j, t in enumerate(sd.destabilizing)]
            rows += [(lam, "stabilizing", j, t) for j, t in enumerate(sd.stabilizing)]
        records.append(rec)
        lines.append(
            f"lambda={_fmt(lam)} class={lab.cls} omega_H=[{', '.join(_fmt(w) for w in lab.crossing.frequencies)}] "
            f"phi_H=[{', '.join(_fmt(p) for p in lab.crossing.phases)}]"
        )
        if "switching" in rec:
            sw = rec["switching"]
            lines.append("  destabilizing: " + " ".join(_fmt(t) for t in sw["destabilizing"]))
            lines.append("  stabilizing:   " + " ".join(_fmt(t) for t in sw["stabilizing"]))
    out.json("classify.json", {
        "modes": records,
        "composition": comp.counts,
        "structure": comp.structure(),
        "boundary_count": comp.boundary_count,
        "absolutely_stable": comp.absolutely_stable,
        "has_class_u": comp.has_class_u,
    })
    out.csv("switching_delays.csv", ["lambda", "kind", "j", "tau"], rows)
    lines.append(f"structure: {comp.structure()} (boundary {comp.boundary_count})")
    return "\n".join(lines)


def cmd_acs(cfg, out):
    p0, pbar, topo, tau = _setup(cfg)
    a = cfg["acs"]
    w = np.linspace(a["omega_min"], a["omega_max"], a["n"])
    rows = []
    for k, (lam, mode) in enumerate(_modes(p0, pbar, topo, tau)):
        ww, g, Y = acs_mod.acs_curve(w, mode)
        rows += [(k, lam.real, lam.imag, wi, gi, yi.real, yi.imag) for wi, gi, yi in zip(ww, g, Y)]
    out.csv("acs.csv", ["mode", "re_lambda", "im_lambda", "omega", "gamma", "re_Y", "im_Y"], rows)
    return f"{len(rows)} ACS samples"


def cmd_spectrum(cfg, out):
    p0, pbar, topo, tau = _setup(cfg)
    s = cfg["spectrum"]
    win = spec.default_window(tau)
    if "window" in s:
        w = s["window"]
        win = spec.RootWindow(w.get("re_min", win.re_min), w.get("re_max", win.re_max), w.get("im_max", win.im_max))
    summary = []
    for k, (lam, mode) in enumerate(_modes(p0, pbar, topo, tau)):
        res = spec.char_roots(mode, win, order=s["order"])
        roots = sorted(res.roots, key=lambda r: (-r.mu.real, r.mu.imag))
        out.csv(f"spectrum_mode{k}.csv", ["re_mu", "im_mu", "residual"],
                [(r.mu.real, r.mu.imag, r.residual) for r in roots for _ in range(r.multiplicity)])
        summary.append({
            "mode": k, "lambda": lam, "lambda_max": spec.lambda_max(mode, win),
            "roots_in_window": res.count, "discretization_order": res.discretization_order,
            "window": [res.window.re_min, res.window.re_max, res.window.im_max],
        })
    out.json("spectrum.json", {"modes": summary})
    return "\n".join(f"mode {m['mode']}: lambda_max={_fmt(m['lambda_max'])} roots={m['roots_in_window']}" for m in summary)


def _omega_grid(b, tau, positive):
    if "omega_max" in b or "omega_step" in b:
        step = b.get("omega_step", min(0.25 / tau, 0.01))
        wmax = b.get("omega_max", 4.0 * max(4.0 * math.pi / tau, 5.0))
        n = int(math.ceil(wmax / step))
        w = np.arange(-n, n + 1) * step
        return w[w > 0] if positive else w
    return bif.default_omega_grid(tau, positive=positive)


def _curve_rows(c, with_radius=False):
    rows = []
    for w, x, y, s in zip(c.omega, c.x, c.y, c.segment_id):
        r = (w, x, y, c.level, s)
        rows.append(r + (math.hypot(x, y),) if with_radius else r)
    return rows


def cmd_bifurcation(cfg, out):
    p0, pbar, _, tau = _setup(cfg)
    b = cfg["bifurcation"]
    plane = b["plane"]
    if not tau > 0:
        raise InvalidParameterError("bifurcation curves need tau > 0")
    if plane == "k0h0":
        c = bif.k0h0_boundary(p0.k0_tau, p0.h0_tau, tau, _omega_grid(b, tau, True))
        out.csv("bifurcation_k0h0.csv", ["omega", "k0", "h0", "level", "segment_id"], _curve_rows(c))
        n = len(c)
    elif plane == "lambda_h0":
        c = bif.lambda_h0_boundary((p0.k0, p0.k0_tau, p0.h0_tau), pbar, tau, _omega_grid(b, tau, True))
        out.csv("bifurcation_lambda_h0.csv", ["omega", "lambda", "h0", "level", "segment_id"], _curve_rows(c))
        n = len(c)
    else:
        if pbar is None or pbar.is_zero:
            raise InvalidParameterError("lambda-plane curves need nonzero coupling gains (gains.pbar)")
        rows = []
        grid = _omega_grid(b, tau, False)
        for level in b["levels"]:
            c = bif.contour_lines(level, p0, pbar, tau, grid)
            rows += _curve_rows(c)
        out.csv("bifurcation_lambda.csv", ["omega", "re_point", "im_point", "level", "segment_id"], rows)
        n = len(rows)
    return f"{plane}: {n} curve samples"


def cmd_msf(cfg, out):
    p0, pbar, _, tau = _setup(cfg)
    m = cfg["msf"]
    j_max = m["j_max"]
    report = {"tau": tau}
    if tau > 0:
        span = 2 * math.pi * (j_max + 1) / tau
        grid = np.linspace(-span, span, 2000 * (j_max + 1) + 1)
        c = bif.lambda_boundary(p0, pbar, tau, grid)
        out.csv("boundary.csv", ["omega", "re_point", "im_point", "level", "segment_id", "radius"],
                _curve_rows(c, with_radius=True))
    try:
        ac = msf_mod.large_delay_asymptote(p0, pbar, tau, j_max=j_max)
    except TheoremHypothesisError as exc:
        report["asymptote"] = {"applicable": False, "reason": str(exc)}
    else:
        out.csv("asymptote.csv", ["omega", "re_exact", "im_exact", "re_asymptotic", "im_asymptotic"],
                [(w, e.real, e.imag, a.real, a.imag) for w, e, a in zip(ac.omega, ac.exact, ac.asymptotic)])
        angles = {a.j: a for a in msf_mod.intersection_angles(ac, p0, pbar)}
        rows = []
        for j, wj, lj in ac.intersections:
            a = angles.get(j)
            rows.append((j, wj, lj.real, lj.imag,
                         a.numeric if a else math.nan, a.asymptotic if a else math.nan,
                         a.leading_order if a else math.nan))
        out.csv("intersections.csv",
                ["j", "omega", "re_lambda", "im_lambda", "theta_numeric", "theta_asymptotic", "theta_leading_order"],
                rows)
        report["asymptote"] = {
            "applicable": True, "lambda0": ac.lambda0, "slope": ac.slope,
            "max_error": ac.max_error, "error_constant": ac.error_constant,
            "circle_metric": msf_mod.circle_convergence_metric(p0, pbar, tau),
        }
    if m["field"]:
        g = msf_mod.GridSpec(**m.get("grid", {}))
        try:
            field = msf_mod.msf_field(p0, pbar, tau, g, boundary=False)
            report["origin_stable"] = True
        except NoStableSeedError as exc:
            field = exc.field
            report["origin_stable"] = False
        re, im = g.re, g.im
        rows = [(re[i], im[j], field.values[i, j], bool(field.region_mask[i, j]))
                for j in range(im.size) for i in range(re.size)]
        out.csv("field.csv", ["re_lambda", "im_lambda", "lambda_max", "in_region"], rows)
        report["origin_lambda_max"] = field.origin_value
        report["region_nodes"] = int(field.region_mask.sum())
        report["invalid_nodes"] = int((~field.valid).sum())
    out.json("msf.json", report)
    return json.dumps(_jsonable(report), sort_keys=True)


def cmd_simulate(cfg, out):
    p0, pbar, topo, tau = _setup(cfg)
    s = cfg["simulation"]
    n = topo.n_agents
    if "offsets" in s:
        offsets = np.array(s["offsets"], float)
    elif n == 3:
        offsets = np.array([[0.0, -10.0, 0.0], [20.0, 10.0, 0.0], [-20.0, 10.0, 0.0]])
    else:
        offsets = np.zeros((n, 3))
    config = sim.SimulationConfig(
        p0, pbar, topo, FormationSpec(offsets, s["formation_scale"]),
        sim.TrajectorySpec.from_axes(s["trajectory"]), tau, s["t_end"], s.get("dt"),
        s["history"], s.get("perturbation"),
    )
    log = sim.integrate(config)
    every = s["record_every"]
    idx = np.arange(0, log.t.size, every)
    rows = []
    for k in idx:
        for a in range(n):
            rows.append((log.t[k], a, *log.R[k, a], *log.V[k, a]))
    out.csv("trajectory.csv", ["t", "agent_id", "x", "y", "z", "vx", "vy", "vz"], rows)
    out.csv("errors.csv", ["t", "tracking_error", "formation_error"],
            [(log.t[k], log.tracking_error[k], log.formation_error[k]) for k in idx])
    summary = {"diverged": log.diverged, "diverged_at": log.diverged_at, "dt": config.dt,
               "tracking_shrink": sim.shrink_factor(log, "tracking"),
               "formation_shrink": sim.shrink_factor(log, "formation")}
    for q in ("tracking", "formation"):
        try:
            summary[f"{q}_rate"] = sim.decay_rate_fit(log, quantity=q)
        except DelayFormError as exc:
            summary[f"{q}_rate"] = None
            summary[f"{q}_rate_note"] = str(exc)
    out.json("simulate.json", summary)
    return json.dumps(_jsonable(summary), sort_keys=True)


HANDLERS = {
    "classify": cmd_classify,
    "acs": cmd_acs,
    "spectrum": cmd_spectrum,
    "bifurcation": cmd_bifurcation,
    "msf": cmd_msf,
    "simulate": cmd_simulate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="delayform", description="Delay-coupled formation stability analysis.")
    p.add_argument("--version", action="version", version=f"delayform {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HANDLERS[name].__name__.replace("cmd_", ""))
        sp.add_argument("--config", "-c", required=True, help="JSON run configuration")
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE",
                        help="override a config entry, e.g. delay.tau=5.7 (repeatable)")
        sp.add_argument("--out", "-o", help="output directory (overrides output.directory)")
        sp.add_argument("--quiet", "-q", action="store_true")
    return p


def run(command, config_path, overrides=(), out_dir=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    overrides = list(overrides)
    if out_dir is not None:
        overrides.append(f"output.directory={json.dumps(str(out_dir))}")
    try:
        cfg = load_config(config_path, overrides)
        out = Artifacts(cfg["output"]["directory"], command, cfg)
        text = HANDLERS[command](cfg, out)
        out.finish()
    except (ConfigError, InvalidParameterError, InvalidTopologyError) as exc:
        print(f"delayform: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except UnsupportedParametersError as exc:
        print(f"delayform: {exc}", file=sys.stderr)
        return 3
    except DelayFormError as exc:
        print(f"delayform: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    if text:
        print(text, file=stdout)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    stdout = io.StringIO() if args.quiet else None
    return run(args.command, args.config, args.overrides, args.out, stdout)


if __name__ == "__main__":
    sys.exit(main())
