"""Command line entry point.

Every command reads its options from the command line and, optionally, from a
JSON config file (``--config``); explicit command-line values win. Outputs are
JSON documents that start with a provenance header listing the package
version, the config-schema version and every numeric default. Exit codes:
0 success, 1 a verification command found a failing check, 2 config error,
3 numerical non-convergence, 4 precondition violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import CONFIG_SCHEMA_VERSION, __version__
from . import io
from .fields import FieldError
from .filtered import (FilteredError, FilteredLattice, ModelPairing, brute_force_search,
                       enumerate_compatible, is_compatible_with, lattice_certificate, normalize)
from .hitchin import (BuilderError, antidiagonal_pairing, build_cyclic, build_hitchin, example1,
                      example2, example3, parse_differentials)
from .linalg import LinalgError
from .spectral import SpectralError, spectral_report
from .solver.diagnostics import compat_field, f_norm_h, hitchin_residual
from .solver.exhaustion import solve_exhaustion, uniqueness_probe
from .solver.grid import GridDomain, GridError
from .solver.newton import BoundaryError, SolverError, dirichlet_solve
from .solver.seeds import SeedError, parse_seed_rule, seed_from_rule
from .solver.toda import TodaError, toda_solve
from .verify import run_linalg_suite

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_PRECONDITION = 0, 1, 2, 3, 4

DEFAULTS = {
    "seed": 0,
    "tol": 1e-6,
    "max_iter": 40,
    "fallback_sweeps": 200,
    "seed_rule": "canonical",
    "seed_a": "canonical",
    "seed_b": "perturbed:0.2",
    "series_order": 12,
    "at": "inf",
    "n": 48,
    "center": "0,0",
    "ladder": "1,2,3",
    "trials": 1000,
    "dims": "2,3,4,5",
    "method": "newton",
    "max_den": 8,
}

CSV_COLUMNS = ["x", "y", "residual", "f_norm_h", "compat_defect"]

PRECONDITION_ERRORS = (BuilderError, FieldError, SpectralError, SeedError, BoundaryError,
                       TodaError, FilteredError, LinalgError, GridError, SolverError)


class ConfigError(ValueError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass
class RunConfig:
    command: str
    options: dict
    out: str | None = None
    csv: str | None = None
    inputs: list[str] = field(default_factory=list)

    def get(self, key: str):
        v = self.options.get(key)
        return DEFAULTS.get(key) if v is None else v

    def validate(self) -> None:
        for p in self.inputs:
            if p is not None and not os.path.isfile(p):
                raise ConfigError(f"input file {p!r} does not exist")
        for p in (self.out, self.csv):
            if p is not None and not os.path.isdir(os.path.dirname(os.path.abspath(p))):
                raise ConfigError(f"output directory for {p!r} does not exist")
        tol = self.options.get("tol")
        if tol is not None and not tol > 0:
            raise ConfigError("tolerance must be positive")
        for key in ("max_iter", "trials", "n", "series_order", "max_den"):
            v = self.options.get(key)
            if v is not None and v <= 0:
                raise ConfigError(f"{key} must be positive")
        for key in ("seed_rule", "seed_a", "seed_b"):
            if key in self.options:
                try:
                    parse_seed_rule(self.get(key))
                except SeedError as exc:
                    raise ConfigError(str(exc)) from exc

    def resolved(self) -> dict:
        d = {"command": self.command}
        for k in sorted(self.options):
            if self.get(k) is not None:
                d[k] = self.get(k)
        if self.out is not None:
            d["out"] = self.out
        if self.csv is not None:
            d["csv"] = self.csv
        return d


def header(cfg: RunConfig) -> dict:
    return {"tool": "higgsreal", "version": __version__, "schema_version": CONFIG_SCHEMA_VERSION,
            "command": cfg.command, "defaults": dict(DEFAULTS), "config": cfg.resolved()}


def _diag(level: str, code: int, command: str, message: str) -> None:
    msg = message.replace('"', "'").replace("\n", " ")
    print(f'higgsreal level={level} exit={code} command={command} msg="{msg}"', file=sys.stderr)


# ------------------------------------------------------------- parsing

def _parser() -> ArgumentParser:
    p = ArgumentParser(prog="higgsreal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="store_true",
                   help="print package and config-schema versions")
    sub = p.add_subparsers(dest="command", parser_class=ArgumentParser)

    def common(sp_, out=True):
        sp_.add_argument("--config", help="JSON file with option values")
        if out:
            sp_.add_argument("--out", help="output JSON path (default: standard output)")
        return sp_

    a = common(sub.add_parser("analyze-spectral", help="spectral report of a Higgs field"))
    a.add_argument("--field")
    a.add_argument("--at", help="puncture: 'inf', a complex number, or 'none'")
    a.add_argument("--series-order", type=int, dest="series_order")
    a.add_argument("--seed", type=int)

    b = common(sub.add_parser("build-hitchin", help="Higgs field from differentials"))
    b.add_argument("--r", type=int)
    for j in range(2, 9):
        b.add_argument(f"--q{j}", dest=f"q{j}")
    b.add_argument("--cyclic", action="store_true", default=None,
                   help="cyclic field closed by q_r instead of the full Hitchin section")
    b.add_argument("--example", type=int, choices=(1, 2, 3))
    b.add_argument("--alpha1")
    b.add_argument("--alpha2")
    b.add_argument("--beta")
    b.add_argument("--a")

    s = common(sub.add_parser("solve", help="Dirichlet problem on one grid"))
    s.add_argument("--field")
    s.add_argument("--domain", help="x0,x1,y0,y1,nx,ny")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iter", type=int, dest="max_iter")
    s.add_argument("--seed-rule", dest="seed_rule")
    s.add_argument("--method", choices=("newton", "toda"))
    s.add_argument("--csv", help="per-node CSV output path")

    for name, hlp in (("exhaust", "nested Dirichlet problems"),
                      ("uniqueness-probe", "two seeds on nested domains")):
        e = common(sub.add_parser(name, help=hlp))
        e.add_argument("--field")
        e.add_argument("--domains", help="';'-separated domain specs, smallest first")
        e.add_argument("--ladder", help="comma-separated half-widths of centred squares")
        e.add_argument("--n", type=int, help="nodes per side for --ladder")
        e.add_argument("--center", help="x,y centre for --ladder")
        e.add_argument("--tol", type=float)
        e.add_argument("--max-iter", type=int, dest="max_iter")
        if name == "exhaust":
            e.add_argument("--seed-rule", dest="seed_rule")
        else:
            e.add_argument("--seed-a", dest="seed_a")
            e.add_argument("--seed-b", dest="seed_b")

    c = common(sub.add_parser("classify-lattices", help="compatible filtered bundles of C_m"))
    c.add_argument("--m")
    c.add_argument("--brute-force", action="store_true", default=None, dest="brute_force")
    c.add_argument("--max-den", type=int, dest="max_den")

    k = common(sub.add_parser("check-lattice", help="certificate for one filtered bundle"))
    k.add_argument("--spec", help="filtered-bundle JSON file")
    k.add_argument("--m")

    v = common(sub.add_parser("verify-linalg", help="randomized pairing linear-algebra suite"))
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--dims")
    return p


INPUT_KEYS = ("field", "spec")
PATH_KEYS = ("out", "csv", "config")


LIST_OPTIONS = ("--domain", "--domains", "--center", "--at")


def _glue(argv: list[str]) -> list[str]:
    """Attach values like ``-1,1,-1,1,64,64`` to their option so they are not read as flags."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in LIST_OPTIONS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def build_config(argv: list[str]) -> RunConfig | None:
    p = _parser()
    ns = p.parse_args(_glue(argv))
    if ns.version:
        return None
    if ns.command is None:
        raise ConfigError("no command given")
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "version")}
    cfg_path = opts.pop("config", None)
    if cfg_path is not None:
        try:
            with open(cfg_path) as fh:
                file_opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {cfg_path!r}: {exc}") from exc
        if not isinstance(file_opts, dict):
            raise ConfigError("config file must hold a JSON object")
        file_opts = {k.replace("-", "_"): v for k, v in file_opts.items()}
        file_opts.pop("command", None)
        unknown = sorted(set(file_opts) - set(opts))
        if unknown:
            raise ConfigError(f"unknown config keys for {ns.command}: {unknown}")
        for k2, v2 in file_opts.items():
            if opts.get(k2) is None:
                opts[k2] = v2
    out = opts.pop("out", None)
    csv = opts.pop("csv", None)
    inputs = [opts[k] for k in INPUT_KEYS if opts.get(k) is not None]
    cfg = RunConfig(ns.command, opts, out, csv, inputs)
    cfg.validate()
    return cfg


# ------------------------------------------------------------- helpers

def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc


def _need(cfg: RunConfig, key: str):
    v = cfg.get(key)
    if v is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required for {cfg.command}")
    return v


def _load_field(cfg: RunConfig):
    return io.field_from_json(_load_json(_need(cfg, "field")))


def _domain(text: str) -> GridDomain:
    try:
        return GridDomain.parse(text)
    except GridError as exc:
        raise ConfigError(str(exc)) from exc


def _domains(cfg: RunConfig) -> list[GridDomain]:
    if cfg.options.get("domains"):
        doms = [_domain(t) for t in cfg.options["domains"].split(";") if t.strip()]
    else:
        try:
            widths = [float(w) for w in str(cfg.get("ladder")).split(",")]
            cx, cy = (float(v) for v in str(cfg.get("center")).split(","))
        except ValueError as exc:
            raise ConfigError(f"bad ladder or centre: {exc}") from exc
        if any(w <= 0 for w in widths):
            raise ConfigError("ladder half-widths must be positive")
        try:
            doms = [GridDomain.square(w, int(cfg.get("n")), complex(cx, cy)) for w in widths]
        except GridError as exc:
            raise ConfigError(str(exc)) from exc
    for a, b in zip(doms, doms[1:]):
        if not b.contains(a) or a == b:
            raise ConfigError("domain ladder must be strictly nested, smallest first")
    if not doms:
        raise ConfigError("empty domain ladder")
    return doms


def _parse_at(text):
    if text is None or str(text).lower() == "none":
        return None
    if str(text).lower() == "inf":
        return "inf"
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"bad puncture location {text!r}") from exc


class _Outcome:
    def __init__(self, doc: dict, code: int = EXIT_OK, message: str = "", csv: str | None = None):
        self.doc, self.code, self.message, self.csv = doc, code, message, csv


# ------------------------------------------------------------- commands

def cmd_analyze_spectral(cfg: RunConfig) -> _Outcome:
    H, _ = _load_field(cfg)
    rng = np.random.default_rng(int(cfg.get("seed")))
    rep = spectral_report(H, _parse_at(cfg.get("at")), int(cfg.get("series_order")), rng)
    return _Outcome({"report": rep})


def cmd_build_hitchin(cfg: RunConfig) -> _Outcome:
    ex = cfg.options.get("example")
    if ex is not None:
        if ex == 1:
            H = example1(_need(cfg, "alpha1"), _need(cfg, "alpha2"))
        elif ex == 2:
            H = example2(_need(cfg, "beta"))
        else:
            H = example3(complex(str(_need(cfg, "a")).replace("i", "j")))
        return _Outcome(io.field_to_json(H, antidiagonal_pairing(3)))
    r = int(_need(cfg, "r"))
    if r < 2 or r > 8:
        raise ConfigError("--r must be between 2 and 8")
    if cfg.options.get("cyclic"):
        q = cfg.options.get(f"q{r}")
        if q is None:
            raise ConfigError(f"--q{r} is required for a cyclic field")
        H, C = build_cyclic(q, r)
    else:
        vals = {j: cfg.options.get(f"q{j}") or "0" for j in range(2, r + 1)}
        H, C = build_hitchin(parse_differentials(r, vals))
    extra = [j for j in range(r + 1, 9) if cfg.options.get(f"q{j}") is not None]
    if extra:
        raise ConfigError(f"differentials q{extra} exceed the rank")
    return _Outcome(io.field_to_json(H, C))


def _solve_one(cfg, H, C, dom):
    tol = float(cfg.get("tol"))
    seed = seed_from_rule(cfg.get("seed_rule"), H, C, dom)
    if cfg.get("method") == "toda":
        P = seed.P
        off = np.abs(P - np.einsum("...ii->...i", P)[..., None] * np.eye(H.rank)).max()
        if off > 1e-12:
            raise TodaError("seed metric is not diagonal; the diagonal reduction needs diagonal data")
        bu = np.log(np.einsum("...ii->...i", P).real)
        m, rep, _ = toda_solve(H, dom, bu, tol=tol, max_iter=int(cfg.get("max_iter")))
        return m, rep
    return dirichlet_solve(H, C, seed, dom, tol=tol, max_iter=int(cfg.get("max_iter")),
                           fallback_sweeps=int(cfg.get("fallback_sweeps")))


def cmd_solve(cfg: RunConfig) -> _Outcome:
    H, C = _load_field(cfg)
    dom = _domain(_need(cfg, "domain"))
    m, rep = _solve_one(cfg, H, C, dom)
    doc = {"report": rep.to_json(), "metric": m.to_json()}
    csv = None
    if cfg.csv is not None:
        res, fh, cd = hitchin_residual(m, H), f_norm_h(m, H), compat_field(m)
        zz = dom.z
        rows = zip(zz.real.ravel(), zz.imag.ravel(), res.ravel(), fh.ravel(), cd.ravel())
        csv = io.csv_text(CSV_COLUMNS, rows)
    code = EXIT_OK if rep.converged else EXIT_DIVERGED
    msg = "" if rep.converged else f"residual {rep.residual_sup:.3e} above tol"
    return _Outcome(doc, code, msg, csv)


def cmd_exhaust(cfg: RunConfig) -> _Outcome:
    H, C = _load_field(cfg)
    doms = _domains(cfg)
    res = solve_exhaustion(H, C, doms, cfg.get("seed_rule"), float(cfg.get("tol")),
                           max_iter=int(cfg.get("max_iter")))
    doc = {"domains": [d.to_json() for d in doms],
           "reports": [rep.to_json() for _, rep in res.solutions],
           "diagnostic": res.diagnostic,
           "diagnostic_decreasing": all(b < a for a, b in zip(res.diagnostic, res.diagnostic[1:]))}
    code = EXIT_OK if res.converged else EXIT_DIVERGED
    return _Outcome(doc, code, "" if res.converged else "a stage did not converge")


def cmd_uniqueness_probe(cfg: RunConfig) -> _Outcome:
    H, C = _load_field(cfg)
    doms = _domains(cfg)
    tr = uniqueness_probe(H, C, doms, cfg.get("seed_a"), cfg.get("seed_b"),
                          float(cfg.get("tol")), max_iter=int(cfg.get("max_iter")))
    doc = {"domains": [d.to_json() for d in doms], "core": list(tr.core), "gaps": tr.gaps,
           "strictly_decreasing": tr.strictly_decreasing,
           "reports_a": [rep.to_json() for _, rep in tr.run_a.solutions],
           "reports_b": [rep.to_json() for _, rep in tr.run_b.solutions]}
    ok = tr.run_a.converged and tr.run_b.converged
    return _Outcome(doc, EXIT_OK if ok else EXIT_DIVERGED, "" if ok else "a stage did not converge")


def _model(cfg: RunConfig) -> ModelPairing:
    try:
        return ModelPairing.parse(str(_need(cfg, "m")))
    except FilteredError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_classify_lattices(cfg: RunConfig) -> _Outcome:
    P = _model(cfg)
    fams = enumerate_compatible(P)
    doc = {"families": fams.to_json()}
    if cfg.options.get("brute_force"):
        hits = brute_force_search(P, max_den=int(cfg.get("max_den")))
        outside = [normalize(L).to_json() for L in hits if not fams.contains(L)]
        doc["brute_force"] = {"hits": len(hits), "outside_families": outside}
        if outside:
            return _Outcome(doc, EXIT_CHECK, "brute force found lattices outside the families")
    return _Outcome(doc)


def cmd_check_lattice(cfg: RunConfig) -> _Outcome:
    P = _model(cfg)
    raw = _load_json(_need(cfg, "spec"))
    L = FilteredLattice.from_json(raw.get("lattice", raw))
    ok, cert = is_compatible_with(L, P)
    oracle_ok, oracle_msg = lattice_certificate(L, P)
    doc = {"lattice": L.to_json(), "normalized": normalize(L).to_json(), "m": list(P.m),
           "compatible": ok, "certificate": cert.to_json(),
           "lattice_oracle": {"compatible": oracle_ok, "detail": oracle_msg}}
    if ok != oracle_ok:
        return _Outcome(doc, EXIT_CHECK, "closed form and lattice oracle disagree")
    return _Outcome(doc)


def cmd_verify_linalg(cfg: RunConfig) -> _Outcome:
    try:
        dims = tuple(int(v) for v in str(cfg.get("dims")).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --dims: {exc}") from exc
    if any(d < 2 for d in dims):
        raise ConfigError("dimensions must be at least 2")
    res = run_linalg_suite(int(cfg.get("seed")), int(cfg.get("trials")), dims)
    doc = {"suite": res.to_json()}
    return _Outcome(doc, EXIT_OK if res.passed else EXIT_CHECK,
                    "" if res.passed else "property suite failed")


COMMANDS = {
    "analyze-spectral": cmd_analyze_spectral,
    "build-hitchin": cmd_build_hitchin,
    "solve": cmd_solve,
    "exhaust": cmd_exhaust,
    "uniqueness-probe": cmd_uniqueness_probe,
    "classify-lattices": cmd_classify_lattices,
    "check-lattice": cmd_check_lattice,
    "verify-linalg": cmd_verify_linalg,
}


def dispatch(cfg: RunConfig) -> int:
    """Run one command; artifacts are written only after the command finishes."""
    try:
        out = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        _diag("error", EXIT_CONFIG, cfg.command, str(exc))
        return EXIT_CONFIG
    except PRECONDITION_ERRORS as exc:
        _diag("error", EXIT_PRECONDITION, cfg.command, f"{type(exc).__name__}: {exc}")
        return EXIT_PRECONDITION
    doc = {"provenance": header(cfg), **out.doc}
    text = io.dumps(doc)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        io.write_text_atomic(cfg.out, text)
    if out.csv is not None:
        io.write_text_atomic(cfg.csv, out.csv)
    if out.code != EXIT_OK:
        _diag("error" if out.code == EXIT_DIVERGED else "warning", out.code, cfg.command,
              out.message)
    return out.code


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = build_config(argv)
    except ConfigError as exc:
        _diag("error", EXIT_CONFIG, "-", str(exc))
        return EXIT_CONFIG
    if cfg is None:
        print(f"higgsreal {__version__} (config schema {CONFIG_SCHEMA_VERSION})")
        return EXIT_OK
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
