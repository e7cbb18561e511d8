"""Command-line front end producing deterministic verification reports.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .catalog import catalog_entries, model_spectrum_mismatch, v_theta, v_theta_prime
from .curvature import CurvatureModel, expected_jacobi_spectrum, table_identities
from .geodesics import (
    GeodesicParams, berger_geodesic_point, closed_geodesic_solutions, closure_residual,
    geodesic_csv, orbit_oracle,
)
from .liealg import build_presentation
from .search import SearchConfig, hits_jsonl, refine_phi, search_planes, UNCLASSIFIED
from .subspace import (
    NOT_WELL_POSITIONED, WELL_POSITIONED, R_invariance, phi_invariant, subspace_slope,
    tg_certificate,
)

SCHEMA_VERSION = "1.0"

DEFAULT_TOL = {
    "spectra": 1e-10,
    "tables": 1e-12,
    "verify-catalog": 1e-9,
    "search": 1e-6,
    "phi": 1e-9,
    "geodesic": 1e-9,
}


class Report:
    def __init__(self, command, args, presentation=None):
        self.command = command
        self.args = args
        self.presentation = presentation
        self.records = []
        self.extra = {}
        self.wall_time = None

    def check(self, name, expected, actual, residual, tol):
        residual = float(residual)
        ok = bool(residual <= tol)
        self.records.append({"name": name, "expected": expected, "actual": actual,
                             "residual": residual, "pass": ok})
        return ok

    @property
    def passed(self):
        return all(r["pass"] for r in self.records)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "command": {"name": self.command, "args": self.args},
            "presentation": self.presentation,
            "records": self.records,
            "extra": self.extra,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def _encode(obj):
    """JSON text with floats fixed at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_encode(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def report_json(report):
    return _encode(report.to_dict()) + "\n"


def _cell(v):
    if isinstance(v, float):
        return format(v, ".6g")
    s = _encode(v)
    return s if len(s) <= 60 else s[:57] + "..."


def report_markdown(report):
    d = report.to_dict()
    lines = [f"# {report.command}", ""]
    if report.presentation:
        lines.append("Presentation: " + ", ".join(f"{k}={v}" for k, v in report.presentation.items()))
        lines.append("")
    lines += ["| check | expected | actual | residual | pass |", "|---|---|---|---|---|"]
    for r in d["records"]:
        lines.append(f"| {r['name']} | {_cell(r['expected'])} | {_cell(r['actual'])} "
                     f"| {r['residual']:.3g} | {'yes' if r['pass'] else 'NO'} |")
    lines += ["", f"Overall: {'PASS' if report.passed else 'FAIL'}", ""]
    return "\n".join(lines)


def _pairs_residual(actual, expected):
    if [m for _, m in actual] != [m for _, m in expected]:
        return math.inf
    return max((abs(a - b) for (a, _), (b, _) in zip(actual, expected)), default=0.0)


def _pairs(p):
    return [[lam, m] for lam, m in p]


def cmd_spectra(pres, tol):
    model = CurvatureModel(pres)
    rep = Report("spectra", None, pres.describe())
    eye = np.eye(pres.dim)
    blocks = {"p": None, "p1": eye[:, pres.vertical], "p2": eye[:, pres.horizontal]}
    for cls, x in (("vertical", pres.unit(0)), ("horizontal", pres.y(1))):
        expected = dict(zip(blocks, expected_jacobi_spectrum(pres, cls)))
        for block, F in blocks.items():
            actual = model.jacobi_spectrum(x, restrict=F)
            rep.check(f"{cls} {block}", _pairs(expected[block]), _pairs(actual),
                      _pairs_residual(actual, expected[block]), tol)
    return rep


def cmd_tables(pres, tol):
    model = CurvatureModel(pres)
    rep = Report("tables", None, pres.describe())
    for name, actual, expected in table_identities(model):
        rep.check(name, list(expected), list(actual),
                  np.abs(np.asarray(actual) - np.asarray(expected)).max(), tol)
    return rep


def cmd_verify_catalog(pres, tol):
    model = CurvatureModel(pres)
    rep = Report("verify-catalog", None, pres.describe())
    for rec, V in catalog_entries(pres):
        label = rec.tag + "".join(f" {k}={v:.6g}" if isinstance(v, float) else f" {k}={v}"
                                  for k, v in rec.params.items())
        if pres.tau == 1:
            inv = R_invariance(V, model)
            rep.check(f"{label}: R-invariant", 0.0, inv.residual, inv.residual, tol)
        else:
            cert = tg_certificate(V, model, tol=tol)
            want = WELL_POSITIONED if rec.well_positioned else NOT_WELL_POSITIONED
            rep.check(f"{label}: certificate", want, cert.verdict,
                      0.0 if cert.verdict == want else math.inf, 0.0)
        if rec.curvature is not None:
            sec = float(model.sectional(V.frame[:, 0], V.frame[:, 1]))
            rep.check(f"{label}: sectional", rec.curvature, sec, abs(sec - rec.curvature), tol)
        if rec.slope is not None:
            sl = subspace_slope(V, tol)
            if sl is None:
                res = math.inf
            elif math.isinf(rec.slope) or math.isinf(sl):
                res = 0.0 if sl == rec.slope else math.inf
            else:
                res = abs(sl - rec.slope)
            rep.check(f"{label}: slope", rec.slope, sl, res, tol)
        if rec.model is not None:
            mm = model_spectrum_mismatch(rec, V, model)
            rep.check(f"{label}: spectrum of model {rec.model[0]}{rec.model[1]}", 0.0, mm, mm, tol)
        if rec.phi is not None:
            ph = phi_invariant(V)
            rep.check(f"{label}: phi", rec.phi, ph, abs(ph - rec.phi), tol)
    return rep


def cmd_search(pres, tol, restarts, seed, isotropic, hits_path=None, refine_samples=11):
    cfg = SearchConfig(restarts=restarts, seed=seed, classify_tol=tol,
                       isotropy_weight=1.0 if isotropic else 0.0)
    result = search_planes(pres, cfg)
    rep = Report("search", None, pres.describe())
    summary = result.summary()
    rep.extra["summary"] = summary
    rep.check("unclassified hits", 0, summary["unclassified"], summary["unclassified"], 0)
    rep.check("converged restarts", ">= 1", result.converged, 0.0 if result.converged else math.inf, 0)
    anchors = {}
    for rec, _ in catalog_entries(pres):
        if rec.dimension == 2 and rec.curvature is not None:
            anchors[rec.tag] = rec.curvature
    for h in result.hits:
        if h.matched_family != UNCLASSIFIED:
            want = anchors[h.matched_family]
            rep.check(f"hit {h.restart} ({h.matched_family}) sectional", want, h.sectional,
                      abs(h.sectional - want), tol)
    if pres.family == "O" and 0 < pres.tau < 0.5:
        values, verdicts = refine_phi(result.hits, refine_samples, seed, result.model)
        lo, hi = (min(values), max(values)) if values else (math.nan, math.nan)
        rep.extra["phi_refinement"] = {"count": len(values), "min": lo, "max": hi}
        covered = bool(values) and lo <= 0.05 and hi >= 0.95
        rep.check("3-dim refinements: phi spans [0.05, 0.95]", [0.05, 0.95], [lo, hi],
                  0.0 if covered else math.inf, 0)
        bad = sum(v != NOT_WELL_POSITIONED for v in verdicts)
        rep.check("3-dim refinements certify", 0, bad, bad, 0)
    if hits_path:
        with open(hits_path, "w", encoding="utf-8") as fh:
            fh.write(hits_jsonl(result))
    return rep


def cmd_phi(tau, points, tol):
    pres = build_presentation("O", None, tau)
    rep = Report("phi", None, pres.describe())
    best = 0.0
    for theta in np.linspace(0.0, 1.0, points):
        a = np.pi * theta / 2
        for label, make, want in (("V_theta", v_theta, np.sin(a)),
                                  ("V'_theta", v_theta_prime, np.cos(a))):
            ph = phi_invariant(make(pres, float(theta)))
            best = max(best, ph)
            rep.check(f"|phi({label})| at theta={theta:.6g}", float(want), ph, abs(ph - want), tol)
    rep.check("max |phi| over associative fixtures", 1.0, best, abs(best - 1.0), tol)
    return rep


def cmd_geodesic(alphas, tau, s_max, samples, jmax, kmax, tol, csv_path=None):
    params = GeodesicParams(*alphas, tau)
    s = np.linspace(0.0, s_max, samples)
    rep = Report("geodesic", None, {"family": "C", "n": 1, "tau": tau})
    dev = float(np.abs(berger_geodesic_point(params, s) - orbit_oracle(params, s)).max())
    rep.check("closed form vs matrix exponential", 0.0, dev, dev, tol)
    sols = closed_geodesic_solutions(tau, jmax, kmax)
    worst = 0.0
    for slope, a3, period in sols:
        p = GeodesicParams(math.sqrt(1 - a3 * a3), 0.0, a3, tau)
        worst = max(worst, closure_residual(p, period))
    rep.extra["closed_solutions"] = len(sols)
    rep.check("closed geodesics return to the base point", 0.0, worst, worst, max(tol, 1e-8))
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(geodesic_csv(params, s))
    return rep


def _parser():
    p = argparse.ArgumentParser(prog="hopfberger", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, presentation=True):
        if presentation:
            sp.add_argument("--family", choices=("C", "H", "O"), required=True)
            sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--tau", type=float, required=presentation)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "markdown"), default="json")
        sp.add_argument("--timing", action="store_true", help="record wall time in the report")

    for name in ("spectra", "tables", "verify-catalog"):
        common(sub.add_parser(name))
    sp = sub.add_parser("search")
    common(sp)
    sp.add_argument("--restarts", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--isotropic", action="store_true")
    sp.add_argument("--hits", default=None, help="JSON-lines file for the hits")
    sp = sub.add_parser("phi")
    common(sp, presentation=False)
    sp.set_defaults(tau=0.2)
    sp.add_argument("--points", type=int, default=21)
    sp = sub.add_parser("geodesic")
    common(sp, presentation=False)
    sp.set_defaults(tau=0.3)
    sp.add_argument("--alphas", type=float, nargs=3, default=(0.6, 0.0, 0.8))
    sp.add_argument("--s-max", type=float, default=20.0)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--jmax", type=int, default=4)
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--csv", default=None, help="write the sampled geodesic here")
    return p


def run(args):
    tol = DEFAULT_TOL[args.command] if args.tol is None else args.tol
    if tol < 0:
        raise ValueError("--tol must be non-negative")
    if args.command == "phi":
        if args.points < 2:
            raise ValueError("--points must be at least 2")
        return cmd_phi(args.tau, args.points, tol)
    if args.command == "geodesic":
        if args.samples < 2 or args.s_max <= 0:
            raise ValueError("need --samples >= 2 and --s-max > 0")
        return cmd_geodesic(args.alphas, args.tau, args.s_max, args.samples,
                            args.jmax, args.kmax, tol, args.csv)
    pres = build_presentation(args.family, args.n, args.tau)
    if args.command == "spectra":
        return cmd_spectra(pres, tol)
    if args.command == "tables":
        return cmd_tables(pres, tol)
    if args.command == "verify-catalog":
        return cmd_verify_catalog(pres, tol)
    if args.restarts < 0:
        raise ValueError("--restarts must be non-negative")
    return cmd_search(pres, tol, args.restarts, args.seed, args.isotropic, args.hits)


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rep = run(args)
    except ValueError as exc:
        print(f"hopfberger: error: {exc}", file=sys.stderr)
        return 2
    echo = {k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "out", "format", "timing")}
    rep.args = {k: list(v) if isinstance(v, tuple) else v for k, v in echo.items()}
    if args.timing:
        rep.wall_time = time.perf_counter() - start
    text = report_json(rep) if args.format == "json" else report_markdown(rep)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
