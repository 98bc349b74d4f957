"""Command line entry point: JSON reports on stdout, CSV convergence tables on request.

Exit codes: 0 ok, 1 flagged, 2 failed, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .config import ConfigError, parse_cyc, parse_cyc_matrix, parse_config, resolved_config

EXIT_OK, EXIT_FLAGGED, EXIT_FAILED, EXIT_USAGE = 0, 1, 2, 64
_STATUS_CODE = {"ok": EXIT_OK, "flagged": EXIT_FLAGGED, "failed": EXIT_FAILED}

__all__ = ["main", "run_command", "envelope", "emit_csv", "selftest"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def envelope(command: str, config: dict, payload, status: str) -> dict:
    return {
        "version": __version__,
        "command": command,
        "config": config,
        "config_digest": config_digest(config),
        "timestamp": _timestamp(),
        "status": status,
        "payload": payload,
    }


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(estimate, path) -> None:
    """Columns ``m, hhat, ratio, log_hhat``; one row per iterate including ``m = 0``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "hhat", "ratio", "log_hhat"])
        for m, h in enumerate(estimate.heights):
            ratio = "" if m == 0 else _fmt(estimate.ratios[m - 1])
            log_h = _fmt(math.log(h)) if h > 0 else ""
            w.writerow([m, _fmt(h), ratio, log_h])


# ---------------------------------------------------------------------------
# commands


def _cmd_census(args):
    from .lattice import census_closed_forms, singular_census
    closed = census_closed_forms(args.k, args.n)
    if args.closed_form:
        return closed.as_dict(), "ok"
    enum = singular_census(args.k, args.n)
    return enum.as_dict(), "ok" if enum.counts == closed.counts else "failed"


def _curve_arg(name):
    from .elliptic import CurveSpec
    if name is None:
        return None
    if name in ("quartic", "sextic"):
        return CurveSpec(name)
    return CurveSpec.legendre(Fraction(name))


def _cmd_autgroup(args):
    from .autgroups import aut_group_summary
    s = aut_group_summary(args.k, args.n, _curve_arg(args.curve))
    return s.to_json(), "ok" if s.matches else "failed"


def _cmd_klein(args):
    from .autgroups import KleinAut, klein_compose, normalizer_relations_check, unit_group_probe
    from .cyclo import CycInt, is_unit, zeta
    payload, ok = {}, True
    both = not (args.relations or args.units)
    if args.relations or both:
        rel = normalizer_relations_check()
        payload["relations"] = rel.to_json()
        ok = ok and rel.ok
    if args.units or both:
        z = zeta(7)
        probe = unit_group_probe()
        cert = is_unit(1 + z)
        product = (1 + z) * (z ** 5 + z ** 3 + z)
        payload["units"] = probe.to_json()
        payload["units"]["inverse_of_1_plus_z"] = str(cert.inverse)
        payload["units"]["product_identity"] = str(product)
        ok = ok and probe.torsion_order == 14 and probe.exhibited_rank == 2 and product == -1
    if both:
        one = CycInt.from_int(7, 1)
        g = klein_compose(klein_compose(KleinAut(0, one, 1, False), KleinAut(0, zeta(7), 0, False), False),
                          KleinAut(0, one, 2, False), False)
        payload["conjugation_word"] = g.to_json()
        ok = ok and g.unit == zeta(7, 2) and g.twist == 0
    return payload, "ok" if ok else "failed"


def _cmd_pisot(args):
    from .linalg import PisotConstructionError, pisot_seed
    from .polys import pstr
    try:
        s = pisot_seed(args.n)
    except PisotConstructionError as exc:
        return {"n": args.n, "error": str(exc)}, "failed"
    return {"n": s.n, "poly": pstr(s.poly), "coefficients": list(s.poly), "squared": s.squared,
            "a_n": s.a_n.to_json(), "matrix": [list(r) for r in s.matrix.entries],
            "checks": s.checks}, "ok"


def _cmd_dyndeg(args):
    from .dynamics import dynamical_degree
    from .linalg import CycMat
    if args.klein_unit is not None:
        m = CycMat.of(7, [[parse_cyc(args.klein_unit, 7)]])
    else:
        if args.k is None or args.n is None or args.matrix is None:
            raise UsageError("dyndeg needs --k, --n and --matrix, or --klein-unit")
        with open(args.matrix) as fh:
            m = parse_cyc_matrix(fh.read(), args.k)
        if m.shape != (args.n, args.n):
            raise ConfigError(f"matrix is {m.shape[0]}x{m.shape[1]}, expected {args.n}x{args.n}")
    rep = dynamical_degree(m)
    return rep.to_json(), "ok"


def _cmd_arithdeg(args, cfg):
    from .dynamics import arithmetic_degree_estimate
    est = arithmetic_degree_estimate(cfg)
    if args.csv:
        emit_csv(est, args.csv)
    status = "ok" if est.gram_converged and est.converged else "flagged"
    return est.to_json(), status


def _cmd_ksc(args, cfg):
    from .dynamics import (BoundViolation, arithmetic_degree_estimate, density_heuristic,
                           dynamical_degree, ksc_verdict)
    dyn = dynamical_degree(cfg.matrix)
    est = arithmetic_degree_estimate(cfg)
    if args.csv:
        emit_csv(est, args.csv)
    dens = density_heuristic(cfg, [list(r) for r in est.gram])
    payload = {"dyndeg": dyn.to_json(), "arithdeg": est.to_json(), "density": dens.to_json()}
    try:
        verdict = ksc_verdict(dyn, est, dens, cfg.tol_ksc)
    except BoundViolation as exc:
        payload["verdict"] = {"error": str(exc)}
        return payload, "failed"
    payload["verdict"] = verdict.to_json()
    flagged = (not est.gram_converged or dens.verdict == "inconclusive"
               or verdict.verdict in ("discrepant", "unconverged"))
    return payload, "flagged" if flagged else "ok"


def selftest() -> list[dict]:
    """Fast versions of the invariant suites; each entry is ``{name, passed, detail}``."""
    import random

    from .autgroups import (KleinAut, UenoAut, compose, inverse, klein_compose, klein_inverse,
                            normalizer_relations_check, random_klein_aut, random_ueno_aut)
    from .cyclo import is_unit, norm, torsion_units, zeta
    from .dynamics import (arithmetic_degree_estimate, density_heuristic, dynamical_degree,
                           ksc_verdict, pisot_experiment)
    from .elliptic import DEFAULT_CURVE, canonical_height
    from .lattice import census_audit, census_closed_forms, fixed_points, singular_census, TorusModel
    from .linalg import CycMat, IntMat, charpoly, companion, det, smith_normal_form

    results = []

    def check(name, fn):
        try:
            passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - a crash is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(passed), "detail": detail})

    def census():
        bad = [(k, n) for k in (2, 3, 4, 6) for n in (1, 2, 3)
               if singular_census(k, n).counts != census_closed_forms(k, n).counts]
        audit = all(a == b for k in (2, 3, 4, 6) for a, b in census_audit(singular_census(k, 2)).values())
        return not bad and audit, f"mismatches {bad}, audit {'ok' if audit else 'broken'}"

    def fixed_vs_det():
        out = []
        for k in (2, 3, 4, 6):
            m = TorusModel.ueno(k, 2)
            for j in range(1, k):
                s = CycMat.scalar(k, 2, zeta(k) ** j)
                d = abs(det(m.zmat(s) - IntMat.identity(m.zrank)))
                out.append(fixed_points(s, m).order == d)
        return all(out), f"{sum(out)}/{len(out)} strata agree"

    def units():
        z = zeta(7)
        t = torsion_units(7)
        closed = all(a * b in t for a in t for b in t)
        return ((1 + z) * (z ** 5 + z ** 3 + z) == -1 and len(t) == 14 and closed
                and all((is_unit(u) is not None) == (abs(norm(u)) == 1) for u in t + [1 + z, z - 1])), \
            "torsion closed, unit test matches norm"

    def relations():
        r = normalizer_relations_check(10)
        return r.ok, json.dumps(r.to_json())

    def companion_roundtrip():
        rng = random.Random(5)
        ok = True
        for deg in range(1, 9):
            p = tuple(rng.randint(-5, 5) for _ in range(deg)) + (1,)
            ok = ok and charpoly(companion(p)) == p
        return ok, "degrees 1..8"

    def snf():
        rng = random.Random(6)
        ok = True
        for _ in range(10):
            a = IntMat.of([[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)])
            u, d, v = smith_normal_form(a)
            diag = [d[i, i] for i in range(4)]
            ok = ok and u @ a @ v == d and abs(det(u)) == 1 and abs(det(v)) == 1 and all(
                diag[i + 1] % diag[i] == 0 if diag[i] else diag[i + 1] == 0 for i in range(3))
        return ok, "random 4x4"

    def heights():
        p = DEFAULT_CURVE.point(3, 3)
        h1, h2 = canonical_height(p).value, canonical_height(p.double()).value
        t = canonical_height(DEFAULT_CURVE.point(0, 0)).value
        return abs(h2 - 4 * h1) < 4e-10 and t < 1e-6, f"h(P)={h1!r}, h(2P)/4={h2 / 4!r}"

    def groups():
        rng = random.Random(7)
        ok = True
        for k in (2, 3, 4, 6):
            for _ in range(3):
                a, b, c = (random_ueno_aut(k, 3, rng) for _ in range(3))
                ok = ok and compose(compose(a, b), c) == compose(a, compose(b, c))
                ok = ok and compose(a, inverse(a)) == UenoAut.identity(k, 3)
        for _ in range(10):
            a, b, c = (random_klein_aut(rng) for _ in range(3))
            ok = ok and klein_compose(klein_compose(a, b), c) == klein_compose(a, klein_compose(b, c))
            ok = ok and klein_compose(a, klein_inverse(a)) == KleinAut.identity()
        return ok, "associativity and inverses"

    def dyn():
        rep = dynamical_degree(CycMat.of(7, [[1 + zeta(7)]]))
        target = Fraction(32469796, 10 ** 7)
        return (abs(rep.d1.mid - target) < Fraction(1, 10 ** 6) and rep.invariant_divisor_free), \
            f"d1 ~ {float(rep.d1.mid)!r}, witnesses {rep.exact_witnesses}"

    def ksc():
        cfg = pisot_experiment(3, 20)
        d, a = dynamical_degree(cfg.matrix), arithmetic_degree_estimate(cfg)
        v = ksc_verdict(d, a, density_heuristic(cfg, [list(r) for r in a.gram]), 1e-3)
        return v.passed and v.density == "plausibly-dense", f"discrepancy {v.discrepancy!r}"

    for name, fn in [("census", census), ("fixed_vs_det", fixed_vs_det), ("units", units),
                     ("relations", relations), ("companion_roundtrip", companion_roundtrip),
                     ("smith_normal_form", snf), ("heights", heights), ("group_laws", groups),
                     ("klein_dynamical_degree", dyn), ("ksc_pisot3", ksc)]:
        check(name, fn)
    return results


def _cmd_selftest(args):
    res = selftest()
    return {"checks": res, "passed": sum(r["passed"] for r in res), "total": len(res)}, \
        "ok" if all(r["passed"] for r in res) else "failed"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uenodyn", description="Exact experiments on Ueno-type and Klein quotients.")
    p.add_argument("--version", action="version", version=f"uenodyn {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    c = sub.add_parser("census", help="singular points of E^n/<sigma> by type")
    c.add_argument("--k", type=int, required=True, choices=(2, 3, 4, 6))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--closed-form", action="store_true")
    a = sub.add_parser("autgroup", help="structure of the automorphism group")
    a.add_argument("--k", type=int, required=True, choices=(2, 3, 4, 6))
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--curve", help="for k=2: quartic, sextic or a Legendre lambda such as 3/2")
    k = sub.add_parser("klein", help="identities for the Klein quotient")
    g = k.add_mutually_exclusive_group()
    g.add_argument("--relations", action="store_true")
    g.add_argument("--units", action="store_true")
    ps = sub.add_parser("pisot", help="Pisot unit seed of degree n")
    ps.add_argument("--n", type=int, required=True)
    d = sub.add_parser("dyndeg", help="first dynamical degree")
    d.add_argument("--k", type=int, choices=(2, 3, 4, 6, 7))
    d.add_argument("--n", type=int)
    d.add_argument("--matrix", help="file with rows separated by newlines or ';', entries polynomials in z")
    d.add_argument("--klein-unit", help="unit of Z[zeta_7] as a polynomial in z, e.g. '1+z'")
    for name, text in (("arithdeg", "arithmetic degree estimate"), ("ksc", "full KSC experiment")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True)
        s.add_argument("--csv", help="write the convergence table here")
    sub.add_parser("selftest", help="run the invariant suites")
    return p


def _config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "config", "csv")}


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("uenodyn: a subcommand is required")
    except UsageError as exc:
        print(str(exc), file=err)
        parser.print_usage(err)
        return EXIT_USAGE
    handlers = {"census": _cmd_census, "autgroup": _cmd_autgroup, "klein": _cmd_klein,
                "pisot": _cmd_pisot, "dyndeg": _cmd_dyndeg, "selftest": _cmd_selftest}
    try:
        if args.command in ("arithdeg", "ksc"):
            cfg = parse_config(args.config)
            config = resolved_config(cfg)
            fn = _cmd_arithdeg if args.command == "arithdeg" else _cmd_ksc
            payload, status = fn(args, cfg)
        else:
            config = _config_of(args)
            payload, status = handlers[args.command](args)
    except UsageError as exc:
        print(str(exc), file=err)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=err)
        report = envelope(args.command, {"config_file": getattr(args, "config", None)},
                          {"error": str(exc)}, "failed")
        print(json.dumps(report, indent=2), file=out)
        return EXIT_FAILED
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=err)
        report = envelope(args.command, _config_of(args), {"error": str(exc)}, "failed")
        print(json.dumps(report, indent=2), file=out)
        return EXIT_FAILED
    print(json.dumps(envelope(args.command, config, payload, status), indent=2), file=out)
    return _STATUS_CODE[status]


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())
