"""Command-line front door.

Machine-readable results (probabilities, CSV, JSON lines) go to
standard output; human-oriented notes go to standard error. Every
command runs in-process by default and against a running service when
--server is given, with identical output either way.

Physical inputs use the laboratory convention: --omega0-mhz and
--delta0-mhz are Omega0/2pi and Delta0/2pi in MHz, --tau-ns is tau in
nanoseconds; they convert to alpha = Omega0 tau / 2, beta =
Delta0 tau / 2 before anything else runs.
"""

import argparse
import json
import math
import sys

from . import __version__, catalog, dynamics, landscape
from .errors import ContractError, IsopulseError

_EPILOG = """examples:
  isopulse catalog list --csv
  isopulse analytic --model aeh --alpha 1 --beta 0.5
  isopulse simulate --class lmsz --row 1 --alpha 1 --beta 1 --picture phase
  isopulse simulate --class aeh --row 8 --omega0-mhz 17.68 --delta0-mhz 5 --tau-ns 28.3
  isopulse scan --class aeh --row 8 --alpha 0:3:101 --beta -2:2:101 --out map.csv
  isopulse compare a.csv b.csv --align --bounds-pct 5
  isopulse serve --port 8000
"""


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


# ------------------------------------------------------------- parsing

def _parse_axis(text: str):
    from .service.models import AxisModel
    parts = text.split(":")
    if len(parts) != 3:
        raise ContractError(
            f"axis spec {text!r} must look like start:stop:count")
    try:
        return AxisModel(start=float(parts[0]), stop=float(parts[1]),
                         count=int(parts[2]))
    except ValueError as exc:
        raise ContractError(f"bad axis spec {text!r}: {exc}") from None


def _parse_truncation(text: str | None):
    if text is None:
        return None
    from .service.models import TruncationModel
    name, _, arg = text.partition(":")
    try:
        if name == "tail":
            return TruncationModel(policy="tail",
                                   eps=float(arg) if arg else None)
        if name == "window":
            if not arg:
                raise ContractError("window truncation needs a width: window:T")
            return TruncationModel(policy="window", t_over_tau=float(arg))
        if name == "guard":
            return TruncationModel(policy="guard",
                                   delta=float(arg) if arg else None)
        if name == "full":
            return TruncationModel(policy="full")
    except ValueError as exc:
        raise ContractError(f"bad truncation {text!r}: {exc}") from None
    raise ContractError(
        f"unknown truncation {name!r}; use tail[:eps], window:T, "
        "guard[:delta] or full")


def _resolve_alpha_beta(args) -> tuple[float, float]:
    dimensionless = args.alpha is not None or args.beta is not None
    physical = (args.omega0_mhz is not None or args.delta0_mhz is not None
                or args.tau_ns is not None)
    if dimensionless and physical:
        raise ContractError(
            "give either --alpha/--beta or the physical set "
            "(--omega0-mhz, --delta0-mhz, --tau-ns), not both")
    if dimensionless:
        if args.alpha is None or args.beta is None:
            raise ContractError("both --alpha and --beta are required")
        return args.alpha, args.beta
    if physical:
        if None in (args.omega0_mhz, args.delta0_mhz, args.tau_ns):
            raise ContractError(
                "physical input needs --omega0-mhz, --delta0-mhz and --tau-ns")
        # alpha = Omega0 tau / 2 with Omega0 = 2pi f; MHz * ns = 1e-3
        alpha = math.pi * args.omega0_mhz * args.tau_ns * 1e-3
        beta = math.pi * args.delta0_mhz * args.tau_ns * 1e-3
        return alpha, beta
    raise ContractError(
        "one parameter set is required: --alpha/--beta or the physical set")


def _integrator(args):
    from .service.models import IntegratorModel
    return IntegratorModel(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                           max_steps=args.max_steps, mode=args.mode)


def _add_integrator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--mode", choices=("adaptive", "fixed"), default="adaptive")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="Omega0 tau / 2")
    p.add_argument("--beta", type=float, help="Delta0 tau / 2")
    p.add_argument("--omega0-mhz", type=float,
                   help="Omega0/2pi in MHz (with --delta0-mhz and --tau-ns)")
    p.add_argument("--delta0-mhz", type=float, help="Delta0/2pi in MHz")
    p.add_argument("--tau-ns", type=float, help="tau in nanoseconds")


# -------------------------------------------------------------- server

def _post(server: str, path: str, payload: dict) -> dict:
    import httpx
    url = server.rstrip("/") + path
    reply = httpx.post(url, json=payload, timeout=600.0)
    if reply.status_code != 200:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise ContractError(f"server {path} failed ({reply.status_code}): {detail}")
    return reply.json()


def _get(server: str, path: str):
    import httpx
    reply = httpx.get(server.rstrip("/") + path, timeout=60.0)
    if reply.status_code != 200:
        raise ContractError(f"server {path} failed ({reply.status_code})")
    return reply.json()


# ------------------------------------------------------------ commands

def _cmd_catalog(args) -> int:
    if args.action != "list":
        raise ContractError(f"unknown catalog action {args.action!r}")
    if args.server:
        entries = _get(args.server, "/catalog")
    else:
        from .service.models import CatalogEntry
        from .service.app import do_catalog
        entries = [e.model_dump() for e in do_catalog()]
    if args.csv:
        print("row,name,domain_kind,has_closed_s")
        for e in entries:
            print(f"{e['row']},{e['name']},{e['domain_kind']},"
                  f"{'true' if e['has_closed_s'] else 'false'}")
        return 0
    _info(f"{'row':>3}  {'name':<10} {'domain':<9} {'s(x)':<10} formula")
    for e in entries:
        s_kind = "closed" if e["has_closed_s"] else "quadrature"
        _info(f"{e['row']:>3}  {e['name']:<10} {e['domain_kind']:<9} "
              f"{s_kind:<10} {e['formula']}")
    return 0


def _cmd_analytic(args) -> int:
    from .service.models import AnalyticRequest
    req = AnalyticRequest(model=args.model, alpha=args.alpha, beta=args.beta)
    if args.server:
        reply = _post(args.server, "/analytic", req.model_dump())
        p = reply["probability"]
    else:
        from .service.app import do_analytic
        p = do_analytic(req).probability
    print(f"{p:.12g}")
    return 0


def _cmd_simulate(args) -> int:
    from .service.models import SimulateRequest
    alpha, beta = _resolve_alpha_beta(args)
    req = SimulateRequest(class_tag=args.klass, row=args.row,
                          alpha=alpha, beta=beta, picture=args.picture,
                          integrator=_integrator(args),
                          truncation=_parse_truncation(args.truncation))
    if args.trajectory:
        if args.server:
            raise ContractError("--trajectory runs locally only")
        policy = req.truncation.to_policy() if req.truncation else None
        model = catalog.model_from_alpha_beta(req.class_tag, req.row,
                                              req.alpha, req.beta,
                                              truncation=policy)
        p = dynamics.transition_probability(model, req.picture,
                                            req.integrator.to_config(),
                                            trajectory=args.trajectory)
        print(f"{p:.12g}")
        _info(f"trajectory written to {args.trajectory}")
        return 0
    if args.server:
        reply = _post(args.server, "/simulate",
                      req.model_dump(by_alias=True, exclude_none=True))
    else:
        from .service.app import do_simulate
        reply = do_simulate(req).model_dump()
    print(f"{reply['probability']:.12g}")
    w = reply["window"]
    _info(f"window [{w['lo']:.6g}, {w['hi']:.6g}] ({w['policy']}), "
          f"area deficit {w['deficit']:.3g} per side")
    _info(f"unitarity defect {reply['unitarity_defect']:.3g}, "
          f"norm defect {reply['norm_defect']:.3g}")
    return 0


def _cmd_scan(args) -> int:
    from .service.models import ScanRequest
    req = ScanRequest(class_tag=args.klass, row=args.row,
                      alpha=_parse_axis(args.alpha), beta=_parse_axis(args.beta),
                      picture=args.picture, integrator=_integrator(args),
                      truncation=_parse_truncation(args.truncation),
                      workers=args.workers)
    if args.server:
        reply = _post(args.server, "/scan",
                      req.model_dump(by_alias=True, exclude_none=True))
        from .service.models import LandscapeModel
        land = LandscapeModel.model_validate(reply).to_landscape()
    else:
        from .service.app import do_scan
        land = do_scan(req).to_landscape()
    text = landscape.format_csv(land)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        _info(f"landscape written to {args.out}")
    if args.render:
        landscape.render_heatmap(land, args.render)
        _info(f"heatmap written to {args.render}")
    return 0


def _cmd_compare(args) -> int:
    from .service.models import CompareRequest, LandscapeModel
    if args.diff and args.server:
        raise ContractError("--diff runs locally only")
    a = landscape.load_csv(args.a)
    b = landscape.load_csv(args.b)
    req = CompareRequest(a=LandscapeModel.from_landscape(a),
                         b=LandscapeModel.from_landscape(b),
                         align=args.align, resample=args.resample,
                         bounds_pct=args.bounds_pct)
    if args.server:
        reply = _post(args.server, "/compare",
                      req.model_dump(by_alias=True, exclude_none=True))
    else:
        from .service.app import do_compare
        reply = do_compare(req).model_dump()
    reply = {k: v for k, v in reply.items() if v is not None}
    print(json.dumps(reply))
    if args.diff:
        from . import alignment
        if args.resample:
            a = alignment.resample_bilinear(a, args.resample, args.resample)
            b = alignment.resample_bilinear(b, args.resample, args.resample)
        bounds = alignment.Bounds.fraction_of(a.values.shape, args.bounds_pct)
        res = alignment.align(a, b, bounds, keep_difference=True)
        with open(args.diff, "w") as fh:
            for grid_row in res.difference_map:
                fh.write(",".join(f"{v:.9g}" for v in grid_row) + "\n")
        _info(f"difference map written to {args.diff}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    _info(f"isopulse {__version__} serving on {args.host}:{args.port}")
    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="warning")
    return 0


# --------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isopulse",
        description="Isoprobability two-level models: catalog, propagation, "
                    "landscapes, map alignment.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"isopulse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the pulse-shape table")
    p.add_argument("action", choices=("list",))
    p.add_argument("--csv", action="store_true",
                   help="machine-readable CSV on stdout")
    p.add_argument("--server")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("analytic", help="closed-form probabilities")
    p.add_argument("--model", choices=("lmsz", "aeh", "rabi"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("simulate", help="single-shot transition probability")
    p.add_argument("--class", dest="klass", choices=("lmsz", "aeh"),
                   required=True)
    p.add_argument("--row", type=int, required=True)
    _add_param_flags(p)
    p.add_argument("--picture", choices=("detuning", "phase"),
                   default="detuning")
    p.add_argument("--truncation",
                   help="tail[:eps] | window:T | guard[:delta] | full")
    p.add_argument("--trajectory", help="write per-step amplitudes to CSV")
    _add_integrator_flags(p)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("scan", help="2D excitation landscape")
    p.add_argument("--class", dest="klass", choices=("lmsz", "aeh"),
                   required=True)
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--alpha", required=True, metavar="START:STOP:COUNT")
    p.add_argument("--beta", required=True, metavar="START:STOP:COUNT")
    p.add_argument("--picture", choices=("detuning", "phase"),
                   default="detuning")
    p.add_argument("--truncation")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--render", help="write a PGM/PNG heatmap")
    p.add_argument("--workers", type=int, default=1)
    _add_integrator_flags(p)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("compare", help="MSE comparison and map alignment")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--align", action="store_true")
    p.add_argument("--resample", type=int)
    p.add_argument("--bounds-pct", type=float, default=5.0)
    p.add_argument("--diff", help="write the aligned difference map")
    p.add_argument("--server")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


# Flags whose values may start with '-' (negative numbers, axis specs);
# argparse mistakes those for option names unless joined with '='.
_VALUE_FLAGS = frozenset((
    "--alpha", "--beta", "--rel-tol", "--abs-tol",
    "--omega0-mhz", "--delta0-mhz", "--tau-ns", "--bounds-pct"))


def _normalize(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            nxt = argv[i + 1]
            if len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit()
                                                   or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                i += 2
                continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_normalize(argv))
    try:
        return args.func(args)
    except (IsopulseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())