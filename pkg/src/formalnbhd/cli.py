"""Command-line front end: one subcommand per pipeline, JSON in and out.

Files named ``-`` are read from stdin or written to stdout.  Failures print a
JSON error object and exit with 2 (invalid input), 3 (a mathematical
precondition fails) or 4 (truncation too low).
"""

import argparse
import json
import random
import sys
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from . import dynamics
from .bifoliated import classify_pair, tangency
from .coefficients import exact_field, float_field
from .errors import FormalError
from .germs import Germ
from .neighborhood import (INFINITY, ModelSpec, Presentation, build_model, cross_ratio_slope, holonomy,
                           involution)
from .normalform import HolRep, normalize_germ
from .series import PSeries


@dataclass
class JobConfig:
    backend: Optional[str] = None
    trunc: Optional[int] = None
    output: str = "-"
    seed: int = 0
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.trunc is not None and self.trunc < 4:
            raise FormalError("BAD_INPUT", "truncation order must be at least 4")

    @property
    def field(self):
        if self.backend is None:
            return None
        kind, _, arg = self.backend.partition(":")
        try:
            if kind == "exact":
                n = int(arg or 1)
                if n < 1:
                    raise FormalError("BAD_INPUT", "conductor must be at least 1")
                return exact_field(n)
            if kind == "float":
                return float_field(int(arg or 200))
        except ValueError as exc:
            raise FormalError("BAD_INPUT", f"bad backend {self.backend!r}") from exc
        raise FormalError("BAD_INPUT", f"backend must be exact[:N] or float[:BITS], got {self.backend!r}")


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormalError("BAD_INPUT", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormalError("BAD_INPUT", f"{path} is not valid JSON: {exc.msg}") from exc


def _write_json(obj, path):
    text = json.dumps(obj, indent=2)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _parse_value(text):
    """A coefficient from the command line: rational, JSON object or ``inf``."""
    text = text.strip()
    if text.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if text.startswith("{"):
        return json.loads(text)
    try:
        return Fraction(text)
    except ValueError as exc:
        raise FormalError("BAD_INPUT", f"not a coefficient: {text!r}") from exc


def _parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise FormalError("BAD_INPUT", f"not a complex number: {text!r}") from exc


def _load_model(obj, field, order=None):
    spec = ModelSpec.from_json(obj.get("spec", obj), field)
    if "gen1" in obj:
        pres = Presentation.from_json(obj, spec.field)
    else:
        if order is None:
            raise FormalError("BAD_INPUT", "the model file has no generators; pass --order")
        pres = build_model(spec, order)
    return spec, pres


def _load_pair(obj, field):
    if "spec" in obj:
        spec, pres = _load_model(obj, field, obj.get("order"))
        return holonomy(pres, spec, 0), holonomy(pres, spec, INFINITY), spec.tau
    try:
        repF = HolRep.from_json(obj["F"], field)
        repG = HolRep.from_json(obj["G"], field)
    except KeyError as exc:
        raise FormalError("BAD_INPUT", f"pair file needs 'F' and 'G' holonomies, missing {exc}") from exc
    tau = obj.get("tau")
    if tau is not None:
        tau = repF.gen1.field.decode(tau)
    return repF, repG, tau if tau is not None else repF.tau


def cmd_normalize(args, cfg):
    f = Germ.from_json(_read_json(args.file), cfg.field)
    return normalize_germ(f, bound=args.bound, periodic=args.periodic).to_json()


def cmd_classify(args, cfg):
    repF, repG, tau = _load_pair(_read_json(args.file), cfg.field)
    return classify_pair(repF, repG, tau).to_json()


def cmd_build(args, cfg):
    spec = ModelSpec.from_json(_read_json(args.spec), cfg.field)
    pres = build_model(spec, args.order)
    out = pres.to_json()
    out["kind"] = "model"
    out["spec"] = spec.to_json()
    return out


def cmd_holonomy(args, cfg):
    spec, pres = _load_model(_read_json(args.model), cfg.field, args.order)
    t = _parse_value(args.t)
    if isinstance(t, dict):
        t = spec.field.decode(t)
    rep = holonomy(pres, spec, t)
    return (rep.gen1 if args.loop == "1" else rep.gentau).to_json()


def cmd_tangency(args, cfg):
    repF, repG, _ = _load_pair(_read_json(args.pair), cfg.field)
    return tangency(repF, repG)


def cmd_involution(args, cfg):
    return involution(ModelSpec.from_json(_read_json(args.spec), cfg.field)).to_json()


def cmd_crossratio(args, cfg):
    obj = _read_json(args.slopes)
    raw = obj["slopes"] if isinstance(obj, dict) else obj
    if len(raw) != 3:
        raise FormalError("BAD_INPUT", "exactly three slopes are needed")
    slopes = [PSeries.from_json(s, cfg.field) for s in raw]
    c = _parse_value(args.c)
    if c == INFINITY:
        raise FormalError("BAD_INPUT", "the cross-ratio must be finite")
    if isinstance(c, dict):
        c = slopes[0].field.decode(c)
    return cross_ratio_slope(*slopes, c).to_json()


def cmd_brjuno(args, cfg):
    if args.cf is not None:
        obj = _read_json(args.cf)
        quotients = obj["quotients"] if isinstance(obj, dict) else obj
        cf = dynamics.from_quotients(quotients)
    else:
        alpha = args.alpha
        if alpha == "golden":
            alpha = dynamics.golden_mean
        cf = dynamics.continued_fraction(alpha, args.terms, bits=args.bits)
    cf.verify()
    terms = min(args.terms, len(cf.quotients)) if cf.terminated else args.terms
    return dynamics.brjuno_profile(cf, terms).to_json()


def cmd_koenigs(args, cfg):
    f = Germ.from_json(_read_json(args.map), cfg.field)
    rep = dynamics.koenigs(f, _parse_complex(args.seed), args.iters, bits=args.bits)
    return rep.to_json()


def cmd_dioph(args, cfg):
    prof = dynamics.diophantine_profile(_parse_complex(args.tau), _parse_complex(args.z0), args.K,
                                        args.alpha, args.eps)
    return prof.to_json()


def build_parser():
    p = argparse.ArgumentParser(prog="formalnbhd", description=__doc__.splitlines()[0])
    p.add_argument("--backend", help="exact[:CONDUCTOR] or float[:BITS]; default follows the input")
    p.add_argument("--seed", dest="rng_seed", type=int, default=0, help="random seed")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default="-", help="output file, '-' for stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize-diffeo", parents=[common], help="normal form of a germ")
    s.add_argument("file")
    s.add_argument("--bound", type=int, default=64, help="largest torsion order tested")
    s.add_argument("--periodic", action="store_true", help="accept periodic germs")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("classify-pair", parents=[common], help="invariants of a bifoliated pair")
    s.add_argument("file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("build-model", parents=[common], help="generators of a normal-form model")
    s.add_argument("--spec", required=True)
    s.add_argument("--order", type=int, required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("holonomy", parents=[common], help="holonomy of a pencil member")
    s.add_argument("--model", required=True)
    s.add_argument("--t", required=True, help="pencil parameter, or 'inf'")
    s.add_argument("--loop", choices=("1", "tau"), default="1")
    s.add_argument("--order", type=int, help="truncation when the model file holds only a spec")
    s.set_defaults(func=cmd_holonomy)

    s = sub.add_parser("tangency", parents=[common], help="tangency order of two foliations")
    s.add_argument("--pair", required=True)
    s.set_defaults(func=cmd_tangency)

    s = sub.add_parser("involution", parents=[common], help="parameters after (x, y) -> (-x, xi y)")
    s.add_argument("--spec", required=True)
    s.set_defaults(func=cmd_involution)

    s = sub.add_parser("crossratio", parents=[common], help="recombine three slopes with a cross-ratio")
    s.add_argument("--slopes", required=True)
    s.add_argument("--c", required=True)
    s.set_defaults(func=cmd_crossratio)

    s = sub.add_parser("brjuno", parents=[common], help="Brjuno partial sums")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", help="decimal, p/q, or 'golden'")
    g.add_argument("--cf", help="JSON file of partial quotients")
    s.add_argument("--terms", type=int, default=40)
    s.add_argument("--bits", type=int, default=dynamics.DEFAULT_BITS)
    s.set_defaults(func=cmd_brjuno)

    s = sub.add_parser("koenigs", parents=[common], help="evaluate the Koenigs linearizer")
    s.add_argument("--map", required=True)
    s.add_argument("--seed", required=True, help="point z, e.g. 0.1 or 0.1+0.2i")
    s.add_argument("--iters", type=int, default=60)
    s.add_argument("--bits", type=int, default=dynamics.DEFAULT_BITS)
    s.set_defaults(func=cmd_koenigs)

    s = sub.add_parser("dioph", parents=[common], help="distances of k z0 to the lattice")
    s.add_argument("--tau", required=True)
    s.add_argument("--z0", required=True)
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--eps", type=float, default=1e-3)
    s.set_defaults(func=cmd_dioph)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = JobConfig(args.backend, getattr(args, "order", None), args.output, args.rng_seed)
        random.seed(cfg.seed)
        result = args.func(args, cfg)
    except FormalError as exc:
        _write_json(exc.to_json(), "-")
        return exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        _write_json({"error": "BAD_INPUT", "message": f"{type(exc).__name__}: {exc}"}, "-")
        return 2
    _write_json(result, cfg.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
