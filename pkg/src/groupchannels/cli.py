"""Command-line interface: JSON/CSV in and out, deterministic reruns.

Every invocation emits an envelope {"manifest": ..., "result": ...}; the
manifest records the argv, inputs, seed, and tool version, and replaying the
recorded command reproduces the output byte for byte (floats are printed with
17 significant digits).  Exit codes: 0 success, 2 validation error, 3
numerical failure, 64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalFailure, ValidationError
from .exprs import parse_real_vector, parse_vector
from .groups import FiniteGroup, ProbabilityMeasure, make_group
from .reps import PositiveDefiniteFunction, irrep_catalog, pdf_from_rep
from .channels import (
    QuantumChannel,
    choi,
    compose,
    duality_check,
    is_bistochastic,
    is_unitary_conjugation,
    theta,
    theta_hat,
    weyl_covariant,
)
from .geometry import (
    aqbc_search,
    bloch_vectors,
    correlation_matrix,
    export_bloch_orbit,
    is_maximally_extreme,
)
from .spectra import (
    eb_test,
    min_output_entropy,
    moe_theta_hat_restricted,
    moe_theta_restricted,
    schur_capacity,
    shannon_entropy,
)
from .fixedpoints import noiseless_subsystems, verify_fix_theta, verify_fix_theta_hat
from . import serialize
from .groups import cyclic, product


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # exit code 2 with a machine-readable object
        raise ValidationError(message)


def _load_group(spec: str) -> FiniteGroup:
    if spec.startswith("@"):
        payload = json.loads(Path(spec[1:]).read_text(encoding="utf-8"))
        return serialize.group_from_obj(payload)
    return make_group(spec)


def _load_measure(group: FiniteGroup, text: str) -> ProbabilityMeasure:
    if text.startswith("@"):
        payload = json.loads(Path(text[1:]).read_text(encoding="utf-8"))
        return serialize.measure_from_obj(payload)
    return ProbabilityMeasure(group, parse_real_vector(text))


def _select_irrep(group: FiniteGroup, selector: str):
    reps = irrep_catalog(group)
    selector = selector.strip().lower()
    if selector.endswith("d") and selector[:-1].isdigit():
        dim = int(selector[:-1])
        for rep in reps:
            if rep.dim == dim:
                return rep
        raise ValidationError(f"no irreducible representation of dimension {dim}")
    if selector.isdigit():
        idx = int(selector)
        if idx >= len(reps):
            raise ValidationError(f"irrep index {idx} out of range")
        return reps[idx]
    raise ValidationError(f"cannot interpret irrep selector {selector!r}")


def _load_pdf(group: FiniteGroup, args) -> PositiveDefiniteFunction:
    if getattr(args, "pdf", None):
        text = args.pdf
        if text.startswith("@"):
            payload = json.loads(Path(text[1:]).read_text(encoding="utf-8"))
            return serialize.pdf_from_obj(payload)
        return PositiveDefiniteFunction(group, parse_vector(text))
    if getattr(args, "xi", None):
        if not getattr(args, "irrep", None):
            raise ValidationError("--xi needs --irrep to pick a representation")
        rep = _select_irrep(group, args.irrep)
        xi = parse_vector(args.xi)
        norm = np.linalg.norm(xi)
        if norm == 0:
            raise ValidationError("--xi must be a nonzero vector")
        if abs(norm - 1.0) > 1e-12:
            xi = xi / norm
        return pdf_from_rep(rep, xi)
    raise ValidationError("need --pdf or --xi/--irrep")


def _load_channel(path: str) -> QuantumChannel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return serialize.channel_from_obj(payload)


def _certificate_obj(cert) -> dict:
    return {"extreme": cert.extreme, "rank": cert.rank,
            "span_dim": cert.span_dim, "hermitian_dim": cert.hermitian_dim,
            "real_valued": cert.real_valued,
            "aqbc_violation": cert.aqbc_violation,
            "maximally_extreme": cert.extreme}


def _channel_result(channel: QuantumChannel) -> dict:
    report = is_bistochastic(channel)
    return {"channel": serialize.channel_to_obj(channel),
            "bistochastic": {"verdict": report.verdict,
                             "unital_residual": report.unital_residual,
                             "tp_residual": report.tp_residual}}


def _cmd_group(args) -> dict:
    group = _load_group(args.group if hasattr(args, "group") else args.spec)
    obj = serialize.group_to_obj(group)
    if args.mode == "show":
        obj["abelian"] = group.is_abelian
    return obj


def _cmd_channel_theta(args) -> dict:
    group = _load_group(args.group)
    mu = _load_measure(group, args.measure)
    return _channel_result(theta(mu))


def _cmd_channel_theta_hat(args) -> dict:
    group = _load_group(args.group)
    pdf = _load_pdf(group, args)
    channel = theta_hat(pdf)
    result = _channel_result(channel)
    result["kraus_rank"] = channel.meta["rank"]
    return result


def _cmd_channel_weyl(args) -> dict:
    d = args.dim
    grid = product(cyclic(d), cyclic(d))
    q = ProbabilityMeasure(grid, parse_real_vector(args.q))
    return _channel_result(weyl_covariant(q))


def _cmd_channel_compose(args) -> dict:
    lhs = _load_channel(args.lhs)
    rhs = _load_channel(args.rhs)
    return _channel_result(compose(lhs, rhs))


def _cmd_channel_check(args) -> dict:
    channel = _load_channel(args.channel)
    report = is_bistochastic(channel, atol=args.tol)
    unitary = is_unitary_conjugation(channel)
    return {"bistochastic": {"verdict": report.verdict,
                             "unital_residual": report.unital_residual,
                             "tp_residual": report.tp_residual},
            "unitary_conjugation": None if unitary is None
            else serialize.complex_matrix_to_obj(unitary),
            "choi_rank": choi(channel).rank()}


def _cmd_extremality(args) -> dict:
    group = _load_group(args.group)
    pdf = _load_pdf(group, args)
    return _certificate_obj(is_maximally_extreme(pdf))


def _cmd_bloch_orbit(args):
    group = _load_group(args.group)
    pdf = _load_pdf(group, args)
    corr = correlation_matrix(pdf)
    orbit = bloch_vectors(corr, labels=group.labels, group_name=group.name)
    if args.format == "csv":
        return None, export_bloch_orbit(orbit, "csv", include_hull=args.hull)
    return json.loads(export_bloch_orbit(orbit, "json", include_hull=args.hull)), None


def _cmd_aqbc_search(args) -> dict:
    group = _load_group(args.group)
    rep = _select_irrep(group, args.irrep)
    result = aqbc_search(rep, args.samples, args.seed,
                         optimize=args.optimize, threads=args.threads)
    hits = [{"index": h.index,
             "xi": serialize.complex_vector_to_obj(h.xi),
             "rank": h.certificate.rank,
             "span_dim": h.certificate.span_dim,
             "refined": h.refined} for h in result.hits]
    return {"n_samples": result.n_samples, "seed": result.seed,
            "n_hits": len(result.hits),
            "hit_fraction": result.hit_fraction(),
            "hits": hits,
            "rejected": [{"index": idx, "reason": reason}
                         for idx, reason in result.rejected]}


def _cmd_capacity(args) -> dict:
    group = _load_group(args.group)
    pdf = _load_pdf(group, args)
    result = schur_capacity(pdf, seed=args.seed, restarts=args.restarts)
    return {"value": result.value,
            "argmax": result.argmax_measure.weights.tolist(),
            "iterations": result.iterations,
            "gap": result.optimality_gap}


def _cmd_moe(args) -> dict:
    if args.kind == "theta-restricted":
        group = _load_group(args.group)
        mu = _load_measure(group, args.measure)
        return {"kind": args.kind, "value": moe_theta_restricted(mu),
                "shannon_entropy": shannon_entropy(mu)}
    if args.kind == "theta-hat-restricted":
        group = _load_group(args.group)
        pdf = _load_pdf(group, args)
        return {"kind": args.kind, "value": moe_theta_hat_restricted(pdf)}
    if args.kind == "numeric":
        if args.seed is None:
            raise ValidationError("--kind numeric requires --seed")
        channel = _load_channel(args.channel)
        estimate = min_output_entropy(channel, restarts=args.restarts,
                                      seed=args.seed)
        return {"kind": args.kind, "value": estimate.value,
                "upper_bound_only": True,
                "witness": serialize.complex_vector_to_obj(estimate.witness)}
    raise ValidationError(f"unknown moe kind {args.kind!r}")


def _cmd_eb_test(args) -> dict:
    group = _load_group(args.group)
    if args.kind == "theta":
        report = eb_test(_load_measure(group, args.measure))
    elif args.kind == "theta-hat":
        report = eb_test(_load_pdf(group, args))
    else:
        raise ValidationError(f"unknown eb-test kind {args.kind!r}")
    return {"verdict": report.verdict, "reason": report.reason,
            "min_pt_eigenvalue": report.min_pt_eigenvalue}


def _cmd_fixpoints(args) -> dict:
    group = _load_group(args.group)
    if args.kind == "theta":
        comparison = verify_fix_theta(_load_measure(group, args.measure))
    elif args.kind == "theta-hat":
        comparison = verify_fix_theta_hat(_load_pdf(group, args))
    else:
        raise ValidationError(f"unknown fixpoints kind {args.kind!r}")
    return {"holds": comparison.holds, "lhs_dim": comparison.lhs_dim,
            "rhs_dim": comparison.rhs_dim}


def _cmd_noiseless(args) -> dict:
    group = _load_group(args.group)
    mu = _load_measure(group, args.measure)
    report = noiseless_subsystems(theta(mu), seed=args.seed)
    return {"blocks": [list(b) for b in report.blocks],
            "noiseless": report.noiseless,
            "unitary": serialize.complex_matrix_to_obj(report.change_of_basis),
            "seed": report.seed,
            "fixed_dim": report.fixed_dim,
            "peter_weyl_dims": report.peter_weyl_dims,
            "peter_weyl_match": report.peter_weyl_match}


def _cmd_duality(args) -> dict:
    group = _load_group(args.group)
    mu = _load_measure(group, args.measure)
    residual = duality_check(mu)
    return {"residual": residual, "ok": residual <= args.tol}


def _add_pdf_args(parser) -> None:
    parser.add_argument("--pdf", help="function values, comma-separated expressions or @file")
    parser.add_argument("--xi", help="cyclic vector, comma-separated expressions")
    parser.add_argument("--irrep", help="irrep selector: index or e.g. 2d")


_EPILOG = ("Conventions: entropies and capacities in bits (log base 2); "
           "group element 0 is the identity and matrix bases follow the "
           "group's element ordering; Choi matrices use the unnormalised "
           "partial-trace-identity convention; residual tolerances default "
           "to 1e-10.")


def _build_parsers() -> dict:
    parsers: dict[str, _ArgumentParser] = {}

    def new_parser(name: str) -> _ArgumentParser:
        parser = _ArgumentParser(prog=f"groupchannels {name}", epilog=_EPILOG)
        parsers[name] = parser
        return parser

    p = new_parser("group build")
    p.add_argument("--spec", required=True, help="group alias or @file.json")
    p = new_parser("group show")
    p.add_argument("--group", required=True)

    p = new_parser("channel theta")
    p.add_argument("--group", required=True)
    p.add_argument("--measure", required=True,
                   help="weights, comma-separated expressions or @file")
    p = new_parser("channel theta-hat")
    p.add_argument("--group", required=True)
    _add_pdf_args(p)
    p = new_parser("channel weyl")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--q", required=True, help="d*d weights over (shift, phase) pairs")
    p = new_parser("channel compose")
    p.add_argument("--lhs", required=True, help="outer channel JSON file")
    p.add_argument("--rhs", required=True, help="inner channel JSON file")
    p = new_parser("channel check")
    p.add_argument("--channel", required=True, help="channel JSON file")
    p.add_argument("--tol", type=float, default=1e-10)

    p = new_parser("extremality")
    p.add_argument("--group", required=True)
    _add_pdf_args(p)

    p = new_parser("bloch-orbit")
    p.add_argument("--group", required=True)
    _add_pdf_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--hull", action="store_true",
                   help="include the convex hull volume for rank-2 orbits")

    p = new_parser("aqbc-search")
    p.add_argument("--group", required=True)
    p.add_argument("--irrep", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--threads", type=int, default=1)

    p = new_parser("capacity")
    p.add_argument("--group", required=True)
    _add_pdf_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--restarts", type=int, default=32)

    p = new_parser("moe")
    p.add_argument("--kind", required=True,
                   choices=("theta-restricted", "theta-hat-restricted", "numeric"))
    p.add_argument("--group")
    p.add_argument("--measure")
    _add_pdf_args(p)
    p.add_argument("--channel")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, default=64)

    p = new_parser("eb-test")
    p.add_argument("--kind", required=True, choices=("theta", "theta-hat"))
    p.add_argument("--group", required=True)
    p.add_argument("--measure")
    _add_pdf_args(p)

    p = new_parser("fixpoints")
    p.add_argument("--kind", required=True, choices=("theta", "theta-hat"))
    p.add_argument("--group", required=True)
    p.add_argument("--measure")
    _add_pdf_args(p)

    p = new_parser("noiseless")
    p.add_argument("--group", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = new_parser("duality")
    p.add_argument("--group", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--tol", type=float, default=1e-10)

    for parser in parsers.values():
        parser.add_argument("--out", help="write the output document to a file")
    return parsers


_HANDLERS = {
    "group build": lambda a: (setattr(a, "mode", "build") or _cmd_group(a)),
    "group show": lambda a: (setattr(a, "mode", "show") or _cmd_group(a)),
    "channel theta": _cmd_channel_theta,
    "channel theta-hat": _cmd_channel_theta_hat,
    "channel weyl": _cmd_channel_weyl,
    "channel compose": _cmd_channel_compose,
    "channel check": _cmd_channel_check,
    "extremality": _cmd_extremality,
    "aqbc-search": _cmd_aqbc_search,
    "capacity": _cmd_capacity,
    "moe": _cmd_moe,
    "eb-test": _cmd_eb_test,
    "fixpoints": _cmd_fixpoints,
    "noiseless": _cmd_noiseless,
    "duality": _cmd_duality,
}

_TWO_WORD = {"group": {"build", "show"},
             "channel": {"theta", "theta-hat", "weyl", "compose", "check"}}
_ONE_WORD = {"extremality", "bloch-orbit", "aqbc-search", "capacity", "moe",
             "eb-test", "fixpoints", "noiseless", "duality"}


def _route(argv: list[str]):
    if not argv:
        return None, argv
    head = argv[0]
    if head in _TWO_WORD:
        if len(argv) < 2 or argv[1] not in _TWO_WORD[head]:
            return None, argv
        return f"{head} {argv[1]}", argv[2:]
    if head in _ONE_WORD:
        return head, argv[1:]
    return None, argv


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command, rest = _route(argv)
    if command is None:
        known = sorted(list(_ONE_WORD) + [f"{a} {b}" for a, subs in _TWO_WORD.items()
                                          for b in subs])
        sys.stdout.write(serialize.dumps(
            {"error": {"type": "UnknownSubcommand",
                       "message": f"argv {argv!r}; known commands: {known}"}}) + "\n")
        return 64
    parsers = _build_parsers()
    try:
        args = parsers[command].parse_args(rest)
        manifest = {"command": "groupchannels " + " ".join(argv),
                    "inputs": {key: value for key, value in sorted(vars(args).items())
                               if key != "out" and value is not None},
                    "seed": getattr(args, "seed", None),
                    "tool_version": __version__,
                    "outputs": {"path": args.out} if args.out else {"stdout": True}}
        if command == "bloch-orbit":
            result, text = _cmd_bloch_orbit(args)
            if text is not None:
                payload = f"# manifest={serialize.dumps(manifest)}\n{text}"
                _emit(payload, args.out)
                return 0
        else:
            result = _HANDLERS[command](args)
        envelope = {"manifest": manifest, "result": result}
        _emit(serialize.dumps(envelope) + "\n", args.out)
        return 0
    except ValidationError as err:
        sys.stdout.write(serialize.dumps(
            {"error": {"type": type(err).__name__, "message": str(err)}}) + "\n")
        return 2
    except NumericalFailure as err:
        sys.stdout.write(serialize.dumps(
            {"error": {"type": "NumericalFailure", "message": str(err)}}) + "\n")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
