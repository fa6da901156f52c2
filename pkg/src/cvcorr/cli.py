"""Command-line interface.

Exit codes: 0 success, 2 usage or parse error, 3 invalid input (non-PD,
unphysical, invalid channel or transform), 4 verification failure.
"""

import argparse
import json
import sys

from . import formats, measure, verify
from .channels import apply_channel, apply_symplectic, check_channel
from .errors import (
    CvcorrError,
    DimensionMismatch,
    FormatError,
    InvalidChannel,
    InvalidFactor,
    InvalidPartition,
    NonPhysical,
    NotPositiveDefinite,
    NotSymplectic,
)
from .gaussian import (
    PartitionedCovariance,
    PureFactors,
    SstsParams,
    is_physical,
    make_pure,
    make_random_physical,
    make_ssts,
    merge_parties,
    permute_parties,
    reduce,
    require_physical,
    standard_form,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def parse_partition_text(text, modes=None):
    """Parse ``"0,1|2|3"`` into ``((0, 1), (2,), (3,))``."""
    try:
        parts = [tuple(int(m) for m in group.split(",")) for group in text.split("|")]
    except ValueError:
        raise UsageError(f"cannot parse partition {text!r}") from None
    if modes is not None and sorted(m for p in parts for m in p) != list(range(modes)):
        raise UsageError(f"partition {text!r} does not cover modes 0..{modes - 1} exactly once")
    return tuple(parts)


def _int_list(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def _float_list(text, what):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def _emit(doc, out=None):
    text = formats.dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_state(args):
    state = formats.load_state(args.state)
    text = getattr(args, "partition", None)
    if text:
        if "partition" in _raw(args.state):
            print("warning: --partition overrides the partition stored in the state file",
                  file=sys.stderr)
        state = PartitionedCovariance(state.cm, parse_partition_text(text, state.total_modes),
                                      state.displacement)
    return state


def _raw(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_compute(args):
    state = require_physical(_load_state(args))
    report = measure.measure(state)
    _emit(report.to_dict())


def cmd_check(args):
    state = formats.load_state(args.state)
    rep = is_physical(state)
    nus = None if rep.symplectic_eigenvalues is None else rep.symplectic_eigenvalues.tolist()
    _emit({
        "physical": rep.physical,
        "min_eigenvalue": rep.min_eigenvalue,
        "symplectic_eigenvalues": nus,
        "verdict": "physical" if rep.physical else "unphysical",
    })


def cmd_make(args):
    try:
        if args.kind == "ssts":
            state = make_ssts(SstsParams(args.nbar, args.mu))
        elif args.kind == "pure":
            if args.gammas is None:
                raise UsageError("make pure requires --gammas")
            state = make_pure(PureFactors(tuple(_float_list(args.gammas, "gammas")), args.extra))
        else:
            if args.seed is None or args.modes is None:
                raise UsageError("make random requires --modes and --seed")
            sizes = _int_list(args.partition, "partition") if args.partition else None
            state = make_random_physical(args.modes, sizes, seed=args.seed,
                                         mix_scale=args.mix_scale)
    except (ValueError, InvalidFactor, InvalidPartition, NonPhysical) as exc:
        raise UsageError(str(exc)) from None
    _emit(formats.state_to_dict(state), args.out)


def _party(args):
    return None if args.party is None or args.party < 0 else args.party


def cmd_apply_channel(args):
    state = formats.load_state(args.state)
    channel = formats.load_channel(args.channel)
    out = apply_channel(state, channel, _party(args))
    if args.report:
        print(json.dumps({
            "before": measure.value(state),
            "after": measure.value(out),
            "cp_certificate": check_channel(channel).cp_certificate,
        }), file=sys.stderr if not args.out else sys.stdout)
    _emit(formats.state_to_dict(out), args.out)


def cmd_apply_symplectic(args):
    state = formats.load_state(args.state)
    transform = formats.load_symplectic(args.symplectic)
    _emit(formats.state_to_dict(apply_symplectic(state, transform, _party(args))), args.out)


def cmd_reduce(args):
    state = formats.load_state(args.state)
    _emit(formats.state_to_dict(reduce(state, _int_list(args.parties, "parties"))), args.out)


def cmd_merge(args):
    state = formats.load_state(args.state)
    grouping = [_int_list(g, "grouping") for g in args.grouping.split("|")]
    _emit(formats.state_to_dict(merge_parties(state, grouping)), args.out)


def cmd_permute(args):
    state = formats.load_state(args.state)
    _emit(formats.state_to_dict(permute_parties(state, _int_list(args.perm, "perm"))), args.out)


def cmd_standard_form(args):
    p = standard_form(formats.load_state(args.state))
    _emit({"a": p.a, "b": p.b, "c": p.c, "d": p.d,
           "closed_form_measure": measure.closed_form_two_mode(p)})


def cmd_sweep_ssts(args):
    if args.steps < 2 or (args.mu_steps is not None and args.mu_steps < 2):
        raise UsageError("--steps must be at least 2")
    result = measure.ssts_diff_sweep(args.nbar_max, args.steps, args.mu_steps or args.steps)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            result.write_csv(fh)
    nb, mu = result.argmax
    print(f"max_diff={result.max_diff:.17g} nbar={nb:.17g} mu={mu:.17g}")


def cmd_verify(args):
    if args.suite == "all":
        outcomes = verify.run_all(args.trials, args.seed)
    else:
        outcomes = [verify.run_suite(args.suite, args.trials, args.seed)] if args.trials > 0 else []
    doc = verify.report(outcomes)
    doc.update({"seed": args.seed, "trials": args.trials, "suite": args.suite})
    _emit(doc, args.out)
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvcorr", description="Correlation measure for multipartite Gaussian states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="measure of a state over its partition")
    p.add_argument("state")
    p.add_argument("--partition", help='override partition, e.g. "0,1|2|3"')
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("check", help="physicality report")
    p.add_argument("state")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("make", help="build a state file")
    p.add_argument("kind", choices=["ssts", "pure", "random"])
    p.add_argument("--nbar", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--gammas", help="comma-separated mixedness factors")
    p.add_argument("--extra", type=int, default=0, help="extra vacuum modes on the second party")
    p.add_argument("--modes", type=int)
    p.add_argument("--partition", help="comma-separated party sizes, e.g. 1,2,1")
    p.add_argument("--seed", type=int)
    p.add_argument("--mix-scale", type=float, default=0.3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("apply-channel", help="apply a Gaussian channel to one party")
    p.add_argument("--state", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--party", type=int, help="party index; omit for a global channel")
    p.add_argument("--out")
    p.add_argument("--report", action="store_true", help="print measure before and after")
    p.set_defaults(func=cmd_apply_channel)

    p = sub.add_parser("apply-symplectic", help="apply a symplectic transform")
    p.add_argument("--state", required=True)
    p.add_argument("--symplectic", required=True)
    p.add_argument("--party", type=int, help="party index; omit for a global transform")
    p.add_argument("--out")
    p.set_defaults(func=cmd_apply_symplectic)

    p = sub.add_parser("reduce", help="reduced state on a set of parties")
    p.add_argument("--state", required=True)
    p.add_argument("--parties", required=True, help="comma-separated party indices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("merge", help="coarse-grain the partition")
    p.add_argument("--state", required=True)
    p.add_argument("--grouping", required=True, help='party groups, e.g. "0|1,2"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("permute", help="reorder parties")
    p.add_argument("--state", required=True)
    p.add_argument("--perm", required=True, help="comma-separated permutation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_permute)

    p = sub.add_parser("standard-form", help="standard-form parameters of a 1+1 mode state")
    p.add_argument("state")
    p.set_defaults(func=cmd_standard_form)

    p = sub.add_parser("sweep-ssts", help="grid of the SSTS measure difference")
    p.add_argument("--nbar-max", type=float, default=50.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--mu-steps", type=int)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_sweep_ssts)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", choices=["all", *verify.SUITES])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotPositiveDefinite as exc:
        print(f"error: not positive definite: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonPhysical as exc:
        print(f"error: unphysical state: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InvalidChannel, NotSymplectic, DimensionMismatch, InvalidPartition) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CvcorrError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
