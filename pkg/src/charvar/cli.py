"""Command line front end.

Subcommands
-----------
census      sample case fibers, probe polystability, write a component report
flow        run the moment-map flow on a stored representation
verify-sdr  batch-check the retraction contract on a sampled population
parse       parse a presentation file and echo the canonical form
sample      draw a random representation and store it as JSON

``census`` and ``flow`` render a figure next to their output file; all
randomness descends from ``--seed``, so identical invocations produce
byte-identical JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .census import Group, retract_census, run_census
from .errors import CharvarError
from .kempfness import kn_flow
from .repvar import kn_residual, norm_sq, sample_hom
from .plots import census_figure, flow_figure, sdr_figure
from .presentation import (
    GroupPresentation,
    abelian_group,
    direct_with_finite,
    free_group,
    generator,
    parse_presentation,
    presentation_to_text,
    star_raag,
)
from .retract import SdrThresholds, verify_sdr
from .serialize import (
    dumps_json,
    read_json,
    rep_from_dict,
    rep_to_dict,
    write_json,
    write_trace_csv,
)

# Presentations of the built-in finite SU(2) subgroups, keyed like the
# matrix pools.  The two-generator groups are dicyclic: x has even order
# 2m, y squares to the central x^m and inverts x under conjugation.
_FINITE_PRESENTATIONS: dict[str, GroupPresentation] = {
    "cyclic4": GroupPresentation(("b1",), (generator(0, 4),)),
    "quaternion8": GroupPresentation(
        ("b1", "b2"),
        (
            generator(0, 4),
            generator(0, 2) * generator(1, -2),
            generator(1, -1) * generator(0) * generator(1) * generator(0),
        ),
    ),
    "binary_dihedral12": GroupPresentation(
        ("b1", "b2"),
        (
            generator(0, 6),
            generator(0, 3) * generator(1, -2),
            generator(1, -1) * generator(0) * generator(1) * generator(0),
        ),
    ),
}

_FAMILY_STYLES = {
    "free": "free",
    "abelian": "abelian_diagonal",
    "star": "angle_fiber",
    "finite-by-free": "finite_by_free",
}


def _build_presentation(family: str, rank: int, subgroup: str) -> GroupPresentation:
    if family == "free":
        return free_group(rank)
    if family == "abelian":
        return abelian_group(rank)
    if family == "star":
        return star_raag(rank)
    if family == "finite-by-free":
        try:
            finite = _FINITE_PRESENTATIONS[subgroup]
        except KeyError:
            raise CharvarError(
                f"no presentation on file for subgroup {subgroup!r}"
            ) from None
        return direct_with_finite(rank, finite)
    raise CharvarError(f"unknown family {family!r}")


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _cmd_census(args) -> int:
    report = run_census(Group(args.group), args.samples, args.seed)
    out = Path(args.out)
    write_json(report, out)
    census_figure(report, _figure_path(out))
    print(
        f"group={report.group.value} samples_per_case={report.samples_per_case}"
        f" component_estimate={report.component_estimate}"
    )
    for row in report.case_rows:
        print(
            f"  case={row.case.value} kept={row.sample_count}"
            f" polystable_fraction={row.polystable_fraction:.3f}"
        )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _cmd_flow(args) -> int:
    rep = rep_from_dict(read_json(args.rep))
    flowed, trace = kn_flow(rep)
    out = Path(args.out)
    write_trace_csv(trace, out)
    flow_figure(trace, _figure_path(out))
    print(
        f"status={trace.status.value} iterations={trace.final.iteration}"
        f" norm_sq={norm_sq(flowed):.9g} kn_residual={kn_residual(flowed):.3e}"
    )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _sdr_population(args):
    rng = np.random.default_rng(args.seed)
    if args.family == "star":
        pres = star_raag(2)
        for _ in range(args.samples):
            yield sample_hom(pres, "angle_fiber", args.n, rng,
                             case="regular", hom0=True)
    else:
        pres = direct_with_finite(2, _FINITE_PRESENTATIONS["cyclic4"])
        for _ in range(args.samples):
            yield sample_hom(pres, "finite_by_free", args.n, rng,
                             subgroup="cyclic4", hom0=True)


def _cmd_verify_sdr(args) -> int:
    thresholds = SdrThresholds()
    reports = []
    passed = 0
    for index, rep in enumerate(_sdr_population(args)):
        report = verify_sdr(rep)
        reports.append(report)
        ok = thresholds.accepts(report)
        passed += ok
        line = {
            "sample": index,
            "pass": bool(ok),
            "max_relation_residual": report.max_relation_residual,
            "endpoint_unitarity": report.endpoint_unitarity,
            "k_fixedness": report.k_fixedness,
            "det_drift": report.det_drift,
        }
        print(json.dumps(line, sort_keys=True))
    print(
        f"PASS {passed}/{args.samples} family={args.family} n={args.n}"
        f" seed={args.seed}"
    )
    if args.plot:
        sdr_figure(reports, args.plot)
        print(f"wrote {args.plot}")
    return 0 if passed == args.samples else 1


def _cmd_parse(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise CharvarError(f"cannot read {args.file}: {exc}") from None
    pres = parse_presentation(text)
    print(presentation_to_text(pres))
    print(
        f"family={pres.family.value} generators={pres.rank}"
        f" relators={len(pres.relators)}"
    )
    return 0


def _cmd_sample(args) -> int:
    pres = _build_presentation(args.family, args.rank, args.subgroup)
    rng = np.random.default_rng(args.seed)
    style = _FAMILY_STYLES[args.family]
    params = {}
    if args.family == "star":
        params = {"case": args.case, "hom0": args.hom0}
    elif args.family == "finite-by-free":
        params = {"subgroup": args.subgroup, "hom0": args.hom0}
    rep = sample_hom(pres, style, args.n, rng, **params)
    out = Path(args.out)
    out.write_text(dumps_json(rep_to_dict(rep)))
    print(
        f"family={args.family} n={args.n} relation_residual ok,"
        f" kn_residual={kn_residual(rep):.3e}"
    )
    print(f"wrote {out}")
    return 0


def _cmd_retract_census(args) -> int:
    report = retract_census(Group(args.group), args.samples, args.seed)
    out = Path(args.out)
    write_json(report, out)
    for row in report.rows:
        print(
            f"  case={row.case.value} pass={row.passed}/{row.attempted}"
            f" worst_relation={row.worst_relation_residual:.2e}"
        )
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charvar",
        description="numerical census and retraction tools for "
        "representation varieties into SL(n, C)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="component census of a character variety")
    p.add_argument("--group", choices=["sl2", "sl3"], required=True)
    p.add_argument("--samples", type=int, default=250,
                   help="samples per case fiber (min 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("flow", help="moment-map flow on a stored representation")
    p.add_argument("--rep", required=True, help="representation JSON path")
    p.add_argument("--out", required=True, help="trace CSV path")
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("verify-sdr", help="batch retraction-contract check")
    p.add_argument("--family", choices=["star", "finite-by-free"], required=True)
    p.add_argument("--n", type=int, choices=[2, 3], default=2)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", default=None, help="optional metrics figure path")
    p.set_defaults(func=_cmd_verify_sdr)

    p = sub.add_parser("parse", help="parse a presentation file")
    p.add_argument("file", help="text file with one presentation")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("sample", help="draw one representation to JSON")
    p.add_argument("--family", choices=sorted(_FAMILY_STYLES), required=True)
    p.add_argument("--rank", type=int, default=2,
                   help="free rank, leaf count, or abelian rank")
    p.add_argument("--n", type=int, choices=[2, 3], default=2)
    p.add_argument("--case", default="regular",
                   choices=["central", "jordan", "regular", "repeated_diag"],
                   help="fiber case for the star family")
    p.add_argument("--subgroup", default="cyclic4",
                   choices=sorted(_FINITE_PRESENTATIONS),
                   help="finite factor for the finite-by-free family")
    p.add_argument("--hom0", action="store_true",
                   help="conjugate by a unitary only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="representation JSON path")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("retract-census",
                       help="retract polystable fibers onto their compact core")
    p.add_argument("--group", choices=["sl2", "sl3"], required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_retract_census)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CharvarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
