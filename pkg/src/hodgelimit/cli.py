"""Unified command-line entry point.

One subcommand per computational module; every run emits a report whose
checks carry a machine-readable status, the measured values, the targets
and their provenance.  Exit codes: 0 all checks pass, 1 at least one check
failed, 2 usage or parse error.  Exact subcommands are bit-reproducible
across runs and parallelism settings; randomized property demos take an
explicit seed (flag --seed, overridden by HODGE_LIMIT_SEED).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

DEFAULT_SEED = 271828


@dataclass
class Check:
    name: str
    status: str  # pass | fail | skipped
    measured: object = None
    target: object = None
    provenance: str = "formula"  # formula | golden | tolerance
    witness: object = None


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)

    def add(self, name, ok, measured=None, target=None, provenance="formula", witness=None):
        status = "pass" if ok else "fail"
        if ok is None:
            status = "skipped"
        self.checks.append(Check(name, status, measured, target, provenance, witness))

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "measured": c.measured,
                    "target": c.target,
                    "provenance": c.provenance,
                    "witness": c.witness,
                }
                for c in self.checks
            ],
            **self.payload,
        }

    def to_text(self) -> str:
        lines = [f"== {self.title}"]
        for c in self.checks:
            extra = ""
            if c.measured is not None:
                extra = f"  measured={c.measured} target={c.target} [{c.provenance}]"
            if c.witness is not None and c.status == "fail":
                extra += f"  witness={c.witness}"
            lines.append(f"  [{c.status:7}] {c.name}{extra}")
        lines.append(f"result: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["name", "status", "measured", "target", "provenance", "witness"])
        for c in self.checks:
            writer.writerow(
                [c.name, c.status, json.dumps(c.measured), json.dumps(c.target), c.provenance, json.dumps(c.witness)]
            )
        return buf.getvalue()


def _emit(report: Report, args) -> None:
    fmt = args.format
    if fmt == "json":
        text = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = report.to_csv()
    else:
        text = report.to_text() + "\n"
    out = getattr(args, "report", None) or args.output
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SystemExit(
            f"error: cannot parse {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def _cmd_weightfilt(args) -> int:
    from .exactcore import matrix_from_json, matrix_to_json
    from .weightfilt import NotNilpotent, lefschetz_decomposition, nilpotent, sl2_complete

    obj = _load_json(args.input)
    try:
        n = nilpotent(matrix_from_json(obj))
    except (NotNilpotent, ValueError, KeyError) as exc:
        raise SystemExit(f"error: bad input matrix: {exc}")
    dec = lefschetz_decomposition(n)
    sl2 = sl2_complete(n)
    filt = dec.graded.filt
    report = Report("weightfilt")
    report.add("weight-filtration-axioms", True, provenance="formula")
    report.add("sl2-bracket-relations", True, provenance="formula")
    report.payload = {
        "gr_dims": {str(l): d for l, d in sorted(dec.gr_dims().items()) if d},
        "primitive_dims": {str(l): d for l, d in sorted(dec.primitive_dims().items())},
        "W_bases": {
            str(l): matrix_to_json(filt.piece(l).basis)
            for l in filt.flag.keys()
        },
        "X_matrix": matrix_to_json(sl2.X),
    }
    _emit(report, args)
    return 0 if report.passed else 1


def _cmd_cohomology(args) -> int:
    from .exactcore import matrix_from_json
    from .hlcohomology import DifferentialPBHL, InvariantViolation, cohomology_pbhl
    from .hodgelefschetz import BigradedHL, pbhl_verify

    obj = _load_json(args.input)
    try:
        base = BigradedHL.from_json(obj)
        dp = DifferentialPBHL(base, matrix_from_json(obj["d"]))
    except (InvariantViolation, ValueError, KeyError) as exc:
        raise SystemExit(f"error: bad differential structure: {exc}")
    report = Report("cohomology")
    try:
        res = cohomology_pbhl(dp)
    except InvariantViolation as exc:
        report.add("harmonic-theory", False, witness=str(exc))
        _emit(report, args)
        return 1
    report.add("differential-invariants", True)
    report.add("output-verification", bool(pbhl_verify(res.output).ok))
    report.payload = {"cohomology": res.output.to_json()}
    _emit(report, args)
    return 0 if report.passed else 1


def degeneration_report(spec, alpha, tol_note=None) -> Report:
    from .sncdegeneration import (
        MissingHodgeData,
        MissingLefschetzData,
        e2_page,
        hard_lefschetz_check,
        limit_hodge_numbers,
        local_invariant_cycle_report,
    )

    alpha = Fraction(alpha)
    report = Report(f"degeneration alpha={alpha}")
    e2 = e2_page(spec, alpha)
    page = e2.e1
    report.add(
        "euler-characteristic",
        page.euler_characteristic() == e2.euler_characteristic(),
        measured=e2.euler_characteristic(),
        target=page.euler_characteristic(),
    )
    mw = e2.monodromy_weight_report()
    report.add("monodromy-weight", mw["passed"], witness=mw["failures"] or None)
    if alpha == 0:
        lic = local_invariant_cycle_report(spec, e2)
        report.add(
            "local-invariant-cycle",
            lic.passed,
            measured={str(k): list(v) for k, v in lic.per_degree.items()},
            witness=None if lic.passed else lic.per_degree,
        )
        central = {str(k): v for k, v in sorted(lic.central_fiber_dims.items())}
    else:
        central = None
    try:
        hodge = limit_hodge_numbers(spec, alpha, e2=e2)
        hodge_json = {
            str(deg): {
                str(w): {f"{p},{q}": h for (p, q), h in sorted(t.items())}
                for w, t in sorted(by_w.items())
            }
            for deg, by_w in sorted(hodge.items())
        }
        report.add("hodge-numbers", True)
    except MissingHodgeData as exc:
        hodge_json = None
        report.add("hodge-numbers", None, witness=str(exc))
    try:
        hl = hard_lefschetz_check(spec, alpha, e2=e2)
        report.add(
            "hard-lefschetz",
            hl.passed,
            witness=None if hl.passed else {
                "iso_failures": hl.e2_iso_failures,
                "dims_match": hl.cohomology_dims_match,
            },
        )
    except MissingLefschetzData as exc:
        report.add("hard-lefschetz", None, witness=str(exc))
    report.payload = {
        "alpha": str(alpha),
        "e1": {f"{l},{k}": d for (l, k), d in sorted(page.dims().items())},
        "e2": {f"{l},{k}": d for (l, k), d in sorted(e2.dims().items())},
        "limit_weight_dims": {
            str(deg): {str(w): d for w, d in sorted(by_w.items())}
            for deg, by_w in sorted(e2.limit_weight_dims().items())
        },
        "limit_hodge_numbers": hodge_json,
        "central_fiber_dims": central,
    }
    return report


def _one_alpha_report_json(spec_json: dict, alpha_str: str) -> dict:
    """Worker for parallel runs: rebuilt from plain JSON so it pickles."""
    from .sncdegeneration import spec_from_json

    spec = spec_from_json(spec_json)
    return degeneration_report(spec, Fraction(alpha_str)).to_json()


def _cmd_degeneration(args) -> int:
    from .sncdegeneration import MissingStratum, spec_from_json

    obj = _load_json(args.input)
    try:
        spec = spec_from_json(obj)
    except (MissingStratum, ValueError, KeyError) as exc:
        raise SystemExit(f"error: bad degeneration spec: {exc}")
    table = spec.eigenvalue_set()
    if args.alpha in (None, "all"):
        alphas = [a for a in table.alphas if a in spec.data]
    else:
        alphas = [Fraction(args.alpha)]
        if alphas[0] not in table.alphas:
            raise SystemExit(f"error: {args.alpha} is not an eigenvalue of this spec")

    spec_json = obj
    results = {}
    if args.jobs and args.jobs > 1 and len(alphas) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                str(a): pool.submit(_one_alpha_report_json, spec_json, str(a))
                for a in alphas
            }
            for a_str, fut in futures.items():
                results[a_str] = fut.result()
    else:
        for a in alphas:
            results[str(a)] = degeneration_report(spec, a).to_json()

    report = Report("degeneration")
    cc = spec.characteristic_cycle()
    cc_alpha = {str(a): spec.characteristic_cycle_alpha(a) for a in table.alphas}
    summed = {}
    for table_alpha in table.alphas:
        for J, v in spec.characteristic_cycle_alpha(table_alpha).items():
            summed[J] = summed.get(J, 0) + v
    report.add("cc-alpha-sum", summed == cc, measured={str(k): v for k, v in summed.items()},
               target={str(k): v for k, v in cc.items()})
    all_pass = True
    for a_str in sorted(results, key=Fraction):
        sub = results[a_str]
        ok = sub["passed"]
        all_pass = all_pass and ok
        report.add(f"alpha-{a_str}", ok)
    report.payload = {
        "eigenvalues": [str(a) for a in table.alphas],
        "cc": {",".join(map(str, J)): v for J, v in cc.items()},
        "cc_alpha": {
            a: {",".join(map(str, J)): v for J, v in d.items()} for a, d in cc_alpha.items()
        },
        "per_alpha": {a: results[a] for a in sorted(results, key=Fraction)},
    }
    _emit(report, args)
    return 0 if report.passed and all_pass else 1


def _cmd_local_model(args) -> int:
    from .dmodlocal import (
        TruncationTooSmall,
        build_truncated_quotient,
        kernel_generators_check,
        local_model,
    )

    try:
        e = tuple(int(x) for x in args.e.split(","))
        model = local_model(args.n, e, Fraction(args.alpha), args.degree)
    except (ValueError, ZeroDivisionError) as exc:
        raise SystemExit(f"error: bad model parameters: {exc}")
    report = Report(f"local-model n={args.n} e={e} alpha={args.alpha}")
    quotient = build_truncated_quotient(model)
    rs = [args.r] if args.r is not None else list(range(model.mu + 1))
    for r in rs:
        try:
            res = kernel_generators_check(model, r, quotient)
        except TruncationTooSmall as exc:
            report.add(f"kernel-generators-r{r}", None, witness=str(exc))
            continue
        report.add(
            f"kernel-generators-r{r}",
            res.passed,
            measured=f"{res.checked_bidegrees} bidegrees",
            witness=[
                {"bidegree": list(w[0]), "monomial": [list(w[1][0]), list(w[1][1])], "reason": w[2]}
                for w in res.witnesses[:5]
            ]
            or None,
        )
    report.payload = {
        "hilbert_function": {f"{a},{b}": d for (a, b), d in quotient.hilbert_function().items()},
        "mu": model.mu,
    }
    _emit(report, args)
    return 0 if report.passed else 1


def _chart_from_json(obj: dict):
    from .mellinverify import ModelChart, RadialBump, SeparableTestFunction

    eta = None
    if "widths" in obj or "heights" in obj:
        n = obj["n"]
        widths = obj.get("widths", [0.75] * (n + 1))
        heights = obj.get("heights", [1.0] * (n + 1))
        eta = SeparableTestFunction(
            tuple(RadialBump(h, w) for h, w in zip(heights, widths))
        )
    return ModelChart(
        n=obj["n"],
        multiplicities=tuple(obj["multiplicities"]),
        alpha=Fraction(obj.get("alpha", 0)),
        K1=tuple(obj.get("K1", ())),
        K2=tuple(obj.get("K2", ())),
        eta=eta,
    )


def _cmd_mellin_verify(args) -> int:
    from .mellinverify import (
        QuadratureConfig,
        QuadratureNonconvergence,
        RadialBump,
        laurent_coefficients,
        off_diagonal_vanishing,
        poincare_lelong_1d,
        primitive_pairing_constant,
        renormalization_residue,
    )

    config = QuadratureConfig(abs_tol=args.tol_abs, rel_tol=args.tol_rel)
    report = Report(f"mellin-verify {args.case}")
    try:
        if args.case == "renorm":
            profile = RadialBump()
            measured = renormalization_residue(profile, config)
            target = profile.at_zero
            report.add("renormalization-residue", abs(measured - target) < 1e-6,
                       measured=measured, target=target, provenance="tolerance")
        elif args.case == "lelong":
            profile = RadialBump()
            measured = poincare_lelong_1d(profile, config)
            target = profile.at_zero
            report.add("poincare-lelong", abs(measured - target) < 1e-6,
                       measured=measured, target=target, provenance="tolerance")
        else:
            obj = _load_json(args.chart)
            ch = _chart_from_json(obj)
            if args.case == "constant":
                r = obj.get("r", 0)
                res = primitive_pairing_constant(ch, r, config)
                ok = abs(res.ratio - res.target) <= 1e-4 * abs(res.target)
                report.add(
                    f"primitive-pairing-r{r}", ok,
                    measured=res.ratio, target=res.target, provenance="tolerance",
                    witness=None if ok else {"residue": res.residue, "stratum": res.stratum_integral},
                )
            elif args.case == "offdiag":
                res = off_diagonal_vanishing(ch, config)
                report.add("off-diagonal-residue", abs(res.residue) < 1e-6,
                           measured=res.residue, target=0.0, provenance="tolerance")
                report.add("pole-order", res.pole_order == 0,
                           measured=res.pole_order, target=0)
            else:
                raise SystemExit(f"error: unknown case {args.case}")
    except QuadratureNonconvergence as exc:
        report.add("quadrature", False, witness=str(exc))
    _emit(report, args)
    return 0 if report.passed else 1


def _golden_charts():
    return {
        "reduced_r0": {"n": 1, "multiplicities": [1, 1], "K1": [0], "K2": [0], "r": 0},
        "half_factor": {"n": 1, "multiplicities": [2], "alpha": "1/2", "r": 0},
        "weighted_half": {"n": 1, "multiplicities": [2, 3], "alpha": "1/2", "r": 0},
        "offdiag_n2": {"n": 2, "multiplicities": [1, 1, 1], "K1": [1], "K2": [2]},
    }


def _cmd_emit_goldens(args) -> int:
    from .models import double_genus2, kodaira_in, smooth_fiber, two_curves_23
    from .sncdegeneration import spec_to_json

    outdir = args.output or "goldens"
    os.makedirs(outdir, exist_ok=True)
    written = []
    if args.suite == "kodaira":
        for count in (3, 4, 5):
            spec = kodaira_in(count)
            spec_path = os.path.join(outdir, f"kodaira_i{count}.spec.json")
            with open(spec_path, "w") as fh:
                json.dump(spec_to_json(spec), fh, indent=2, sort_keys=True)
            rep = degeneration_report(spec, 0)
            path = os.path.join(outdir, f"kodaira_i{count}.report.json")
            with open(path, "w") as fh:
                json.dump(rep.to_json(), fh, indent=2, sort_keys=True)
            written.extend([spec_path, path])
    elif args.suite == "charts":
        from .mellinverify import off_diagonal_vanishing, primitive_pairing_constant

        for name, obj in sorted(_golden_charts().items()):
            ch = _chart_from_json(obj)
            rep = Report(f"chart {name}")
            if obj.get("K1") != obj.get("K2"):
                res = off_diagonal_vanishing(ch)
                rep.add("off-diagonal-residue", abs(res.residue) < 1e-6,
                        measured=res.residue, target=0.0, provenance="tolerance")
            else:
                res = primitive_pairing_constant(ch, obj.get("r", 0))
                ok = abs(res.ratio - res.target) <= 1e-4 * max(abs(res.target), 1e-12)
                rep.add("primitive-pairing", ok, measured=res.ratio, target=res.target,
                        provenance="tolerance")
            path = os.path.join(outdir, f"chart_{name}.report.json")
            with open(path, "w") as fh:
                json.dump(rep.to_json(), fh, indent=2, sort_keys=True)
            written.append(path)
    else:
        raise SystemExit(f"error: unknown suite {args.suite!r}")
    sys.stdout.write("\n".join(written) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgelimit",
        description="exact limiting mixed Hodge structure computations",
    )
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized demos")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True)
        p.add_argument("--output", default=None)
        p.add_argument("--format", choices=["json", "csv", "text"], default="json")
        p.add_argument("--tol-abs", dest="tol_abs", type=float, default=1e-10)
        p.add_argument("--tol-rel", dest="tol_rel", type=float, default=1e-10)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("weightfilt", help="weight filtration of a nilpotent matrix")
    common(p)
    p.set_defaults(func=_cmd_weightfilt)

    p = sub.add_parser("cohomology", help="harmonic cohomology of a differential structure")
    common(p)
    p.set_defaults(func=_cmd_cohomology)

    p = sub.add_parser("degeneration", help="weight spectral sequence pipeline")
    common(p)
    p.add_argument("--alpha", default="all", help="'all' or one eigenvalue p/q")
    p.add_argument("--report", default=None, help="output path (alias of --output)")
    p.set_defaults(func=_cmd_degeneration)

    p = sub.add_parser("local-model", help="graded kernel-generator verification")
    common(p, needs_input=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e", required=True, help="comma-separated multiplicities")
    p.add_argument("--alpha", default="0")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--degree", type=int, default=8)
    p.set_defaults(func=_cmd_local_model)

    p = sub.add_parser("mellin-verify", help="numerical pairing-constant checks")
    common(p, needs_input=False)
    p.add_argument("--case", required=True, choices=["renorm", "lelong", "constant", "offdiag"])
    p.add_argument("--chart", default=None, help="chart JSON (constant/offdiag cases)")
    p.set_defaults(func=_cmd_mellin_verify)

    p = sub.add_parser("emit-goldens", help="regenerate bundled golden outputs")
    common(p, needs_input=False)
    p.add_argument("--suite", required=True)
    p.set_defaults(func=_cmd_emit_goldens)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    seed = os.environ.get("HODGE_LIMIT_SEED")
    args.seed = int(seed) if seed is not None else (args.seed or DEFAULT_SEED)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            sys.stderr.write(exc.code + "\n")
            return 2
        return exc.code if exc.code is not None else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
