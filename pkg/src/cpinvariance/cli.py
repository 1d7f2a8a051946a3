"""Command line front end.

Exit codes: ``check`` 0 invariant / 1 not invariant; ``decompose`` 0 CCP /
1 not CCP; ``verify`` 0 all agree / 1 any disagreement; 2 is an input error
for every command.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import ccpgen, evolve, invariance
from .ccpgen import CcpGenerator
from .cpmap import CpMap, gns_of, is_cp
from .densemat import DEFAULT_TOL, Tolerance, expm
from .serialize import Report, SpecError, encode_matrix, encode_real, load_spec
from .subalg import is_maximal_commutative

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


def _tol_dict(tol: Tolerance) -> dict:
    return {"abs_eps": tol.abs_eps, "rel_eps": tol.rel_eps}


def _alpha_payload(cert) -> dict:
    return {
        "projections": encode_matrix(cert.projections),
        "blocks": encode_matrix(cert.blocks),
        "residual": cert.residual,
    }


def cmd_check(path, tol: Tolerance = DEFAULT_TOL, seed: int = 0, grid=None) -> Report:
    report = Report(command="check", tolerance=_tol_dict(tol))
    try:
        spec = load_spec(path, tol, seed)
    except (SpecError, OSError) as err:
        report.warnings.append(f"input error: {err}")
        report.exit_code = EXIT_INPUT
        return report
    c = spec.subalgebra
    if c.non_unique:
        report.warnings.append("subalgebra built from a degenerate hermitian generator: maximal refinement is not unique")
    maximal = is_maximal_commutative(c, spec.ambient, tol)
    report.verdicts["maximal_commutative"] = maximal
    if not maximal:
        report.warnings.append(
            "refused: the subalgebra is not maximal commutative in the ambient algebra, "
            "which the invariance criteria require"
        )
        report.exit_code = EXIT_INPUT
        return report
    report.classical["projections"] = encode_matrix(c.projections)

    if spec.kind == "cp_map":
        t: CpMap = spec.obj
        leak = invariance.leakage(t.superop, c)
        direct = invariance.direct_invariant_cp(t, c, tol)
        cert = invariance.alpha_certificate(t.kraus, c, tol, check_maximal=False)
        reb = invariance.rebolledo_check(t.kraus, c, tol)
        report.verdicts.update(invariant=direct, alpha_certificate=bool(cert), rebolledo=bool(reb))
        report.residuals.update(
            leakage=leak, alpha=cert.residual if cert else cert.best_residual,
            rebolledo=reb.residual if reb else reb.best_residual,
        )
        if cert:
            report.certificates["alpha"] = _alpha_payload(cert)
        if bool(cert) != direct:
            report.warnings.append("certificate existence disagrees with the direct test (tolerance pathology)")
        if direct:
            report.classical["stochastic_matrix"] = encode_real(invariance.restrict_stochastic(t, c, tol))
    else:
        g: CcpGenerator = spec.obj
        leak = invariance.leakage(g.superop, c)
        direct = invariance.direct_invariant_gen(g, c, tol)
        ccp = ccpgen.is_ccp(g, tol)
        report.verdicts.update(invariant=direct, ccp=ccp, markov=ccp and ccpgen.is_markov_generator(g, tol))
        report.residuals.update(leakage=leak, projected_choi_min=ccpgen.ccp_margin(g))
        if ccp:
            z = invariance.zeta_certificate(g, c, tol, seed=seed, check_maximal=False)
            report.verdicts["zeta_certificate"] = bool(z)
            if z:
                report.certificates["zeta"] = {
                    "zeta_blocks": encode_matrix(z.zeta_blocks),
                    "gamma": encode_matrix(z.gamma),
                    "globally_inner": z.globally_inner,
                    "alpha": _alpha_payload(z.alpha) if z.alpha else None,
                }
                report.residuals.update({f"zeta_{k}": v for k, v in z.residuals.items()})
            else:
                report.residuals["zeta_search"] = z.best_residual
                report.warnings.append(f"zeta search advisory: {z.reason}")
        else:
            report.warnings.append("generator is not CCP; certificate search skipped")
        if direct:
            cl = invariance.restrict_classical(g, c, tol)
            report.classical["q_matrix"] = encode_real(cl.q)
            report.classical["is_markov"] = cl.is_markov
            if grid is not None:
                report.classical["grid"] = [float(t) for t in grid]
                report.classical["restricted_semigroup"] = [encode_real(expm(t * cl.q)) for t in grid]
        if grid is not None:
            report.residuals["leakage_over_time"] = encode_real(evolve.invariance_over_time(g, c, grid, tol))
    report.exit_code = EXIT_OK if report.verdicts["invariant"] else EXIT_NEGATIVE
    return report


def cmd_decompose(path, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> Report:
    report = Report(command="decompose", tolerance=_tol_dict(tol))
    try:
        spec = load_spec(path, tol, seed)
    except (SpecError, OSError) as err:
        report.warnings.append(f"input error: {err}")
        report.exit_code = EXIT_INPUT
        return report
    g = spec.obj if spec.kind == "generator" else CcpGenerator.from_cp(spec.obj)
    if spec.kind != "generator":
        report.warnings.append("cp_map input decomposed as a generator")
    margin = ccpgen.ccp_margin(g)
    report.residuals["projected_choi_min"] = margin
    ccp = ccpgen.is_ccp(g, tol)
    report.verdicts["ccp"] = ccp
    if not ccp:
        report.warnings.append(f"not CCP: most negative projected-Choi eigenvalue {margin:.6e}")
        report.exit_code = EXIT_NEGATIVE
        return report
    form = ccpgen.lindblad_decompose(g, tol)
    ce = ccpgen.ce_from_lindblad(form)
    report.verdicts["markov"] = ccpgen.is_markov_generator(g, tol)
    report.decompositions.update(
        h=encode_matrix(form.h),
        kraus=encode_matrix(form.kraus),
        beta=encode_matrix(ce.beta),
        offset=None if form.offset is None else encode_matrix(form.offset),
        gns_multiplicity=int(form.kraus.shape[0]),
        ccp_gram_rank=ccpgen.gns_gram(g, tol).rank,
    )
    if is_cp(g.superop, tol=tol):
        report.decompositions["cp_gns_multiplicity"] = gns_of(CpMap.from_superop(g.superop, tol), tol).multiplicity
    report.residuals["reassembly"] = float(np.linalg.norm(ccpgen.assemble_lindblad(form).superop - g.superop))
    report.residuals["derivation_identity"] = ccpgen.derivation_identity_check(g, form)
    return report


def ccp_agreement_suite(trials: int, seed: int, n: int, samples: int = 1000, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Projected-Choi test vs. the sampling oracle; odd trials are pushed out of the CCP cone."""
    agree, ccp_count, rows = 0, 0, []
    for idx in range(trials):
        rng = np.random.default_rng([seed, 10_000 + idx])
        g = invariance.generic_generator_instance(n, rng, rotate=False)[0]
        if idx % 2:
            k = np.zeros((n, n), dtype=complex)
            while np.linalg.norm(k) < 1e-3:
                k = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                k -= np.trace(k) / n * np.eye(n)
            k /= np.linalg.norm(k)
            # subtract more of a traceless sandwich than the projected Choi can absorb
            strength = np.linalg.eigvalsh(ccpgen.projected_choi(g))[-1] + 0.5 + rng.random()
            g = g + CcpGenerator.from_cp(CpMap.from_kraus([k], n)).scaled(-strength)
        fast = ccpgen.is_ccp(g, tol)
        slow = ccpgen.ccp_bruteforce_oracle(g, samples, seed=idx, tol=tol)
        agree += fast == slow
        ccp_count += fast
        if fast != slow:
            rows.append({"trial": idx, "projected_choi": fast, "oracle": slow})
    return {"trials": trials, "agree": agree, "ccp": ccp_count, "disagreements": rows}


def cmd_verify(trials: int = 100, seed: int = 0, dim: int = 2, fixtures_only: bool = False,
               tol: Tolerance = DEFAULT_TOL, samples: int = 1000) -> Report:
    report = Report(command="verify", tolerance=_tol_dict(tol))
    if fixtures_only:
        fixtures = invariance.check_fixtures(tol)
        report.verdicts.update({f"fixture_{k}": v for k, v in fixtures.items()})
        report.exit_code = EXIT_OK if all(fixtures.values()) else EXIT_NEGATIVE
        return report
    if not 1 <= dim <= 4:
        report.warnings.append("input error: --dim must be between 1 and 4")
        report.exit_code = EXIT_INPUT
        return report
    cross = invariance.crosscheck_theorems(seed, trials, dim, tol, include_fixtures=trials > 0)
    ccp = ccp_agreement_suite(trials, seed, dim, samples, tol)
    report.verdicts["theorem_crosscheck"] = cross.ok
    report.verdicts["ccp_oracle_agreement"] = not ccp["disagreements"]
    report.certificates["crosscheck"] = cross.to_dict()
    report.certificates["ccp_suite"] = ccp
    ok = cross.ok and not ccp["disagreements"]
    report.exit_code = EXIT_OK if ok else EXIT_NEGATIVE
    return report


def _grid(text: str | None):
    if text is None:
        return None
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpinv", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="absolute and relative tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide invariance and emit certificates")
    p.add_argument("spec")
    p.add_argument("--grid", help="comma separated times for flow diagnostics")

    p = sub.add_parser("decompose", parents=[common], help="Lindblad / Christensen-Evans forms")
    p.add_argument("spec")

    p = sub.add_parser("verify", parents=[common], help="randomized theorem cross-checks")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=1000, help="oracle samples per generator")
    p.add_argument("--fixtures-only", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = DEFAULT_TOL if args.tol is None else Tolerance.uniform(args.tol)
    if args.command == "check":
        report = cmd_check(args.spec, tol, args.seed, _grid(args.grid))
    elif args.command == "decompose":
        report = cmd_decompose(args.spec, tol, args.seed)
    else:
        report = cmd_verify(args.trials, args.seed, args.dim, args.fixtures_only, tol, args.samples)
    print(report.to_json() if args.format == "json" else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
