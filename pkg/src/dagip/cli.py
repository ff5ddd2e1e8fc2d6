"""Command-line entry point: solving, separation, reductions, polytope jobs.

Subcommands: ``solve``, ``separate``, ``reduce``, ``polytope``
(``enumerate | verify | catalog | liftproject | faces``) and ``gadget``.
Given identical inputs and flags the output is byte-identical; timings
never reach stdout.  Exit codes: 0 success, 1 solver stopped short of
proven optimality, 2 bad input.
"""

from __future__ import annotations

import argparse
import io
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from . import scoreio
from .model import Family, FamilyIndex, enumerate_acyclic_digraphs
from .polytope import (MULTIPLIERS, audit_printed_rows, build_extended_model,
                       catalog_facets, class_inequality, dag_points,
                       facet_enumeration, facet_rank, order_face,
                       project_with_multipliers, sink_face, verify_validity)
from .reductions import bnsl_to_asp, reduce_to_k2
from .separation import (build_vc_gadget, kcluster_separate,
                         min_vertex_cover_size, weak_separate_exact,
                         weak_separate_heuristic)
from .solver import SolveConfig, solve


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc)) from None


def _load_instance(path: str, palim: int | None):
    inst, dropped = scoreio.parse_score_file(_read(path)).to_instance(palim)
    if dropped:
        sys.stderr.write("note: dropped %d rows wider than palim=%d\n"
                         % (dropped, palim))
    return inst


def _parse_point(text: str, inst) -> list[float]:
    """Family-vector file: lines "child <- {parents} value"; absent = 0."""
    idx = FamilyIndex.from_instance(inst)
    name_to_i = {n: i for i, n in enumerate(inst.names)}
    x = [0.0] * len(idx)
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 4 or parts[1] != "<-":
            raise CliError("line %d: expected 'child <- {parents} value'" % lineno)
        child, braces, value = parts[0], parts[2], parts[3]
        if child not in name_to_i:
            raise CliError("line %d: unknown node %r" % (lineno, child))
        if not (braces.startswith("{") and braces.endswith("}")):
            raise CliError("line %d: malformed parent set %r" % (lineno, braces))
        names = [n for n in braces[1:-1].split(",") if n]
        try:
            parents = tuple(sorted(name_to_i[n] for n in names))
        except KeyError as exc:
            raise CliError("line %d: unknown parent %s" % (lineno, exc)) from None
        fam = Family(name_to_i[child], parents)
        if not parents:
            continue                       # empty rows are implicit
        if fam not in idx:
            raise CliError("line %d: family not permitted" % lineno)
        x[idx.position(fam)] = float(value)
    return x


def _cluster_text(cut, inst) -> str:
    members = ",".join(inst.names[i] for i in sorted(cut.cluster))
    return "cluster {%s} k=%d violation %s" % (members, cut.kappa,
                                               repr(round(cut.violation, 9)))


# -- subcommand bodies --------------------------------------------------------

def _cmd_solve(args, out) -> int:
    inst = _load_instance(args.scores, args.palim)
    cfg = SolveConfig(cuts=tuple(args.cuts.split(",")) if args.cuts else (),
                      branch_rule={"var": "variable", "sum": "sum"}[args.branch],
                      node_select={"best": "best", "dfs": "dfs"}[args.node],
                      integrality_tol=args.tol,
                      time_limit=args.time,
                      exact_lp=args.exact_rational)
    result = solve(inst, cfg)
    out.write(scoreio.write_solution(result, inst))
    return 0 if result.status == "optimal" else 1


def _cmd_separate(args, out) -> int:
    inst = _load_instance(args.scores, args.palim)
    x = _parse_point(_read(args.point), inst)
    idx = FamilyIndex.from_instance(inst)
    heur = weak_separate_heuristic(x, idx)
    out.write("heuristic %s\n" % heur.outcome)
    for cut in heur.cuts:
        out.write("  %s\n" % _cluster_text(cut, inst))
    exact = weak_separate_exact(x, idx)
    out.write("exact %s\n" % exact.outcome)
    for cut in exact.cuts:
        out.write("  %s\n" % _cluster_text(cut, inst))
        for extra in kcluster_separate(x, idx, cut.cluster):
            if extra.kappa > 1:
                out.write("  %s\n" % _cluster_text(extra, inst))
    return 0


def _cmd_reduce(args, out) -> int:
    inst = _load_instance(args.scores, args.palim)
    if args.to == "k2":
        reduced, mapping = reduce_to_k2(inst)
        out.write("# parent sets capped at 2; %d subset nodes added\n"
                  % len(mapping.subset_nodes))
        out.write(scoreio.write_scores(reduced))
    else:
        asp, mapping = bnsl_to_asp(inst)
        out.write("# shift total %s, mandatory arcs %d\n"
                  % (repr(mapping.shift_total), len(mapping.mandatory)))
        out.write(asp.to_text())
    return 0


def _cmd_gadget(args, out) -> int:
    edges = []
    n = 0
    for lineno, line in enumerate(_read(args.graph).splitlines(), start=1):
        body = line.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 2:
            raise CliError("line %d: expected 'u v'" % lineno)
        u, v = int(body[0]), int(body[1])
        edges.append((u, v))
        n = max(n, u + 1, v + 1)
    inst, x = build_vc_gadget(edges, n, args.k)
    out.write("gadget nodes %d families %d\n"
              % (inst.p, sum(len(s) for s in inst.permitted)))
    if args.separate:
        idx = FamilyIndex.from_instance(inst)
        report = weak_separate_exact(x, idx)
        cover = min_vertex_cover_size(edges, n)
        out.write("min vertex cover %d, k %d\n" % (cover, args.k))
        if report.outcome == "cuts":
            out.write("separating cluster found: %s\n"
                      % _cluster_text(report.cuts[0], inst))
        else:
            out.write("no separating cluster (proven)\n")
        agrees = (report.outcome == "cuts") == (cover <= args.k)
        out.write("matches vertex-cover threshold: %s\n" % agrees)
        if not agrees:
            return 1
    else:
        out.write(scoreio.write_scores(inst))
    return 0


def _cmd_polytope(args, out) -> int:
    p, kappa = args.p, args.palim
    if args.job == "enumerate":
        count = sum(1 for _ in enumerate_acyclic_digraphs(p, kappa))
        out.write("acyclic digraphs p=%d%s: %d\n"
                  % (p, "" if kappa is None else " palim=%d" % kappa, count))
        return 0
    if args.job == "verify":
        cat = catalog_facets(p, kappa)
        idx, pts = dag_points(p, kappa)
        jobs = args.jobs or 1

        def check(entry):
            ok, _ = verify_validity(entry, pts)
            _, rank = facet_rank(entry, pts)
            return ok, rank == len(idx)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(check, cat.entries))
        else:
            results = [check(e) for e in cat.entries]
        nvalid = sum(1 for ok, _ in results if ok)
        nfacet = sum(1 for _, f in results if f)
        out.write("%d/%d valid, %d/%d facet-defining\n"
                  % (nvalid, len(cat), nfacet, len(cat)))
        return 0 if nvalid == nfacet == len(cat) else 1
    if args.job == "catalog":
        cat = catalog_facets(p, kappa)
        out.write("# %d facet-defining inequalities\n" % len(cat))
        out.write(cat.render(header=True))
        return 0
    if args.job == "hull":
        idx, pts = dag_points(p, kappa)
        facets = facet_enumeration(pts)
        cat = catalog_facets(p, kappa)
        same = sorted(e.key() for e in facets) == sorted(e.key() for e in cat.entries)
        out.write("double description facets: %d, catalogue: %d, identical: %s\n"
                  % (len(facets), len(cat), same))
        return 0 if same else 1
    if args.job == "liftproject":
        model = build_extended_model()
        nv, ne, ni = model.counts()
        out.write("extended model: %d variables, %d equations, %d inequalities\n"
                  % (nv, ne, ni))
        idx4 = FamilyIndex.full(4)
        good = 0
        for name in sorted(MULTIPLIERS):
            proj = project_with_multipliers(model, MULTIPLIERS[name])
            rep = class_inequality(name, idx4).canonical()
            match = proj.key() == rep.key()
            good += match
            out.write("%s projection %s\n" % (name, "ok" if match else "MISMATCH"))
        flagged = {k: v for k, v in audit_printed_rows(model).items() if v != "ok"}
        for label in sorted(flagged):
            out.write("printed row %s: %s\n" % (label, flagged[label]))
        return 0 if good == len(MULTIPLIERS) else 1
    if args.job == "faces":
        if args.sink is not None:
            face = sink_face(p, args.sink)
        else:
            order = tuple(range(p)) if not args.order else \
                tuple(int(t) for t in args.order.split(","))
            face = order_face(p, order)
        ok = 0
        for entry in face.facets:
            if not any(entry.coeffs):
                continue
            valid, _ = verify_validity(entry, face.points)
            _, rank = facet_rank(entry, face.points)
            ok += valid and rank == face.dimension
        out.write("%s face: dimension %d, %d listed facets, %d verified\n"
                  % (face.kind, face.dimension, len(face.facets), ok))
        return 0
    raise CliError("unknown polytope job %r" % args.job)


# -- argument wiring ----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dagip",
                                  description="exact structure learning by "
                                              "branch and cut, with a polytope "
                                              "verification toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for any randomised audit")
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel workers for independent verification")

    ps = sub.add_parser("solve", help="solve a score file to proven optimality")
    ps.add_argument("scores")
    ps.add_argument("--palim", type=int, default=None)
    ps.add_argument("--cuts", default="cluster",
                    help="comma list from cluster,kcluster,class4b; empty for none")
    ps.add_argument("--branch", choices=("var", "sum"), default="var")
    ps.add_argument("--node", choices=("best", "dfs"), default="best")
    ps.add_argument("--tol", type=float, default=1e-6)
    ps.add_argument("--time", type=float, default=None)
    ps.add_argument("--exact-rational", action="store_true",
                    help="solve every relaxation in exact rational arithmetic")
    common(ps)

    pp = sub.add_parser("separate", help="separate a relaxation point")
    pp.add_argument("scores")
    pp.add_argument("point", help="family-vector file: 'child <- {parents} value'")
    pp.add_argument("--palim", type=int, default=None)
    common(pp)

    pr = sub.add_parser("reduce", help="rewrite an instance")
    pr.add_argument("scores")
    pr.add_argument("--to", choices=("k2", "asp"), required=True)
    pr.add_argument("--palim", type=int, default=None)
    common(pr)

    pg = sub.add_parser("gadget", help="vertex-cover hardness gadget")
    pg.add_argument("--graph", required=True, help="edge list file, 'u v' per line")
    pg.add_argument("--k", type=int, required=True)
    pg.add_argument("--separate", action="store_true",
                    help="run exact separation and compare with brute-force cover")
    common(pg)

    pq = sub.add_parser("polytope", help="facet catalogue and verification jobs")
    pq.add_argument("job", choices=("enumerate", "verify", "catalog", "hull",
                                    "liftproject", "faces"))
    pq.add_argument("--p", type=int, default=3)
    pq.add_argument("--palim", type=int, default=None)
    pq.add_argument("--order", default=None, help="comma order for the order face")
    pq.add_argument("--sink", type=int, default=None, help="sink node for the sink face")
    common(pq)
    return top


def run(argv) -> int:
    """Parse arguments, execute, return the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    body = {"solve": _cmd_solve, "separate": _cmd_separate, "reduce": _cmd_reduce,
            "gadget": _cmd_gadget, "polytope": _cmd_polytope}[args.command]
    buffer = io.StringIO()
    try:
        code = body(args, buffer)
    except (CliError, scoreio.ScoreFormatError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
