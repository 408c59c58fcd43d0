"""Command-line front end.

Tables go to stdout as CSV unless ``--out`` names a file or directory. With a
directory, every artifact of the subcommand (CSV, SVG, DOT) is written there
under a fixed name, filtered by the configured output formats.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, divisibility, eigen, emit, graph, oldnew, operators, spinchain, tree
from .config import RunConfig, resolve_jobs
from .modular import SizeLimitError

PARITY = {"even": "+", "odd": "-"}


def _num(x: float) -> float:
    return round(float(x), 12) + 0.0


def _pair(text: str, conv=float) -> tuple:
    parts = [p for p in text.replace("x", ",").split(",") if p]
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return tuple(conv(p) for p in parts)


def _grid(text: str) -> tuple:
    return _pair(text.lower(), int)


class Output:
    """Routes a subcommand's table and side artifacts to stdout or disk."""

    def __init__(self, target: str | None, cfg: RunConfig):
        self.formats = {f.strip() for f in cfg.formats.split(",")}
        if target is None and cfg.out_dir != ".":
            target = cfg.out_dir
        self.target = None if target in (None, "-", "csv") else Path(target)
        self.written = []

    def _path(self, name: str, suffix: str):
        if self.target is None:
            return None
        if self.target.suffix:
            return self.target if self.target.suffix == suffix else None
        if suffix.lstrip(".") not in self.formats:
            return None
        return self.target / f"{name}{suffix}"

    def table(self, name: str, columns, rows):
        if self.target is None:
            sys.stdout.write(emit.csv_text(columns, rows))
            return
        path = self._path(name, ".csv")
        if path is not None:
            self.written.append(emit.write_csv(path, columns, rows))
        path = self._path(name, ".json")
        if path is not None:
            self.written.append(emit.write_text(path, emit.json_text(columns, rows)))

    def text(self, name: str, suffix: str, text: str):
        path = self._path(name, suffix)
        if path is not None:
            self.written.append(emit.write_text(path, text))

    def note(self, msg: str):
        # keep stdout clean for CSV when no target is given
        print(msg, file=sys.stderr if self.target is None else sys.stdout)

    def finish(self):
        for p in self.written:
            print(f"wrote {p}")


# ---------------------------------------------------------------- subcommands


def _check_n(n: int, cfg: RunConfig, low: int = 1):
    if not low <= n <= cfg.n_max:
        raise ValueError(f"n={n} must lie in [{low}, {cfg.n_max}]")


def _operator(n: int, on_lambda: bool, parity: str | None):
    op = operators.build_t_tilde(n) if on_lambda else operators.build_T(n)
    if parity:
        plus, minus = operators.parity_split(op)
        op = plus if parity == "+" else minus
    return op


def _gap_band(spec) -> str:
    gap = np.abs(eigen.gap_real_values(spec))
    return f"gap reals in [{gap.min():.6f}, {gap.max():.6f}]" if len(gap) else "no gap reals"


def _spectrum_rows(spec, n, parity):
    return [(n, parity, _num(z.real), _num(z.imag), _num(abs(z)), tag, m) for (z, m), tag in zip(spec.clusters, spec.tags)]


SPECTRUM_COLUMNS = ["n", "parity", "re", "im", "modulus", "tag", "multiplicity"]


def cmd_spectrum(args, cfg, out):
    _check_n(args.n, cfg)
    parity = PARITY.get(args.parity)
    spec = eigen.eigenvalues(_operator(args.n, args.on_lambda, parity), cluster_radius=cfg.tol_point)
    eigen.classify(spec, cfg.tol_circle, cfg.tol_point)
    out.table(f"spectrum_{args.n}", SPECTRUM_COLUMNS, _spectrum_rows(spec, args.n, parity or "all"))
    out.text(f"spectrum_{args.n}", ".svg", emit.svg_scatter(spec.values, f"n = {args.n}"))
    out.note(f"dim {spec.dim}, radius {spec.radius():.9f}, tags {spec.tag_counts()}, {_gap_band(spec)}")


def cmd_matrix(args, cfg, out):
    _check_n(args.n, cfg)
    op = _operator(args.n, args.on_lambda, PARITY.get(args.parity))
    r, c = np.nonzero(op.num)
    entries = [(int(i), int(j), Fraction(int(op.num[i, j]), op.den)) for i, j in zip(r, c)]
    rows = [(i, j, f.numerator, f.denominator) for i, j, f in entries]
    out.table(f"matrix_{args.n}", ["row", "col", "numerator", "denominator"], rows)


def cmd_adelic_scan(args, cfg, out):
    _check_n(args.nmax, cfg)
    parity = PARITY[args.parity]
    blocks = oldnew.assemble_frak_t(args.nmax, parity, jobs=cfg.jobs)
    spec = eigen.classify(blocks.spectrum(cfg.tol_point), cfg.tol_circle, cfg.tol_point)
    out.table(f"adelic_{args.parity}_{args.nmax}", SPECTRUM_COLUMNS, _spectrum_rows(spec, args.nmax, parity))
    colors = ["#c03" if abs(abs(z) - eigen.INV_SQRT2) > cfg.tol_circle else "#236" for z in spec.values]
    out.text(f"adelic_{args.parity}_{args.nmax}", ".svg", emit.svg_scatter(spec.values, f"frak t{parity}({args.nmax})", colors=colors))
    pairs, unpaired = eigen.circle_inversion_pairs(spec)
    out.note(f"dim {spec.dim}, radius {spec.radius():.9f}, tags {spec.tag_counts()}, {_gap_band(spec)}, gap pairs {len(pairs)}, unpaired {len(unpaired)}")


def cmd_identities(args, cfg, out):
    _check_n(args.nmax, cfg)
    rows = [(n, name, ok) for n in range(1, args.nmax + 1) for name, ok in acceptance.identity_suite(n).items()]
    out.table(f"identities_{args.nmax}", ["n", "identity", "holds"], rows)
    failed = [r for r in rows if not r[2]]
    out.note(f"{len(rows) - len(failed)} of {len(rows)} identities hold")
    return 1 if failed else 0


def cmd_graph(args, cfg, out):
    _check_n(args.n, cfg, 3)
    g = graph.build_graph(args.n, args.side)
    k, _ = graph.components(g)
    edges = list(zip(g.plus_of_edge.tolist(), g.minus_of_edge.tolist()))
    out.table(f"graph_{args.n}", ["edge", "plus_vertex", "minus_vertex"], [(e, u, w) for e, (u, w) in enumerate(edges)])
    msg = f"|V| = {g.n_vertices}, |E| = {g.n_edges}, components {k} (expected {graph.expected_components(args.n)})"
    if args.girth:
        msg += f", girth {graph.girth(g)} (lower bound {graph.girth_lower_bound(args.n)})"
    if args.spectra:
        sp = graph.graph_spectra(g)
        rows = [("adjacency", i, _num(x)) for i, x in enumerate(sp.adjacency)]
        rows += [("vertex_laplacian", i, _num(x)) for i, x in enumerate(sp.vertex_laplacian)]
        rows += [("edge_laplacian", i, _num(x)) for i, x in enumerate(sp.edge_laplacian)]
        if out.target is None:
            out.note("spectra are written only with --out DIR")
        else:
            out.table(f"graph_{args.n}_spectra", ["operator", "index", "eigenvalue"], rows)
        msg += f", Ramanujan {sp.ramanujan}, edge kernel {sp.edge_kernel}"
    if args.dot:
        dot = emit.dot_graph([(f"p{u}", f"m{w}", e) for e, (u, w) in enumerate(edges)], f"G{args.n}", [f"p{u}" for u in range(g.n_plus)])
        out.text(f"graph_{args.n}", ".dot", dot)
    out.note(msg)


def cmd_tree(args, cfg, out):
    if not 1 <= args.depth <= cfg.depth:
        raise ValueError(f"depth must lie in [1, {cfg.depth}]")
    name = f"tree_{args.check}_{args.depth}"
    if args.check == "spectrum":
        ev = tree.reduced_spectrum(args.depth)
        lo, hi = tree.extreme_eigenvalues(tree.build_tree(args.depth))
        out.table(name, ["index", "eigenvalue"], [(i, _num(x)) for i, x in enumerate(ev)])
        out.note(f"max |eigenvalue| {np.abs(ev).max():.12f} (sqrt 8 = {tree.SQRT8:.12f}), Lanczos extremes {lo:.12f}, {hi:.12f}")
    elif args.check == "resolvent":
        rep = tree.resolvent_check(args.lam, range(1, args.kmax + 1))
        out.table(name, ["K", "residual", "interior_residual"], [(k, rep.residuals[k], rep.interior[k]) for k in sorted(rep.residuals)])
        out.note(
            f"c = {rep.c.real:.9f}, first K below 1e-6: {rep.first_below(1e-6)}, "
            f"max decay ratio {max(rep.ratios, default=0):.6f} (bound {rep.ratio_bound:.6f}), "
            f"printed-d defect {abs(rep.printed_d_defect):.6f}"
        )
    elif args.check == "harmonic":
        hv = tree.harmonic_vg(args.depth)
        rows = [(k, " ".join(map(str, v)) if isinstance(v, tuple) else v) for k, v in hv.items()]
        out.table(name, ["key", "value"], rows)
        out.note(f"interior d*v = 0: {hv['interior_dstar_zero']}, norm2 {hv['norm2']} (expected {hv['norm2_expected']})")
    else:
        rows = tree.dk_norm_report(args.depth, min(args.kmax, args.depth - 1))
        out.table(name, ["k", "norm", "bound", "ratio"], [(r["k"], r["norm"], r["bound"], r["ratio"]) for r in rows])


def cmd_lemmaf(args, cfg, out):
    bad = tree.lemma_f_bruteforce(args.bound)
    out.table(f"lemmaf_{args.bound}", ["A", "M"], [(" ".join(map(str, a)), " ".join(map(str, m))) for a, m in bad])
    out.note(f"{len(tree.sl2z_ball(args.bound))} matrices, {len(tree.LEMMA_F_M)} multipliers, {len(bad)} violations")
    return 1 if bad else 0


def cmd_dirichlet(args, cfg, out):
    if not 0 <= args.k <= cfg.k_max:
        raise ValueError(f"k must lie in [0, {cfg.k_max}]")
    s = complex(*args.s)
    if args.mode == "zk":
        val, ref = spinchain.Z_k(args.k, s), spinchain.Z_limit(s) if s.real > 2 else None
    elif args.mode == "ztilde":
        val, ref = spinchain.Z_tilde_k(args.k, s), spinchain.Z_tilde_limit(s) if s.real > 2 else None
    else:
        val, ref = spinchain.Z_hat_N(spinchain.N_of_k(args.k), s), None
    ref_re, ref_im = (None, None) if ref is None else (complex(ref).real, complex(ref).imag)
    row = (args.k, args.mode, s.real, s.imag, val.real, val.imag, abs(val), ref_re, ref_im)
    out.table(f"dirichlet_{args.mode}_{args.k}", ["k", "mode", "s_re", "s_im", "re", "im", "abs", "limit_re", "limit_im"], [row])


def cmd_strip(args, cfg, out):
    w, h = args.grid
    if max(w, h) > cfg.grid_max:
        raise ValueError(f"grid must be at most {cfg.grid_max} x {cfg.grid_max}")
    scan = spinchain.strip_scan(args.k, args.re, args.im, (w, h))
    rows = [(_num(x), _num(y), scan.z_tilde[i, j], scan.z_hat[i, j]) for i, y in enumerate(scan.im) for j, x in enumerate(scan.re)]
    name = f"strip_{args.k}"
    out.table(name, ["re", "im", "abs_z_tilde", "abs_z_hat"], rows)
    out.text(name, ".svg", emit.svg_heatmap(scan.z_tilde, args.re, args.im, f"|Z~_{args.k}|"))
    near = {f"{t.real:g}+{t.imag:g}i": len(v) for t, v in scan.flagged.items()}
    out.note(f"{len(scan.maxima)} local maxima, near targets {near}")


def cmd_interaction(args, cfg, out):
    t = spinchain.parse_config(args.t)
    j = spinchain.interaction_j(args.k, t)
    out.table("interaction", ["k", "t", "j"], [(args.k, args.t, j)])


def cmd_divisibility(args, cfg, out):
    _check_n(args.n, cfg)
    rows = divisibility.deviation_report(args.n, args.kmax)
    table = [(r.k, r.count, r.expectation.numerator, r.expectation.denominator, r.deviation, r.sqrt_scale) for r in rows]
    out.table(f"divisibility_{args.n}", ["k", "count", "expectation_num", "expectation_den", "deviation", "sqrt_scale"], table)
    out.note(f"fitted constant C = {divisibility.fitted_constant(rows):.6f}")


def cmd_verify_all(args, cfg, out):
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(only)
    if out.target is not None:
        rows = [(r.number, r.title, r.passed, round(r.seconds, 3), r.budget) for r in results]
        out.table("acceptance", ["criterion", "title", "passed", "seconds", "budget"], rows)
    failed = [r.number for r in results if not (r.passed and r.in_budget)]
    print(f"{len(results) - len(failed)} of {len(results)} criteria passed" + (f"; failed {failed}" if failed else ""))
    return 1 if failed else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file or directory; CSV goes to stdout when omitted")
    common.add_argument("--jobs", type=int, help="worker processes (default: $ADELIC_LAB_JOBS or 1)")
    common.add_argument("--config", help="key=value configuration file")

    p = argparse.ArgumentParser(prog="adelic-lab", description="Spectra of the Markov operator (L + R)/2 on congruence modules.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, help_ in (("spectrum", cmd_spectrum, "classified spectrum of t(n)"), ("matrix", cmd_matrix, "export t(n) as exact triplets")):
        sp = add(name, fn, help_)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--lambda", dest="on_lambda", action="store_true", help="restrict to primitive points")
        sp.add_argument("--parity", choices=sorted(PARITY))

    sp = add("adelic-scan", cmd_adelic_scan, "block spectrum of the aggregate operator up to nmax")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--parity", choices=sorted(PARITY), default="even")

    sp = add("identities", cmd_identities, "exact operator identities for n <= nmax")
    sp.add_argument("--nmax", type=int, default=12)

    sp = add("graph", cmd_graph, "congruence graph edge list and checks")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--side", choices=["left", "right"], default="left")
    sp.add_argument("--girth", action="store_true")
    sp.add_argument("--spectra", action="store_true")
    sp.add_argument("--dot", action="store_true")

    sp = add("tree", cmd_tree, "truncated 3-regular tree checks")
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--check", choices=["spectrum", "resolvent", "harmonic", "dk-norms"], default="spectrum")
    sp.add_argument("--lam", type=float, default=3.0, help="resolvent point off [-sqrt 8, sqrt 8]")
    sp.add_argument("--kmax", type=int, default=60)

    sp = add("lemmaf", cmd_lemmaf, "brute-force check of the F-function bound")
    sp.add_argument("--bound", type=int, default=40)

    sp = add("dirichlet", cmd_dirichlet, "spin-chain partition functions")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=["zk", "ztilde", "zhat"], default="zk")
    sp.add_argument("--s", type=_pair, default=(3.0, 0.0), help="RE,IM")

    sp = add("strip", cmd_strip, "scan |Z~_k| and |Z^_N| over a strip")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--re", type=_pair, default=(1.4, 2.1))
    sp.add_argument("--im", type=_pair, default=(0.0, 25.0))
    sp.add_argument("--grid", type=_grid, default=(100, 100), help="WxH")

    sp = add("interaction", cmd_interaction, "interaction coefficient j_t")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--t", required=True, help="0/1 string")

    sp = add("divisibility", cmd_divisibility, "walk counts divisible by n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=17)

    sp = add("verify-all", cmd_verify_all, "run the acceptance suite")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    return p


ERRORS = (ValueError, OverflowError, SizeLimitError, operators.ContractViolation, eigen.ConvergenceError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        # precedence: --jobs, then the config file, then the environment
        if args.jobs is not None or cfg.jobs == 1:
            cfg.jobs = resolve_jobs(args.jobs)
        out = Output(args.out, cfg)
        status = args.func(args, cfg, out) or 0
        out.finish()
    except ERRORS as exc:
        print(f"adelic-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
