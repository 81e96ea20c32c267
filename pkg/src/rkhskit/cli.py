"""Command-line front door.

Subcommands: ``kernel eval|gram``, ``diagnose``, ``network
green|resistance|delta-norm``, ``gff sample|check``, ``tree
histogram|resistance``, and ``reproduce <name>``.  Options may come from a
JSON config file via ``--config``; explicit flags win.  Exit codes: 0 ok,
1 bad input, 2 numerical breakdown (monotonicity violation), 3 a
reproduction check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, is_dataclass

import numpy as np

from . import gff
from .builtin import binomial_eval
from .core import assemble_gram
from .diagnostics import Filtration, classify, det_ratio_trace, trace
from .errors import MonotonicityViolation, RKHSKitError
from .network import Network, delta_norm_sq, green_kernel, resistance
from .reproduce import SUITES
from .serialize import dump_json, fmt, load_kernel_doc, write_matrix_csv
from .tree import LevelWeights, boundary_resistance, energy_histogram, parse_word

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_REPRODUCE = 3

DEFAULT_SEED = 42


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _opt(args, config: dict, name: str, default):
    """Flag value if given, else config value, else default."""
    val = getattr(args, name.replace("-", "_"), None)
    if val is not None:
        return val
    return config.get(name, default)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _verdict_doc(verdict) -> dict:
    doc = {"verdict": type(verdict).__name__}
    if is_dataclass(verdict):
        fields = asdict(verdict)
        policy = fields.pop("policy", None)
        doc.update(fields)
        if policy:
            doc["tolerances"] = policy
    return doc


def _cmd_kernel_eval(args, config) -> int:
    kernel, _ = load_kernel_doc(_load_json(args.input))
    x, y = json.loads(args.x), json.loads(args.y)
    if kernel.name == "binomial":
        print(binomial_eval(int(x), int(y)))
    else:
        print(fmt(kernel(x, y)))
    return EXIT_OK


def _cmd_kernel_gram(args, config) -> int:
    kernel, points = load_kernel_doc(_load_json(args.input))
    out, close = _open_out(_opt(args, config, "out", None))
    try:
        exact = kernel.exact_gram(points.labels)
        if exact is not None:
            write_matrix_csv(out, points.labels, exact)
        else:
            write_matrix_csv(out, points.labels, assemble_gram(kernel, points).matrix)
    finally:
        if close:
            out.close()
    return EXIT_OK


def _cmd_diagnose(args, config) -> int:
    doc = _load_json(args.input)
    kernel, points = load_kernel_doc(doc)
    if len(points) == 0:
        raise ValueError("empty point list")
    target = json.loads(args.target) if args.target is not None else points.labels[0]
    if kernel.name == "binomial":
        target = int(target)
    # the trace only reports stages containing the target, so lead with it
    labels = list(points.labels)
    if target in points:
        canonical = points.labels[points.index(target)]
        labels.remove(canonical)
        labels.insert(0, canonical)
        target = canonical
    stages = _opt(args, config, "stages", "prefix")
    filtration = (
        Filtration.doubling(labels, target) if stages == "doubling" else Filtration.prefixes(labels, target)
    )
    tr = trace(kernel, filtration)
    ratios = None
    try:
        ratios = det_ratio_trace(kernel, filtration)
    except RKHSKitError:
        pass  # rank-deficient stages have no determinant ratio
    verdict = classify(
        tr,
        tau_stab=float(_opt(args, config, "tau-stab", 1e-10)),
        tau_div=float(_opt(args, config, "tau-div", 1e-3)),
        k=int(_opt(args, config, "k", 5)),
    )
    out, close = _open_out(_opt(args, config, "out", None))
    try:
        writer = csv.writer(out)
        writer.writerow(["stage_index", "stage_size", "zeta_value", "det_ratio", "increment"])
        prev = None
        for row, (idx, size) in enumerate(zip(tr.stage_indices, tr.stage_sizes)):
            value = tr.exact_values[row] if tr.exact_values is not None else tr.values[row]
            inc = "" if prev is None else fmt(float(value) - prev)
            writer.writerow(
                [
                    idx,
                    size,
                    fmt(value),
                    fmt(ratios[row]) if ratios is not None else "",
                    inc,
                ]
            )
            prev = float(value)
        out.write(json.dumps(_verdict_doc(verdict), sort_keys=True) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def _cmd_network(args, config) -> int:
    net = Network.from_json(_load_json(args.network))
    if args.network_cmd == "green":
        kernel = green_kernel(net)
        out, close = _open_out(_opt(args, config, "out", None))
        try:
            write_matrix_csv(out, kernel.points.labels, net.green_matrix())
        finally:
            if close:
                out.close()
        return EXIT_OK
    if args.network_cmd == "resistance":
        if args.x is not None and args.y is not None:
            print(fmt(resistance(net, json.loads(args.x), json.loads(args.y))))
            return EXIT_OK
        labels = net.vertices.labels
        matrix = [[resistance(net, a, b) for b in labels] for a in labels]
        out, close = _open_out(_opt(args, config, "out", None))
        try:
            write_matrix_csv(out, labels, matrix)
        finally:
            if close:
                out.close()
        return EXIT_OK
    # delta-norm
    if args.x is None:
        raise ValueError("delta-norm needs --x")
    print(fmt(delta_norm_sq(net, json.loads(args.x))))
    return EXIT_OK


def _cmd_gff(args, config) -> int:
    net = Network.from_json(_load_json(args.network))
    kernel = green_kernel(net)
    gram = assemble_gram(kernel, kernel.points)
    n = int(_opt(args, config, "n", 1000))
    seed = int(_opt(args, config, "seed", DEFAULT_SEED))
    draws = gff.sample(gram, n, seed, workers=int(_opt(args, config, "workers", 1)))
    if args.gff_cmd == "sample":
        out, close = _open_out(_opt(args, config, "out", None))
        try:
            write_matrix_csv(out, gram.points.labels, draws.samples)
        finally:
            if close:
                out.close()
        return EXIT_OK
    emp = gff.empirical_covariance(draws)
    se = gff.covariance_standard_error(gram, n)
    worst = float(np.max(np.abs(emp - gram.matrix) / se))
    out, close = _open_out(_opt(args, config, "out", None))
    try:
        write_matrix_csv(out, gram.points.labels, emp)
        out.write(
            json.dumps(
                {"n": n, "seed": seed, "max_deviation_in_standard_errors": float(worst)},
                sort_keys=True,
            )
            + "\n"
        )
    finally:
        if close:
            out.close()
    return EXIT_OK


def _cmd_tree(args, config) -> int:
    weights = LevelWeights.parse(_opt(args, config, "weights", "geometric:0.5"))
    depth = int(_opt(args, config, "depth", 10))
    if args.tree_cmd == "histogram":
        rows = energy_histogram(depth, weights)
        out, close = _open_out(_opt(args, config, "out", None))
        try:
            writer = csv.writer(out)
            writer.writerow(["level", "energy", "multiplicity", "uses_level0_convention"])
            for row in rows:
                writer.writerow([row.level, fmt(row.energy), row.multiplicity, row.uses_level0])
            out.write(
                json.dumps(
                    {"weights": weights.spec(), "r0": weights.r(0), "depth": depth},
                    sort_keys=True,
                )
                + "\n"
            )
        finally:
            if close:
                out.close()
        return EXIT_OK
    w1, w2 = parse_word(args.w1), parse_word(args.w2)
    br = boundary_resistance(w1, w2, weights)
    doc = {
        "meet_level": br.meet,
        "truncation": br.truncation,
        "series_sum": br.series_sum,
        "network_value": br.network_value,
        "tail_value": br.tail_value,
    }
    dump_json(doc, sys.stdout)
    return EXIT_OK


def _cmd_reproduce(args, config) -> int:
    name = args.name
    if name not in SUITES:
        raise ValueError(f"unknown reproduction {name!r}; choose from {sorted(SUITES)}")
    suite = SUITES[name]
    kwargs = {}
    if name == "tree" and args.depth is not None:
        kwargs["depth"] = int(args.depth)
    if name == "gff":
        if args.n is not None:
            kwargs["n"] = int(args.n)
        if args.seed is not None:
            kwargs["seed"] = int(args.seed)
    checks = suite(**kwargs)
    failed = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {name}: {check.label} (observed={check.observed}, expected={check.expected})")
        failed += 0 if check.passed else 1
    print(f"{name}: {len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_REPRODUCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rkhskit", description=__doc__)
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="cmd", required=True)

    kernel = sub.add_parser("kernel", help="evaluate a kernel or export its Gram matrix")
    ksub = kernel.add_subparsers(dest="kernel_cmd", required=True)
    keval = ksub.add_parser("eval")
    keval.add_argument("--input", required=True, help="kernel document (JSON)")
    keval.add_argument("--x", required=True)
    keval.add_argument("--y", required=True)
    kgram = ksub.add_parser("gram")
    kgram.add_argument("--input", required=True)
    kgram.add_argument("--out")

    diag = sub.add_parser("diagnose", help="trace point-mass projection norms over a filtration")
    diag.add_argument("--input", required=True, help="kernel document (JSON)")
    diag.add_argument("--target", help="target point (JSON literal); default: first point")
    diag.add_argument("--stages", choices=["prefix", "doubling"])
    diag.add_argument("--tau-stab", type=float)
    diag.add_argument("--tau-div", type=float)
    diag.add_argument("--k", type=int)
    diag.add_argument("--out")

    network = sub.add_parser("network", help="network quantities")
    nsub = network.add_subparsers(dest="network_cmd", required=True)
    for name in ("green", "resistance", "delta-norm"):
        p = nsub.add_parser(name)
        p.add_argument("--network", required=True, help="network document (JSON)")
        p.add_argument("--out")
        if name != "green":
            p.add_argument("--x")
            p.add_argument("--y")

    gffp = sub.add_parser("gff", help="sample a Gaussian field on a network")
    gsub = gffp.add_subparsers(dest="gff_cmd", required=True)
    for name in ("sample", "check"):
        p = gsub.add_parser(name)
        p.add_argument("--network", required=True)
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out")

    treep = sub.add_parser("tree", help="dyadic tree energies and boundary resistances")
    tsub = treep.add_subparsers(dest="tree_cmd", required=True)
    thist = tsub.add_parser("histogram")
    thist.add_argument("--depth", type=int)
    thist.add_argument("--weights")
    thist.add_argument("--out")
    tres = tsub.add_parser("resistance")
    tres.add_argument("--weights")
    tres.add_argument("--w1", required=True, help="0/1 word, e.g. 0010")
    tres.add_argument("--w2", required=True)

    rep = sub.add_parser("reproduce", help="run a named reproduction suite")
    rep.add_argument("name")
    rep.add_argument("--depth", type=int)
    rep.add_argument("--n", type=int)
    rep.add_argument("--seed", type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            config = _load_json(args.config)
        except (OSError, json.JSONDecodeError) as err:
            print(f"error: cannot read config: {err}", file=sys.stderr)
            return EXIT_INPUT
    handlers = {
        "kernel": lambda: _cmd_kernel_eval(args, config) if args.kernel_cmd == "eval" else _cmd_kernel_gram(args, config),
        "diagnose": lambda: _cmd_diagnose(args, config),
        "network": lambda: _cmd_network(args, config),
        "gff": lambda: _cmd_gff(args, config),
        "tree": lambda: _cmd_tree(args, config),
        "reproduce": lambda: _cmd_reproduce(args, config),
    }
    try:
        return handlers[args.cmd]()
    except MonotonicityViolation as err:
        print(f"numerical breakdown: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (RKHSKitError, ValueError, OSError, json.JSONDecodeError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
