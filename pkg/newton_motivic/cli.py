"""
命令行入口

命令：
  newton      Newton 多面体、面格、刻面法向量
  fan         R^{n1}_{>=0} x R^{n2}_{>0} 的标准剖分、格点覆盖检查、扇检查
  milnor      Milnor 纤维 (--at-origin 或 --pullback n1)
  vanishing   平衡输入的消失判定
  conjecture  ∫ i_1^* S_F 与 L^{d1} S_{h,0} 的对照
  oracle      暴力枚举：jets / count / series / zeta

退出码：0 一致，1 输入或假设不满足，2 结果不一致。
报告写到 stdout (--json 时为规范 JSON)，日志写到 stderr。
"""

import argparse
import sys
from dataclasses import dataclass
from itertools import combinations

from . import motivic_ring, oracles
from .cones_series import LinearForm, cone_series, expand, expr_is_zero, expr_to_json, series_limit
from .poly_core import load_problem, support
from .polyhedra import (
    RationalCone, newton_polyhedron, canonical_partition, verify_partition, partition_diagnostics,
    fan_check, normal_fan, duality_violations, vertex_positivity, in_region, l_gamma,
)
from .report import ConeSpec, Report, parse_model
from .utils import (
    Logger, NewtonMotivicError, ConsistencyError, resolve_budget,
    DEFAULT_PRIMES, DEFAULT_PROBE_PRIMES, DEFAULT_SAMPLE_BOUND, DEFAULT_SERIES_DEPTH,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2

# 三顶点示例 x^2z^2 + xyz^2 + y^3z^3 (块 (2,0,1)) 的参考单元表，下标从 1 开始
THREE_VERTEX_SUPPORT = frozenset({(2, 0, 2), (1, 1, 2), (0, 3, 3)})
THREE_VERTEX_CELLS = (
    ("P1", ()), ("P1", (1,)), ("P2", ()), ("P2", (2,)), ("P3", ()), ("P3", (2,)),
    ("P1P2", ()), ("P1P2", (1,)), ("P2P3", ()), ("P2P3", (2,)),
)


class _Parser(argparse.ArgumentParser):
    """用法错误按输入错误处理 (退出码 1)，2 留给结果不一致"""

    def error(self, message):
        self.print_usage(sys.stderr)
        Logger.error(message)
        raise SystemExit(EXIT_INPUT)


@dataclass
class RunSettings:
    q_list: tuple
    bound: int
    depth: int
    budget: int
    paper_diff: bool


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _settings(args, problem=None, default_q=DEFAULT_PRIMES):
    """命令行参数 > 问题文件 options > 默认值 (预算另有环境变量)"""
    options = problem.options if problem is not None else None

    def pick(flag, option, default):
        if flag is not None:
            return flag
        if options is not None and getattr(options, option) is not None:
            return getattr(options, option)
        return default

    budget = pick(args.budget, "budget", None)
    return RunSettings(
        q_list=tuple(pick(args.q_list, "q_list", default_q)),
        bound=pick(args.bound, "bound", DEFAULT_SAMPLE_BOUND),
        depth=pick(args.depth, "depth", DEFAULT_SERIES_DEPTH),
        budget=resolve_budget(budget),
        paper_diff=args.paper_diff,
    )


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise NewtonMotivicError(f"cannot read {path}: {exc.strerror}") from exc


def _load(args):
    problem, g = load_problem(_read(args.file))
    Logger.info(f"读取 {args.file}: {g} (块 {g.partition})")
    return problem, g


def _realizations(cls, settings):
    return {str(q): oracles.realize(cls, q, settings.budget).to_dict() for q in settings.q_list}


# === newton ===

def cmd_newton(args):
    _, g = _load(args)
    poly = newton_polyhedron(support(g), g.n_vars)
    result = {
        "polynomial": str(g),
        "polyhedron": poly.to_dict(),
        "compact_face_count": len(poly.compact_faces()),
    }
    diagnostics = [f"duality fails for {a} ⊆ {b}" for a, b in duality_violations(poly)]
    hypotheses = {"vertex positivity": "ok" if vertex_positivity(poly) else "fails"}
    return Report(command="newton", source=args.file, hypotheses=hypotheses, result=result,
                  diagnostics=diagnostics, exit_code=EXIT_MISMATCH if diagnostics else EXIT_OK)


# === fan ===

def reference_cell_notes(poly, cells, n1):
    """与已知参考单元表对照，返回差异说明；没有参考表的输入只返回一条说明"""
    computed = {(c.compact.label, tuple(i + 1 for i in c.index_set)) for c in cells}
    if poly.owner == THREE_VERTEX_SUPPORT and n1 == 2:
        expected = set(THREE_VERTEX_CELLS)
        name = "three-vertex reference"
    elif len(poly.vertices) == 1 and vertex_positivity(poly):
        expected = {("P1", I) for k in range(n1 + 1) for I in combinations(range(1, n1 + 1), k)}
        name = "single positive vertex reference (2^n1 cells)"
    else:
        return ["no reference cell list for this input: references cover the three-vertex example "
                "with n1 = 2 and polyhedra with a single positive vertex"]
    notes = []
    for label, I in sorted(expected - computed):
        notes.append(f"{name}: σ_{{{label},{set(I) or '∅'}}} listed but {label}+R^I is not an exposed face")
    for label, I in sorted(computed - expected):
        notes.append(f"{name}: computed cell σ_{{{label},{set(I) or '∅'}}} missing from the list")
    if not notes:
        notes.append(f"{name}: cell list agrees")
    return notes


def cmd_fan(args):
    problem, g = _load(args)
    settings = _settings(args, problem)
    n1 = g.n1
    poly = newton_polyhedron(support(g), g.n_vars)
    cells = canonical_partition(poly, n1, g.n_vars - n1)
    problems = verify_partition(poly, cells, n1, settings.bound)
    fan = fan_check(normal_fan(poly))
    result = {
        "n1": n1,
        "cells": [c.to_dict() for c in cells],
        "cell_count": len(cells),
        "normal_fan": fan.to_dict(),
        "coverage": {"bound": settings.bound, "problems": problems[:20], "problem_count": len(problems)},
    }
    diagnostics = partition_diagnostics(poly, cells, n1)
    if settings.paper_diff:
        diagnostics += reference_cell_notes(poly, cells, n1)
    ok = not problems and fan.ok
    if ok:
        Logger.success(f"{len(cells)} 个单元覆盖 ||a|| <= {settings.bound} 的全部格点各一次")
    return Report(command="fan", source=args.file, result=result, diagnostics=diagnostics,
                  exit_code=EXIT_OK if ok else EXIT_MISMATCH)


# === milnor ===

def cmd_milnor(args):
    problem, g = _load(args)
    settings = _settings(args, problem)
    diagnostics = []
    if args.at_origin:
        value = motivic_ring.milnor_at_origin(g)
        hypotheses = motivic_ring.hypothesis_table(g.with_partition((0, g.n_vars, 0)), 0,
                                                   DEFAULT_PROBE_PRIMES)[0]
        printed = motivic_ring.origin_printed_formula(g)
        if not (printed - value).is_zero():
            diagnostics.append(f"sum over compact faces off the coordinate planes gives {printed}")
        result = {"mode": "at-origin", "milnor": value.to_dict(), "text": str(value)}
        pushed = value
    else:
        n1 = g.n1 if args.pullback is None else args.pullback
        if not 0 <= n1 < g.n_vars:
            raise NewtonMotivicError(f"--pullback {n1} must lie in [0, {g.n_vars - 1}]")
        details = motivic_ring.milnor_details(g, n1)
        pushed = motivic_ring.pushforward(details.milnor)
        regrouped = g.with_partition((n1, g.n_vars - n1, 0))
        hypotheses = motivic_ring.hypothesis_table(regrouped, n1, DEFAULT_PROBE_PRIMES)[0]
        hypotheses["vertex positivity"] = "ok" if details.path == "vertex-positive" else "fails (general path)"
        result = {
            "mode": "pullback",
            "n1": n1,
            "milnor": details.milnor.to_dict(),
            "pushforward": pushed.to_dict(),
            "text": str(details.milnor),
            "path": details.path,
            "cells": [c.to_dict() for c in details.zeta.cells],
            "restricted_formula_agrees": details.printed_formula_agrees,
        }
        diagnostics += details.diagnostics
    return Report(command="milnor", source=args.file, hypotheses=hypotheses, result=result,
                  oracle={"realize": _realizations(pushed, settings), "budget": settings.budget},
                  diagnostics=diagnostics)


# === vanishing / conjecture ===

def cmd_vanishing(args):
    problem, g = _load(args)
    settings = _settings(args, problem, default_q=(3, 5, 7))
    verdict = motivic_ring.vanishing_check(g, q_list=settings.q_list)
    result = {"status": verdict.status, "reason": verdict.reason, "path": verdict.path}
    if verdict.value is not None:
        result["value"] = verdict.value.to_dict()
    if verdict.h_vanishes is not None:
        result["h_vanishes"] = verdict.h_vanishes
    code = {"Vanishes": EXIT_OK, "HypothesisFail": EXIT_INPUT}.get(verdict.status, EXIT_MISMATCH)
    return Report(command="vanishing", source=args.file, hypotheses=verdict.hypotheses, result=result,
                  oracle={"realize": {str(q): c.to_dict() for q, c in verdict.realizations.items()},
                          "budget": settings.budget},
                  diagnostics=verdict.diagnostics, exit_code=code)


def cmd_conjecture(args):
    problem, F = _load(args)
    settings = _settings(args, problem, default_q=(3, 5, 7, 11))
    verdict = motivic_ring.conjecture_check(F, q_list=settings.q_list)
    result = {"status": verdict.status, "reason": verdict.reason, "partition": list(F.partition)}
    if verdict.lhs is not None:
        result["lhs"] = verdict.lhs.to_dict()
        result["rhs"] = verdict.rhs.to_dict()
    oracle = {
        str(q): {"lhs": left.to_dict(), "rhs": right.to_dict()}
        for q, (left, right) in verdict.realizations.items()
    }
    if verdict.status == "HypothesisFail":
        code = EXIT_INPUT
    elif verdict.status == "mismatch":
        code = EXIT_MISMATCH
    else:
        code = EXIT_OK
    return Report(command="conjecture", source=args.file, hypotheses=verdict.hypotheses, result=result,
                  oracle={"realize": oracle, "budget": settings.budget},
                  diagnostics=verdict.diagnostics, exit_code=code)


# === oracle ===

def _oracle_jets(args, g, settings):
    if args.a is None or args.m is None:
        raise NewtonMotivicError("oracle jets needs --a and --m")
    if len(args.a) != g.n_vars:
        raise NewtonMotivicError(f"--a has {len(args.a)} entries, polynomial has {g.n_vars} variables")
    q = args.q or 3
    total, counts = oracles.jet_count(g, oracles.JetSpec(args.a, args.m, q), settings.budget)
    result = {"a": list(args.a), "m": args.m, "q": q,
              "total": total if isinstance(total, int) else str(total), "by_ac": counts.to_dict()}
    diagnostics, code = [], EXIT_OK
    if in_region(args.a, g.n1):
        value, _ = l_gamma(newton_polyhedron(support(g), g.n_vars), args.a)
        k = args.m - value
        if k < 0:
            result["formula"] = f"ord_t g >= {value} > m, count must be 0"
            code = EXIT_OK if total == 0 else EXIT_MISMATCH
        else:
            try:
                ok, _, predicted = oracles.jet_identity_check(g, args.a, k, q, settings.budget)
            except (ValueError, NewtonMotivicError) as exc:
                diagnostics.append(f"jet identity not applicable: {exc}")
            else:
                result["formula"] = predicted.to_dict()
                code = EXIT_OK if ok else EXIT_MISMATCH
    return result, diagnostics, code


def _oracle_count(args, g, settings):
    q = args.q or 7
    counts = oracles.count_torus_fiber(g, q, settings.budget)
    zero = oracles.count_torus_zero(g, q, settings.budget)
    return {"q": q, "counts": counts.to_dict(), "zero": zero}, [], EXIT_OK


def _oracle_zeta(args, g, settings):
    if args.m is None:
        raise NewtonMotivicError("oracle zeta needs --m")
    q = args.q or 2
    ok, brute, predicted = oracles.zeta_coefficient_check(g, g.n1, args.m, q, settings.budget)
    result = {"m": args.m, "q": q, "jets": brute.to_dict(), "zeta_coefficient": predicted.to_dict()}
    return result, [], EXIT_OK if ok else EXIT_MISMATCH


def build_cone(spec):
    if spec.generators is not None:
        return RationalCone.from_generators(spec.generators, spec.dim, relatively_open=spec.open)
    strict = spec.strict or [False] * len(spec.inequalities)
    return RationalCone.from_inequalities(spec.dim, list(zip(spec.inequalities, strict)),
                                          spec.equalities or ())


def _oracle_series(args, settings):
    spec = parse_model(ConeSpec, _read(args.file))
    K = args.K or settings.depth
    cone = build_cone(spec)
    l, lp = LinearForm(tuple(spec.l)), LinearForm(tuple(spec.l_prime))
    series = cone_series(cone, l, lp)
    closed = expand(series, K)[1:]
    brute = oracles.series_coeff_brute(cone, l, lp, K)
    bad = [m + 1 for m, (a, b) in enumerate(zip(closed, brute)) if not expr_is_zero(a - b)]
    result = {
        "cone": cone.to_dict(),
        "K": K,
        "coefficients": [expr_to_json(c) for c in brute],
        "limit": expr_to_json(series_limit(series)),
        "closed_form_agrees": not bad,
    }
    diagnostics = [f"closed form differs from the lattice sum at T^{m}" for m in bad]
    return result, diagnostics, EXIT_MISMATCH if bad else EXIT_OK


def cmd_oracle(args):
    if args.kind == "series":
        settings = _settings(args)
        result, diagnostics, code = _oracle_series(args, settings)
    else:
        problem, g = _load(args)
        settings = _settings(args, problem)
        handler = {"jets": _oracle_jets, "count": _oracle_count, "zeta": _oracle_zeta}[args.kind]
        result, diagnostics, code = handler(args, g, settings)
    return Report(command=f"oracle {args.kind}", source=args.file, result=result,
                  oracle={"budget": settings.budget}, diagnostics=diagnostics, exit_code=code)


# === 参数解析 ===

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--q-list", type=_int_list, help="primes for realizations, e.g. 3,5,7")
    common.add_argument("--bound", type=int, help="lattice sample bound for fan coverage")
    common.add_argument("--depth", type=int, help="series expansion depth K")
    common.add_argument("--budget", type=int, help="enumeration budget (elementary evaluations)")
    common.add_argument("--paper-diff", action="store_true",
                        help="compare cells with the built-in reference lists; these exist only for "
                             "the three-vertex example (n1 = 2) and single positive vertex polyhedra")

    parser = _Parser(prog="newton-motivic",
                     description="Newton polyhedra, canonical fans and motivic Milnor fibers")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, text in (
        ("newton", cmd_newton, "Newton polyhedron and face lattice"),
        ("fan", cmd_fan, "canonical partition and fan checks"),
        ("vanishing", cmd_vanishing, "vanishing check for balanced input"),
        ("conjecture", cmd_conjecture, "compare both sides of the integral identity"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
        p.set_defaults(handler=handler)

    p = sub.add_parser("milnor", parents=[common], help="motivic Milnor fiber")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--at-origin", action="store_true")
    mode.add_argument("--pullback", type=int, metavar="N1")
    p.set_defaults(handler=cmd_milnor)

    p = sub.add_parser("oracle", parents=[common], help="brute-force enumeration")
    p.add_argument("kind", choices=["jets", "count", "series", "zeta"])
    p.add_argument("file")
    p.add_argument("--a", type=_int_list, help="order vector, e.g. 1,1")
    p.add_argument("--m", type=int, help="target order of g")
    p.add_argument("--q", type=int, help="prime")
    p.add_argument("--K", type=int, help="number of series coefficients")
    p.set_defaults(handler=cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    command = args.command if args.command != "oracle" else f"oracle {args.kind}"
    try:
        report = args.handler(args)
    except ConsistencyError as exc:
        Logger.error(f"内部交叉校验失败: {exc}")
        report = Report(command=command, source=args.file, diagnostics=[str(exc)], exit_code=EXIT_MISMATCH)
    except (NewtonMotivicError, ValueError) as exc:
        Logger.error(str(exc))
        report = Report(command=command, source=args.file, diagnostics=[str(exc)], exit_code=EXIT_INPUT)
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code
