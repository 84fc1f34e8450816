"""Command-line front end: JSON problems in, JSON reports and CSV out.

Usage:

    rhc <mode> --problem FILE --out FILE
        [--samples FILE] [--grid NxM] [--bbox re0,re1,im0,im1]
        [--nodes K] [--tol key=value ...]

Modes: solve, factorize-scalar, factorize-hermitian, check-symmetry,
index, idnls.  The problem file layout is documented in
docs/problem-schema.json and validated on load with messages that name
the violated precondition.  Exit codes: 0 success, 1 bad input,
2 failed hypothesis check, 3 near-singular operator.  Output files are
written atomically, and a report is byte-identical across runs except
for its timing field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from typing import Callable

import numpy as np

from .contour import CCW, CW, Circle, ContourSystem, build_contour
from .errors import (
    AlignmentError,
    CirclePackingError,
    DegenerateSolitonSystemError,
    EvalError,
    HypothesisViolationError,
    NearSingularOperatorError,
    NonConstantCError,
    NonPositiveCError,
    NotInversionInvariantContourError,
    OrientationError,
    OverlapError,
    ParseError,
    RadiusConflictError,
    RankAmbiguityError,
    ReflectionTooLargeError,
    SingularInversionError,
    SingularJumpError,
    TooCloseToContourError,
    WindingAmbiguityError,
)
from .expressions import parse_expression
from .factorize import hermitian_factorize, scalar_factorize
from .idnls import (
    IdnlsSpec,
    build_defocusing_jump,
    build_focusing_jump,
    conjugate,
    remove_poles,
    residue_condition_residuals,
    solve_augmented,
)
from .rhp import (
    DELTA_INV,
    SIGMA_MIN,
    TAU_RANK,
    JumpData,
    RHProblem,
    check_inversion_hypotheses,
    index_diagnostics,
    solve,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_HYPOTHESIS = 2
EXIT_NEAR_SINGULAR = 3

MODES = (
    "solve",
    "factorize-scalar",
    "factorize-hermitian",
    "check-symmetry",
    "index",
    "idnls",
)

_TOLERANCE_KEYS = (
    "sigma_min",
    "tau_rank",
    "delta_inv",
    "const_tol",
    "sym_tol",
    "pair_tol",
)

_HYPOTHESIS_ERRORS = (
    HypothesisViolationError,
    NonConstantCError,
    NonPositiveCError,
    NotInversionInvariantContourError,
    ReflectionTooLargeError,
    SingularJumpError,
    WindingAmbiguityError,
    RankAmbiguityError,
    DegenerateSolitonSystemError,
)

_INPUT_ERRORS = (
    ParseError,
    EvalError,
    OverlapError,
    OrientationError,
    SingularInversionError,
    CirclePackingError,
    RadiusConflictError,
    AlignmentError,
    TooCloseToContourError,
    ValueError,
    OSError,
    json.JSONDecodeError,
)


class _ArgumentParser(argparse.ArgumentParser):
    # Usage mistakes are input errors (exit 1); argparse's default exit
    # code 2 is reserved for failed hypothesis checks.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"rhc: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="rhc",
        description="Solve and factorize jump problems on systems of circles.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--problem", required=True, help="problem JSON file")
    parser.add_argument("--out", required=True, help="report JSON file")
    parser.add_argument("--samples", help="CSV of m sampled on a grid")
    parser.add_argument("--grid", default="16x16", help="sample grid, NxM")
    parser.add_argument(
        "--bbox",
        help="sample box re0,re1,im0,im1 (default: contour extent padded)",
    )
    parser.add_argument(
        "--nodes", type=int, help="override every circle's node count"
    )
    parser.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help=f"tolerance override, keys: {', '.join(_TOLERANCE_KEYS)}",
    )
    return parser


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(f"problem file: {message}")


def _load_problem(path: str, mode: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    _require(isinstance(doc, dict), "top level must be a JSON object")
    _require(doc.get("version") == 1, "version must be the integer 1")
    _require("mode" in doc, "mode is required")
    _require(doc["mode"] in MODES, f"mode must be one of {MODES}")
    _require(
        doc["mode"] == mode,
        f"mode {doc['mode']!r} does not match the command line ({mode!r})",
    )
    if "tolerances" in doc:
        _require(
            isinstance(doc["tolerances"], dict),
            "tolerances must be an object",
        )
        for key in doc["tolerances"]:
            _require(
                key in _TOLERANCE_KEYS,
                f"unknown tolerance {key!r}, expected one of {_TOLERANCE_KEYS}",
            )
    if mode == "idnls":
        _require("idnls" in doc, "idnls block is required for mode idnls")
    else:
        _require("contour" in doc, f"contour block is required for mode {mode}")
        _require("jump" in doc, f"jump block is required for mode {mode}")
    return doc


def _merge_tolerances(doc: dict, overrides: list) -> dict:
    tol = {
        "sigma_min": SIGMA_MIN,
        "tau_rank": TAU_RANK,
        "delta_inv": DELTA_INV,
        "const_tol": 1e-6,
        "sym_tol": 1e-10,
        "pair_tol": 1e-8,
    }
    for key, value in doc.get("tolerances", {}).items():
        tol[key] = float(value)
    for item in overrides:
        key, _, value = item.partition("=")
        if key not in _TOLERANCE_KEYS:
            raise ValueError(
                f"unknown tolerance {key!r}, expected one of {_TOLERANCE_KEYS}"
            )
        try:
            tol[key] = float(value)
        except ValueError:
            raise ValueError(f"tolerance {key} needs a numeric value") from None
    return tol


def _build_system(doc: dict, nodes_override: int | None) -> ContourSystem:
    block = doc["contour"]
    _require(
        isinstance(block, list) and block, "contour must be a nonempty array"
    )
    circles = []
    for k, entry in enumerate(block):
        _require(isinstance(entry, dict), f"contour[{k}] must be an object")
        center = entry.get("center")
        _require(
            isinstance(center, list) and len(center) == 2,
            f"contour[{k}].center must be [re, im]",
        )
        radius = entry.get("radius")
        _require(
            isinstance(radius, (int, float)) and radius > 0,
            f"contour[{k}].radius must be positive",
        )
        orientation = entry.get("orientation", "ccw")
        _require(
            orientation in ("ccw", "cw"),
            f"contour[{k}].orientation must be 'ccw' or 'cw'",
        )
        nodes = nodes_override or entry.get("nodes", 64)
        _require(
            isinstance(nodes, int) and nodes >= 4,
            f"contour[{k}].nodes must be an integer >= 4",
        )
        circles.append(
            Circle(
                complex(center[0], center[1]),
                float(radius),
                CCW if orientation == "ccw" else CW,
                nodes,
            )
        )
    return build_contour(circles)


def _expression_table(doc: dict) -> dict:
    table: dict[str, Callable] = {}
    r_text = doc.get("idnls", {}).get("r")
    if r_text:
        table["r"] = parse_expression(str(r_text))
    return table


def _matrix_evaluator(entries, table: dict, where: str) -> Callable:
    _require(
        isinstance(entries, list)
        and entries
        and all(isinstance(row, list) and len(row) == len(entries) for row in entries),
        f"{where} must be a square matrix of expression strings",
    )
    compiled = []
    for row in entries:
        compiled_row = []
        for cell in row:
            _require(
                isinstance(cell, str),
                f"{where} entries must be expression strings",
            )
            compiled_row.append(parse_expression(cell, table))
        compiled.append(compiled_row)

    def fn(z: complex) -> np.ndarray:
        return np.array(
            [[entry(z) for entry in row] for row in compiled],
            dtype=np.complex128,
        )

    return fn


def _build_jump(doc: dict, system: ContourSystem, delta_inv: float) -> JumpData:
    block = doc["jump"]
    table = _expression_table(doc)
    count = len(system.circles)
    per_circle = (
        isinstance(block, list)
        and block
        and all(
            isinstance(m, list) and m and isinstance(m[0], list) for m in block
        )
    )
    if per_circle:
        _require(
            len(block) == count,
            f"jump has {len(block)} matrices for {count} circles",
        )
        fns = [
            _matrix_evaluator(m, table, f"jump[{i}]")
            for i, m in enumerate(block)
        ]
        return JumpData.from_evaluators(system, fns, delta_inv)
    fn = _matrix_evaluator(block, table, "jump")
    return JumpData.from_evaluator(system, fn, delta_inv)


def _parse_h(doc: dict):
    block = doc.get("h", "identity")
    if block == "identity":
        return None
    _require(
        isinstance(block, list) and block,
        "h must be 'identity' or a matrix of [re, im] pairs",
    )
    rows = []
    for row in block:
        _require(
            isinstance(row, list)
            and all(isinstance(c, list) and len(c) == 2 for c in row),
            "h entries must be [re, im] pairs",
        )
        rows.append([complex(c[0], c[1]) for c in row])
    return np.array(rows, dtype=np.complex128)


def _base_report(mode: str, system: ContourSystem | None) -> dict:
    return {
        "mode": mode,
        "per_circle_nodes": (
            [c.node_count for c in system.circles] if system else []
        ),
        "residual_jump": None,
        "smallest_singular_value": None,
        "dim_ker": None,
        "dim_coker": None,
        "min_re_eig": None,
        "symmetric_off_circle": None,
    }


def _run_solve(doc, tol, nodes):
    system = _build_system(doc, nodes)
    jump = _build_jump(doc, system, tol["delta_inv"])
    problem = RHProblem.from_jump(jump, h=_parse_h(doc))
    sol = solve(problem, sigma_min=tol["sigma_min"])
    report = _base_report("solve", system)
    report["residual_jump"] = float(sol.residual_jump)
    report["smallest_singular_value"] = float(sol.smallest_singular_value)
    return report, sol.evaluate, system, EXIT_OK


def _run_index(doc, tol, nodes):
    system = _build_system(doc, nodes)
    jump = _build_jump(doc, system, tol["delta_inv"])
    problem = RHProblem.from_jump(jump)
    rep = index_diagnostics(problem, tau_rank=tol["tau_rank"])
    report = _base_report("index", system)
    report["dim_ker"] = int(rep.dim_ker)
    report["dim_coker"] = int(rep.dim_coker)
    report["ker_gap"] = [float(g) for g in rep.ker_gap]
    report["coker_gap"] = [float(g) for g in rep.coker_gap]
    return report, None, system, EXIT_OK


def _scalar_anchors(doc: dict, system: ContourSystem):
    block = doc.get("anchors", {})
    _require(isinstance(block, dict), "anchors must be an object")

    def as_point(key):
        value = block.get(key)
        if value is None:
            return None
        _require(
            isinstance(value, list) and len(value) == 2,
            f"anchors.{key} must be [re, im]",
        )
        return complex(value[0], value[1])

    z_plus, z_minus = as_point("z_plus"), as_point("z_minus")
    circle = system.circles[0]
    if z_plus is None:
        z_plus = (
            circle.center + 2.0 * circle.radius
            if system.plus_at_infinity
            else circle.center
        )
    if z_minus is None and system.plus_at_infinity:
        z_minus = circle.center
    return z_plus, z_minus


def _run_factorize_scalar(doc, tol, nodes):
    system = _build_system(doc, nodes)
    jump = _build_jump(doc, system, tol["delta_inv"])
    _require(jump.v.dim == 1, "factorize-scalar needs a 1x1 jump")
    z_plus, z_minus = _scalar_anchors(doc, system)
    fact = scalar_factorize(jump.v, z_plus, z_minus, delta_inv=tol["delta_inv"])
    report = _base_report("factorize-scalar", system)
    report["residual_jump"] = float(fact.residual)
    report["winding_index"] = int(fact.index)
    return report, None, system, EXIT_OK


def _run_factorize_hermitian(doc, tol, nodes):
    system = _build_system(doc, nodes)
    jump = _build_jump(doc, system, tol["delta_inv"])
    fact = hermitian_factorize(
        jump, const_tol=tol["const_tol"], sym_tol=tol["sym_tol"]
    )
    rep = check_inversion_hypotheses(
        jump, pair_tol=tol["pair_tol"], sym_tol=tol["sym_tol"]
    )
    report = _base_report("factorize-hermitian", system)
    report["residual_jump"] = float(fact.product_residual)
    report["smallest_singular_value"] = float(
        fact.solution.smallest_singular_value
    )
    report["min_re_eig"] = float(rep.min_re_eig_on_circle)
    report["symmetric_off_circle"] = bool(rep.symmetric_off_circle)
    report["constancy_stddev"] = float(fact.constancy_stddev)
    return report, fact.solution.evaluate, system, EXIT_OK


def _run_check_symmetry(doc, tol, nodes):
    system = _build_system(doc, nodes)
    jump = _build_jump(doc, system, tol["delta_inv"])
    rep = check_inversion_hypotheses(
        jump, pair_tol=tol["pair_tol"], sym_tol=tol["sym_tol"]
    )
    report = _base_report("check-symmetry", system)
    report["min_re_eig"] = float(rep.min_re_eig_on_circle)
    report["symmetric_off_circle"] = bool(rep.symmetric_off_circle)
    report["symmetry_deviation"] = float(rep.max_symmetry_deviation)
    report["hermitian_deviation"] = float(rep.hermitian_deviation_on_circle)
    passed = rep.symmetric_off_circle and rep.min_re_eig_on_circle > 0.0
    return report, None, system, EXIT_OK if passed else EXIT_HYPOTHESIS


def _parse_idnls_spec(doc: dict) -> IdnlsSpec:
    block = doc["idnls"]
    _require(isinstance(block, dict), "idnls must be an object")
    _require("n" in block, "idnls.n is required")
    _require(isinstance(block["n"], int), "idnls.n must be an integer")
    sign = block.get("sign", "focusing")
    _require(
        sign in ("focusing", "defocusing"),
        "idnls.sign must be 'focusing' or 'defocusing'",
    )
    poles = []
    for k, entry in enumerate(block.get("poles", [])):
        _require(
            isinstance(entry, list) and len(entry) == 4,
            f"idnls.poles[{k}] must be [re, im, c_re, c_im]",
        )
        poles.append(
            (complex(entry[0], entry[1]), complex(entry[2], entry[3]))
        )
    r_text = block.get("r")
    r_fn = parse_expression(str(r_text)) if r_text else None
    return IdnlsSpec(r=r_fn, n=block["n"], poles=tuple(poles), sign=sign)


def _run_idnls(doc, tol, nodes):
    block = doc["idnls"]
    spec = _parse_idnls_spec(doc)
    conj = bool(block.get("conjugate", False))
    node_count = nodes or 64
    report = _base_report("idnls", None)

    if not spec.poles and not conj:
        build = (
            build_defocusing_jump
            if spec.sign == "defocusing"
            else build_focusing_jump
        )
        jump = build(spec, node_count)
        problem = RHProblem.from_jump(jump)
        sol = solve(problem, sigma_min=tol["sigma_min"])
        rep = index_diagnostics(problem, tau_rank=tol["tau_rank"])
        system = jump.system
        sampler = sol.evaluate
    else:
        ap = remove_poles(spec, pole_nodes=node_count, unit_nodes=node_count)
        if conj:
            ap = conjugate(ap, node_count=node_count)
        isol = solve_augmented(ap, sigma_min=tol["sigma_min"])
        sol = isol.solution
        rep = index_diagnostics(
            RHProblem.from_jump(ap.jump), tau_rank=tol["tau_rank"]
        )
        system = ap.system
        sampler = isol.evaluate
        if conj:
            sym = check_inversion_hypotheses(
                ap.jump, pair_tol=tol["pair_tol"], sym_tol=tol["sym_tol"]
            )
            report["min_re_eig"] = float(sym.min_re_eig_on_circle)
            report["symmetric_off_circle"] = bool(sym.symmetric_off_circle)
        if spec.poles:
            report["residue_condition_residual"] = float(
                residue_condition_residuals(isol.evaluate, ap)
            )

    report["per_circle_nodes"] = [c.node_count for c in system.circles]
    report["residual_jump"] = float(sol.residual_jump)
    report["smallest_singular_value"] = float(sol.smallest_singular_value)
    report["dim_ker"] = int(rep.dim_ker)
    report["dim_coker"] = int(rep.dim_coker)
    return report, sampler, system, EXIT_OK


_RUNNERS = {
    "solve": _run_solve,
    "index": _run_index,
    "factorize-scalar": _run_factorize_scalar,
    "factorize-hermitian": _run_factorize_hermitian,
    "check-symmetry": _run_check_symmetry,
    "idnls": _run_idnls,
}


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rhc-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_report(path: str, report: dict) -> None:
    _atomic_write(path, json.dumps(report, indent=2, sort_keys=True) + "\n")


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        cols, rows = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"--grid must look like 40x40, got {text!r}") from None
    if cols < 1 or rows < 1:
        raise ValueError("--grid dimensions must be positive")
    return cols, rows


def _parse_bbox(text: str | None, system: ContourSystem) -> tuple:
    if text is not None:
        try:
            re0, re1, im0, im1 = (float(p) for p in text.split(","))
        except ValueError:
            raise ValueError(
                f"--bbox must be re0,re1,im0,im1, got {text!r}"
            ) from None
        if re0 >= re1 or im0 >= im1:
            raise ValueError("--bbox must have re0 < re1 and im0 < im1")
        return re0, re1, im0, im1
    pad = 0.5
    res = [c.center.real for c in system.circles]
    ims = [c.center.imag for c in system.circles]
    rads = [c.radius for c in system.circles]
    return (
        min(r - s for r, s in zip(res, rads)) - pad,
        max(r + s for r, s in zip(res, rads)) + pad,
        min(i - s for i, s in zip(ims, rads)) - pad,
        max(i + s for i, s in zip(ims, rads)) + pad,
    )


def _write_samples(
    path: str,
    sampler: Callable,
    system: ContourSystem,
    grid: tuple[int, int],
    bbox: tuple,
) -> None:
    re0, re1, im0, im1 = bbox
    cols, rows = grid
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["region", "re_z", "im_z", "row", "col", "re_m", "im_m"])
    for x in np.linspace(re0, re1, cols):
        for y in np.linspace(im0, im1, rows):
            z = complex(x, y)
            try:
                with np.errstate(divide="ignore", invalid="ignore"):
                    value = np.atleast_2d(sampler(z))
            except TooCloseToContourError:
                continue
            if not np.all(np.isfinite(value)):
                continue
            region = "plus" if system.in_omega_plus(z) else "minus"
            for a in range(value.shape[0]):
                for b in range(value.shape[1]):
                    writer.writerow(
                        [
                            region,
                            repr(float(x)),
                            repr(float(y)),
                            a,
                            b,
                            repr(float(value[a, b].real)),
                            repr(float(value[a, b].imag)),
                        ]
                    )
    _atomic_write(path, buffer.getvalue())


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_problem(args.problem, args.mode)
        tol = _merge_tolerances(doc, args.tol)
        grid = _parse_grid(args.grid)
        started = time.perf_counter()
        report, sampler, system, code = _RUNNERS[args.mode](
            doc, tol, args.nodes
        )
        report["timing_seconds"] = time.perf_counter() - started
        if args.samples:
            if sampler is None:
                raise ValueError(
                    f"mode {args.mode} does not produce samples"
                )
            _write_samples(
                args.samples,
                sampler,
                system,
                grid,
                _parse_bbox(args.bbox, system),
            )
        _write_report(args.out, report)
        return code
    except NearSingularOperatorError as exc:
        print(f"rhc: near-singular operator: {exc}", file=sys.stderr)
        return EXIT_NEAR_SINGULAR
    except _HYPOTHESIS_ERRORS as exc:
        print(f"rhc: hypothesis check failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except _INPUT_ERRORS as exc:
        print(f"rhc: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
