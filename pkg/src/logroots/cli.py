"""Command-line entry point.

Subcommands map one-to-one onto the library layers: simulate-process and
el-alpha expose the limit objects, roots and verify-lemma the finite-n
localization pipeline, experiment the seeded Monte Carlo harness, and
plot-data re-projects any stored JSON artifact into a flat (x, y, series)
CSV for external plotting.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 when an
experiment ran but at least one statistic missed its band.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .coeffs import LogComplex, TailSpec, spec_from_name
from .experiments import ExperimentConfig, run_experiment
from .formulas import (
    expected_segments_closed,
    expected_segments_integral,
    prob_two_segments,
)
from .majorant import Majorant, _segments_from_vertices
from .poisson import PointProcessSample, sample_process_majorant
from .roots import predict_root_boxes, verify_boxes

DEFAULT_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


class _Parser(argparse.ArgumentParser):
    """Parser whose usage failures exit 1 with a one-line reason."""

    def error(self, message: str):
        sys.stderr.write(f"error: {message}\n{self.format_usage()}")
        raise SystemExit(1)


def _finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_spec(arg: str, alpha: float | None) -> TailSpec:
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return TailSpec.from_json(fh.read())
    return spec_from_name(arg, alpha)


# ------------------------------------------------------------- serialization


def process_artifact_to_dict(
    sample: PointProcessSample, majorant: Majorant, count: int, seed: int, miss_tol: float
) -> dict:
    return {
        "alpha": sample.alpha,
        "seed": seed,
        "miss_tol": miss_tol,
        "process": {
            "us": sample.us.tolist(),
            "vs": sample.vs.tolist(),
            "v_min": sample.v_min,
        },
        "majorant": {
            "vertices": [[x, y] for x, y in majorant.vertices],
            "x_max": majorant.x_max,
        },
        "segment_count": count,
    }


def process_artifact_from_dict(obj: dict) -> tuple[PointProcessSample, Majorant, int]:
    """Inverse of process_artifact_to_dict.

    Segments are rebuilt from the stored vertex chain exactly as the
    sampler builds them, so the round trip is the identity.
    """
    proc = obj["process"]
    sample = PointProcessSample(
        alpha=float(obj["alpha"]),
        us=np.asarray(proc["us"], dtype=float),
        vs=np.asarray(proc["vs"], dtype=float),
        v_min=float(proc["v_min"]),
    )
    verts = [(float(x), float(y)) for x, y in obj["majorant"]["vertices"]]
    maj = Majorant(
        vertices=tuple(verts),
        segments=_segments_from_vertices(verts),
        x_max=float(obj["majorant"]["x_max"]),
    )
    return sample, maj, int(obj["segment_count"])


def _read_coeffs_file(path: str) -> list[LogComplex]:
    coeffs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'log_modulus phase', got {line!r}"
                )
            coeffs.append(LogComplex(float(parts[0]), float(parts[1])))
    if not coeffs:
        raise ValueError(f"{path}: no coefficients")
    return coeffs


# --------------------------------------------------------------- subcommands


def _cmd_simulate_process(args) -> int:
    rng = np.random.default_rng(args.seed)
    sample, majorant, count = sample_process_majorant(args.alpha, rng, args.miss_tol)
    blob = json.dumps(
        process_artifact_to_dict(sample, majorant, count, args.seed, args.miss_tol),
        indent=2,
    )
    _write_output(blob + "\n", args.out)
    return 0


def _grid_arg(raw: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(tok) for tok in raw.split(",") if tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {raw!r}")
    if not grid:
        raise argparse.ArgumentTypeError("--grid must list at least one alpha")
    return grid


def _cmd_el_alpha(args) -> int:
    grid = args.grid if args.grid else DEFAULT_GRID
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["alpha", "closed", "integral", "prob_two_segments"])
    for alpha in grid:
        writer.writerow(
            [alpha, repr(expected_segments_closed(alpha)),
             repr(expected_segments_integral(alpha)), repr(prob_two_segments(alpha))]
        )
    _write_output(buf.getvalue(), args.out)
    return 0


_VERIFY_LIMIT = 64  # winding checks per roots invocation; beyond this, blank


def _cmd_roots(args) -> int:
    from .coeffs import canonical_phase, sample_polynomial

    spec = _resolve_spec(args.spec, args.alpha)
    rng = np.random.default_rng(args.seed)
    coeffs = sample_polynomial(spec, args.n, rng)
    pred = predict_root_boxes(coeffs)
    verdicts: dict[tuple[int, int], bool] = {}
    if 0 < len(pred.boxes) <= _VERIFY_LIMIT:
        for i, box in enumerate(pred.boxes):
            try:
                count = verify_boxes(coeffs, pred, indices=[i])[0]
            except ValueError:
                continue
            verdicts[(box.segment_index, box.m)] = count == 1
    logs = [c.log_mod for c in coeffs]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["segment", "m", "log_r", "phase", "certified", "verified"])
    for i, seg in enumerate(pred.majorant.segments):
        k, l = int(seg.x_lo), int(seg.x_hi)
        width = l - k
        log_r = (logs[k] - logs[l]) / width
        phi = canonical_phase(math.pi + coeffs[k].phase - coeffs[l].phase)
        for m in range(1, width + 1):
            phase = canonical_phase((phi + 2.0 * math.pi * m) / width)
            verified = verdicts.get((i, m))
            writer.writerow(
                [i, m, repr(log_r), repr(phase),
                 str(pred.certified[i]).lower(),
                 "" if verified is None else str(verified).lower()]
            )
    _write_output(buf.getvalue(), args.out)
    sys.stderr.write(
        f"{args.n} predicted roots on {len(pred.majorant.segments)} rings, "
        f"{sum(pred.certified)} rings certified, "
        f"{sum(verdicts.values())} boxes winding-verified\n"
    )
    return 0


def _cmd_verify_lemma(args) -> int:
    coeffs = _read_coeffs_file(args.coeffs_file)
    pred = predict_root_boxes(coeffs)
    segments = []
    for idx, seg in enumerate(pred.majorant.segments):
        delta = zeta = None
        for box in pred.boxes:
            if box.segment_index == idx:
                delta, zeta = box.delta, box.zeta
                break
        segments.append(
            {
                "segment": idx,
                "first": int(seg.x_lo),
                "last": int(seg.x_hi),
                "certified": bool(pred.certified[idx]),
                "delta": _finite_or_none(delta),
                "zeta": _finite_or_none(zeta),
            }
        )
    boxes = []
    all_verified = bool(pred.boxes)
    for i, box in enumerate(pred.boxes):
        try:
            winding = verify_boxes(coeffs, pred, indices=[i])[0]
        except ValueError:
            winding = None
        ok = winding == 1
        all_verified = all_verified and ok
        boxes.append(
            {
                "box": i,
                "segment": box.segment_index,
                "m": box.m,
                "log_radius": box.log_r_center,
                "phase": box.phase_center,
                "winding": winding,
                "verified": ok,
            }
        )
    blob = json.dumps(
        {
            "degree": len(coeffs) - 1,
            "segments": segments,
            "boxes": boxes,
            "all_verified": all_verified,
        },
        indent=2,
    )
    _write_output(blob + "\n", args.out)
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    # explicit flags win over config file values
    overrides = {
        "trials": args.trials,
        "master_seed": args.seed,
        "n": args.n,
        "kappa": args.kappa,
        "miss_tol": args.miss_tol,
        "parity": args.parity,
        "output_path": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            obj[key] = value
    if args.spec is not None:
        obj["spec"] = json.loads(_resolve_spec(args.spec, args.alpha).to_json())
    config = ExperimentConfig.from_dict(obj)
    report = run_experiment(config)
    _write_output(report.to_json() + "\n", config.output_path)
    return 0 if report.all_passed() else 3


def _plot_rows(obj: dict) -> list[tuple]:
    if "process" in obj:
        rows = [
            (u, v, "atom") for u, v in zip(obj["process"]["us"], obj["process"]["vs"])
        ]
        rows += [(x, y, "hull") for x, y in obj["majorant"]["vertices"]]
        return rows
    if "statistics" in obj:
        return [
            (i, s["estimate"], s["name"]) for i, s in enumerate(obj["statistics"])
        ]
    if "boxes" in obj:
        return [
            (b["phase"], b["log_radius"], f"segment{b['segment']}")
            for b in obj["boxes"]
        ]
    raise ValueError("unrecognized artifact: no process, statistics, or boxes key")


def _cmd_plot_data(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        obj = json.load(fh)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "y", "series"])
    for x, y, series in _plot_rows(obj):
        writer.writerow([repr(float(x)), repr(float(y)), series])
    _write_output(buf.getvalue(), args.out)
    return 0


# ------------------------------------------------------------------ parsing


def build_parser() -> _Parser:
    parser = _Parser(prog="logroots", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate-process", help="dump one limit-process realization")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--miss-tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_simulate_process)

    p = sub.add_parser("el-alpha", help="expected-segment-count table CSV")
    p.add_argument("--grid", type=_grid_arg, help="comma-separated alpha values")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_el_alpha)

    p = sub.add_parser("roots", help="predicted root-box CSV for a sampled polynomial")
    p.add_argument("--spec", required=True, help="family name or TailSpec JSON path")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_roots)

    p = sub.add_parser("verify-lemma", help="certify and winding-check a coefficient file")
    p.add_argument("--coeffs-file", required=True,
                   help="one 'log_modulus phase' pair per line, index = line number")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_verify_lemma)

    p = sub.add_parser("experiment", help="run an experiment configuration")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON path")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--spec")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--miss-tol", type=float)
    p.add_argument("--parity", choices=["even", "odd"])
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("plot-data", help="re-project a stored JSON artifact to CSV")
    p.add_argument("input", help="path to a stored JSON artifact")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_plot_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
