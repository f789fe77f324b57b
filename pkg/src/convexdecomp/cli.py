"""Command line entry point: decompose, verify, oracle, gen and bench."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .decomp import CASE_LABELS, Decomposition, InvariantError, decompose
from .gen import KINDS, GenerationError, GenSpec, emit_points, generate, read_points
from .geom import GeometryInputError, PointSet, convex_hull
from .oracle import OracleLimitError, min_decomposition
from .verify import bound_max_faces, verify_decomposition

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


def decomposition_json(ps: PointSet, d: Decomposition) -> dict:
    hull = convex_hull(ps)
    b = len(hull)
    i = ps.n - b
    return {
        "n": ps.n,
        "i": i,
        "b": b,
        "hull": hull,
        "faces": [list(f) for f in d.faces],
        "bound_max": bound_max_faces(i, b),
        "trace": [e.as_dict() for e in d.trace],
    }


def render_svg(ps: PointSet, d) -> str:
    """Faces as filled polygons, points as dots, hull outlined. Deterministic."""
    faces = d.faces if hasattr(d, "faces") else d
    xs = [p.x for p in ps.points]
    ys = [-p.y for p in ps.points]  # SVG y grows downwards
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1)
    pad = 0.05 * span
    w, h = (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad
    dot = span / 150
    stroke = span / 600

    def fmt(v):
        return f"{v:.6g}"

    def pts(cycle):
        return " ".join(f"{xs[k]},{ys[k]}" for k in cycle)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{fmt(x0 - pad)} {fmt(y0 - pad)} '
        f'{fmt(w)} {fmt(h)}">',
        f'<g stroke="#333333" stroke-width="{fmt(stroke)}" stroke-linejoin="round">',
    ]
    for k, f in enumerate(faces):
        out.append(f'<polygon points="{pts(f)}" fill="{PALETTE[k % len(PALETTE)]}"/>')
    out.append("</g>")
    hull = convex_hull(ps)
    outline = "M" + " L".join(f"{xs[k]},{ys[k]}" for k in hull) + " Z"
    out.append(f'<path d="{outline}" fill="none" stroke="#000000" '
               f'stroke-width="{fmt(3 * stroke)}"/>')
    out.append('<g fill="#000000">')
    for k in range(ps.n):
        out.append(f'<circle cx="{xs[k]}" cy="{ys[k]}" r="{fmt(dot)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


# ------------------------------------------------------------------ commands

def cmd_decompose(args) -> int:
    ps = read_points(args.points)
    t0 = time.perf_counter()
    d = decompose(ps, check_input=False)
    ms = (time.perf_counter() - t0) * 1000
    doc = decomposition_json(ps, d)
    status = EXIT_OK
    summary = f"n={ps.n} i={doc['i']} b={doc['b']} faces={d.face_count} bound={doc['bound_max']}"
    if not args.no_verify:
        rep = verify_decomposition(ps, d)
        if not rep.ok:
            status = EXIT_VERIFY
            summary += f" verify=FAIL {sorted(rep.failed_axioms()) or ['bound']}"
        else:
            summary += " verify=ok"
    summary += f" time_ms={ms:.1f}"
    text = _dumps(doc)
    if args.json:
        _write(args.json, text)
    else:
        sys.stdout.write(text)
    if args.svg:
        _write(args.svg, render_svg(ps, d))
    print(summary, file=sys.stderr)
    return status


def _load_faces(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise GeometryInputError(f"{path}: not valid JSON ({e})") from None
    faces = doc.get("faces") if isinstance(doc, dict) else doc
    if not isinstance(faces, list) or not all(isinstance(f, list) for f in faces):
        raise GeometryInputError(f"{path}: expected a list of faces")
    return faces


def cmd_verify(args) -> int:
    ps = read_points(args.points)
    faces = _load_faces(args.decomposition)
    rep = verify_decomposition(ps, faces)
    sys.stdout.write(json.dumps(rep.as_dict(), indent=2) + "\n")
    if rep.area_faces != rep.area_hull:
        print(f"area deficit (x2): {rep.area_hull - rep.area_faces}", file=sys.stderr)
    return EXIT_OK if rep.axioms_ok else EXIT_VERIFY


def cmd_oracle(args) -> int:
    ps = read_points(args.points)
    res = min_decomposition(ps, limit_n=args.limit)
    sys.stdout.write(_dumps({"n": ps.n, "min_faces": res.min_faces,
                             "faces": [list(f) for f in res.witness.faces]}))
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(kind=args.kind, n=args.n, seed=args.seed, b=args.b, layers=args.layers,
                   coord_range=args.coord_range, target=args.target)
    ps = generate(spec)
    comment = f"kind={spec.kind} seed={spec.seed}"
    for key in ("n", "b", "layers", "target"):
        val = getattr(spec, key)
        if val is not None:
            comment += f" {key}={val}"
    _write(args.output, emit_points(ps, comment))
    return EXIT_OK


BENCH_FIELDS = (["kind", "n_req", "seed", "status", "n", "i", "b", "faces", "bound",
                 "oracle_min", "time_ms"] + list(CASE_LABELS))


def bench_row(job) -> dict:
    kind, n, seed, oracle_max = job
    row = {"kind": kind, "n_req": n, "seed": seed}
    try:
        ps = generate(GenSpec(kind=kind, n=n, seed=seed))
    except (GenerationError, ValueError) as e:
        row["status"] = f"gen_error: {e}"
        return row
    t0 = time.perf_counter()
    try:
        d = decompose(ps, check_input=False)
    except InvariantError as e:
        row["status"] = f"invariant: {e}"
        return row
    row["time_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    rep = verify_decomposition(ps, d)
    row.update(status="ok" if rep.ok else "verify_fail", n=ps.n, i=rep.i, b=rep.b,
               faces=d.face_count, bound=bound_max_faces(rep.i, rep.b))
    if ps.n <= oracle_max:
        row["oracle_min"] = min_decomposition(ps).min_faces
    for label in CASE_LABELS:
        row[label] = sum(1 for e in d.trace if e.case == label)
    return row


def _seed_range(text):
    if ".." in text:
        a, b = text.split("..", 1)
        return range(int(a), int(b) + 1)
    return range(int(text), int(text) + 1)


def cmd_bench(args) -> int:
    jobs = [(kind, n, seed, args.oracle_max)
            for kind in args.kinds
            for n in range(args.n_min, args.n_max + 1)
            for seed in _seed_range(args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(bench_row, jobs, chunksize=8))
    else:
        rows = [bench_row(j) for j in jobs]
    rows.sort(key=lambda r: (r["kind"], r["n_req"], r["seed"]))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.output, buf.getvalue())
    skipped = sum(1 for r in rows if r["status"].startswith("gen_error"))
    bad = sum(1 for r in rows if r["status"] != "ok") - skipped
    print(f"{len(rows)} instances, {bad} failed, {skipped} not generated", file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convexdecomp",
                                 description="Convex decompositions of planar point sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose a point file and self-verify")
    p.add_argument("points")
    p.add_argument("--json", help="write the decomposition JSON here (default: stdout)")
    p.add_argument("--svg", help="write an SVG rendering here")
    p.add_argument("--no-verify", action="store_true", help="skip the self-check (timing runs)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="check a decomposition JSON against a point file")
    p.add_argument("points")
    p.add_argument("decomposition")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact minimum by exhaustive search (small inputs)")
    p.add_argument("points")
    p.add_argument("--limit", type=int, default=10, help="largest n accepted (default 10)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b", type=int, help="ring size for nested_rings")
    p.add_argument("--layers", type=int, help="number of rings for nested_rings")
    p.add_argument("--target", help="case label a case-targeted kind must hit")
    p.add_argument("--coord-range", type=int, default=1_000_000)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a sweep and write a CSV summary")
    p.add_argument("--kinds", nargs="+", default=["random_box"], choices=KINDS)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--seeds", default="0..9", help="S or S0..S1 (inclusive)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--oracle-max", type=int, default=8, help="run the oracle up to this n")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as e:
        print(f"internal invariant failed: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (GeometryInputError, OracleLimitError, GenerationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
