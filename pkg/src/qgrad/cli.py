"""Command-line front end: ``qgrad {reconstruct,edge,corner,metrics,bench}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 degenerate input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import metrics as M
from .corners import HarrisConfig, read_points_csv, write_corners_csv, overlay
from .edges import EdgeConfig, EdgeMap
from .exceptions import DegenerateInputError
from .image import GrayImage, devectorize, load_grayscale, resize_pow2, save_pgm, save_png, vectorize
from .pipelines import (
    CORNER_METHODS,
    EDGE_METHODS,
    RECON_ENCODINGS,
    corners,
    edge_map,
    reconstruct,
)

log = logging.getLogger("qgrad")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DEGENERATE = 0, 2, 3, 4
RESOLUTIONS = (64, 128, 256, 512, 1024)
BENCH_RESOLUTIONS = (64, 128, 256, 512)
CSV_HEADER = ["image", "encoding", "method", "metric", "value"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    output_dir: str
    encoding: str = "qpie"
    method: str | None = None
    shots: list[int | None] = field(default_factory=lambda: [None])
    seed: int = 0
    resolution: int = 512
    tau_fraction: float = 0.2
    kappa: float = 0.05
    window: str = "gaussian"
    truth: list[str] = field(default_factory=list)

    def edge_cfg(self) -> EdgeConfig:
        return EdgeConfig(tau_mode="fraction", fraction=self.tau_fraction)

    def harris_cfg(self) -> HarrisConfig:
        return HarrisConfig(kappa=self.kappa, window=self.window)

    def shot_label(self, s: int | None) -> str:
        return "exact" if s is None else str(s)


def parse_shots(text: str) -> list[int | None]:
    out: list[int | None] = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok == "exact":
            out.append(None)
            continue
        try:
            n = int(float(tok))
        except ValueError:
            raise ConfigError(f"--shots: cannot parse {tok!r}") from None
        if n < 1:
            raise ConfigError("--shots must be >= 1 or 'exact'")
        out.append(n)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgrad", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, need_input=True):
        sp.add_argument("--input", action="append", default=[], required=need_input,
                        help="input file; repeat for several")
        sp.add_argument("--output-dir", default="qgrad-out")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--resolution", type=int, default=512)

    sp = sub.add_parser("reconstruct", help="encode, sample, decode; SSIM and relative difference")
    common(sp)
    sp.add_argument("--encoding", default="qpie", choices=RECON_ENCODINGS)
    sp.add_argument("--shots", default="1000000", help="int, 'exact', or comma list")

    sp = sub.add_parser("edge", help="edge maps with ED/ET/EF/EE metrics")
    common(sp)
    sp.add_argument("--encoding", default="qpie", choices=("qpie", "frqi-linear"))
    sp.add_argument("--method", default="sobel", choices=EDGE_METHODS)
    sp.add_argument("--shots", default="exact")
    sp.add_argument("--tau-fraction", type=float, default=0.2)

    sp = sub.add_parser("corner", help="corner detection, optional CDA/FPR against truth")
    common(sp)
    sp.add_argument("--encoding", default="qpie", choices=("qpie", "frqi-linear"))
    sp.add_argument("--method", default="qhcd", choices=CORNER_METHODS)
    sp.add_argument("--shots", default="exact")
    sp.add_argument("--tau-fraction", type=float, default=0.2)
    sp.add_argument("--kappa", type=float, default=0.05)
    sp.add_argument("--window", default="gaussian", choices=("gaussian", "rectangular"))
    sp.add_argument("--truth", action="append", default=[],
                    help="CSV of x,y truth corners; one per --input")

    sp = sub.add_parser("metrics", help="metrics for saved edge maps or corner CSVs")
    common(sp)
    sp.add_argument("--truth", action="append", default=[])

    sp = sub.add_parser("bench", help="per-stage timings across resolutions")
    common(sp, need_input=False)
    sp.add_argument("--encoding", default="qpie", choices=("qpie", "frqi-linear"))
    sp.add_argument("--method", default="qhcd", choices=CORNER_METHODS)
    sp.add_argument("--shots", default="exact")
    return p


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        inputs=list(ns.input),
        output_dir=ns.output_dir,
        encoding=getattr(ns, "encoding", "qpie"),
        method=getattr(ns, "method", None),
        shots=parse_shots(getattr(ns, "shots", "exact")),
        seed=ns.seed,
        resolution=ns.resolution,
        tau_fraction=getattr(ns, "tau_fraction", 0.2),
        kappa=getattr(ns, "kappa", 0.05),
        window=getattr(ns, "window", "gaussian"),
        truth=list(getattr(ns, "truth", [])),
    )
    if cfg.command == "reconstruct":
        cfg.method = "reconstruct"
    if cfg.resolution not in RESOLUTIONS:
        raise ConfigError(f"--resolution must be one of {RESOLUTIONS}")
    if cfg.command in ("edge", "corner", "bench") and cfg.shots != [None]:
        raise ConfigError("detection runs on exact amplitudes; use --shots exact")
    if cfg.truth and len(cfg.truth) != len(cfg.inputs):
        raise ConfigError("give one --truth per --input")
    if not 0.0 < cfg.tau_fraction <= 1.0:
        raise ConfigError("--tau-fraction must lie in (0, 1]")
    if not 0.0 < cfg.kappa < 0.25:
        raise ConfigError("--kappa must lie in (0, 0.25)")
    return cfg


def _workers(n: int) -> int:
    cap = os.environ.get("QGRAD_THREADS")
    try:
        cap_n = int(cap) if cap else os.cpu_count() or 1
    except ValueError:
        raise ConfigError(f"QGRAD_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(cap_n, n))


def sub_seeds(seed: int, n: int) -> list[int]:
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


def _load(path: str, res: int) -> GrayImage:
    return resize_pow2(load_grayscale(path), res)


def _fmt(v) -> str:
    return repr(float(v)) if not isinstance(v, (int, np.integer)) else str(int(v))


def _write_rows(path: Path, rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_HEADER)
        for r in rows:
            wr.writerow(r[:4] + [_fmt(r[4])])


def _stem(path: str) -> str:
    return Path(path).stem


# ---------------------------------------------------------------------------


def run_reconstruct(cfg: RunConfig) -> dict:
    out = Path(cfg.output_dir)
    seeds = sub_seeds(cfg.seed, len(cfg.inputs))

    def one(path, seed):
        img = _load(path, cfg.resolution)
        rows = []
        for s in cfg.shots:
            rec = reconstruct(img, cfg.encoding, s, seed)
            label = cfg.shot_label(s)
            tag = "exact" if s is None else f"s{s}"
            save_png(devectorize(rec), out / f"{_stem(path)}.{cfg.encoding}.reconstruct.{tag}.png")
            method = f"reconstruct[{label}]"
            rows.append([_stem(path), cfg.encoding, method, "ssim", M.ssim(img, rec)])
            rows.append([_stem(path), cfg.encoding, method, "relative_difference",
                         M.relative_difference(img, rec)])
        _write_rows(out / f"{_stem(path)}.{cfg.encoding}.reconstruct.metrics.csv", rows)
        return rows

    return _fan_out(cfg, one, seeds)


def run_edge(cfg: RunConfig) -> dict:
    out = Path(cfg.output_dir)

    def one(path, _seed):
        img = _load(path, cfg.resolution)
        em = edge_map(img, cfg.encoding, cfg.method, cfg.edge_cfg())
        base = out / f"{_stem(path)}.{cfg.encoding}.{cfg.method}"
        bits = GrayImage(em.bits.astype(np.int64) * 255)
        save_pgm(bits, f"{base}.edges.pgm")
        save_png(bits, f"{base}.edges.png")
        rows = _edge_rows(_stem(path), cfg.encoding, cfg.method, em)
        _write_rows(Path(f"{base}.metrics.csv"), rows)
        return rows

    return _fan_out(cfg, one, sub_seeds(cfg.seed, len(cfg.inputs)))


def _edge_rows(name, encoding, method, em) -> list[list]:
    m = M.edge_metrics(em)
    return [[name, encoding, method, k, v] for k, v in
            (("ED", m.ed), ("ET", m.et), ("EF", m.ef), ("EE", m.ee))]


def _corner_rows(name, encoding, method, cs, truth) -> list[list]:
    rows = [[name, encoding, method, "detected", len(cs)]]
    if truth is not None:
        cm = M.corner_match(cs, truth)
        rows += [[name, encoding, method, k, v] for k, v in
                 (("TP", cm.tp), ("FP", cm.fp), ("CDA", cm.cda), ("FPR", cm.fpr))]
    return rows


def run_corner(cfg: RunConfig) -> dict:
    out = Path(cfg.output_dir)
    truths = dict(zip(cfg.inputs, cfg.truth))
    enc = "classical" if cfg.method == "classical-harris" else cfg.encoding

    def one(path, _seed):
        img = _load(path, cfg.resolution)
        truth = None
        if path in truths:
            truth = read_points_csv(truths[path])
            bad = [p for p in truth if not (0 <= p[0] < img.width and 0 <= p[1] < img.height)]
            if bad:
                raise ConfigError(f"truth corners outside {img.width}x{img.height}: {bad[:3]}")
        cs = corners(img, cfg.encoding, cfg.method, cfg.harris_cfg(), cfg.edge_cfg())
        base = out / f"{_stem(path)}.{enc}.{cfg.method}"
        write_corners_csv(cs, f"{base}.corners.csv")
        save_png(overlay(img, cs), f"{base}.overlay.png")
        rows = _corner_rows(_stem(path), enc, cfg.method, cs, truth)
        if truth is not None:
            _write_rows(Path(f"{base}.metrics.csv"), rows)
        return rows

    return _fan_out(cfg, one, sub_seeds(cfg.seed, len(cfg.inputs)))


def run_metrics(cfg: RunConfig) -> dict:
    """Edge metrics for binary edge images; corner metrics for CSVs with --truth."""
    out = Path(cfg.output_dir)
    truths = dict(zip(cfg.inputs, cfg.truth))
    rows: list[list] = []
    for path in cfg.inputs:
        name = _stem(path)
        if path.lower().endswith(".csv"):
            if path not in truths:
                raise ConfigError(f"{path}: corner CSV needs a --truth file")
            det = read_points_csv(path)
            rows += _corner_rows(name, "-", "corners", det, read_points_csv(truths[path]))
        else:
            img = load_grayscale(path)
            rows += _edge_rows(name, "-", "edges", EdgeMap(img.pixels > 0, float("nan")))
    _write_rows(out / "metrics.csv", rows)
    return _summary(rows)


def _time(fn, *a, **kw):
    t0 = time.perf_counter()
    res = fn(*a, **kw)
    return res, time.perf_counter() - t0


def run_bench(cfg: RunConfig) -> dict:
    from .corners import harris_from_gradients
    from .edges import sobel_direct, sobel_from_lag2
    from .frqi import frqi_encode
    from .kernel import lag2_both_axes
    from .qpie import qpie_encode
    from .synthetic import textured

    out = Path(cfg.output_dir)
    src = load_grayscale(cfg.inputs[0]) if cfg.inputs else textured(512, cfg.seed)
    rows = []
    for res in BENCH_RESOLUTIONS:
        img = resize_pow2(src, res)
        if cfg.encoding == "qpie":
            _, t_enc = _time(lambda: qpie_encode(vectorize(img)))
        else:
            _, t_enc = _time(lambda: frqi_encode(img, "linear"))
        if cfg.method == "classical-harris":
            grad, t_ker = _time(sobel_direct, img)
        else:
            (dx, dy), t_ker = _time(lag2_both_axes, img, cfg.encoding)
            grad = sobel_from_lag2(dx, dy)
        cs, t_post = _time(harris_from_gradients, grad, cfg.harris_cfg())
        rows.append({"resolution": res, "pixels": res * res, "encode_s": t_enc,
                     "kernel_s": t_ker, "post_s": t_post, "corners": len(cs)})
    px = np.array([r["pixels"] for r in rows], dtype=float)
    tk = np.array([max(r["kernel_s"], 1e-9) for r in rows])
    slope = float(np.polyfit(np.log(px), np.log(tk), 1)[0])
    log.info("kernel time ~ pixels^%.2f", slope)

    with open(out / "bench.csv", "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)
    print(f"{'res':>6} {'encode[s]':>10} {'kernel[s]':>10} {'post[s]':>10} {'corners':>8}")
    for r in rows:
        print(f"{r['resolution']:>6} {r['encode_s']:>10.4f} {r['kernel_s']:>10.4f} "
              f"{r['post_s']:>10.4f} {r['corners']:>8}")
    print(f"kernel-time log-log slope vs pixel count: {slope:.2f}")
    return {"rows": rows, "kernel_loglog_slope": slope}


def _summary(rows: list[list]) -> dict:
    summ: dict = {}
    for name, enc, method, metric, value in rows:
        summ.setdefault(name, {}).setdefault(f"{enc}/{method}", {})[metric] = (
            int(value) if isinstance(value, (int, np.integer)) else float(value))
    return summ


def _fan_out(cfg: RunConfig, fn, seeds) -> dict:
    with ThreadPoolExecutor(max_workers=_workers(len(cfg.inputs))) as ex:
        results = list(ex.map(fn, cfg.inputs, seeds))
    rows = [r for res in results for r in res]
    return _summary(rows)


COMMANDS = {
    "reconstruct": run_reconstruct,
    "edge": run_edge,
    "corner": run_corner,
    "metrics": run_metrics,
    "bench": run_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(ns)
        _workers(1)
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"manifest.{cfg.command}.json", "w") as fh:
            json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
            fh.write("\n")
        summary = COMMANDS[cfg.command](cfg)
        with open(out / f"summary.{cfg.command}.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except ConfigError as exc:
        print(f"qgrad: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateInputError as exc:
        print(f"qgrad: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"qgrad: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # format/shape problems in user-supplied files
        print(f"qgrad: invalid input: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
