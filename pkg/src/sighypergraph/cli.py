"""Command-line interface: ``sighypergraph {generate,infer,evaluate,reproduce}``.

Settings come from, in increasing priority: built-in defaults, a flat
``key=value`` config file (``--config``), then command-line flags. Every
random draw derives from ``--seed``, so repeated runs write identical bytes.

Exit codes: 0 success, 1 I/O error, 2 invalid argument, 3 parse error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .complex import (
    DEFAULT_N_TRIES,
    DEFAULT_R2_THRESHOLD,
    DEFAULT_TAU,
    InferenceConfig,
    adjacency_matrix,
    default_subset_len,
    dump_complex,
    dump_probability_tensors,
    estimate_probability_tensors,
    threshold_complex,
)
from .evalmetrics import (
    REFERENCE_TABLE,
    aggregate,
    confusion,
    dump_metrics,
    format_table,
    load_edge_document,
    metrics,
)
from .exceptions import ParseError
from .lasso import DEFAULT_LAMBDA_RATIO
from .signature import DEFAULT_ORDER
from .synthgen import SynthConfig, dump_ground_truth, ground_truth_adjacency, simulate_dataset
from .timeseries import common_grid, read_paths_csv, write_paths_csv

logger = logging.getLogger(__name__)

EXIT_IO, EXIT_ARG, EXIT_PARSE, EXIT_INTERNAL = 1, 2, 3, 4

# named substreams under the master seed
GEN_STREAM, INFER_STREAM = 0, 1


class InvariantError(RuntimeError):
    pass


@dataclass
class RunConfig:
    n: int = SynthConfig.n
    c: float = SynthConfig.c
    sigma: float = SynthConfig.sigma
    sigma_start: float = SynthConfig.sigma_start
    h: float = SynthConfig.h
    dt: float = SynthConfig.dt
    seed: int = 0
    order: int = DEFAULT_ORDER
    lambda_ratio: float = DEFAULT_LAMBDA_RATIO
    r2_threshold: float = DEFAULT_R2_THRESHOLD
    k_max: int = 2
    n_tries: int = DEFAULT_N_TRIES
    subset_len: float | None = None
    tau: float = DEFAULT_TAU
    runs: int = 20
    coherence: str | None = None
    sizes: str = "5,6,7,8"
    workers: int = 1
    out: str = "."

    def synth(self, n=None, seed=None) -> SynthConfig:
        return SynthConfig(n=self.n if n is None else n, c=self.c, sigma=self.sigma,
                           sigma_start=self.sigma_start, h=self.h, dt=self.dt,
                           seed=self.seed if seed is None else seed)

    def inference(self) -> InferenceConfig:
        return InferenceConfig(order=self.order, k_max=self.k_max,
                               lambda_ratio=self.lambda_ratio,
                               r2_threshold=self.r2_threshold, coherence=self.coherence)

    def subset_length(self, n_grid: int) -> int:
        if self.subset_len is None:
            return default_subset_len(n_grid)
        if self.subset_len <= 1:
            return max(4, int(round(self.subset_len * n_grid)))
        return int(self.subset_len)


_FIELD_TYPES = {
    "n": int, "c": float, "sigma": float, "sigma_start": float, "h": float, "dt": float,
    "seed": int, "order": int, "lambda_ratio": float, "r2_threshold": float, "k_max": int,
    "n_tries": int, "subset_len": float, "tau": float, "runs": int, "coherence": str,
    "sizes": str, "workers": int, "out": str,
}


def _convert(key, raw):
    if raw is None:
        return None
    if key == "coherence":
        if raw in ("", "none", "None"):
            return None
        if raw not in ("project", "zero-pad", "time"):
            raise ValueError(f"coherence must be project, zero-pad or time, got {raw!r}")
        return raw
    try:
        return _FIELD_TYPES[key](raw)
    except ValueError:
        raise ValueError(f"bad value for {key}: {raw!r}") from None


def read_config_file(path) -> dict:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value in config {path}", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ParseError(f"unknown config key {key!r}", lineno)
        values[key] = _convert(key, raw)
    return values


def _add_common(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    g = p.add_argument_group("generator")
    g.add_argument("--n", type=int, default=S, help="number of vertices")
    g.add_argument("--c", type=float, default=S, help="coupling constant (nonzero)")
    g.add_argument("--sigma", type=float, default=S, help="noise standard deviation")
    g.add_argument("--sigma-start", type=float, default=S, help="std of Y1(0)")
    g.add_argument("--h", type=float, default=S, help="delay, multiple of dt")
    g.add_argument("--dt", type=float, default=S, help="sampling step")
    i = p.add_argument_group("inference")
    i.add_argument("--order", type=int, default=S, help="signature truncation level")
    i.add_argument("--lambda-ratio", type=float, default=S, help="penalty / lambda_max")
    i.add_argument("--r2-threshold", type=float, default=S)
    i.add_argument("--k-max", type=int, default=S, help="largest simplex size")
    i.add_argument("--n-tries", type=int, default=S, help="randomized runs")
    i.add_argument("--subset-len", type=float, default=S,
                   help="timesteps per run; values <= 1 are a fraction of the grid")
    i.add_argument("--tau", type=float, default=S, help="frequency threshold")
    i.add_argument("--coherence", choices=["project", "zero-pad", "time"], default=S)
    r = p.add_argument_group("run")
    r.add_argument("--runs", type=int, default=S, help="repetitions per size (reproduce)")
    r.add_argument("--sizes", default=S, help="comma-separated vertex counts (reproduce)")
    r.add_argument("--seed", type=int, default=S)
    r.add_argument("--workers", type=int, default=S, help="worker processes")
    r.add_argument("--config", default=None, help="key=value config file")
    r.add_argument("--out", default=S, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sighypergraph",
        description="Hypergraph inference on multivariate time series via path signatures.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate the delayed chain benchmark")
    _add_common(p)

    p = sub.add_parser("infer", help="estimate probability tensors and a thresholded complex")
    p.add_argument("dataset", help="CSV in t,entity,channel,value format")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score a predicted edge set against ground truth")
    p.add_argument("pred", help="document with n and edges (complex.json or truth.json)")
    p.add_argument("truth", help="ground-truth document")
    _add_common(p)

    p = sub.add_parser("reproduce", help="rerun the chain benchmark table")
    _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in fields(RunConfig):
        if hasattr(args, f.name):
            values[f.name] = getattr(args, f.name)
    return RunConfig(**values)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_generate(cfg: RunConfig) -> int:
    synth = cfg.synth()
    paths = simulate_dataset(synth, np.random.default_rng([cfg.seed, GEN_STREAM]))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "dataset.csv", "w", newline="") as fh:
        write_paths_csv(paths, fh)
    _write(out / "truth.json", dump_ground_truth(synth.n, [p.label for p in paths]))
    print(f"generated {synth.n} series x {len(paths[0])} samples x {paths[0].d} channels "
          f"(c={synth.c}, sigma={synth.sigma}, sigma_start={synth.sigma_start}, h={synth.h}, "
          f"seed={cfg.seed}) -> {out / 'dataset.csv'}, {out / 'truth.json'}")
    return 0


def _infer_paths(paths, cfg: RunConfig, seed, n_jobs=1):
    grid = common_grid(paths)
    prob = estimate_probability_tensors(
        paths, cfg.inference(), grid=grid, n_tries=cfg.n_tries,
        l=cfg.subset_length(len(grid)), seed=seed, n_jobs=n_jobs,
    )
    cplx = threshold_complex(prob, cfg.tau)
    if not cplx.is_downward_closed():
        raise InvariantError("thresholded complex is not downward closed")
    return prob, cplx


def cmd_infer(cfg: RunConfig, dataset: str) -> int:
    with open(dataset, newline="") as fh:
        paths = read_paths_csv(fh)
    prob, cplx = _infer_paths(paths, cfg, [cfg.seed, INFER_STREAM], n_jobs=cfg.workers)
    out = Path(cfg.out)
    _write(out / "probability_tensors.json", dump_probability_tensors(prob, cfg.tau))
    _write(out / "complex.json", dump_complex(cplx, cfg.tau, prob.labels))
    print(f"inferred complex over {cplx.n} vertices: {len(cplx.edges)} edges, "
          f"dimension {cplx.dimension} -> {out / 'complex.json'}")
    return 0


def cmd_evaluate(cfg: RunConfig, pred: str, truth: str) -> int:
    P = load_edge_document(Path(pred).read_text())
    T = load_edge_document(Path(truth).read_text())
    if P.shape != T.shape:
        raise ValueError(f"vertex count mismatch: pred has {P.shape[0]}, truth has {T.shape[0]}")
    rec = metrics(confusion(P, T))
    _write(Path(cfg.out) / "metrics.json", dump_metrics(rec, n=int(P.shape[0])))
    print(format_table({P.shape[0]: rec}), end="")
    return 0


def _one_run(job):
    cfg, n, run = job
    rng = np.random.default_rng([cfg.seed, GEN_STREAM, n, run])
    paths = simulate_dataset(cfg.synth(n=n), rng)
    _, cplx = _infer_paths(paths, cfg, [cfg.seed, INFER_STREAM, n, run])
    return metrics(confusion(adjacency_matrix(cplx), ground_truth_adjacency(n)))


def run_table(cfg: RunConfig) -> dict:
    """Aggregated metrics per vertex count, ``{n: MetricsRecord}``."""
    sizes = [int(s) for s in str(cfg.sizes).split(",") if s.strip()]
    if not sizes or cfg.runs < 1:
        raise ValueError("need at least one size and one run")
    jobs = [(cfg, n, r) for n in sizes for r in range(cfg.runs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_one_run, jobs))
    else:
        results = [_one_run(j) for j in jobs]
    table = {}
    for n in sizes:
        table[n] = aggregate(rec for (_, m, _), rec in zip(jobs, results) if m == n)
    return table


def cmd_reproduce(cfg: RunConfig) -> int:
    table = run_table(cfg)
    text = format_table(table, REFERENCE_TABLE)
    out = Path(cfg.out)
    _write(out / "table.txt", text)
    doc = {str(n): json.loads(dump_metrics(rec)) for n, rec in table.items()}
    _write(out / "table.json", json.dumps(doc, indent=2) + "\n")
    print(text, end="")
    print("values in parentheses: reference table")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "infer":
            return cmd_infer(cfg, args.dataset)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.pred, args.truth)
        return cmd_reproduce(cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_ARG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantError, AssertionError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
