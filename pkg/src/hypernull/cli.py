"""Command-line pipeline: convert, sample, converge, metric, affinity, econ,
and contagion subcommands.

Every run derives all randomness from one --seed (sub-seeds by stable hashing
of seed, role, and index), writes CSV as comma-separated UTF-8 with LF line
endings and floats at 12 significant digits, and emits a JSON run manifest
recording the command line, input hashes, seed, versions, per-output
checksums, and wall-clock timings.  Output files are byte-identical across
re-runs with the same inputs and seed; the manifest differs only in its
timings.  NUDHY_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import hypernull
from hypernull.affinity import CategoryPartition, affinity_report
from hypernull.contagion import SISConfig, load_thresholds
from hypernull.contagion import run_quasi_stationary, run_stationary
from hypernull.core import (
    DirectedHypergraph,
    ParseError,
    compute_joint,
    degree_profile,
    format_hypergraph,
    format_undirected,
    merge_to_undirected,
    parse_hypergraph,
    parse_undirected,
    read_labels,
    to_bipartite,
    undirected_to_directed,
)
from hypernull.diagnostics import arsd_trace
from hypernull.econ import (
    complexity_scores,
    hypergraph_biadjacency,
    rank_compare,
    read_trade_table,
    trade_to_hypergraph,
)
from hypernull.sampling import ChainConfig, derive_seed, run_chain
from hypernull.structure import (
    hits,
    hyper_core_decomposition,
    hypergraph_reciprocity,
    laplacian_spectrum,
    pagerank,
    project_weighted,
    structural_entropy,
)

SIDES = ("head", "tail")


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _hash_file(path) -> str:
    return _sha256(Path(path).read_bytes())


def _fmt(value) -> str:
    """CSV cell: empty for None, 12 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _resolve_threads(requested) -> int:
    env = os.environ.get("NUDHY_THREADS")
    if env is not None:
        value = int(env)
    elif requested is not None:
        value = requested
    else:
        value = os.cpu_count() or 1
    if value < 1:
        raise ValueError(f"thread count must be >= 1, got {value}")
    return value


def _parallel_map(fn, items, threads: int) -> list:
    """Order-preserving map over a worker pool (sequential when threads=1)."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _mean_std(values):
    if not values:
        return None, None
    return statistics.fmean(values), statistics.pstdev(values)


def _ratio(observed, mean):
    if observed is None or mean is None or mean == 0:
        return None
    return observed / mean


def _load_directed(path) -> DirectedHypergraph:
    return parse_hypergraph(Path(path).read_text(encoding="utf-8"))


def _sniff_directed(text: str) -> bool:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            return "|" in stripped
    return True


def _load_undirected(path):
    """Undirected substrate from either format: directed files are merged."""
    text = Path(path).read_text(encoding="utf-8")
    if _sniff_directed(text):
        return merge_to_undirected(parse_hypergraph(text))
    return parse_undirected(text)


def _sample_files(directory) -> list:
    """sample_<i>.dhg files by index, else every .dhg file by name."""
    directory = Path(directory)
    indexed = []
    for path in directory.glob("sample_*.dhg"):
        suffix = path.name[len("sample_") : -len(".dhg")]
        if suffix.isdigit():
            indexed.append((int(suffix), path))
    if indexed:
        return [path for _, path in sorted(indexed)]
    plain = sorted(directory.glob("*.dhg"))
    if not plain:
        raise ValueError(f"no .dhg sample files in {directory}")
    return plain


def _parse_model_dirs(entries) -> dict:
    """--samples MODEL=DIR entries to {model: [paths]}."""
    out = {}
    for entry in entries or ():
        model, sep, directory = entry.partition("=")
        if not sep or not model or not directory:
            raise ValueError(f"expected MODEL=DIR, got {entry!r}")
        if model in out:
            raise ValueError(f"duplicate sampler name {model!r}")
        out[model] = _sample_files(directory)
    return out


@dataclass
class RunManifest:
    """Reproducibility record emitted by every subcommand: the exact command
    line, input hashes, master seed, versions, per-output invariant
    checksums, and wall-clock timings."""

    command: list
    inputs: dict = field(default_factory=dict)
    seed: int | None = None
    versions: dict = field(
        default_factory=lambda: {
            "hypernull": hypernull.__version__,
            "python": platform.python_version(),
        }
    )
    invariants: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    destination: Path | None = None

    def add_input(self, path):
        self.inputs[str(path)] = _hash_file(path)

    def add_output(self, path):
        self.invariants.setdefault("outputs", {})[Path(path).name] = _hash_file(path)

    def write(self, path):
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "versions": self.versions,
            "invariants": self.invariants,
            "timings": self.timings,
        }
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _manifest_path_for(output) -> Path:
    return Path(str(output) + ".manifest.json")


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def cmd_convert(args, manifest: RunManifest) -> int:
    text = Path(args.input).read_text(encoding="utf-8")
    manifest.add_input(args.input)
    if _sniff_directed(text):
        H = parse_hypergraph(text)
        out = (
            format_hypergraph(H)
            if args.to == "directed"
            else format_undirected(merge_to_undirected(H))
        )
    else:
        U = parse_undirected(text)
        out = (
            format_undirected(U)
            if args.to == "undirected"
            else format_hypergraph(undirected_to_directed(U))
        )
    Path(args.output).write_text(out, encoding="utf-8")
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def _invariant_summary(H: DirectedHypergraph, model: str):
    """The structure a sampler must preserve, in JSON-ready canonical form.

    Edge copies carry no identity across serialization, so sizes are compared
    as a sorted multiset of (head size, tail size) pairs; node degrees align
    by external id because swaps never change any node's degree.
    """
    profile = degree_profile(to_bipartite(H))
    sizes = sorted(zip(profile.right_in, profile.right_out))
    if model in ("degs", "degs-mh"):
        return [
            list(profile.left_in),
            list(profile.left_out),
            [list(pair) for pair in sizes],
        ]
    if model == "joint":
        joint = compute_joint(to_bipartite(H))
        return sorted([list(key), count] for key, count in joint.counts.items())
    return [list(pair) for pair in sizes]


def cmd_sample(args, manifest: RunManifest) -> int:
    H = _load_directed(args.input)
    manifest.add_input(args.input)
    steps = args.steps if args.steps == "auto" else int(args.steps)
    config = ChainConfig(
        model=args.model,
        steps=steps,
        seed=args.seed,
        sample_count=args.samples,
        thinning=args.thinning,
    )
    expected = _invariant_summary(H, args.model)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for index, sample in enumerate(run_chain(H, config)):
        path = out_dir / f"sample_{index}.dhg"
        path.write_text(format_hypergraph(sample), encoding="utf-8")
        record = {"file": path.name, "sha256": _hash_file(path)}
        if not args.no_verify:
            written = _invariant_summary(_load_directed(path), args.model)
            if written != expected:
                print(
                    f"invariant verification failed for {path}\n"
                    f"expected: {json.dumps(expected)}\n"
                    f"found:    {json.dumps(written)}",
                    file=sys.stderr,
                )
                return 1
            record["invariant_sha256"] = _sha256(
                json.dumps(written, sort_keys=True).encode()
            )
        records.append(record)
    manifest.seed = args.seed
    manifest.invariants["model"] = args.model
    manifest.invariants["samples"] = records
    manifest.destination = out_dir / "manifest.json"
    verified = "unverified" if args.no_verify else "verified"
    print(f"wrote {len(records)} samples to {out_dir} ({verified})")
    return 0


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------


def cmd_converge(args, manifest: RunManifest) -> int:
    H = _load_directed(args.input)
    manifest.add_input(args.input)
    trace = arsd_trace(
        H,
        model=args.model,
        seed=args.seed,
        f=args.f,
        l=args.l,
        max_multiplier=args.max_k,
    )
    rows = [
        (args.model, side, k, value)
        for side in sorted(trace)
        for k, value in trace[side]
    ]
    _write_csv(args.output, ("model", "side", "k", "arsd"), rows)
    manifest.seed = args.seed
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------


def _load_observed_and_samples(args):
    H = _load_directed(args.input)
    samples = (
        [_load_directed(p) for p in _sample_files(args.samples)]
        if args.samples
        else []
    )
    return H, samples


def _metric_reciprocity(args, threads):
    H, samples = _load_observed_and_samples(args)
    observed = hypergraph_reciprocity(H).value
    values = _parallel_map(lambda S: hypergraph_reciprocity(S).value, samples, threads)
    mean, std = _mean_std(values)
    header = ("observed", "sample_mean", "sample_std", "samples", "ratio")
    return header, [(observed, mean, std, len(values), _ratio(observed, mean))]


def _metric_coreness(args, threads):
    H, samples = _load_observed_and_samples(args)
    observed = hyper_core_decomposition(H, args.side).hypercoreness
    profiles = _parallel_map(
        lambda S: hyper_core_decomposition(S, args.side).hypercoreness,
        samples,
        threads,
    )
    rows = []
    for v in range(H.num_nodes):
        mean, std = _mean_std([p[v] for p in profiles])
        rows.append(
            (H.label_of(v), observed[v], mean, std, _ratio(observed[v], mean))
        )
    header = ("node", "observed", "sample_mean", "sample_std", "ratio")
    return header, rows


def _metric_entropy(args, threads):
    H, samples = _load_observed_and_samples(args)
    if not samples:
        raise ValueError("entropy needs --samples: it measures the ensemble")
    entropy = structural_entropy(H, samples, args.group_size, args.side)
    keyed = sorted(
        (tuple(sorted(H.label_of(v) for v in group)), value)
        for group, value in entropy.items()
    )
    rows = [("+".join(str(v) for v in group), value) for group, value in keyed]
    return ("group", "entropy"), rows


def _node_centralities(H: DirectedHypergraph):
    scores = pagerank(project_weighted(H))
    hubs, authorities = hits(to_bipartite(H))
    n = H.num_nodes
    return scores, hubs[:n], authorities[:n]


def _metric_centrality(args, threads):
    H, samples = _load_observed_and_samples(args)
    pr, hub, auth = _node_centralities(H)
    sampled = _parallel_map(_node_centralities, samples, threads)
    rows = []
    for v in range(H.num_nodes):
        pr_mean, pr_std = _mean_std([s[0][v] for s in sampled])
        hub_mean, hub_std = _mean_std([s[1][v] for s in sampled])
        auth_mean, auth_std = _mean_std([s[2][v] for s in sampled])
        rows.append(
            (
                H.label_of(v),
                pr[v], pr_mean, pr_std,
                hub[v], hub_mean, hub_std,
                auth[v], auth_mean, auth_std,
            )
        )
    header = (
        "node",
        "pagerank", "pagerank_mean", "pagerank_std",
        "hub", "hub_mean", "hub_std",
        "authority", "authority_mean", "authority_std",
    )
    return header, rows


def _metric_spectrum(args, threads):
    H, samples = _load_observed_and_samples(args)
    observed = laplacian_spectrum(H, k=args.k)
    spectra = _parallel_map(lambda S: laplacian_spectrum(S, k=args.k), samples, threads)
    rows = []
    for i, value in enumerate(observed):
        mean, std = _mean_std([s[i] for s in spectra])
        rows.append((i, value, mean, std, _ratio(value, mean)))
    header = ("index", "observed", "sample_mean", "sample_std", "ratio")
    return header, rows


_METRICS = {
    "reciprocity": _metric_reciprocity,
    "coreness": _metric_coreness,
    "entropy": _metric_entropy,
    "centrality": _metric_centrality,
    "spectrum": _metric_spectrum,
}


def cmd_metric(args, manifest: RunManifest) -> int:
    threads = _resolve_threads(args.threads)
    header, rows = _METRICS[args.metric](args, threads)
    manifest.add_input(args.input)
    if args.samples:
        for path in _sample_files(args.samples):
            manifest.add_input(path)
    _write_csv(args.output, header, rows)
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# affinity
# ---------------------------------------------------------------------------


def _partition_for(H: DirectedHypergraph, labels_path) -> CategoryPartition:
    categories = read_labels(Path(labels_path).read_text(encoding="utf-8"))
    assignments = []
    for v in range(H.num_nodes):
        label = H.label_of(v)
        if label not in categories:
            raise ValueError(f"node {label} has no entry in the label file")
        assignments.append(categories[label])
    return CategoryPartition(tuple(assignments))


def cmd_affinity(args, manifest: RunManifest) -> int:
    H = _load_directed(args.input)
    manifest.add_input(args.input)
    manifest.add_input(args.labels)
    partition = _partition_for(H, args.labels)
    samples_by_model = {}
    for model, paths in _parse_model_dirs(args.samples).items():
        samples_by_model[model] = [_load_directed(p) for p in paths]
        for path in paths:
            manifest.add_input(path)
    k_range = None
    if args.k_min is not None or args.k_max is not None:
        if args.k_min is None or args.k_max is None:
            raise ValueError("--k-min and --k-max must be given together")
        k_range = range(args.k_min, args.k_max + 1)
    rows = []
    for row in affinity_report(H, partition, samples_by_model, k_range):
        for model in sorted(row["models"]):
            stats = row["models"][model]
            rows.append(
                (
                    row["category"], row["k"], row["observed"], row["baseline"],
                    model, stats["mean"], stats["std"], stats["ratio"],
                )
            )
    header = (
        "category", "k", "observed", "baseline", "model", "mean", "std", "ratio"
    )
    _write_csv(args.output, header, rows)
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# econ
# ---------------------------------------------------------------------------


def cmd_econ_build(args, manifest: RunManifest) -> int:
    table = read_trade_table(args.trade, args.metadata)
    manifest.add_input(args.trade)
    if args.metadata:
        manifest.add_input(args.metadata)
    H = trade_to_hypergraph(table, args.year, threshold=args.threshold)
    plain = DirectedHypergraph(H.edges, H.num_nodes)
    Path(args.output).write_text(format_hypergraph(plain), encoding="utf-8")
    labels_path = Path(args.output).with_suffix(".labels.csv")
    _write_csv(
        labels_path,
        ("node_id", "label"),
        [(v, H.label_of(v)) for v in range(H.num_nodes)],
    )
    manifest.add_output(args.output)
    manifest.add_output(labels_path)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output} and {labels_path}")
    return 0


def cmd_econ_scores(args, manifest: RunManifest) -> int:
    H = _load_directed(args.input)
    manifest.add_input(args.input)
    scores = complexity_scores(hypergraph_biadjacency(H))
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    country_path = out_dir / "country_scores.csv"
    _write_csv(
        country_path,
        ("country", "eci", "fitness", "genepy"),
        list(zip(scores.countries, scores.eci, scores.fitness, scores.genepy)),
    )
    product_path = out_dir / "product_scores.csv"
    _write_csv(
        product_path,
        ("product", "pci", "quality"),
        list(zip(scores.products, scores.pci, scores.quality)),
    )
    manifest.add_output(country_path)
    manifest.add_output(product_path)
    manifest.destination = out_dir / "manifest.json"
    print(f"wrote {country_path} and {product_path}")
    return 0


def _country_scores(H: DirectedHypergraph):
    scores = complexity_scores(hypergraph_biadjacency(H))
    return scores.countries, {
        "eci": scores.eci,
        "fitness": scores.fitness,
        "genepy": scores.genepy,
    }


def cmd_econ_compare(args, manifest: RunManifest) -> int:
    threads = _resolve_threads(args.threads)
    H = _load_directed(args.observed)
    manifest.add_input(args.observed)
    countries, observed = _country_scores(H)
    samples = {}
    for model, paths in _parse_model_dirs(args.samples).items():
        for path in paths:
            manifest.add_input(path)
        results = _parallel_map(
            lambda p: _country_scores(_load_directed(p)), paths, threads
        )
        vectors = {score: [] for score in observed}
        for sample_countries, scored in results:
            if sample_countries != countries:
                raise ValueError(
                    f"sample country set differs from observed in {model!r}"
                )
            for score, vector in scored.items():
                vectors[score].append(vector)
        samples[model] = vectors
    rows = [
        (
            row["sampler"], row["score"], row["samples"],
            row["spearman_mean"], row["spearman_std"],
            row["kendall_mean"], row["kendall_std"],
        )
        for row in rank_compare(observed, samples)
    ]
    header = (
        "sampler", "score", "samples",
        "spearman_mean", "spearman_std", "kendall_mean", "kendall_std",
    )
    _write_csv(args.output, header, rows)
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# contagion
# ---------------------------------------------------------------------------


def _lambda_c_for(args, thresholds, nu: float):
    if args.lambda_c is not None:
        return args.lambda_c
    entry = thresholds.get(args.dataset)
    if entry is None:
        return None
    return entry.lambda_linear if nu == 1.0 else entry.lambda_superlinear


def cmd_contagion(args, manifest: RunManifest) -> int:
    threads = _resolve_threads(args.threads)
    manifest.add_input(args.input)
    sources = [("observed", "", _load_undirected(args.input))]
    for model, paths in _parse_model_dirs(args.samples).items():
        for index, path in enumerate(paths):
            manifest.add_input(path)
            sources.append((model, str(index), _load_undirected(path)))
    thresholds = load_thresholds(args.thresholds)
    if args.thresholds:
        manifest.add_input(args.thresholds)
    grid = [float(x) for x in args.lambda_grid.split(",") if x.strip()]
    if not grid:
        raise ValueError("empty --lambda-grid")
    runner = (
        run_stationary if args.method == "stationary" else run_quasi_stationary
    )
    tasks = []
    for sampler, sample_id, substrate in sources:
        for nu in args.nu:
            lambda_c = _lambda_c_for(args, thresholds, nu)
            for index, lam in enumerate(grid):
                cfg = SISConfig(
                    lam=lam,
                    nu=nu,
                    mu=args.mu,
                    rho0=args.rho0,
                    burn_in=args.burn_in,
                    sample_count=args.sample_count,
                    decorrelation=args.decorrelation,
                    qs_history_size=args.qs_history,
                    snapshot_interval=args.snapshot_interval,
                    seed=derive_seed(
                        args.seed, f"contagion:{sampler}:{sample_id}:{nu!r}", index
                    ),
                )
                tasks.append((sampler, sample_id, nu, lam, lambda_c, cfg, substrate))

    def run_task(task):
        sampler, sample_id, nu, lam, lambda_c, cfg, substrate = task
        result = runner(substrate, cfg)
        rescaled = lam / lambda_c if lambda_c else None
        return (
            args.dataset, sampler, sample_id, nu, lam, rescaled,
            result.mean, result.std, args.method,
        )

    rows = _parallel_map(run_task, tasks, threads)
    header = (
        "dataset", "sampler", "sampleId", "nu", "lambda",
        "lambdaOverLambdaC", "rhoMean", "rhoStd", "method",
    )
    _write_csv(args.output, header, rows)
    manifest.seed = args.seed
    manifest.add_output(args.output)
    manifest.destination = _manifest_path_for(args.output)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_threads(parser):
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker pool size (default: logical cores; NUDHY_THREADS overrides)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypernull",
        description="Uniform null models for directed hypergraphs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser(
        "convert", help="convert between directed and undirected formats"
    )
    convert.add_argument("--input", required=True)
    convert.add_argument("--output", required=True)
    convert.add_argument("--to", required=True, choices=("directed", "undirected"))
    convert.set_defaults(func=cmd_convert)

    sample = commands.add_parser("sample", help="draw randomized hypergraphs")
    sample.add_argument("--input", required=True)
    sample.add_argument(
        "--model", default="degs", choices=("degs", "joint", "degs-mh", "null")
    )
    sample.add_argument("--samples", type=int, default=33)
    sample.add_argument("--steps", default="auto", help="'auto' (20w) or an integer")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--thinning", type=int, default=None)
    sample.add_argument("--output-dir", required=True)
    sample.add_argument(
        "--no-verify",
        action="store_true",
        help="skip the post-write invariant verification",
    )
    _add_threads(sample)
    sample.set_defaults(func=cmd_sample)

    converge = commands.add_parser(
        "converge", help="ARSD convergence trace along one chain"
    )
    converge.add_argument("--input", required=True)
    converge.add_argument(
        "--model", default="degs", choices=("degs", "joint", "degs-mh")
    )
    converge.add_argument("--seed", type=int, default=0)
    converge.add_argument("--f", type=int, default=20)
    converge.add_argument("--l", type=int, default=3)
    converge.add_argument("--max-k", type=int, default=50)
    converge.add_argument("--output", required=True)
    converge.set_defaults(func=cmd_converge)

    metric = commands.add_parser(
        "metric", help="structural metrics on observed vs samples"
    )
    metrics = metric.add_subparsers(dest="metric", required=True)
    for name in _METRICS:
        sub = metrics.add_parser(name)
        sub.add_argument("--input", required=True)
        sub.add_argument("--samples", default=None, help="directory of .dhg samples")
        sub.add_argument("--output", required=True)
        if name in ("coreness", "entropy"):
            sub.add_argument("--side", default="head", choices=SIDES)
        if name == "entropy":
            sub.add_argument("--group-size", type=int, default=2)
        if name == "spectrum":
            sub.add_argument("--k", type=int, default=6)
        _add_threads(sub)
        sub.set_defaults(func=cmd_metric)

    affinity = commands.add_parser(
        "affinity", help="group affinity against sampler baselines"
    )
    affinity.add_argument("--input", required=True)
    affinity.add_argument("--labels", required=True)
    affinity.add_argument(
        "--samples",
        action="append",
        default=[],
        metavar="MODEL=DIR",
        help="sampler name and directory; repeatable",
    )
    affinity.add_argument("--k-min", type=int, default=None)
    affinity.add_argument("--k-max", type=int, default=None)
    affinity.add_argument("--output", required=True)
    affinity.set_defaults(func=cmd_affinity)

    econ = commands.add_parser("econ", help="economic-complexity pipeline")
    econs = econ.add_subparsers(dest="econ_command", required=True)
    build = econs.add_parser("build", help="trade files to a trade hypergraph")
    build.add_argument("--trade", required=True)
    build.add_argument("--metadata", default=None)
    build.add_argument("--year", type=int, required=True)
    build.add_argument("--threshold", type=float, default=1.0)
    build.add_argument("--output", required=True)
    build.set_defaults(func=cmd_econ_build)
    scores = econs.add_parser("scores", help="complexity scores of one hypergraph")
    scores.add_argument("--input", required=True)
    scores.add_argument("--output-dir", required=True)
    scores.set_defaults(func=cmd_econ_scores)
    compare = econs.add_parser(
        "compare", help="rank agreement of sampled scores with observed"
    )
    compare.add_argument("--observed", required=True)
    compare.add_argument(
        "--samples", action="append", default=[], metavar="MODEL=DIR", required=True
    )
    compare.add_argument("--output", required=True)
    _add_threads(compare)
    compare.set_defaults(func=cmd_econ_compare)

    contagion = commands.add_parser(
        "contagion", help="SIS phase points on observed vs samples"
    )
    contagion.add_argument("--input", required=True)
    contagion.add_argument(
        "--dataset", default=None, help="dataset name (default: input stem)"
    )
    contagion.add_argument(
        "--samples", action="append", default=[], metavar="MODEL=DIR"
    )
    contagion.add_argument(
        "--nu", type=float, action="append", required=True, help="repeatable"
    )
    contagion.add_argument(
        "--lambda-grid", required=True, help="comma-separated infection rates"
    )
    contagion.add_argument(
        "--method", default="stationary", choices=("stationary", "quasi-stationary")
    )
    contagion.add_argument(
        "--lambda-c",
        type=float,
        default=None,
        help="explicit invasion threshold (overrides the thresholds file)",
    )
    contagion.add_argument(
        "--thresholds", default=None, help="JSON thresholds config file"
    )
    contagion.add_argument("--seed", type=int, default=0)
    contagion.add_argument("--mu", type=float, default=1.0)
    contagion.add_argument("--rho0", type=float, default=0.01)
    contagion.add_argument("--burn-in", type=float, default=10_000.0)
    contagion.add_argument("--sample-count", type=int, default=10_000)
    contagion.add_argument("--decorrelation", type=float, default=1.0)
    contagion.add_argument("--qs-history", type=int, default=50)
    contagion.add_argument("--snapshot-interval", type=float, default=1.0)
    contagion.add_argument("--output", required=True)
    _add_threads(contagion)
    contagion.set_defaults(func=cmd_contagion)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dataset", "") is None:
        args.dataset = Path(args.input).stem
    manifest = RunManifest(command=["hypernull", *argv])
    manifest.seed = getattr(args, "seed", None)
    started = time.perf_counter()
    try:
        code = args.func(args, manifest)
    except (ParseError, ValueError, OSError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest.timings["total_s"] = time.perf_counter() - started
    if code == 0 and manifest.destination is not None:
        manifest.write(manifest.destination)
    return code


if __name__ == "__main__":
    sys.exit(main())
