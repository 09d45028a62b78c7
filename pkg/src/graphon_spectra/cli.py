"""Config-driven experiment runner.

One JSON config per run; --seed and --out override the matching config
fields.  Each run writes out/<command>/<timestamp>/ containing the
resolved config, a report.json, and CSV artifacts.  Outputs are
deterministic for a fixed config apart from the created_utc stamp in the
report.

Exit codes: 0 success, 2 config error, 3 convergence error, 4 capacity
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import ensembles, freeconv, spectra
from .errors import CapacityError, ConvergenceError, ValidationError
from .graphons import (
    ConstantGraphon,
    Profile,
    ProductGraphon,
    cut_norm_exact,
    cut_norm_heuristic,
    discretize_kernel,
    graphon_from_json,
    hom_density,
    SimpleGraph,
)
from .moments import canonical_source, moment_table

COMMANDS = ("moments", "simulate", "compare", "norm-scan", "constrained-fit", "freeconv", "cutnorm")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_CAPACITY = 4


def _require(config, key):
    if key not in config:
        raise ValidationError(f"config is missing required field {key!r}")
    return config[key]


def _bilinear_mix(x, y):
    return 0.5 * (x * (1.0 - y) + y * (1.0 - x))


def _figure_config(name, config):
    n = int(config.get("n", 1000))
    if name == "inhom-er-sqrt":
        return {
            "kind": "inhom-er",
            "graphon": {"type": "product", "profile": "sqrt"},
            "eps": float(config.get("eps", 0.25)),
            "n": n,
        }
    if name == "gaussian-sqrt":
        return {
            "kind": "generalized-wigner",
            "graphon": {"type": "product", "profile": "sqrt"},
            "n": n,
        }
    if name == "gaussian-bilinear":
        step = discretize_kernel(_bilinear_mix, n)
        return {"kind": "generalized-wigner", "graphon": step.to_json(), "n": n}
    raise ValidationError(f"unknown figure recipe: {name!r}")


def _sample_scaled_laplacian(ensemble, seed):
    """Sample one ensemble draw and return its centered, scaled Laplacian."""
    kind = _require(ensemble, "kind")
    n = int(_require(ensemble, "n"))
    if kind == "generalized-wigner":
        graphon = graphon_from_json(_require(ensemble, "graphon"))
        mean = float(ensemble.get("mean", 0.0))
        a = ensembles.sample_generalized_wigner(
            graphon,
            n,
            seed,
            entry_law=ensemble.get("entry_law", "gaussian"),
            mean=mean,
            block_average=bool(ensemble.get("block_average", False)),
        )
        delta = ensembles.laplacian_of(a)
        means = ensembles.laplacian_of(ensembles.mean_matrix(n, mean)) if mean else np.zeros((n, n))
        return ensembles.center_scale(delta, means), np.sqrt(n)
    if kind == "inhom-er":
        graphon = graphon_from_json(_require(ensemble, "graphon"))
        eps = float(_require(ensemble, "eps"))
        a = ensembles.sample_inhom_er(graphon, eps, n, seed)
        p = ensembles.inhom_er_edge_probabilities(graphon, eps, n)
        scale = np.sqrt(n * eps)
        delta = ensembles.laplacian_of(a)
        means = ensembles.laplacian_of(p)
        return ensembles.center_scale(delta, means, scale=scale), scale
    if kind == "sparse-w-random":
        graphon = graphon_from_json(_require(ensemble, "graphon"))
        eps = float(_require(ensemble, "eps"))
        a, _ = ensembles.sample_sparse_w_random(graphon, eps, n, seed)
        density = hom_density(SimpleGraph.single_edge(), graphon)
        p = ensembles.mean_matrix(n, eps * density)
        scale = np.sqrt(n * eps)
        delta = ensembles.laplacian_of(a)
        means = ensembles.laplacian_of(p)
        return ensembles.center_scale(delta, means, scale=scale), scale
    if kind == "constrained":
        kstar = _kstar_values(_require(ensemble, "kstar"), n)
        x, p = ensembles.solve_constrained(kstar, tol=float(ensemble.get("tol", 1e-10)))
        a = ensembles.sample_constrained(p, seed)
        eps = ensembles.constrained_epsilon(kstar)
        scale = np.sqrt(n * eps)
        delta = ensembles.laplacian_of(a)
        means = ensembles.laplacian_of(p)
        return ensembles.center_scale(delta, means, scale=scale), scale
    if kind == "decoupled":
        graphon = graphon_from_json(_require(ensemble, "graphon"))
        return ensembles.sample_decoupled_model(graphon, n, seed), 1.0
    if kind == "multiplicative":
        profile = Profile.from_json(_require(ensemble, "profile"))
        return ensembles.sample_multiplicative_model(profile, n, seed), 1.0
    raise ValidationError(f"unknown ensemble kind: {kind!r}")


def _kstar_values(spec, n):
    if isinstance(spec, dict) and "formula" in spec:
        if spec["formula"] == "cuberoot":
            return np.floor(np.arange(1, n + 1) ** (1.0 / 3.0))
        raise ValidationError(f"unknown kstar formula: {spec['formula']!r}")
    if isinstance(spec, dict) and "values" in spec:
        return np.asarray(spec["values"], dtype=float)
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    raise ValidationError(f"bad kstar spec: {spec!r}")


# ---------------------------------------------------------------------------
# command handlers; each returns a results dict and writes CSVs into out_dir


def _cmd_moments(config, out_dir):
    graphon = graphon_from_json(_require(config, "graphon"))
    orders = _require(config, "orders")
    source = canonical_source(config.get("source", "laplacian"))
    if source == "freeconv":
        curve = freeconv.free_convolution_density()
        entries = {int(k): curve.moment(int(k)) for k in orders}
        report = {"source": source, "moments": {str(k): v for k, v in sorted(entries.items())}}
    else:
        table = moment_table(orders, graphon, source)
        report = table.to_json()
        entries = table.entries
    with open(out_dir / "moments.csv", "w") as fh:
        fh.write("order,value\n")
        for order in sorted(entries):
            fh.write(f"{order},{entries[order]!r}\n")
    return report


def _empirical_summary(sample):
    moments = spectra.esd_moments(sample, orders=(1, 2, 3, 4))
    return {
        "moments": {str(k): v for k, v in sorted(moments.entries.items())},
        "spectral_norm": spectra.spectral_norm(sample),
        "n": sample.n,
    }


def _cmd_simulate(config, out_dir):
    seed = int(_require(config, "seed"))
    if "figure" in config:
        ensemble = _figure_config(config["figure"], config)
    else:
        ensemble = _require(config, "ensemble")
    matrix, scale = _sample_scaled_laplacian(ensemble, seed)
    descriptor = {k: v for k, v in ensemble.items() if k != "graphon"}
    descriptor["seed"] = seed
    sample = spectra.SpectralSample.from_matrix(matrix, ensemble=descriptor, scale_applied=scale)
    sample.write_csv(out_dir / "eigenvalues.csv")
    bins = int(config.get("bins", 60))
    edges, counts = spectra.histogram(sample, bins, config.get("range"))
    spectra.write_histogram_csv(out_dir / "histogram.csv", edges, counts)
    return _empirical_summary(sample)


def _reference_cdf_sample(variance, points=20001):
    """Deterministic quantile sample of the limit law scaled to variance c."""
    curve = freeconv.free_convolution_density()
    cdf = curve.cdf()
    cdf = cdf / cdf[-1]
    qs = (np.arange(points) + 0.5) / points
    return np.sqrt(variance) * np.interp(qs, cdf, curve.xs)


def _cmd_compare(config, out_dir):
    seed = int(_require(config, "seed"))
    ensemble = _require(config, "ensemble")
    graphon = graphon_from_json(_require(config, "graphon"))
    orders = config.get("orders", [2, 4])
    trials = int(config.get("trials", 1))
    source = canonical_source(config.get("source", "laplacian"))

    pooled = []
    for trial in range(trials):
        child = ensembles.derive_seed(seed, 0, trial)
        matrix, scale = _sample_scaled_laplacian(ensemble, child)
        sample = spectra.SpectralSample.from_matrix(matrix, scale_applied=scale)
        pooled.append(sample.eigenvalues)
    eigs = np.sort(np.concatenate(pooled))
    pooled_sample = spectra.SpectralSample(eigenvalues=eigs, n=eigs.size)

    table = moment_table(orders, graphon, source)
    empirical = spectra.esd_moments(pooled_sample, orders)
    rows = []
    for order in sorted(table.entries):
        theory = table.entries[order]
        obs = empirical.entries[order]
        rel = abs(obs - theory) / abs(theory) if theory else abs(obs)
        rows.append((order, obs, theory, rel))
    with open(out_dir / "compare.csv", "w") as fh:
        fh.write("order,empirical,theoretical,rel_error\n")
        for order, obs, theory, rel in rows:
            fh.write(f"{order},{obs!r},{theory!r},{rel!r}\n")

    results = {
        "orders": {str(o): {"empirical": obs, "theoretical": th, "rel_error": rel}
                   for o, obs, th, rel in rows},
        "trials": trials,
    }
    if isinstance(graphon, ConstantGraphon) and graphon.c > 0:
        reference = _reference_cdf_sample(graphon.c)
        results["ks_distance"] = spectra.ks_distance(eigs, reference)
        results["levy_distance"] = spectra.levy_distance(eigs, reference)
    return results


def _cmd_norm_scan(config, out_dir):
    seed = int(_require(config, "seed"))
    graphon = graphon_from_json(_require(config, "graphon"))
    ns = [int(n) for n in _require(config, "ns")]
    trials = int(config.get("trials", 5))
    entry_law = config.get("entry_law", "gaussian")
    mean = float(config.get("mean", 0.0))
    if mean:
        rows, m = spectra.mean_norm_scan(graphon, mean, ns, trials, seed, entry_law=entry_law)
        with open(out_dir / "normscan.csv", "w") as fh:
            fh.write("n,trial,norm_over_n\n")
            for n, trial, ratio in rows:
                fh.write(f"{n},{trial},{ratio!r}\n")
        return {"mode": "mean", "limit": m,
                "rows": [{"n": n, "trial": t, "norm_over_n": r} for n, t, r in rows]}
    result = spectra.norm_scan(graphon, ns, trials, seed, entry_law=entry_law)
    result.write_csv(out_dir / "normscan.csv")
    return {
        "mode": "centered",
        "bracket": list(result.bracket),
        "medians": {str(n): med for n, (med, _, _) in result.summary.items()},
        "quartiles": {str(n): [q25, q75] for n, (_, q25, q75) in result.summary.items()},
    }


def _cmd_constrained_fit(config, out_dir):
    seed = int(_require(config, "seed"))
    kspec = _require(config, "kstar")
    n = int(config.get("n", 0))
    if isinstance(kspec, dict) and "formula" in kspec and n <= 0:
        raise ValidationError("a kstar formula needs a positive 'n'")
    kstar = _kstar_values(kspec, n)
    n = kstar.size
    tol = float(config.get("tol", 1e-10))
    x, p = ensembles.solve_constrained(kstar, tol=tol, max_iterations=int(config.get("max_iterations", 10_000)))
    fitted = p.sum(axis=1)
    residual = float(np.max(np.abs(kstar - fitted)))
    with open(out_dir / "fit.csv", "w") as fh:
        fh.write("i,kstar,x,fitted_degree\n")
        for i in range(n):
            fh.write(f"{i + 1},{float(kstar[i])!r},{float(x[i])!r},{float(fitted[i])!r}\n")
    trials = int(config.get("sample_trials", 3))
    degree_sum = np.zeros(n)
    for trial in range(trials):
        child = ensembles.derive_seed(seed, 1, trial)
        degree_sum += ensembles.sample_constrained(p, child).sum(axis=1)
    mean_degree = degree_sum / trials
    # Poisson-binomial band on the mean of `trials` degrees
    band = 4.0 * np.sqrt((p * (1.0 - p)).sum(axis=1) / trials)
    within = np.abs(mean_degree - fitted) <= band
    with open(out_dir / "degrees.csv", "w") as fh:
        fh.write("i,kstar,mean_degree,band\n")
        for i in range(n):
            fh.write(
                f"{i + 1},{float(kstar[i])!r},{float(mean_degree[i])!r},{float(band[i])!r}\n"
            )
    return {
        "n": n,
        "residual": residual,
        "epsilon": ensembles.constrained_epsilon(kstar),
        "band_fraction": float(within.mean()),
        "sample_trials": trials,
    }


def _cmd_freeconv(config, out_dir):
    grid = config.get("grid", {})
    xs = freeconv.default_grid(
        float(grid.get("lo", -8.0)), float(grid.get("hi", 8.0)), int(grid.get("points", 1601))
    )
    eta = float(config.get("eta", freeconv.DEFAULT_ETA))
    curve = freeconv.free_convolution_density(xs, eta=eta, extrapolate=bool(config.get("extrapolate", True)))
    curve.write_csv(out_dir / "density.csv")
    transform = freeconv.stieltjes_grid(xs, eta=eta)
    transform.write_csv(out_dir / "stieltjes.csv")
    return {
        "mass": curve.mass(),
        "symmetry_gap": float(np.max(np.abs(curve.density - curve.density[::-1]))),
        "moments": {str(k): curve.moment(k) for k in (2, 4, 6)},
        "eta": eta,
    }


def _cmd_cutnorm(config, out_dir):
    seed = int(_require(config, "seed"))
    spec = _require(config, "kernel")
    kernels = []
    if "values" in spec:
        kernels.append(np.asarray(spec["values"], dtype=float))
    elif "random" in spec:
        n = int(spec["random"].get("n", 8))
        count = int(spec["random"].get("count", 20))
        rng = ensembles.row_rng(seed, 99, 0)
        for _ in range(count):
            k = rng.uniform(-1.0, 1.0, size=(n, n))
            kernels.append((k + k.T) / 2.0)
    else:
        raise ValidationError("kernel spec needs 'values' or 'random'")
    rows = []
    for idx, kernel in enumerate(kernels):
        exact = cut_norm_exact(kernel)
        heuristic = cut_norm_heuristic(kernel)
        rows.append((idx, exact, heuristic, abs(exact - heuristic)))
    with open(out_dir / "cutnorm.csv", "w") as fh:
        fh.write("index,exact,heuristic,abs_diff\n")
        for idx, exact, heuristic, diff in rows:
            fh.write(f"{idx},{exact!r},{heuristic!r},{diff!r}\n")
    return {"kernels": len(rows), "max_abs_diff": max(r[3] for r in rows)}


_HANDLERS = {
    "moments": _cmd_moments,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "norm-scan": _cmd_norm_scan,
    "constrained-fit": _cmd_constrained_fit,
    "freeconv": _cmd_freeconv,
    "cutnorm": _cmd_cutnorm,
}


def run_config(config, out_root=None):
    """Run one resolved config; returns the created run directory."""
    command = _require(config, "command")
    if command not in COMMANDS:
        raise ValidationError(f"unknown command: {command!r}")
    if "seed" not in config:
        raise ValidationError("config needs a seed")
    int(config["seed"])
    out_root = Path(out_root if out_root is not None else config.get("out", "out"))
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S_%f")
    out_dir = out_root / command / stamp
    out_dir.mkdir(parents=True, exist_ok=False)
    with open(out_dir / "config.json", "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    results = _HANDLERS[command](config, out_dir)
    provenance = "# config: " + json.dumps(config, sort_keys=True) + "\n"
    for csv_path in sorted(out_dir.glob("*.csv")):
        csv_path.write_text(provenance + csv_path.read_text())
    report = {
        "command": command,
        "created_utc": stamp,
        "config": config,
        "results": results,
    }
    with open(out_dir / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="graphon-spectra",
        description="Run spectral experiments for graphon-profiled random matrices.",
    )
    parser.add_argument("--config", required=True, help="path to a JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the output root directory")
    args = parser.parse_args(argv)

    def fail(exc, code):
        message = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
        print(json.dumps(message))
        return code

    try:
        with open(args.config) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValidationError("config must be a JSON object")
        if args.seed is not None:
            config["seed"] = args.seed
        if args.out is not None:
            config["out"] = args.out
        out_dir = run_config(config)
    except (ValidationError, KeyError, TypeError, json.JSONDecodeError, OSError) as exc:
        return fail(exc, EXIT_CONFIG)
    except ConvergenceError as exc:
        return fail(exc, EXIT_CONVERGENCE)
    except CapacityError as exc:
        return fail(exc, EXIT_CAPACITY)
    print(json.dumps({"ok": True, "out_dir": str(out_dir)}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
