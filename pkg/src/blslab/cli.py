"""Command-line front end wiring the library into reproducible runs.

Subcommands: eval, sample, fit, simulate, diagnose, summary, compare.
Exit codes: 0 success, 1 usage error, 2 numerical/runtime failure.

Every file-writing run drops a manifest (<out>.manifest.json) next to its
output recording the subcommand, the argv, the resolved flags, the seed, the
library version, and the wall-clock duration; replaying the recorded argv
reproduces the output bit-identically for the deterministic subcommands.
Worker counts (--threads, or the BLSLAB_THREADS environment variable) never
change any output, only how fast it appears.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .datakit import (
    Dataset,
    compare_models,
    default_grid,
    load_csv,
    qq_mahalanobis,
    save_csv,
    summarize,
)
from .distribution import (
    BLSParams,
    joint_cdf,
    joint_log_pdf,
    joint_pdf,
    mahalanobis_quantile,
    sample,
)
from .errors import BlsError, RootFindingError
from .estimation import as_sample_matrix, fit_mle, profile_fit
from .generators import FAMILY_NAMES, GeneratorParams, make_generator
from .montecarlo import MCConfig, run_study

__all__ = ["RunManifest", "dispatch", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract reserves 2 for
    # numerical failures, so usage problems are rethrown and mapped to 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------ flag parsing

def _family_arg(text: str):
    name = text.strip().lower()
    if name not in FAMILY_NAMES:
        raise argparse.ArgumentTypeError(
            f"unknown model {text!r}; choose from {', '.join(sorted(FAMILY_NAMES))}"
        )
    return FAMILY_NAMES[name]


def _theta_arg(text: str) -> BLSParams:
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(
            f"--theta needs eta1,eta2,sigma1,sigma2,rho (5 values), got {text!r}"
        )
    try:
        vals = [float(p) for p in parts]
        return BLSParams(*vals)
    except (ValueError, BlsError) as e:
        raise argparse.ArgumentTypeError(f"bad --theta {text!r}: {e}") from None


def _pair_arg(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected t1,t2 got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _ints_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats_arg(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_arg(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"grid must be lo:hi[:step], got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 1.0
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be numeric lo:hi[:step], got {text!r}") from None
    if step <= 0.0 or hi < lo:
        raise argparse.ArgumentTypeError(f"grid needs hi >= lo and step > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed_arg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seed must be an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("--seed must be non-negative")
    return v


def _threads(ns) -> int:
    if ns.threads is not None:
        return ns.threads
    raw = os.environ.get("BLSLAB_THREADS", "1")
    try:
        v = int(raw)
    except ValueError:
        raise _UsageError(f"BLSLAB_THREADS must be an integer, got {raw!r}") from None
    if v < 1:
        raise _UsageError(f"BLSLAB_THREADS must be positive, got {raw!r}")
    return v


# --------------------------------------------------------------- manifest

@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record accompanying every output file."""

    subcommand: str
    argv: tuple[str, ...]
    flags: dict
    seed: int | None
    version: str
    duration_s: float

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "argv": list(self.argv),
            "flags": self.flags,
            "seed": self.seed,
            "version": self.version,
            "duration_s": self.duration_s,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _jsonable(v):
    if isinstance(v, BLSParams):
        return [v.eta1, v.eta2, v.sigma1, v.sigma2, v.rho]
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if hasattr(v, "value"):  # enums
        return v.value
    if isinstance(v, Path):
        return str(v)
    return v


def _manifest(ns, argv, t0: float) -> RunManifest:
    flags = {
        k: _jsonable(v)
        for k, v in sorted(vars(ns).items())
        if k != "func" and not k.startswith("_")
    }
    return RunManifest(
        subcommand=ns.subcommand,
        argv=tuple(argv),
        flags=flags,
        seed=getattr(ns, "seed", None),
        version=__version__,
        duration_s=round(time.monotonic() - t0, 6),
    )


def _emit(text: str, out, ns, argv, t0) -> None:
    """Print to stdout, or write the file plus its manifest."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    manifest = _manifest(ns, argv, t0)
    Path(str(path) + ".manifest.json").write_text(
        manifest.to_json(indent=2) + "\n", encoding="utf-8"
    )


# ------------------------------------------------------------ subcommands

def _make_spec(ns):
    try:
        return make_generator(ns.model, nu=ns.nu, xi=ns.xi, theta=ns.theta_gen)
    except BlsError as e:
        # wrong/missing extra parameters are flag mistakes, not numerics
        raise _UsageError(f"{ns.subcommand}: {e}") from None


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _cmd_eval(ns, argv, t0):
    spec = _make_spec(ns)
    requests = [
        (kind, item)
        for kind, items in (
            ("pdf", ns.pdf),
            ("logpdf", ns.logpdf),
            ("cdf", ns.cdf),
            ("quantile", ns.quantile),
        )
        for item in (items or [])
    ]
    if not requests:
        raise _UsageError(
            "eval: needs at least one of --pdf/--logpdf/--cdf/--quantile"
        )
    lines = []
    for kind, item in requests:
        if kind == "pdf":
            v = joint_pdf(ns.theta, spec, item[0], item[1])
        elif kind == "logpdf":
            v = joint_log_pdf(ns.theta, spec, item[0], item[1])
        elif kind == "cdf":
            v = joint_cdf(ns.theta, spec, item[0], item[1])
        else:
            v = mahalanobis_quantile(spec, item)
        lines.append(_fmt(float(v)))
    _emit("\n".join(lines) + "\n", ns.out, ns, argv, t0)


def _cmd_sample(ns, argv, t0):
    spec = _make_spec(ns)
    pairs = sample(ns.theta, spec, ns.n, ns.seed)
    ds = Dataset(pairs, source=f"blslab sample --seed {ns.seed}")
    save_csv(ds, ns.out)
    manifest = _manifest(ns, argv, t0)
    Path(str(ns.out) + ".manifest.json").write_text(
        manifest.to_json(indent=2) + "\n", encoding="utf-8"
    )


def _resolve_fit(ns, x):
    """Shared by fit/diagnose: explicit grids > fixed extras > family default."""
    grids = (ns.nu_grid, ns.xi_grid, ns.theta_gen_grid)
    if any(g is not None for g in grids):

        def axis(fixed, grid):
            if grid is not None:
                return list(grid)
            return [fixed]  # may be None: axis absent for this family

        combos = [
            GeneratorParams(nu=a, xi=b, theta=c)
            for a in axis(ns.nu, ns.nu_grid)
            for b in axis(ns.xi, ns.xi_grid)
            for c in axis(ns.theta_gen, ns.theta_gen_grid)
        ]
        return profile_fit(x, ns.model, combos)[1]
    if ns.nu is not None or ns.xi is not None or ns.theta_gen is not None:
        return fit_mle(x, _make_spec(ns))
    grid = default_grid(ns.model)
    if grid is not None:
        return profile_fit(x, ns.model, grid)[1]
    return fit_mle(x, _make_spec(ns))


def _cmd_fit(ns, argv, t0):
    ds = load_csv(ns.data)
    fit = _resolve_fit(ns, as_sample_matrix(ds.pairs))
    if not fit.converged:
        raise RootFindingError(
            f"fit did not converge (scaled gradient norm {fit.grad_norm:.3g})"
        )
    _emit(fit.to_json(indent=2) + "\n", ns.out, ns, argv, t0)


def _cmd_simulate(ns, argv, t0):
    spec = _make_spec(ns)
    config = MCConfig(
        spec=spec,
        true_theta=ns.theta,
        sample_sizes=ns.n,
        rho_values=ns.rho,
        replications=ns.reps,
        master_seed=ns.seed,
    )
    report = run_study(config, workers=_threads(ns))
    _emit(report.to_tsv(), ns.out, ns, argv, t0)


def _cmd_diagnose(ns, argv, t0):
    ds = load_csv(ns.data)
    fit = _resolve_fit(ns, as_sample_matrix(ds.pairs))
    if not fit.converged:
        raise RootFindingError(
            f"fit did not converge (scaled gradient norm {fit.grad_norm:.3g})"
        )
    qq = qq_mahalanobis(ds, fit)
    _emit(qq.to_tsv(), ns.out, ns, argv, t0)


def _cmd_summary(ns, argv, t0):
    ds = load_csv(ns.data)
    _emit(summarize(ds).to_tsv(), ns.out, ns, argv, t0)


def _cmd_compare(ns, argv, t0):
    ds = load_csv(ns.data)
    families = list(ns.families) if ns.families else None
    if families is not None:
        try:
            families = [_family_arg(f) for f in families]
        except argparse.ArgumentTypeError as e:
            raise _UsageError(f"compare: {e}") from None
    cmp = compare_models(ds, families=families, workers=_threads(ns))
    as_json = ns.out is not None and str(ns.out).endswith(".json")
    text = cmp.to_json(indent=2) + "\n" if as_json else cmp.to_tsv()
    _emit(text, ns.out, ns, argv, t0)


# ----------------------------------------------------------------- parser

def _add_model_flags(p, require_model=True):
    p.add_argument(
        "--model",
        type=_family_arg,
        required=require_model,
        help="family name: " + ", ".join(sorted(FAMILY_NAMES)),
    )
    p.add_argument("--nu", type=float, help="extra parameter nu (degrees of freedom / shape)")
    p.add_argument("--xi", type=float, help="extra parameter xi (shape)")
    p.add_argument(
        "--theta-gen",
        type=float,
        dest="theta_gen",
        help="extra generator parameter theta (distinct from the --theta vector)",
    )


def _add_grid_flags(p):
    p.add_argument("--nu-grid", type=_grid_arg, dest="nu_grid", help="profile grid for nu, lo:hi[:step]")
    p.add_argument("--xi-grid", type=_grid_arg, dest="xi_grid", help="profile grid for xi, lo:hi[:step]")
    p.add_argument(
        "--theta-gen-grid",
        type=_grid_arg,
        dest="theta_gen_grid",
        help="profile grid for the generator theta, lo:hi[:step]",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blslab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"blslab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eval", help="evaluate pdf/logpdf/cdf/radial quantile")
    _add_model_flags(p)
    p.add_argument("--theta", type=_theta_arg, required=True, help="eta1,eta2,sigma1,sigma2,rho")
    p.add_argument("--pdf", type=_pair_arg, action="append", help="joint density at t1,t2 (repeatable)")
    p.add_argument("--logpdf", type=_pair_arg, action="append", help="joint log-density at t1,t2 (repeatable)")
    p.add_argument("--cdf", type=_pair_arg, action="append", help="joint CDF at t1,t2 (repeatable)")
    p.add_argument(
        "--quantile", type=float, action="append",
        help="squared-Mahalanobis radial quantile at probability p (repeatable)",
    )
    p.add_argument("--out", help="write values here instead of stdout (with manifest)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sample", help="draw a synthetic sample, write CSV")
    _add_model_flags(p)
    p.add_argument("--theta", type=_theta_arg, required=True, help="eta1,eta2,sigma1,sigma2,rho")
    p.add_argument("--n", type=_positive_int, required=True, help="sample size")
    p.add_argument("--seed", type=_seed_arg, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("fit", help="maximum-likelihood fit, write FitResult JSON")
    _add_model_flags(p)
    _add_grid_flags(p)
    p.add_argument("--data", required=True, help="two-column positive CSV")
    p.add_argument("--out", help="output JSON path (stdout if omitted)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo bias/MSE study, write TSV")
    _add_model_flags(p)
    p.add_argument(
        "--theta",
        type=_theta_arg,
        default=BLSParams(1.0, 1.0, 0.5, 0.5, 0.5),
        help="true eta1,eta2,sigma1,sigma2,rho (rho is overridden per grid cell; "
        "default 1,1,0.5,0.5,0.5)",
    )
    p.add_argument("--n", type=_ints_arg, required=True, help="sample sizes, comma-separated")
    p.add_argument("--rho", type=_floats_arg, required=True, help="correlation grid, comma-separated")
    p.add_argument("--reps", type=_positive_int, required=True, help="Monte Carlo replications per cell")
    p.add_argument("--seed", type=_seed_arg, default=0, help="master seed (default 0)")
    p.add_argument("--threads", type=_positive_int, help="worker threads (default: BLSLAB_THREADS or 1)")
    p.add_argument("--out", help="output TSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("diagnose", help="fit a model and write Mahalanobis QQ TSV")
    _add_model_flags(p)
    _add_grid_flags(p)
    p.add_argument("--data", required=True, help="two-column positive CSV")
    p.add_argument("--out", help="output TSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("summary", help="print per-column descriptive statistics")
    p.add_argument("--data", required=True, help="two-column positive CSV")
    p.add_argument("--out", help="output TSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_summary)

    p = sub.add_parser("compare", help="fit several families, rank by AIC/BIC")
    p.add_argument("--data", required=True, help="two-column positive CSV")
    p.add_argument(
        "--families",
        type=lambda s: tuple(s.split(",")),
        help="comma-separated family names (default: all eight)",
    )
    p.add_argument("--threads", type=_positive_int, help="worker threads (default: BLSLAB_THREADS or 1)")
    p.add_argument(
        "--out",
        help="output path; .json extension selects JSON, anything else TSV (stdout TSV if omitted)",
    )
    p.set_defaults(func=_cmd_compare)

    return parser


def dispatch(argv) -> int:
    """Parse argv and run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    t0 = time.monotonic()
    try:
        ns.func(ns, argv, t0)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except BlsError as e:
        print(f"blslab {ns.subcommand}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"blslab {ns.subcommand}: {e}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
