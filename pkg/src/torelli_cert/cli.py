"""Command-line front end: run single checks or sweeps and write certificates."""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import __version__
from .bcj import BPoly, boundary_twist_sigma, verify_B2_generation, verify_sigma_surjectivity
from .certificate import Certificate, emit, flag
from .errors import ParameterError, UsageError
from .johnson import DEFAULT_BUDGET, DEFAULT_TIME_LIMIT_S, septwist_tau, verify_tau_surjectivity
from .lantern import verify_factorization, verify_lantern_relation
from .symplectic import SURFACE_KINDS, SurfaceParams

PROPOSITIONS = (
    "tau-surjectivity",
    "lantern",
    "factorization-3.1a",
    "factorization-3.1b",
    "factorization-3.2",
    "factorization-3.3",
    "bcj-b2",
    "sigma-surjectivity",
    "boundary-twist-checks",
)
MAX_SWEEP_GENUS = 8
BOUNDS = "valid parameters satisfy g >= 3 and 1 <= k < g-1"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def verify_boundary_twist(genus: int) -> Certificate:
    """tau of the boundary twist vanishes while sigma is sum_i abar_i bbar_i."""
    start = time.monotonic()
    tau = septwist_tau(genus, "bordered")
    sigma = boundary_twist_sigma(genus)
    expected = BPoly.zero(genus)
    for i in range(genus):
        expected = expected + BPoly.monomial(genus, 2 * i, 2 * i + 1)
    metrics = {
        "tau_terms": len(tau.value.terms),
        "sigma_terms": len(sigma.monomials),
        "sigma_degree": sigma.degree,
        "tau_zero_ok": flag(tau.value.is_zero()),
        "sigma_nonzero_ok": flag(not sigma.is_zero()),
        "sigma_formula_ok": flag(sigma == expected),
    }
    verdict = "pass" if all(v for k, v in metrics.items() if k.endswith("_ok")) else "fail"
    conventions = {
        "boundary_twist": "separating curve cutting off all g handles (the side without the border)",
        "sigma": str(sigma),
    }
    cert = Certificate("boundary-twist-checks", {"genus": genus, "kind": "bordered"},
                       conventions, metrics, verdict)
    return cert.with_elapsed(int((time.monotonic() - start) * 1000))


def run(
    proposition: str,
    params: Optional[SurfaceParams] = None,
    budget: int = DEFAULT_BUDGET,
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S,
    mirror: bool = False,
) -> Certificate:
    """Dispatch one proposition check."""
    if proposition not in PROPOSITIONS:
        raise UsageError(f"unknown proposition {proposition!r}; choose from {', '.join(PROPOSITIONS)}")
    if proposition == "lantern":
        return verify_lantern_relation(mirror=mirror)
    if proposition.startswith("factorization-"):
        return verify_factorization(proposition.split("-", 1)[1], params, mirror=mirror)
    if params is None:
        raise ParameterError(f"{proposition} needs surface parameters; {BOUNDS}")
    if proposition == "tau-surjectivity":
        return verify_tau_surjectivity(params, budget, time_limit_s)
    if proposition == "bcj-b2":
        return verify_B2_generation(params.genus, budget=budget, time_limit_s=time_limit_s)
    if proposition == "sigma-surjectivity":
        return verify_sigma_surjectivity(params, budget, time_limit_s)
    if params.kind != "bordered":
        raise ParameterError("boundary-twist-checks needs a bordered surface")
    return verify_boundary_twist(params.genus)


@dataclass(frozen=True)
class SweepSpec:
    gmin: int
    gmax: int
    k_policy: Union[str, int] = "all"
    kinds: tuple[str, ...] = SURFACE_KINDS
    budget: int = DEFAULT_BUDGET
    propositions: tuple[str, ...] = ("tau-surjectivity",)
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S
    max_genus: int = MAX_SWEEP_GENUS

    def __post_init__(self) -> None:
        if not 3 <= self.gmin <= self.gmax <= self.max_genus:
            raise UsageError(f"genus range must lie within [3, {self.max_genus}]")
        if not self.kinds:
            raise UsageError("a sweep needs at least one surface kind")
        bad = [k for k in self.kinds if k not in SURFACE_KINDS]
        if bad:
            raise UsageError(f"unknown surface kinds {bad}")
        if self.k_policy != "all" and not isinstance(self.k_policy, int):
            raise UsageError("k policy must be 'all' or an integer")
        unknown = [p for p in self.propositions if p not in PROPOSITIONS]
        if unknown:
            raise UsageError(f"unknown propositions {unknown}")


def sweep_jobs(spec: SweepSpec) -> list[tuple[str, Optional[SurfaceParams]]]:
    """All applicable (proposition, params) pairs in deterministic order."""
    jobs: list[tuple[str, Optional[SurfaceParams]]] = []
    if "lantern" in spec.propositions:
        jobs.append(("lantern", None))
    for g in range(spec.gmin, spec.gmax + 1):
        ks = range(1, g - 1) if spec.k_policy == "all" else [spec.k_policy]
        per_genus_done: set[str] = set()
        for k in ks:
            if not 1 <= k < g - 1:
                continue
            for kind in SURFACE_KINDS:
                if kind not in spec.kinds:
                    continue
                params = SurfaceParams(g, k, kind)
                for prop in spec.propositions:
                    if prop == "lantern":
                        continue
                    if prop in ("bcj-b2", "boundary-twist-checks"):
                        if prop in per_genus_done or kind != "bordered" and prop == "boundary-twist-checks":
                            continue
                        per_genus_done.add(prop)
                    if prop == "sigma-surjectivity" and kind != "bordered":
                        continue
                    if prop == "factorization-3.3" and (kind == "closed" or g < 4 or k != g - 2):
                        continue
                    jobs.append((prop, params))
    return jobs


def _run_job(args: tuple) -> Certificate:
    prop, params, budget, time_limit_s, mirror = args
    return run(prop, params, budget, time_limit_s, mirror)


def sweep(spec: SweepSpec, jobs: int = 1, mirror: bool = False) -> list[Certificate]:
    """Run every applicable check; an inconclusive result never stops the sweep."""
    work = [(p, params, spec.budget, spec.time_limit_s, mirror) for p, params in sweep_jobs(spec)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_job, work))
    return [_run_job(w) for w in work]


def certificate_filename(cert: Certificate) -> str:
    parts = [cert.proposition]
    if cert.params:
        for key in ("genus", "k", "kind"):
            if key in cert.params:
                parts.append(f"{key[0]}{cert.params[key]}" if key != "kind" else cert.params[key])
    return "_".join(parts) + ".json"


def summarize(certs: Sequence[Certificate]) -> str:
    counts = {v: sum(1 for c in certs if c.verdict == v) for v in ("pass", "fail", "inconclusive")}
    lines = [f"{'proposition':<24} {'params':<28} verdict"]
    for c in certs:
        p = ",".join(f"{k}={v}" for k, v in (c.params or {}).items()) or "-"
        lines.append(f"{c.proposition:<24} {p:<28} {c.verdict}")
    lines.append(f"pass={counts['pass']} fail={counts['fail']} inconclusive={counts['inconclusive']}")
    return "\n".join(lines)


def exit_code(certs: Sequence[Certificate]) -> int:
    verdicts = {c.verdict for c in certs}
    if "fail" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def read_config(path: Union[str, Path]) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip()] = value.strip()
    return out


CONFIG_KEYS = {"budget": int, "time_limit": float, "record_timing": bool,
               "mirror_twists": bool, "jobs": int, "max_genus": int}


def _config_value(key: str, value: str):
    kind = CONFIG_KEYS.get(key)
    if kind is None:
        raise UsageError(f"unknown configuration key {key!r}")
    if kind is bool:
        if value.lower() not in ("1", "0", "true", "false", "yes", "no"):
            raise UsageError(f"{key} must be a boolean")
        return value.lower() in ("1", "true", "yes")
    try:
        return kind(value)
    except ValueError:
        raise UsageError(f"{key} must be {kind.__name__}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 already; keep the message format
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torelli-cert", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value configuration file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--budget", type=int, help=f"orbit size cap (default {DEFAULT_BUDGET})")
        p.add_argument("--time-limit", type=float,
                       help=f"soft wall-clock cap per certificate in seconds "
                            f"(default {DEFAULT_TIME_LIMIT_S:g})")
        p.add_argument("--mirror-twists", action="store_true", default=None)
        p.add_argument("--record-timing", action="store_true", default=None,
                       help="store measured elapsed_ms instead of 0")

    v = sub.add_parser("verify", help="run one proposition check")
    v.add_argument("proposition", choices=PROPOSITIONS)
    v.add_argument("--genus", type=int)
    v.add_argument("--k", type=int, default=1)
    v.add_argument("--surface", choices=SURFACE_KINDS, default="bordered")
    v.add_argument("--json", help="write the certificate here")
    common(v)

    s = sub.add_parser("sweep", help="run checks over a range of genera")
    s.add_argument("--gmin", type=int, required=True)
    s.add_argument("--gmax", type=int, required=True)
    s.add_argument("--kinds", nargs="+", default=list(SURFACE_KINDS))
    s.add_argument("--k", type=int, help="fixed k instead of every valid k")
    s.add_argument("--propositions", nargs="+", default=["tau-surjectivity"])
    s.add_argument("--out", help="directory for certificate files")
    s.add_argument("--jobs", type=int)
    common(s)
    return parser


def _settings(args: argparse.Namespace) -> dict:
    settings = {"budget": DEFAULT_BUDGET, "time_limit": DEFAULT_TIME_LIMIT_S,
                "record_timing": False, "mirror_twists": False, "jobs": 1,
                "max_genus": MAX_SWEEP_GENUS}
    if args.config:
        for key, value in read_config(args.config).items():
            settings[key] = _config_value(key, value)
    for key in ("budget", "time_limit", "record_timing", "mirror_twists", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _finish(cert: Certificate, record_timing: bool) -> Certificate:
    return cert if record_timing else cert.with_elapsed(0)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = _settings(args)
        if args.command == "verify":
            params = None
            if args.genus is not None:
                params = SurfaceParams(args.genus, args.k, args.surface)
            cert = run(args.proposition, params, settings["budget"], settings["time_limit"],
                       settings["mirror_twists"])
            cert = _finish(cert, settings["record_timing"])
            if args.json:
                emit(cert, args.json)
            sys.stdout.write(cert.to_json())
            return exit_code([cert])
        spec = SweepSpec(args.gmin, args.gmax, "all" if args.k is None else args.k,
                         tuple(args.kinds), settings["budget"], tuple(args.propositions),
                         settings["time_limit"], settings["max_genus"])
        certs = [_finish(c, settings["record_timing"])
                 for c in sweep(spec, settings["jobs"], settings["mirror_twists"])]
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            for c in certs:
                emit(c, out / certificate_filename(c))
        print(summarize(certs))
        return exit_code(certs)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
