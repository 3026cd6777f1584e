"""Batch job runner: ``rbslab <command> [flags]``.

Every command produces a report

    {"schema": "rbslab.report/1", "version": ..., "job": {...},
     "payload": {...}, "timings": {stage: seconds}, "cache_hit": bool}

written as JSON (default) or CSV.  Payloads are cached on disk under one
file per content hash of ``(job, version)``; writes go through a temporary
file and ``os.replace``.  The payload is deterministic for a given job and
version; ``timings`` and ``cache_hit`` are not.

Exit codes: 0 success, 1 usage error, 2 comparison or acceptance failure,
3 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import __version__
from .categories import DEFAULT_CHAIN_CAP
from .homology import HomologyResult, coeff_label, parse_coeff
from .ring_linalg import CapExceeded, RingError, make_ring

SCHEMA = "rbslab.report/1"
COMMANDS = ("tits", "rbs-homology", "rbs-relative", "cofibre-check", "stab-map", "steinberg",
            "coinvariants", "snug", "ordpm-roundtrip", "fred", "acceptance-grid")
EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_CAP = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    ring: str | None = None
    rank: int | None = None
    p: int = 0
    max_degree: int | None = None
    method: str = "auto"
    context: str | None = None
    word: str | None = None
    size: int | None = None
    criteria: tuple[int, ...] | None = None
    chain_cap: int = DEFAULT_CHAIN_CAP

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["coeff"] = coeff_label(d.pop("p"))
        if d["criteria"] is not None:
            d["criteria"] = list(d["criteria"])
        return {k: d[k] for k in sorted(d) if d[k] is not None}

    def cache_key(self, version: str = __version__) -> str:
        blob = json.dumps({"job": self.to_json(), "version": version}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    job: JobSpec
    payload: dict
    exit_code: int = EXIT_OK
    timings: dict = dataclasses.field(default_factory=dict)
    cache_hit: bool = False
    version: str = __version__

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "version": self.version, "job": self.job.to_json(),
                "payload": self.payload, "timings": self.timings, "cache_hit": self.cache_hit,
                "exit_code": self.exit_code}


# ---------------------------------------------------------------------------
# job execution


def _need(job: JobSpec, *names: str) -> None:
    missing = [n for n in names if getattr(job, n) is None]
    if missing:
        raise UsageError(f"{job.command} needs " + ", ".join("--" + m.replace("_", "-")
                                                            for m in missing))


def _homology_with_fallback(job: JobSpec, fn: Callable[[int], HomologyResult]
                            ) -> tuple[dict, int]:
    """Run at ``max_degree``; on a cap overflow retry at lower truncations and
    report the largest one that fits alongside the error."""
    try:
        return {"homology": fn(job.max_degree).to_json()}, EXIT_OK
    except CapExceeded as e:
        err = _cap_error(e)
    for d in range(job.max_degree - 1, 0, -1):
        try:
            return {"error": err, "partial": {"max_degree": d, "homology": fn(d).to_json()}}, \
                EXIT_CAP
        except CapExceeded:
            continue
    return {"error": err}, EXIT_CAP


def _cap_error(e: CapExceeded) -> dict:
    return {"kind": "cap exceeded", "job": e.what, "needed": e.needed, "cap": e.cap,
            "degree": e.degree, "message": str(e)}


def _compute(job: JobSpec) -> tuple[dict, int]:
    cmd = job.command
    if cmd in ("tits", "rbs-homology", "rbs-relative", "cofibre-check", "stab-map",
               "steinberg", "coinvariants"):
        _need(job, "ring", "rank")
        if job.rank < 1:
            raise UsageError("--rank must be positive")
        try:
            ring = make_ring(job.ring)
        except RingError as e:
            raise UsageError(str(e)) from e
    if cmd == "tits":
        from .flags_tits import tits_report

        return tits_report(ring, job.rank, job.p), EXIT_OK
    if cmd in ("rbs-homology", "rbs-relative"):
        from .rbs import rbs_data, rbs_homology, rbs_relative_homology

        _need(job, "max_degree")
        fn = rbs_homology if cmd == "rbs-homology" else rbs_relative_homology
        c = rbs_data(ring, job.rank).category
        body, code = _homology_with_fallback(
            job, lambda d: fn(ring, job.rank, job.p, d, job.method, job.chain_cap))
        return {"ring": ring.label, "rank": job.rank, "objects": c.n_objects,
                "morphisms": c.n_morphisms} | body, code
    if cmd == "cofibre-check":
        from .rbs import cofibre_check

        _need(job, "max_degree")
        if not job.p:
            raise UsageError("cofibre-check needs a prime (--p or --coeff Fp:<p>)")
        r = cofibre_check(ring, job.rank, job.p, job.max_degree, job.method, job.chain_cap)
        return r.to_json(), EXIT_OK if r.equal else EXIT_FAIL
    if cmd == "stab-map":
        from .rbs import stabilization_maps

        if job.rank < 2:
            raise UsageError("stab-map needs --rank >= 2 (the target rank)")
        r = stabilization_maps(ring, job.rank)
        return r.to_json(), EXIT_OK
    if cmd == "steinberg":
        from .flags_tits import steinberg

        st = steinberg(ring, job.rank, job.p)
        return {"ring": ring.label, "rank": job.rank, "coeff": coeff_label(job.p),
                "steinberg_rank": st.rank, "concentrated": st.concentrated,
                "tits_homology": st.homology.to_json()}, EXIT_OK
    if cmd == "coinvariants":
        from .flags_tits import steinberg_coinvariants

        rank, tors = steinberg_coinvariants(ring, job.rank, job.p)
        return {"ring": ring.label, "rank": job.rank, "coeff": coeff_label(job.p),
                "coinvariants": {"rank": rank, "torsion": tors},
                "vanishes": rank == 0 and not tors}, EXIT_OK
    if cmd == "snug":
        from .ordpm import format_partition, parse_context, parse_word, snug_partition

        _need(job, "context", "word")
        try:
            ctx = parse_context(job.context)
            word = parse_word(job.word, ctx)
        except ValueError as e:
            raise UsageError(str(e)) from e
        return {"context": job.context, "word": job.word,
                "partition": format_partition(snug_partition(ctx, word))}, EXIT_OK
    if cmd == "ordpm-roundtrip":
        from .acceptance import ordpm_roundtrip

        size = 4 if job.size is None else job.size
        r = ordpm_roundtrip(size)
        return {"max_size": size} | r, EXIT_OK if r["mismatches"] == 0 else EXIT_FAIL
    if cmd == "fred":
        from .ordpm import fred_hom, fred_objects

        size = 4 if job.size is None else job.size
        if size < 1:
            raise UsageError("--size must be positive")
        objs = fred_objects(size)
        homs = {f"{a} -> {b}": len(fred_hom(a, b)) for a in objs for b in objs}
        nonempty = {k: v for k, v in homs.items() if v}
        poset = all(v <= 1 for v in homs.values())
        return {"total": size, "objects": [str(o) for o in objs],
                "morphisms": nonempty, "is_poset": poset}, EXIT_OK if poset else EXIT_FAIL
    if cmd == "acceptance-grid":
        from .acceptance import run_all

        results = run_all(job.chain_cap, job.criteria)
        code = EXIT_OK
        if any(not r.passed for r in results):
            code = EXIT_CAP if any(r.details.get("error") == "cap exceeded" for r in results) \
                else EXIT_FAIL
        return {"criteria": [r.to_json() for r in results],
                "passed": sum(r.passed for r in results), "total": len(results),
                "failures": [r.line() for r in results if not r.passed]}, code
    raise UsageError(f"unknown command {cmd!r}")


# ---------------------------------------------------------------------------
# cache


def default_cache_dir() -> Path:
    env = os.environ.get("RBSLAB_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "rbslab"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_load(cache_dir: Path, job: JobSpec) -> tuple[dict, int] | None:
    path = cache_dir / f"{job.cache_key()}.json"
    try:
        entry = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    if entry.get("version") != __version__ or entry.get("job") != job.to_json():
        return None
    return entry["payload"], int(entry["exit_code"])


def cache_store(cache_dir: Path, job: JobSpec, payload: dict, code: int) -> None:
    entry = {"version": __version__, "job": job.to_json(), "payload": payload,
             "exit_code": code}
    atomic_write(cache_dir / f"{job.cache_key()}.json", dumps(entry))


def run(job: JobSpec, cache_dir: Path | None = None) -> Report:
    """Execute ``job``, consulting the cache when ``cache_dir`` is given.

    Raises :class:`UsageError` for invalid jobs.
    """
    timings: dict[str, float] = {}
    t = time.perf_counter()
    hit = cache_load(cache_dir, job) if cache_dir is not None else None
    timings["cache_lookup"] = time.perf_counter() - t
    if hit is not None:
        return Report(job, hit[0], hit[1], timings, cache_hit=True)
    t = time.perf_counter()
    try:
        payload, code = _compute(job)
    except CapExceeded as e:
        payload, code = {"error": _cap_error(e)}, EXIT_CAP
    timings["compute"] = time.perf_counter() - t
    # round trip through JSON so cached and fresh payloads are identical
    payload = json.loads(dumps(payload))
    if cache_dir is not None:
        t = time.perf_counter()
        cache_store(cache_dir, job, payload, code)
        timings["cache_store"] = time.perf_counter() - t
    return Report(job, payload, code, timings)


# ---------------------------------------------------------------------------
# output


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj, ensure_ascii=False) if isinstance(obj, list) else obj


def to_csv(report: Report) -> str:
    """``key,value`` rows over the flattened report."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report.to_json()):
        w.writerow([k, v])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _criteria(text: str) -> tuple[int, ...]:
    try:
        out = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma separated list of numbers")
    if not out or any(not 1 <= x <= 10 for x in out):
        raise argparse.ArgumentTypeError("criteria are numbered 1 to 10")
    return out


def _coeff(text: str) -> int:
    try:
        return parse_coeff(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _prime(text: str) -> int:
    return _coeff(f"Fp:{text}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rbslab", description="Batch computations on flag categories.")
    ap.add_argument("--version", action="version", version=f"rbslab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--json", dest="fmt", action="store_const", const="json", default="json",
                        help="JSON report (default)")
    common.add_argument("--csv", dest="fmt", action="store_const", const="csv",
                        help="flattened key,value CSV report")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--chain-cap", type=int, default=DEFAULT_CHAIN_CAP,
                        help="largest chain group or resolution term allowed")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--cache-dir", help="cache directory (default $RBSLAB_CACHE_DIR or "
                                            "~/.cache/rbslab)")
    ring = _Parser(add_help=False)
    ring.add_argument("--ring", required=True, help="F2, F4, Z4, F2[t]/t^2, ...")
    ring.add_argument("--rank", type=int, required=True)
    coeff = _Parser(add_help=False)
    coeff.add_argument("--coeff", type=_coeff, default=0, help="Z (default) or Fp:<p>")
    coeff.add_argument("--p", type=_prime, help="prime coefficient field (overrides --coeff)")
    homo = _Parser(add_help=False)
    homo.add_argument("--max-degree", type=int, required=True, help="nerve truncation D")
    homo.add_argument("--method", choices=("auto", "nerve", "skeleton", "resolution"),
                      default="auto")
    helps = {
        "tits": "homology of the Tits complex",
        "rbs-homology": "homology of the flag category",
        "rbs-relative": "homology relative to the boundary",
        "cofibre-check": "compare relative homology with the Borel pair",
        "stab-map": "integral stabilization maps into rank --rank",
        "steinberg": "rank of the Steinberg module",
        "coinvariants": "coinvariants of the Steinberg module",
        "snug": "snug partition of a word",
        "ordpm-roundtrip": "exhaustive Ord± round trip",
        "fred": "morphisms between reduced filtered dimension sequences",
        "acceptance-grid": "run the acceptance suite",
    }
    parents = {
        "tits": [ring, coeff], "rbs-homology": [ring, coeff, homo],
        "rbs-relative": [ring, coeff, homo], "cofibre-check": [ring, coeff, homo],
        "stab-map": [ring], "steinberg": [ring, coeff], "coinvariants": [ring, coeff],
        "snug": [], "ordpm-roundtrip": [], "fred": [], "acceptance-grid": [],
    }
    for name in COMMANDS:
        sp_ = sub.add_parser(name, parents=[common] + parents[name], help=helps[name])
        if name == "snug":
            sp_.add_argument("--context", required=True, help='e.g. "1<2<3|4<5|6"')
            sp_.add_argument("--word", required=True, help="e.g. 123456")
        if name in ("ordpm-roundtrip", "fred"):
            sp_.add_argument("--size", type=int, default=4,
                             help="largest size (round trip) or total dimension (fred)")
        if name == "acceptance-grid":
            sp_.add_argument("--criteria", type=_criteria, help="e.g. 1,2,8 (default all)")
    return ap


def job_from_args(ns: argparse.Namespace) -> JobSpec:
    p = getattr(ns, "p", None)
    if p is None:
        p = getattr(ns, "coeff", 0)
    if ns.chain_cap < 1:
        raise UsageError("--chain-cap must be positive")
    md = getattr(ns, "max_degree", None)
    if md is not None and md < 1:
        raise UsageError("--max-degree must be at least 1")
    return JobSpec(command=ns.command, ring=getattr(ns, "ring", None),
                   rank=getattr(ns, "rank", None), p=p, max_degree=md,
                   method=getattr(ns, "method", "auto"), context=getattr(ns, "context", None),
                   word=getattr(ns, "word", None), size=getattr(ns, "size", None),
                   criteria=getattr(ns, "criteria", None), chain_cap=ns.chain_cap)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    t = time.perf_counter()
    try:
        job = job_from_args(ns)
        cache_dir = None if ns.no_cache else Path(ns.cache_dir) if ns.cache_dir \
            else default_cache_dir()
        parse_time = time.perf_counter() - t
        report = run(job, cache_dir)
    except UsageError as e:
        print(f"rbslab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    report.timings = {"parse": parse_time} | report.timings
    if job.command == "acceptance-grid":
        for c in report.payload["criteria"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'} criterion {c['number']:2d}: {c['name']}",
                  file=sys.stderr)
    text = to_csv(report) if ns.fmt == "csv" else dumps(report.to_json())
    if ns.output:
        atomic_write(Path(ns.output), text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
