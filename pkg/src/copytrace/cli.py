"""Operator surface: scan / reuse / report subcommands over a config.

Artifacts are flat TSV/CSV/JSON files under the output directory:

    p2P.tsv, commits.tsv, blobmeta.tsv, shards/events.NNN.spill   (scan)
    b2tP.NNN.tsv, reuse.NNN.tsv                                   (reuse)
    report/*.csv, report/stats.json, report/summary.json,
    report/trend.svg, report/trends.png, report/ratio.png         (report)

Every stage is deterministic given (inputs, config); manifests record the
config hash and per-repository input digests so runs are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import re
import shutil
import sys
import time as time_mod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import defork, figures, metrics, stats, timeline
from .errors import (
    ClassMissing,
    ConfigError,
    CopytraceError,
    DegenerateInput,
    MissingStageOutput,
    Separation,
    Singular,
)
from .extract import BlobCreation, extract_blob_creations, emit_events
from .gitstore import ObjectId, open_store
from .timeline import (
    BlobEvent,
    Denylist,
    dedupe_first_per_project,
    derive_reuse,
    escape_field,
    event_line,
    instance_line,
    parse_event_line,
    parse_instance_line,
    shard_count_bits,
    shard_events,
    sort_shard,
    unescape_field,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

SECONDS_PER_DAY = 86400


def parse_time(token: str) -> int:
    """Epoch seconds from a decimal or ISO-8601 string."""
    if re.fullmatch(r"-?\d+", token):
        return int(token)
    stamp = datetime.fromisoformat(token.replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return int(stamp.timestamp())


@dataclass
class RunConfig:
    corpus: list[str]
    out: str
    shards: int = 16
    window_days: int = 730
    floor: int = 631152000  # 1990-01-01
    horizon: int | None = None  # default: scan time + 24h
    denylist: str | None = None
    metadata: str | None = None
    jobs: int = 0  # 0 -> cpu count
    seed: int = 0
    threshold: int = 1  # defork shared-commit threshold
    sort_run_size: int = 1_000_000
    tmp: str | None = None

    def validate(self) -> None:
        if not self.corpus:
            raise ConfigError("at least one --corpus directory is required")
        for root in self.corpus:
            if not Path(root).is_dir():
                raise ConfigError(f"corpus directory {root} does not exist")
        try:
            shard_count_bits(self.shards)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.window_days < 1:
            raise ConfigError("window-days must be >= 1")
        if self.horizon is not None and self.floor >= self.horizon:
            raise ConfigError("floor must precede horizon")
        if self.threshold < 1:
            raise ConfigError("threshold must be >= 1")
        if self.sort_run_size < 1:
            raise ConfigError("sort-run-size must be >= 1")

    @property
    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    @property
    def window_seconds(self) -> int:
        return self.window_days * SECONDS_PER_DAY

    def resolved_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return int(time_mod.time()) + SECONDS_PER_DAY

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def load_config_file(path: str) -> dict:
    """key=value lines; corpus may repeat or be comma separated."""
    values: dict = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line: {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "corpus":
            values.setdefault("corpus", []).extend(v for v in value.split(",") if v)
        else:
            values[key] = value
    return values


_INT_KEYS = {"shards", "window_days", "jobs", "seed", "threshold", "sort_run_size"}
_TIME_KEYS = {"floor", "horizon"}


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in (
        "corpus", "out", "shards", "window_days", "floor", "horizon",
        "denylist", "metadata", "jobs", "seed", "threshold", "sort_run_size",
    ):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    for key in _INT_KEYS & set(values):
        values[key] = int(values[key])
    for key in _TIME_KEYS & set(values):
        if isinstance(values[key], str):
            values[key] = parse_time(values[key])
    if "out" not in values:
        raise ConfigError("--out is required")
    values.setdefault("corpus", [])
    if isinstance(values["corpus"], str):
        values["corpus"] = [values["corpus"]]
    config = RunConfig(**values)
    config.tmp = os.environ.get("COPYTRACE_TMP", config.tmp)
    config.validate()
    return config


# --- repo discovery ---


def _is_repo(path: Path) -> bool:
    return (path / "objects").is_dir() or (path / ".git" / "objects").is_dir()


def discover_repos(roots: list[str]) -> dict[str, Path]:
    """Map repo id (path relative to its corpus root) to repo directory."""
    repos: dict[str, Path] = {}
    for root in roots:
        root_path = Path(root)
        if _is_repo(root_path):
            repos[root_path.name] = root_path
            continue
        stack = [root_path]
        while stack:
            current = stack.pop()
            for child in sorted(current.iterdir()):
                if not child.is_dir():
                    continue
                if _is_repo(child):
                    repos[child.relative_to(root_path).as_posix()] = child
                else:
                    stack.append(child)
    return repos


# --- scan ---


def _repo_digest(repo_path: Path) -> str:
    store = open_store(repo_path)
    refs = store.refs()
    text = "".join(f"{name}={oid.hex}\n" for name, oid in sorted(refs.items()))
    store.close()
    return hashlib.sha256(text.encode()).hexdigest()


def _scan_one(repo_id: str, repo_path: Path, config: RunConfig, horizon: int, tmp_dir: Path):
    store = open_store(repo_path)
    try:
        records, creations, nul_flags = extract_blob_creations(
            store, repo_id, floor=config.floor, horizon=horizon
        )
    finally:
        store.close()
    temp = tmp_dir / (hashlib.sha256(repo_id.encode()).hexdigest() + ".tsv")
    with open(temp, "w", encoding="utf-8", errors="surrogateescape") as out:
        for c in creations:
            out.write(
                f"{c.commit.hex}\t{c.blob}\t{c.time}\t{escape_field(c.path)}\t{c.size}\n"
            )
    commit_rows = [
        (r.id.hex, r.raw_time, r.effective_time, int(r.repaired), r.author)
        for r in sorted(records.values(), key=lambda r: r.id.hex)
    ]
    return repo_id, temp, commit_rows, nul_flags, len(creations)


def cmd_scan(config: RunConfig) -> dict:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    horizon = config.resolved_horizon()
    if config.floor >= horizon:
        raise ConfigError("floor must precede horizon")
    repos = discover_repos(config.corpus)
    shards_dir = out / "shards"
    if shards_dir.exists():
        shutil.rmtree(shards_dir)
    tmp_dir = out / "tmp-scan"
    if tmp_dir.exists():
        shutil.rmtree(tmp_dir)
    tmp_dir.mkdir(parents=True)

    results = {}
    digests = {}
    errors = []
    with ThreadPoolExecutor(max_workers=config.effective_jobs) as pool:
        futures = {
            repo_id: pool.submit(_scan_one, repo_id, path, config, horizon, tmp_dir)
            for repo_id, path in sorted(repos.items())
        }
        for repo_id in sorted(futures):
            try:
                results[repo_id] = futures[repo_id].result()
                digests[repo_id] = _repo_digest(repos[repo_id])
            except Exception as exc:
                errors.append((repo_id, exc))
    if errors:
        repo_id, exc = errors[0]
        raise CopytraceError(f"repository {repo_id}: {exc}") from exc

    # defork over the union of per-repo commit sets
    commit_to_repos: dict[str, list[str]] = {}
    for repo_id in sorted(results):
        for commit_hex, *_ in results[repo_id][2]:
            commit_to_repos.setdefault(commit_hex, []).append(repo_id)
    clusters = defork.build_clusters(sorted(results), commit_to_repos, config.threshold)
    clusters.write_tsv(out / "p2P.tsv")
    cluster_map = clusters.as_map()

    # join creations with projects and spill to shards, repo by repo
    shard_events([], config.shards, shards_dir)  # materialize every shard file
    n_events = 0
    nul_all: dict[str, bool] = {}
    for repo_id in sorted(results):
        _, temp, _, nul_flags, _ = results[repo_id]
        nul_all.update(nul_flags)
        creations = []
        with open(temp, encoding="utf-8", errors="surrogateescape") as src:
            for line in src:
                commit_hex, blob, when, path, size = line.rstrip("\n").split("\t")
                creations.append(
                    BlobCreation(
                        commit=ObjectId.from_hex(commit_hex),
                        blob=blob,
                        path=unescape_field(path),
                        time=int(when),
                        repo=repo_id,
                        size=int(size),
                    )
                )
        events = list(emit_events(creations, cluster_map))
        shard_events(events, config.shards, shards_dir)
        n_events += len(events)
    shutil.rmtree(tmp_dir)

    with open(out / "commits.tsv", "w", encoding="utf-8", errors="surrogateescape") as sink:
        for repo_id in sorted(results):
            for commit_hex, raw, eff, repaired, author in results[repo_id][2]:
                sink.write(
                    f"{escape_field(repo_id)}\t{commit_hex}\t{raw}\t{eff}\t{repaired}\t"
                    f"{escape_field(author)}\n"
                )
    with open(out / "blobmeta.tsv", "w") as sink:
        for blob in sorted(nul_all):
            sink.write(f"{blob}\t{int(nul_all[blob])}\n")

    manifest = {
        "config": asdict(config),
        "config_hash": config.digest(),
        "horizon": horizon,
        "repos": {r: {"digest": digests[r], "creations": results[r][4]} for r in sorted(results)},
        "n_repos": len(results),
        "n_projects": len(clusters),
        "n_events": n_events,
    }
    (out / "scan_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    (out / "run_config.json").write_text(
        json.dumps({"config": asdict(config), "hash": config.digest()}, indent=2, sort_keys=True)
        + "\n"
    )
    print(
        f"scan: {len(results)} repos, {len(clusters)} projects, {n_events} events",
        file=sys.stderr,
    )
    return manifest


# --- reuse ---


def _reuse_one(shard: int, config: RunConfig, out: Path, denylist: Denylist) -> tuple[int, int]:
    spill = out / "shards" / f"events.{shard:03d}.spill"
    sorted_path = out / "shards" / f"events.{shard:03d}.sorted"
    sort_shard(spill, sorted_path, run_size=config.sort_run_size, tmp_dir=config.tmp)
    n_rows = 0
    n_instances = 0
    b2tp_path = out / f"b2tP.{shard:03d}.tsv"
    reuse_path = out / f"reuse.{shard:03d}.tsv"
    with open(sorted_path, encoding="utf-8", errors="surrogateescape") as src, open(
        b2tp_path, "w", encoding="utf-8", errors="surrogateescape"
    ) as b2tp, open(reuse_path, "w", encoding="utf-8", errors="surrogateescape") as sink:

        def deduped():
            nonlocal n_rows
            for event in dedupe_first_per_project(src):
                b2tp.write(event_line(event))
                n_rows += 1
                yield event

        for inst in derive_reuse(deduped(), denylist):
            sink.write(instance_line(inst))
            n_instances += 1
    sorted_path.unlink()
    return n_rows, n_instances


def cmd_reuse(config: RunConfig) -> dict:
    out = Path(config.out)
    if not (out / "scan_manifest.json").exists():
        raise MissingStageOutput("run scan first: scan_manifest.json not found")
    for shard in range(config.shards):
        if not (out / "shards" / f"events.{shard:03d}.spill").exists():
            raise MissingStageOutput(f"shard spill {shard} missing; re-run scan")
    denylist = Denylist.load(config.denylist)
    counts = {}
    with ThreadPoolExecutor(max_workers=config.effective_jobs) as pool:
        futures = {
            shard: pool.submit(_reuse_one, shard, config, out, denylist)
            for shard in range(config.shards)
        }
        for shard, future in futures.items():
            counts[shard] = future.result()
    manifest = {
        "config_hash": config.digest(),
        "shards": {
            str(shard): {"events": n, "instances": m} for shard, (n, m) in sorted(counts.items())
        },
        "n_events": sum(n for n, _ in counts.values()),
        "n_instances": sum(m for _, m in counts.values()),
    }
    (out / "reuse_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(
        f"reuse: {manifest['n_events']} timeline rows, {manifest['n_instances']} instances",
        file=sys.stderr,
    )
    return manifest


# --- report ---


def _iter_b2tp(out: Path, shards: int):
    for shard in range(shards):
        path = out / f"b2tP.{shard:03d}.tsv"
        if not path.exists():
            raise MissingStageOutput(f"{path.name} missing; run reuse first")
        with open(path, encoding="utf-8", errors="surrogateescape") as src:
            for line in src:
                yield parse_event_line(line)


def _load_instances(out: Path, shards: int) -> list[timeline.ReuseInstance]:
    instances = []
    for shard in range(shards):
        path = out / f"reuse.{shard:03d}.tsv"
        if not path.exists():
            raise MissingStageOutput(f"{path.name} missing; run reuse first")
        with open(path, encoding="utf-8", errors="surrogateescape") as src:
            instances.extend(parse_instance_line(line) for line in src)
    return instances


def _project_stats(out: Path, cluster_map: dict[str, str]) -> dict[str, metrics.ProjectStats]:
    per_project: dict[str, dict] = {}
    with open(out / "commits.tsv", encoding="utf-8", errors="surrogateescape") as src:
        for line in src:
            repo, commit_hex, _raw, eff, _rep, author = line.rstrip("\n").split("\t")
            project = cluster_map[unescape_field(repo)]
            slot = per_project.setdefault(
                project, {"commits": set(), "authors": set(), "first": None, "last": None}
            )
            if commit_hex in slot["commits"]:
                continue
            slot["commits"].add(commit_hex)
            slot["authors"].add(unescape_field(author))
            eff_i = int(eff)
            slot["first"] = eff_i if slot["first"] is None else min(slot["first"], eff_i)
            slot["last"] = eff_i if slot["last"] is None else max(slot["last"], eff_i)
    return {
        project: metrics.ProjectStats(
            project=project,
            n_commits=len(slot["commits"]),
            n_authors=len(slot["authors"]),
            first_time=slot["first"],
            last_time=slot["last"],
        )
        for project, slot in per_project.items()
    }


def _load_metadata(path: str | None, cluster_map: dict[str, str]) -> dict[str, tuple[int, int]]:
    """Sidecar rows repo_id\\tstars\\tforks; per project take the member max."""
    if path is None:
        return {}
    out: dict[str, tuple[int, int]] = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        repo, stars, forks = line.split("\t")
        project = cluster_map.get(repo)
        if project is None:
            continue
        prev = out.get(project, (0, 0))
        out[project] = (max(prev[0], int(stars)), max(prev[1], int(forks)))
    return out


def _fit_section(design_builder, rows, horizon: int) -> dict:
    if not rows:
        return {"error": "InsufficientData: no rows in sample"}
    try:
        design = design_builder(rows, horizon)
        result = stats.fit_design(design)
        anova = stats.anova_sequential(design)
    except (ClassMissing, Singular) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    except Separation as exc:
        return {
            "error": f"Separation: {exc}",
            "partial": exc.result.as_dict() if exc.result else None,
        }
    return {
        "fit": result.as_dict(),
        "dropped_terms": design.dropped,
        "anova": [
            {
                "term": row.term,
                "df": row.df,
                "deviance_drop": row.deviance_drop,
                "resid_df": row.resid_df,
                "resid_deviance": row.resid_deviance,
                "p_value": None if row.term == "NULL" else row.p_value,
            }
            for row in anova
        ],
    }


def cmd_report(config: RunConfig) -> dict:
    out = Path(config.out)
    if not (out / "reuse_manifest.json").exists():
        raise MissingStageOutput("run reuse first: reuse_manifest.json not found")
    scan_manifest = json.loads((out / "scan_manifest.json").read_text())
    horizon = scan_manifest["horizon"]
    window = config.window_seconds
    report_dir = out / "report"
    report_dir.mkdir(exist_ok=True)
    warnings: list[str] = []

    denylist = Denylist.load(config.denylist)
    clusters = defork.Clusters.read_tsv(out / "p2P.tsv")
    cluster_map = clusters.as_map()

    # origin rows: first row of each blob group across ordered shards
    origin_rows: list[BlobEvent] = []
    projects_per_blob: dict[str, int] = {}
    current = None
    for event in _iter_b2tp(out, config.shards):
        projects_per_blob[event.blob] = projects_per_blob.get(event.blob, 0) + 1
        if event.blob != current:
            current = event.blob
            if event.blob not in denylist:
                origin_rows.append(event)
    instances = _load_instances(out, config.shards)

    nul_flags: dict[str, bool] = {}
    with open(out / "blobmeta.tsv") as src:
        for line in src:
            blob, flag = line.rstrip("\n").split("\t")
            nul_flags[blob] = flag == "1"

    flags = metrics.time_limited_flags(origin_rows, instances, window, horizon)
    blob_rows = metrics.blob_features(origin_rows, flags, nul_flags)
    project_stats = _project_stats(out, cluster_map)
    metadata = _load_metadata(config.metadata, cluster_map)
    project_rows = metrics.project_features(
        origin_rows, flags, nul_flags, project_stats, metadata
    )
    project_class = {
        row.project: metrics.size_class(row.n_commits, row.n_stars) for row in project_rows
    }

    series = metrics.reuse_ratio_series(origin_rows, instances)
    _write_csv(
        report_dir / "trends.csv",
        ["quarter", "created", "reused", "ratio"],
        [(q, c, r, f"{ratio:.6f}") for q, c, r, ratio in series],
    )

    propensity = metrics.propensity_by_language(blob_rows)
    project_propensity = metrics.project_propensity_by_language(project_rows)
    _write_csv(
        report_dir / "propensity.csv",
        ["mode", "language", "reused", "total", "ratio"],
        [
            ("blob", lang, reused, total, f"{ratio:.6f}")
            for lang, (reused, total, ratio) in propensity.items()
        ]
        + [
            ("project", lang, "", n, f"{ratio:.6f}")
            for lang, (ratio, n) in project_propensity.items()
        ],
    )

    table = metrics.contingency_table(instances, project_class)
    _write_csv(
        report_dir / "contingency.csv",
        ["origin_class"] + list(metrics.SIZE_CLASSES),
        [
            [row] + [table.get((row, col), 0) for col in metrics.SIZE_CLASSES]
            for row in metrics.SIZE_CLASSES
        ],
    )

    _write_csv(
        report_dir / "blob_features.csv",
        ["blob", "language", "creation_time", "is_binary", "size", "reused_within_window"],
        [
            (r.blob, r.language, r.creation_time, int(r.is_binary), r.size,
             int(r.reused_within_window))
            for r in blob_rows
        ],
    )

    metric_rows = []
    m_values = []
    m_by_language: dict[str, list[float]] = {}
    for row in project_rows:
        metric = metrics.normalized_binary_metric(row)
        if metric is not None:
            m_values.append(metric.m)
            m_by_language.setdefault(row.dominant_language, []).append(metric.m)
        metric_rows.append("" if metric is None else f"{metric.m:.6f}")
    _write_csv(
        report_dir / "project_features.csv",
        [
            "project", "n_blobs", "binary_ratio", "n_authors", "n_commits", "n_forks",
            "n_stars", "earliest_commit_time", "activity_months", "dominant_language",
            "has_reused_origin", "copied_count", "copied_binary_count", "binary_count",
            "size_class", "binary_reuse_m",
        ],
        [
            (
                r.project, r.n_blobs, f"{r.binary_ratio:.6f}", r.n_authors, r.n_commits,
                r.n_forks, r.n_stars, r.earliest_commit_time, r.activity_months,
                r.dominant_language, int(r.has_reused_origin), r.copied_count,
                r.copied_binary_count, r.binary_count, project_class[r.project], m,
            )
            for r, m in zip(project_rows, metric_rows)
        ],
    )

    # statistical models
    stats_doc = {
        "blob_model": _fit_section(stats.build_blob_design, blob_rows, horizon),
        "project_model": _fit_section(stats.build_project_design, project_rows, horizon),
        "spearman": stats.spearman_matrix(project_rows, horizon),
        "welch_size_tests": _size_tests(blob_rows),
        "binary_reuse_metric": {
            "mean": (sum(m_values) / len(m_values)) if m_values else None,
            "n_projects": len(m_values),
            "by_language": {
                lang: sum(vals) / len(vals) for lang, vals in sorted(m_by_language.items())
            },
        },
    }
    for section in ("blob_model", "project_model"):
        if "error" in stats_doc[section]:
            warnings.append(f"{section}: {stats_doc[section]['error']}")
    (report_dir / "stats.json").write_text(json.dumps(stats_doc, indent=2) + "\n")

    figures.write_trend_svg(series, report_dir / "trend.svg")
    figures.render_trend_figures(series, report_dir)

    reused_blobs = {inst.blob for inst in instances}
    n_projects = len(set(cluster_map.values()))
    summary = {
        "config_hash": config.digest(),
        "horizon": horizon,
        "window_days": config.window_days,
        "blobs_total": len(origin_rows),
        "blobs_reused": len(reused_blobs),
        "reuse_ratio": (len(reused_blobs) / len(origin_rows)) if origin_rows else 0.0,
        "blobs_reused_within_window": sum(flags.values()),
        "window_sample_size": len(flags),
        "instances": len(instances),
        "projects_total": n_projects,
        "originating_projects": len({i.origin_project for i in instances}),
        "destination_projects": len({i.dest_project for i in instances}),
        "counting_identity_ok": sum(
            n - 1 for blob, n in projects_per_blob.items() if blob not in denylist
        )
        == len(instances),
        "warnings": warnings,
    }
    (report_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for warning in warnings:
        print(f"report: warning: {warning}", file=sys.stderr)
    print(
        f"report: {summary['blobs_total']} blobs, {summary['instances']} instances, "
        f"{len(series)} quarters",
        file=sys.stderr,
    )
    return summary


def _size_tests(blob_rows) -> dict:
    """Welch t of reused vs non-reused sizes, binaries excluded, per language."""
    groups: dict[str, tuple[list[int], list[int]]] = {}
    for row in blob_rows:
        if row.is_binary:
            continue
        a, b = groups.setdefault(row.language, ([], []))
        (a if row.reused_within_window else b).append(row.size)
    overall_a = [s for a, _ in groups.values() for s in a]
    overall_b = [s for _, b in groups.values() for s in b]
    out = {}
    for name, (a, b) in [("(all)", (overall_a, overall_b))] + sorted(groups.items()):
        if len(a) < 2 or len(b) < 2:
            out[name] = {"error": "InsufficientData: need >= 2 sizes per group"}
            continue
        try:
            t, df, p = stats.welch_t(a, b)
        except DegenerateInput as exc:
            out[name] = {"error": f"DegenerateInput: {exc}"}
            continue
        out[name] = {"t": t, "df": df, "p": p, "n_reused": len(a), "n_other": len(b)}
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8", errors="surrogateescape") as sink:
        writer = csv.writer(sink)
        writer.writerow(header)
        writer.writerows(rows)


# --- entry point ---


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--corpus", action="append", help="corpus root (repeatable)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--shards", type=int, help="shard count, power of two in 1..256")
    parser.add_argument("--window-days", dest="window_days", type=int, help="reuse window")
    parser.add_argument("--floor", help="sanitization floor (ISO8601 or epoch)")
    parser.add_argument("--horizon", help="sanitization horizon (ISO8601 or epoch)")
    parser.add_argument("--denylist", help="file of blob hex ids to exclude")
    parser.add_argument("--metadata", help="stars/forks sidecar TSV")
    parser.add_argument("--jobs", type=int, help="worker count (default: CPUs)")
    parser.add_argument("--seed", type=int, help="recorded in the manifest")
    parser.add_argument("--threshold", type=int, help="defork shared-commit threshold")
    parser.add_argument(
        "--sort-run-size", dest="sort_run_size", type=int, help="external sort run size (rows)"
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="copytrace",
        description="Mine whole-file copy-based reuse across a corpus of git repositories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("scan", "extract blob creations, defork, spill event shards"),
        ("reuse", "sort shards, build b2tP timelines, derive reuse instances"),
        ("report", "compute metric tables, models and figures"),
    ):
        _add_common(sub.add_parser(name, help=help_text))

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_USAGE

    try:
        config = build_config(args)
        if args.command == "scan":
            cmd_scan(config)
        elif args.command == "reuse":
            cmd_reuse(config)
        else:
            cmd_report(config)
    except ConfigError as exc:
        print(f"copytrace: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CopytraceError as exc:
        print(f"copytrace: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - internal faults
        print(f"copytrace: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
