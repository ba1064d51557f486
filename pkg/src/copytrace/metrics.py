"""Descriptive reuse measures.

Language and binary classification of blobs, quarterly trend series,
time-limited reuse flags, per-language propensities, the project size
taxonomy with its contingency table, project feature rows, and the
normalized binary-reuse metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import WindowExceedsCorpusSpan
from .timeline import BlobEvent, ReuseInstance

LANGUAGE_TAGS = (
    "C", "CSharp", "Go", "JavaScript", "Kotlin", "ObjectiveC", "Python", "R",
    "Rust", "Scala", "TypeScript", "Java", "PHP", "Perl", "Ruby", "Other",
)

_EXTENSION_MAP = {
    ".c": "C", ".h": "C",
    ".cs": "CSharp",
    ".go": "Go",
    ".js": "JavaScript", ".mjs": "JavaScript",
    ".kt": "Kotlin",
    ".m": "ObjectiveC", ".mm": "ObjectiveC",
    ".py": "Python",
    ".r": "R",
    ".rs": "Rust",
    ".scala": "Scala",
    ".ts": "TypeScript", ".tsx": "TypeScript",
    ".java": "Java",
    ".php": "PHP",
    ".pl": "Perl", ".pm": "Perl",
    ".rb": "Ruby",
}

_BINARY_EXTENSIONS = {
    ".jpg", ".jpeg", ".png", ".gif", ".zip", ".tar", ".gz", ".pdf", ".jar",
    ".class", ".so", ".dll", ".exe", ".ico", ".woff", ".ttf",
}

BINARY_SNIFF_BYTES = 8000

SECONDS_PER_DAY = 86400
DEFAULT_WINDOW_DAYS = 730


def _extension(path: str) -> str:
    name = path.rsplit("/", 1)[-1]
    dot = name.rfind(".")
    return name[dot:].lower() if dot > 0 else ""


def classify_language(path: str) -> str:
    """Map a file path to a language tag by extension (unknown -> Other)."""
    return _EXTENSION_MAP.get(_extension(path), "Other")


def has_nul_prefix(payload: bytes) -> bool:
    """Git's binary heuristic: a NUL byte within the first 8000 bytes."""
    return b"\x00" in payload[:BINARY_SNIFF_BYTES]


def classify_binary(payload: bytes, path: str) -> bool:
    """Binary if the content sniff fires or the extension is a known binary kind."""
    return has_nul_prefix(payload) or _extension(path) in _BINARY_EXTENSIONS


def is_binary(nul_flag: bool, path: str) -> bool:
    """classify_binary when only the precomputed NUL sniff is at hand."""
    return nul_flag or _extension(path) in _BINARY_EXTENSIONS


def quarter_of(epoch: int) -> str:
    stamp = datetime.fromtimestamp(epoch, tz=timezone.utc)
    return f"{stamp.year}Q{(stamp.month - 1) // 3 + 1}"


def reuse_ratio_series(
    origin_events: list[BlobEvent], instances: list[ReuseInstance]
) -> list[tuple[str, int, int, float]]:
    """Quarterly (quarter, created, reused, ratio) over blob-origin rows.

    origin_events must hold exactly one row per blob (its first appearance);
    a blob counts as reused if it has any reuse instance, without a window.
    """
    reused_blobs = {inst.blob for inst in instances}
    counts: dict[str, list[int]] = {}
    for event in origin_events:
        bucket = counts.setdefault(quarter_of(event.time), [0, 0])
        bucket[0] += 1
        if event.blob in reused_blobs:
            bucket[1] += 1
    return [
        (quarter, created, reused, reused / created)
        for quarter, (created, reused) in sorted(counts.items())
    ]


def time_limited_flags(
    origin_events: list[BlobEvent],
    instances: list[ReuseInstance],
    window: int = DEFAULT_WINDOW_DAYS * SECONDS_PER_DAY,
    horizon: int | None = None,
) -> dict[str, bool]:
    """Per-blob reused-within-window flags.

    Only blobs created no later than horizon - window are eligible; later
    blobs are excluded from the returned sample entirely.
    """
    if horizon is None:
        raise WindowExceedsCorpusSpan("horizon required to bound the window")
    if origin_events:
        start = min(e.time for e in origin_events)
        if horizon - window < start:
            raise WindowExceedsCorpusSpan(
                f"horizon-window={horizon - window} precedes corpus start {start}"
            )
    cutoff = horizon - window
    flags = {e.blob: False for e in origin_events if e.time <= cutoff}
    for inst in instances:
        if inst.blob in flags and inst.dest_time - inst.origin_time <= window:
            flags[inst.blob] = True
    return flags


@dataclass(frozen=True)
class BlobFeatureRow:
    """Regression-ready blob-level features (the model sample)."""

    blob: str
    language: str
    creation_time: int
    is_binary: bool
    size: int
    reused_within_window: bool


def blob_features(
    origin_events: list[BlobEvent],
    flags: dict[str, bool],
    nul_flags: dict[str, bool],
) -> list[BlobFeatureRow]:
    """One feature row per eligible blob, language/binary from the origin path."""
    rows = []
    for event in origin_events:
        if event.blob not in flags:
            continue
        rows.append(
            BlobFeatureRow(
                blob=event.blob,
                language=classify_language(event.path),
                creation_time=event.time,
                is_binary=is_binary(nul_flags.get(event.blob, False), event.path),
                size=event.size,
                reused_within_window=flags[event.blob],
            )
        )
    return rows


def propensity_by_language(rows: list[BlobFeatureRow]) -> dict[str, tuple[int, int, float]]:
    """Blob-level propensity: language -> (reused, total, ratio); empty languages omitted."""
    counts: dict[str, list[int]] = {}
    for row in rows:
        bucket = counts.setdefault(row.language, [0, 0])
        bucket[1] += 1
        if row.reused_within_window:
            bucket[0] += 1
    return {
        lang: (reused, total, reused / total)
        for lang, (reused, total) in sorted(counts.items())
    }


def size_class(commits: int, stars: int) -> str:
    """Project taxonomy: Big needs both activity and popularity, Small neither."""
    if commits > 100 and stars > 10:
        return "Big"
    if stars == 0 and commits < 10:
        return "Small"
    return "Medium"


_CLASS_RANK = {"Small": 0, "Medium": 1, "Big": 2}
SIZE_CLASSES = ("Big", "Medium", "Small")


def contingency_table(
    instances: list[ReuseInstance], project_class: dict[str, str]
) -> dict[tuple[str, str], int]:
    """3x3 blob counts: origin class x biggest downstream class, one per blob."""
    dests: dict[str, list[str]] = {}
    origins: dict[str, str] = {}
    for inst in instances:
        origins[inst.blob] = inst.origin_project
        dests.setdefault(inst.blob, []).append(inst.dest_project)
    table: dict[tuple[str, str], int] = {}
    for blob, dest_projects in dests.items():
        row = project_class[origins[blob]]
        col = max((project_class[d] for d in dest_projects), key=_CLASS_RANK.__getitem__)
        table[(row, col)] = table.get((row, col), 0) + 1
    return table


@dataclass(frozen=True)
class ProjectStats:
    """Per-project commit aggregates (commits deduped across fork members)."""

    project: str
    n_commits: int
    n_authors: int
    first_time: int
    last_time: int


@dataclass(frozen=True)
class ProjectFeatureRow:
    project: str
    n_blobs: int
    binary_ratio: float
    n_authors: int
    n_commits: int
    n_forks: int
    n_stars: int
    earliest_commit_time: int
    activity_months: int
    dominant_language: str
    has_reused_origin: bool
    copied_count: int
    copied_binary_count: int
    binary_count: int


def project_features(
    origin_events: list[BlobEvent],
    flags: dict[str, bool],
    nul_flags: dict[str, bool],
    stats: dict[str, ProjectStats],
    metadata: dict[str, tuple[int, int]] | None = None,
) -> list[ProjectFeatureRow]:
    """Aggregate origin rows into one feature row per project.

    metadata maps project -> (stars, forks); missing projects default to 0.
    Copied counts use the window flags; blobs outside the flag sample count
    toward totals but can never be copied.
    """
    metadata = metadata or {}
    by_project: dict[str, list[BlobEvent]] = {p: [] for p in stats}
    for event in origin_events:
        by_project.setdefault(event.project, []).append(event)

    rows = []
    for project in sorted(by_project):
        events = by_project[project]
        total = len(events)
        lang_counts: dict[str, int] = {}
        binary_count = 0
        copied = 0
        copied_binary = 0
        for event in events:
            lang_counts[classify_language(event.path)] = (
                lang_counts.get(classify_language(event.path), 0) + 1
            )
            binary = is_binary(nul_flags.get(event.blob, False), event.path)
            binary_count += binary
            if flags.get(event.blob, False):
                copied += 1
                copied_binary += binary
        dominant = "Other"
        if lang_counts:
            top = max(lang_counts.values())
            dominant = min(lang for lang, n in lang_counts.items() if n == top)
        stars, forks = metadata.get(project, (0, 0))
        st = stats[project]
        months = max(1, -((st.last_time - st.first_time) // -(30 * SECONDS_PER_DAY)))
        rows.append(
            ProjectFeatureRow(
                project=project,
                n_blobs=total,
                binary_ratio=(binary_count / total) if total else 0.0,
                n_authors=st.n_authors,
                n_commits=st.n_commits,
                n_forks=forks,
                n_stars=stars,
                earliest_commit_time=st.first_time,
                activity_months=months,
                dominant_language=dominant,
                has_reused_origin=copied > 0,
                copied_count=copied,
                copied_binary_count=copied_binary,
                binary_count=binary_count,
            )
        )
    return rows


def project_propensity_by_language(
    rows: list[ProjectFeatureRow],
) -> dict[str, tuple[float, int]]:
    """Project-level propensity: mean per-project copied ratio by dominant language."""
    per_lang: dict[str, list[float]] = {}
    for row in rows:
        if row.n_blobs == 0:
            continue
        per_lang.setdefault(row.dominant_language, []).append(row.copied_count / row.n_blobs)
    return {
        lang: (sum(vals) / len(vals), len(vals)) for lang, vals in sorted(per_lang.items())
    }


@dataclass(frozen=True)
class NormalizedBinaryMetric:
    """m = (cbc/cc) / (bc/c): binary share among copied blobs vs overall."""

    cbc: int
    cc: int
    bc: int
    c: int

    @property
    def cbr(self) -> float:
        return self.cbc / self.cc

    @property
    def br(self) -> float:
        return self.bc / self.c

    @property
    def m(self) -> float:
        return self.cbr / self.br


def normalized_binary_metric(row: ProjectFeatureRow) -> NormalizedBinaryMetric | None:
    """The project's metric, or None when undefined (cc = 0 or bc = 0)."""
    if row.copied_count == 0 or row.binary_count == 0:
        return None
    return NormalizedBinaryMetric(
        cbc=row.copied_binary_count,
        cc=row.copied_count,
        bc=row.binary_count,
        c=row.n_blobs,
    )
