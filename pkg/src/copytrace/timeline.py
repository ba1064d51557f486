"""Blob timeline construction and reuse derivation.

Event rows spill to hash-sharded TSV files, each shard is externally sorted
with bounded memory, deduplicated to the first appearance per (blob,
project), and expanded into origin -> destination reuse instances.

Spill rows zero-pad the time column so that raw line comparison equals the
sort key (blob, time, project, repo, path, size); public TSVs carry plain
decimal seconds.
"""

from __future__ import annotations

import heapq
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ShardIOFailure, SpillSpaceExhausted, UnsortedInput

_TIME_PAD = 11  # fits every sanitized timestamp (< year 5000)

EMPTY_BLOB_HEX = "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"  # sha1("blob 0\0")


@dataclass(frozen=True)
class BlobEvent:
    """First-appearance record of a blob within one project."""

    blob: str  # 40-char hex
    time: int  # effective seconds since epoch
    project: str
    repo: str
    path: str
    size: int


@dataclass(frozen=True)
class ReuseInstance:
    blob: str
    origin_project: str
    origin_time: int
    dest_project: str
    dest_time: int
    ambiguous_origin: bool


class Denylist:
    """Blob ids excluded from reuse derivation; always contains the empty blob."""

    def __init__(self, extra: Iterable[str] = ()):
        self.ids = {EMPTY_BLOB_HEX} | set(extra)

    @classmethod
    def load(cls, path: str | Path | None) -> "Denylist":
        if path is None:
            return cls()
        ids = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                ids.append(line.lower())
        return cls(ids)

    def __contains__(self, blob_hex: str) -> bool:
        return blob_hex in self.ids

    def __len__(self) -> int:
        return len(self.ids)


def escape_field(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_field(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n"}.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def spill_line(event: BlobEvent) -> str:
    """Internal sortable row: padded time, escaped text fields."""
    return (
        f"{event.blob}\t{event.time:0{_TIME_PAD}d}\t{escape_field(event.project)}\t"
        f"{escape_field(event.repo)}\t{escape_field(event.path)}\t{event.size}\n"
    )


def event_line(event: BlobEvent) -> str:
    """Public TSV row: plain decimal time."""
    return (
        f"{event.blob}\t{event.time}\t{escape_field(event.project)}\t"
        f"{escape_field(event.repo)}\t{escape_field(event.path)}\t{event.size}\n"
    )


def parse_event_line(line: str) -> BlobEvent:
    blob, time, project, repo, path, size = line.rstrip("\n").split("\t")
    return BlobEvent(
        blob=blob,
        time=int(time),
        project=unescape_field(project),
        repo=unescape_field(repo),
        path=unescape_field(path),
        size=int(size),
    )


def instance_line(inst: ReuseInstance) -> str:
    return (
        f"{inst.blob}\t{escape_field(inst.origin_project)}\t{inst.origin_time}\t"
        f"{escape_field(inst.dest_project)}\t{inst.dest_time}\t"
        f"{1 if inst.ambiguous_origin else 0}\n"
    )


def parse_instance_line(line: str) -> ReuseInstance:
    blob, op, ot, dp, dt, amb = line.rstrip("\n").split("\t")
    return ReuseInstance(
        blob=blob,
        origin_project=unescape_field(op),
        origin_time=int(ot),
        dest_project=unescape_field(dp),
        dest_time=int(dt),
        ambiguous_origin=amb == "1",
    )


# --- sharding ---


def shard_count_bits(n_shards: int) -> int:
    if n_shards < 1 or n_shards > 256 or n_shards & (n_shards - 1):
        raise ValueError(f"n_shards must be a power of two in 1..256, got {n_shards}")
    return n_shards.bit_length() - 1


def shard_index(blob_hex: str, n_shards: int) -> int:
    """Leading bits of the blob hash select the shard."""
    bits = shard_count_bits(n_shards)
    return int(blob_hex[:2], 16) >> (8 - bits) if bits else 0


def shard_events(
    events: Iterable[BlobEvent], n_shards: int, out_dir: str | Path, prefix: str = "events"
) -> list[Path]:
    """Append events to per-shard spill files; returns the shard paths."""
    bits = shard_count_bits(n_shards)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / f"{prefix}.{i:03d}.spill" for i in range(n_shards)]
    try:
        handles = [open(p, "a", encoding="utf-8", errors="surrogateescape") for p in paths]
        try:
            for event in events:
                shard = int(event.blob[:2], 16) >> (8 - bits) if bits else 0
                handles[shard].write(spill_line(event))
        finally:
            for handle in handles:
                handle.close()
    except OSError as exc:
        raise ShardIOFailure(str(exc)) from exc
    return paths


# --- external sort ---


def sort_shard(
    in_path: str | Path,
    out_path: str | Path,
    run_size: int | None = 1_000_000,
    tmp_dir: str | Path | None = None,
) -> None:
    """External merge sort of a spill file by raw line order.

    run_size bounds the number of lines held in memory at once; None sorts
    entirely in memory (the oracle path for transparency checks).
    """
    in_path, out_path = Path(in_path), Path(out_path)
    if run_size is None:
        lines = in_path.read_text(encoding="utf-8", errors="surrogateescape").splitlines(
            keepends=True
        )
        lines.sort()
        _write_all(out_path, lines)
        return

    runs: list[Path] = []
    tmp_root = Path(tmp_dir) if tmp_dir else out_path.parent
    try:
        with open(in_path, encoding="utf-8", errors="surrogateescape") as src:
            while True:
                chunk = list(_take(src, run_size))
                if not chunk:
                    break
                chunk.sort()
                fd, name = tempfile.mkstemp(prefix="run.", suffix=".tmp", dir=tmp_root)
                with os.fdopen(fd, "w", encoding="utf-8", errors="surrogateescape") as run:
                    run.writelines(chunk)
                runs.append(Path(name))
        if len(runs) <= 1:
            if runs:
                runs[0].replace(out_path)
            else:
                out_path.write_text("")
            return
        handles = [open(r, encoding="utf-8", errors="surrogateescape") for r in runs]
        try:
            _write_all(out_path, heapq.merge(*handles))
        finally:
            for handle in handles:
                handle.close()
    except OSError as exc:
        raise SpillSpaceExhausted(f"external sort failed: {exc}") from exc
    finally:
        for run in runs:
            run.unlink(missing_ok=True)


def _take(handle, n: int) -> list[str]:
    lines = []
    for line in handle:
        lines.append(line)
        if len(lines) >= n:
            break
    return lines


def _write_all(path: Path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", errors="surrogateescape") as out:
        out.writelines(lines)


# --- dedup and reuse derivation ---


def dedupe_first_per_project(sorted_lines: Iterable[str]) -> Iterator[BlobEvent]:
    """Keep the first row per (blob, project) from a sorted spill stream.

    The stream is sorted by (blob, time, ...), so the first row seen for a
    project within a blob group carries the minimal time (ties already
    resolved by repo then path order).
    """
    prev = ""
    current_blob = None
    seen_projects: set[str] = set()
    for line in sorted_lines:
        if line < prev:
            raise UnsortedInput(f"row out of order: {line!r} after {prev!r}")
        prev = line
        event = parse_event_line(line)
        if event.blob != current_blob:
            current_blob = event.blob
            seen_projects = set()
        if event.project in seen_projects:
            continue
        seen_projects.add(event.project)
        yield event


def derive_reuse(
    events: Iterable[BlobEvent], denylist: Denylist
) -> Iterator[ReuseInstance]:
    """Fan out from each blob's origin to every later project.

    Input must be the deduplicated stream in sorted order; blobs present in
    only one project emit nothing, denylisted blobs are skipped.
    """
    origin: BlobEvent | None = None
    ambiguous = False
    prev_key: tuple[str, int, str] | None = None
    for event in events:
        key = (event.blob, event.time, event.project)
        if prev_key is not None and key < prev_key:
            raise UnsortedInput(f"event out of order: {key} after {prev_key}")
        prev_key = key
        if origin is None or event.blob != origin.blob:
            origin = event
            ambiguous = False
            continue
        if event.blob in denylist:
            continue
        if event.time == origin.time:
            ambiguous = True
        yield ReuseInstance(
            blob=event.blob,
            origin_project=origin.project,
            origin_time=origin.time,
            dest_project=event.project,
            dest_time=event.time,
            ambiguous_origin=ambiguous,
        )
