"""Commit history extraction: sanitized timestamps and blob-creation events.

A blob is created by a commit when it appears in the commit's tree but in
none of its parents' trees (set difference over all parents, so renames do
not count).  Commit times are repaired so that history is monotone and
bounded to a sane range before any timeline work happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CycleDetected, UnmappedRepository
from .gitstore import CommitHeader, ObjectId, ObjectStore, parse_commit, parse_tag_target, walk_tree
from .metrics import has_nul_prefix
from .timeline import BlobEvent

# defaults for the sanitization range; horizon is normally the scan time + 24h
FLOOR_DEFAULT = 631152000  # 1990-01-01T00:00:00Z, predates git itself


@dataclass(frozen=True)
class CommitRecord:
    """A commit with raw and repaired (effective) committer times."""

    id: ObjectId
    tree: ObjectId
    parents: tuple[ObjectId, ...]
    raw_time: int
    effective_time: int
    repaired: bool
    author: str


@dataclass(frozen=True)
class BlobCreation:
    """One blob newly introduced by one commit of one repository."""

    commit: ObjectId
    blob: str  # hex
    path: str  # lexicographically smallest path introducing the blob
    time: int  # effective time of the creating commit
    repo: str
    size: int


def sanitize_timestamps(
    commits: dict[ObjectId, CommitHeader], floor: int, horizon: int
) -> dict[ObjectId, CommitRecord]:
    """Repair committer times to be in-range and monotone along parent edges.

    Out-of-range raw times are replaced by the max parent effective time
    (floor for roots); each effective time is then clamped up to its parents'
    maximum, processing in topological order.
    """
    if floor >= horizon:
        raise ValueError("floor must precede horizon")
    indegree = {cid: 0 for cid in commits}
    children: dict[ObjectId, list[ObjectId]] = {cid: [] for cid in commits}
    for cid, header in commits.items():
        for parent in header.parents:
            if parent in commits:
                indegree[cid] += 1
                children[parent].append(cid)

    queue = sorted(cid for cid, deg in indegree.items() if deg == 0)
    records: dict[ObjectId, CommitRecord] = {}
    while queue:
        cid = queue.pop()
        header = commits[cid]
        raw = header.committer_time
        parent_eff = [
            records[p].effective_time for p in header.parents if p in records
        ]
        value = raw
        if not (floor <= value <= horizon):
            value = max(parent_eff) if parent_eff else floor
        if parent_eff:
            value = max(value, max(parent_eff))
        records[cid] = CommitRecord(
            id=cid,
            tree=header.tree,
            parents=header.parents,
            raw_time=raw,
            effective_time=value,
            repaired=value != raw,
            author=header.author,
        )
        for child in children[cid]:
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if len(records) != len(commits):
        raise CycleDetected(f"{len(commits) - len(records)} commits form a cycle")
    return records


def reachable_commits(store: ObjectStore) -> dict[ObjectId, CommitHeader]:
    """All commits reachable from any ref (branches and tags, tags peeled)."""
    headers: dict[ObjectId, CommitHeader] = {}
    stack = []
    for oid in store.refs().values():
        obj = store.read(oid)
        while obj.kind == "tag":
            oid, _ = parse_tag_target(obj)
            obj = store.read(oid)
        if obj.kind == "commit":
            stack.append((oid, obj))
    while stack:
        oid, obj = stack.pop()
        if oid in headers:
            continue
        header = parse_commit(obj)
        headers[oid] = header
        for parent in header.parents:
            if parent not in headers:
                stack.append((parent, store.read(parent)))
    return headers


def extract_blob_creations(
    store: ObjectStore,
    repo_id: str,
    floor: int = FLOOR_DEFAULT,
    horizon: int | None = None,
) -> tuple[dict[ObjectId, CommitRecord], list[BlobCreation], dict[str, bool]]:
    """Extract every blob creation reachable from the repo's refs.

    Returns (sanitized commit records, creations in deterministic order,
    blob -> NUL-sniff flag for newly seen blobs).
    """
    if horizon is None:
        raise ValueError("horizon required")
    headers = reachable_commits(store)
    records = sanitize_timestamps(headers, floor, horizon)

    tree_cache: dict[ObjectId, frozenset[tuple[str, str]]] = {}

    def tree_listing(tree_id: ObjectId) -> frozenset[tuple[str, str]]:
        cached = tree_cache.get(tree_id)
        if cached is None:
            cached = frozenset((p, oid.hex) for p, oid in walk_tree(store, tree_id))
            tree_cache[tree_id] = cached
        return cached

    creations: list[BlobCreation] = []
    nul_flags: dict[str, bool] = {}
    sizes: dict[str, int] = {}
    for cid in sorted(records, key=lambda c: (records[c].effective_time, c.hex)):
        record = records[cid]
        listing = tree_listing(record.tree)
        blobs_here = {blob for _, blob in listing}
        inherited: set[str] = set()
        for parent in record.parents:
            inherited |= {blob for _, blob in tree_listing(records[parent].tree)}
        created = blobs_here - inherited
        if not created:
            continue
        first_path: dict[str, str] = {}
        for path, blob in listing:
            if blob in created and (blob not in first_path or path < first_path[blob]):
                first_path[blob] = path
        for blob in sorted(created):
            if blob not in sizes:
                payload = store.read(ObjectId.from_hex(blob)).payload
                sizes[blob] = len(payload)
                nul_flags[blob] = has_nul_prefix(payload)
            creations.append(
                BlobCreation(
                    commit=cid,
                    blob=blob,
                    path=first_path[blob],
                    time=record.effective_time,
                    repo=repo_id,
                    size=sizes[blob],
                )
            )
    return records, creations, nul_flags


def emit_events(
    creations: Iterable[BlobCreation], cluster_map: dict[str, str]
) -> Iterator[BlobEvent]:
    """Join creations with the defork map into raw timeline events."""
    for creation in creations:
        project = cluster_map.get(creation.repo)
        if project is None:
            raise UnmappedRepository(creation.repo)
        yield BlobEvent(
            blob=creation.blob,
            time=creation.time,
            project=project,
            repo=creation.repo,
            path=creation.path,
            size=creation.size,
        )
