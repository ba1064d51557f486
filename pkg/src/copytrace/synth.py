"""Deterministic git corpus generator and brute-force oracle.

Corpora are described by a line-oriented script (grammar below), written to
disk as plain loose-object repositories, and independently evaluated by a
quadratic oracle that recomputes every pipeline product from the script
alone.  The oracle shares no code with the shard/sort/merge machinery.

Script grammar, one directive per line ('#' starts a comment):

    repo <id>
    commit <label> time=<iso8601|epoch> [parent=<label>]... [author=<name>]
    file <path> <<EOF
    <content lines>
    EOF
    binfile <path> <hex-bytes>
    fork <new-id> from <repo>@<label>
    meta <repo> stars=<n> forks=<n>
    expect-cluster <repo> <repo>...

A commit's file/binfile directives give its complete tree.  Commit labels
are globally unique and double as the commit message, so distinct labels
always hash to distinct commits while forked repositories share commit ids
verbatim.
"""

from __future__ import annotations

import hashlib
import random
import re
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import DirNotEmpty, ScriptInvalid

_REPO_ID = re.compile(r"^[A-Za-z0-9_.-]+$")
_AUTHOR_DEFAULT = "Synth <synth@example.invalid>"

EMPTY_BLOB_HEX = hashlib.sha1(b"blob 0\x00").hexdigest()


@dataclass
class ScriptCommit:
    label: str
    repo: str
    time: int
    parents: tuple[str, ...]
    author: str
    files: dict[str, bytes] = field(default_factory=dict)


@dataclass
class CorpusScript:
    repos: dict[str, list[str]]  # repo id -> commit labels, definition order
    commits: dict[str, ScriptCommit]
    meta: dict[str, tuple[int, int]]  # repo id -> (stars, forks)
    expected_clusters: list[frozenset[str]]
    text: str


def _parse_time(token: str) -> int:
    if re.fullmatch(r"-?\d+", token):
        return int(token)
    try:
        stamp = datetime.fromisoformat(token.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ScriptInvalid(f"unparseable time {token!r}") from exc
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return int(stamp.timestamp())


def parse_script(text: str) -> CorpusScript:
    """Parse and validate a corpus script."""
    repos: dict[str, list[str]] = {}
    commits: dict[str, ScriptCommit] = {}
    meta: dict[str, tuple[int, int]] = {}
    expected: list[frozenset[str]] = []
    current_repo: str | None = None
    current_commit: ScriptCommit | None = None

    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        word = tokens[0]

        if word == "repo":
            if len(tokens) != 2 or not _REPO_ID.match(tokens[1]):
                raise ScriptInvalid(f"bad repo directive: {line}")
            if tokens[1] in repos:
                raise ScriptInvalid(f"repo {tokens[1]} redefined")
            repos[tokens[1]] = []
            current_repo = tokens[1]
            current_commit = None

        elif word == "commit":
            if current_repo is None:
                raise ScriptInvalid("commit before any repo directive")
            if len(tokens) < 3:
                raise ScriptInvalid(f"bad commit directive: {line}")
            label = tokens[1]
            if label in commits:
                raise ScriptInvalid(f"commit label {label} reused")
            time = None
            parents: list[str] = []
            author = _AUTHOR_DEFAULT
            for tok in tokens[2:]:
                key, _, value = tok.partition("=")
                if key == "time":
                    time = _parse_time(value)
                elif key == "parent":
                    parents.append(value)
                elif key == "author":
                    author = f"{value} <{value.lower()}@example.invalid>"
                else:
                    raise ScriptInvalid(f"unknown commit attribute {tok!r}")
            if time is None:
                raise ScriptInvalid(f"commit {label} missing time=")
            for parent in parents:
                if parent not in repos[current_repo]:
                    raise ScriptInvalid(f"commit {label}: parent {parent} not in {current_repo}")
            current_commit = ScriptCommit(label, current_repo, time, tuple(parents), author)
            commits[label] = current_commit
            repos[current_repo].append(label)

        elif word == "file":
            if current_commit is None:
                raise ScriptInvalid("file outside a commit")
            if len(tokens) != 3 or tokens[2] != "<<EOF":
                raise ScriptInvalid(f"bad file directive: {line}")
            body: list[str] = []
            while i < len(lines) and lines[i] != "EOF":
                body.append(lines[i])
                i += 1
            if i == len(lines):
                raise ScriptInvalid(f"file {tokens[1]}: unterminated heredoc")
            i += 1  # consume EOF
            content = ("\n".join(body) + "\n").encode() if body else b""
            current_commit.files[tokens[1]] = content

        elif word == "binfile":
            if current_commit is None:
                raise ScriptInvalid("binfile outside a commit")
            if len(tokens) != 3:
                raise ScriptInvalid(f"bad binfile directive: {line}")
            try:
                current_commit.files[tokens[1]] = bytes.fromhex(tokens[2])
            except ValueError as exc:
                raise ScriptInvalid(f"binfile {tokens[1]}: bad hex") from exc

        elif word == "fork":
            if len(tokens) != 4 or tokens[2] != "from" or "@" not in tokens[3]:
                raise ScriptInvalid(f"bad fork directive: {line}")
            new_id = tokens[1]
            src, _, at = tokens[3].partition("@")
            if not _REPO_ID.match(new_id) or new_id in repos:
                raise ScriptInvalid(f"bad fork target {new_id}")
            if src not in repos:
                raise ScriptInvalid(f"fork source repo {src} unknown")
            if at not in repos[src]:
                raise ScriptInvalid(f"fork source commit {at} not in {src}")
            inherited = _ancestors(at, commits, repos[src])
            repos[new_id] = inherited
            current_repo = new_id
            current_commit = None

        elif word == "meta":
            if len(tokens) != 4:
                raise ScriptInvalid(f"bad meta directive: {line}")
            repo = tokens[1]
            if repo not in repos:
                raise ScriptInvalid(f"meta for unknown repo {repo}")
            stars = forks = 0
            for tok in tokens[2:]:
                key, _, value = tok.partition("=")
                if key == "stars":
                    stars = int(value)
                elif key == "forks":
                    forks = int(value)
                else:
                    raise ScriptInvalid(f"unknown meta attribute {tok!r}")
            meta[repo] = (stars, forks)

        elif word == "expect-cluster":
            members = tokens[1:]
            for repo in members:
                if repo not in repos:
                    raise ScriptInvalid(f"expect-cluster names unknown repo {repo}")
            expected.append(frozenset(members))

        else:
            raise ScriptInvalid(f"unknown directive: {line}")

    return CorpusScript(repos, commits, meta, expected, text)


def _ancestors(label: str, commits: dict[str, ScriptCommit], order: list[str]) -> list[str]:
    """Labels reachable from `label` via parents, in definition order."""
    keep = set()
    stack = [label]
    while stack:
        cur = stack.pop()
        if cur in keep:
            continue
        keep.add(cur)
        stack.extend(commits[cur].parents)
    return [lbl for lbl in order if lbl in keep]


# --- object construction (independent of gitstore) ---


def _object_bytes(kind: str, payload: bytes) -> tuple[str, bytes]:
    store = b"%s %d\x00" % (kind.encode(), len(payload)) + payload
    return hashlib.sha1(store).hexdigest(), store


def _tree_objects(files: dict[str, bytes]) -> tuple[str, dict[str, bytes]]:
    """Build nested tree objects for a path->content map.

    Returns (root tree hex, {hex: stored object bytes}) including blobs.
    """
    objects: dict[str, bytes] = {}

    def build(prefix_files: dict[str, bytes]) -> str:
        entries = []  # (sort key, mode bytes, name, raw sha)
        subdirs: dict[str, dict[str, bytes]] = {}
        for path, content in prefix_files.items():
            head, sep, rest = path.partition("/")
            if sep:
                subdirs.setdefault(head, {})[rest] = content
            else:
                hex_id, store = _object_bytes("blob", content)
                objects[hex_id] = store
                entries.append((head.encode(), b"100644", head.encode(), bytes.fromhex(hex_id)))
        for name, sub in subdirs.items():
            sub_hex = build(sub)
            # git sorts directory names as if followed by '/'
            entries.append((name.encode() + b"/", b"40000", name.encode(), bytes.fromhex(sub_hex)))
        entries.sort(key=lambda e: e[0])
        payload = b"".join(mode + b" " + name + b"\x00" + sha for _, mode, name, sha in entries)
        hex_id, store = _object_bytes("tree", payload)
        objects[hex_id] = store
        return hex_id

    root = build(dict(files))
    return root, objects


def build_objects(script: CorpusScript) -> tuple[dict[str, str], dict[str, bytes]]:
    """Materialize every commit once.

    Returns (label -> commit hex, hex -> stored object bytes for the whole
    script).  Forked repositories reuse the defining repo's bytes, so shared
    labels share ids.
    """
    all_objects: dict[str, bytes] = {}
    commit_ids: dict[str, str] = {}
    for repo, labels in script.repos.items():
        for label in labels:
            if label in commit_ids:
                continue
            commit = script.commits[label]
            tree_hex, objs = _tree_objects(commit.files)
            all_objects.update(objs)
            lines = [b"tree " + tree_hex.encode()]
            for parent in commit.parents:
                lines.append(b"parent " + commit_ids[parent].encode())
            stamp = b"%s %d +0000" % (commit.author.encode(), commit.time)
            lines.append(b"author " + stamp)
            lines.append(b"committer " + stamp)
            payload = b"\n".join(lines) + b"\n\n" + label.encode() + b"\n"
            hex_id, store = _object_bytes("commit", payload)
            commit_ids[label] = hex_id
            all_objects[hex_id] = store
    return commit_ids, all_objects


_GIT_CONFIG = "[core]\n\trepositoryformatversion = 0\n\tfilemode = true\n\tbare = true\n"


def generate(script: CorpusScript, out_dir: str | Path) -> dict[str, Path]:
    """Write the script's repositories under out_dir as bare loose repos."""
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()):
        raise DirNotEmpty(f"{out} is not empty")
    out.mkdir(parents=True, exist_ok=True)
    commit_ids, objects = build_objects(script)

    repo_paths: dict[str, Path] = {}
    for repo, labels in script.repos.items():
        repo_dir = out / repo
        (repo_dir / "objects" / "pack").mkdir(parents=True)
        (repo_dir / "refs" / "heads").mkdir(parents=True)
        # every object reachable from the repo's commits, walked by stored bytes
        needed: set[str] = set()
        stack = [commit_ids[label] for label in labels]
        while stack:
            hex_id = stack.pop()
            if hex_id in needed:
                continue
            needed.add(hex_id)
            kind, _, payload = objects[hex_id].partition(b"\x00")
            if kind.startswith(b"commit"):
                stack.append(payload[5:45].decode())
            elif kind.startswith(b"tree"):
                pos = 0
                while pos < len(payload):
                    nul = payload.index(b"\x00", pos)
                    stack.append(payload[nul + 1 : nul + 21].hex())
                    pos = nul + 21
        for hex_id in sorted(needed):
            path = repo_dir / "objects" / hex_id[:2] / hex_id[2:]
            path.parent.mkdir(exist_ok=True)
            path.write_bytes(zlib.compress(objects[hex_id], 1))

        has_child = {p for label in labels for p in script.commits[label].parents}
        leaves = [label for label in labels if label not in has_child]
        for leaf in leaves:
            (repo_dir / "refs" / "heads" / leaf).write_text(commit_ids[leaf] + "\n")
        (repo_dir / "HEAD").write_text(f"ref: refs/heads/{leaves[-1]}\n")
        (repo_dir / "config").write_text(_GIT_CONFIG)
        repo_paths[repo] = repo_dir
    return repo_paths


def write_metadata_sidecar(script: CorpusScript, path: str | Path) -> None:
    """Emit the stars/forks sidecar TSV for a script's meta directives."""
    rows = [f"{repo}\t{stars}\t{forks}\n" for repo, (stars, forks) in sorted(script.meta.items())]
    Path(path).write_text("".join(rows))


# --- brute-force oracle ---


@dataclass
class OracleOutput:
    """Every pipeline product recomputed by direct quadratic scans."""

    commit_ids: dict[str, str]  # label -> hex
    effective_times: dict[str, int]  # label -> sanitized time
    repaired: set[str]  # labels whose raw time was adjusted
    clusters: dict[str, str]  # repo -> project (cluster id)
    raw_events: list[tuple]  # (blob, time, project, repo, path, size) pre-dedup
    events: list[tuple]  # deduped, one per (blob, project)
    instances: list[tuple]  # (blob, origin_p, origin_t, dest_p, dest_t, ambiguous)
    origin: dict[str, tuple[str, int]]  # blob -> (origin project, origin time)
    flags: dict[str, bool]  # eligible blob -> reused-within-window
    blob_binary: dict[str, bool]
    blob_language: dict[str, str]
    trend: list[tuple[str, int, int, float]]  # (quarter, created, reused, ratio)
    propensity_blob: dict[str, tuple[int, int]]  # language -> (reused, total)
    propensity_project: dict[str, tuple[float, int]]  # language -> (mean ratio, n projects)
    contingency: dict[tuple[str, str], int]
    project_features: dict[str, dict]
    m_metric: dict[str, float]


def _sanitize(script: CorpusScript, floor: int, horizon: int) -> tuple[dict[str, int], set[str]]:
    """Apply the timestamp repair rule to every commit label."""
    effective: dict[str, int] = {}
    repaired: set[str] = set()
    pending = [lbl for lbl in script.commits]
    # process in a topological order: parents precede children by construction
    for label in pending:
        commit = script.commits[label]
        raw = commit.time
        parent_eff = [effective[p] for p in commit.parents]
        value = raw
        if not (floor <= value <= horizon):
            value = max(parent_eff) if parent_eff else floor
        if parent_eff:
            value = max(value, max(parent_eff))
        effective[label] = value
        if value != raw:
            repaired.add(label)
    return effective, repaired


def _clusters(script: CorpusScript, threshold: int) -> dict[str, str]:
    """Transitive closure over repos sharing >= threshold commits (BFS)."""
    repo_ids = sorted(script.repos)
    commit_sets = {r: set(script.repos[r]) for r in repo_ids}
    adjacency: dict[str, set[str]] = {r: set() for r in repo_ids}
    for i, a in enumerate(repo_ids):
        for b in repo_ids[i + 1 :]:
            if len(commit_sets[a] & commit_sets[b]) >= threshold:
                adjacency[a].add(b)
                adjacency[b].add(a)
    assignment: dict[str, str] = {}
    for repo in repo_ids:
        if repo in assignment:
            continue
        component = set()
        queue = [repo]
        while queue:
            cur = queue.pop()
            if cur in component:
                continue
            component.add(cur)
            queue.extend(adjacency[cur])
        canonical = min(component)
        for member in component:
            assignment[member] = canonical
    return assignment


def escape_field(value: str) -> str:
    """Escape backslash, tab and newline for TSV storage."""
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def quarter_of(epoch: int) -> str:
    stamp = datetime.fromtimestamp(epoch, tz=timezone.utc)
    return f"{stamp.year}Q{(stamp.month - 1) // 3 + 1}"


def oracle(
    script: CorpusScript,
    window: int = 730 * 86400,
    floor: int = 631152000,  # 1990-01-01
    horizon: int = 1767225600,  # 2026-01-01
    denylist: set[str] | None = None,
    threshold: int = 1,
    language_of=None,
    binary_of=None,
) -> OracleOutput:
    """Recompute all expected outputs for a script by brute force.

    language_of(path) and binary_of(payload, path) default to the metrics
    module's classifiers; they are injected to keep this module import-light.
    """
    from .metrics import classify_binary, classify_language

    language_of = language_of or classify_language
    binary_of = binary_of or classify_binary
    deny = {EMPTY_BLOB_HEX} | (denylist or set())

    commit_ids, _ = build_objects(script)
    effective, repaired = _sanitize(script, floor, horizon)
    clusters = _clusters(script, threshold)

    blob_hex: dict[tuple[str, str], str] = {}  # (label, path) -> blob hex
    blob_payload: dict[str, bytes] = {}
    tree_blobs: dict[str, set[str]] = {}  # label -> blob hex set
    for label, commit in script.commits.items():
        blobs = set()
        for path, content in commit.files.items():
            hex_id = hashlib.sha1(b"blob %d\x00" % len(content) + content).hexdigest()
            blob_hex[(label, path)] = hex_id
            blob_payload[hex_id] = content
            blobs.add(hex_id)
        tree_blobs[label] = blobs

    # creations: blob-set difference against the union of all parents
    raw_events: list[tuple] = []
    for repo, labels in sorted(script.repos.items()):
        project = clusters[repo]
        for label in labels:
            commit = script.commits[label]
            inherited: set[str] = set()
            for parent in commit.parents:
                inherited |= tree_blobs[parent]
            created = tree_blobs[label] - inherited
            for blob in sorted(created):
                paths = sorted(p for p in commit.files if blob_hex[(label, p)] == blob)
                path = paths[0]
                raw_events.append(
                    (blob, effective[label], project, repo, path, len(blob_payload[blob]))
                )

    # dedupe to first appearance per (blob, project); survivor minimizes
    # (time, repo, escaped path, size) to mirror the spill sort order
    best: dict[tuple[str, str], tuple] = {}
    for event in raw_events:
        blob, time, project, repo, path, size = event
        key = (blob, project)
        rank = (time, repo, escape_field(path), size)
        if key not in best or rank < best[key][0]:
            best[key] = (rank, event)
    events = sorted(
        (e for _, e in best.values()),
        key=lambda e: (e[0], e[1], e[2], e[3], escape_field(e[4]), e[5]),
    )

    # reuse instances: earliest event is the origin, fan out to later projects
    by_blob: dict[str, list[tuple]] = {}
    for event in events:
        by_blob.setdefault(event[0], []).append(event)
    instances: list[tuple] = []
    origin: dict[str, tuple[str, int]] = {}
    origin_row: dict[str, tuple] = {}
    for blob, rows in sorted(by_blob.items()):
        rows = sorted(rows, key=lambda e: (e[1], e[2]))
        origin[blob] = (rows[0][2], rows[0][1])
        origin_row[blob] = rows[0]
        if blob in deny or len(rows) < 2:
            continue
        ambiguous = rows[1][1] == rows[0][1]
        for dest in rows[1:]:
            instances.append((blob, rows[0][2], rows[0][1], dest[2], dest[1], ambiguous))

    # per-blob reuse-within-window flags over eligible blobs
    cutoff = horizon - window
    flags: dict[str, bool] = {}
    for blob, (proj, otime) in origin.items():
        if blob in deny or otime > cutoff:
            continue
        flags[blob] = any(
            inst[0] == blob and inst[4] - inst[2] <= window for inst in instances
        )

    # classification keys off the origin row's path, the pipeline's view of
    # where the blob first appeared
    blob_binary = {b: binary_of(blob_payload[b], origin_row[b][4]) for b in blob_payload}
    blob_language = {b: language_of(origin_row[b][4]) for b in blob_payload}

    # quarterly trend over origin rows (unlimited reuse definition)
    reused_blobs = {inst[0] for inst in instances}
    trend_counts: dict[str, list[int]] = {}
    for blob, (proj, otime) in sorted(origin.items()):
        if blob in deny:
            continue
        bucket = trend_counts.setdefault(quarter_of(otime), [0, 0])
        bucket[0] += 1
        if blob in reused_blobs:
            bucket[1] += 1
    trend = [
        (quarter, created, reused, reused / created)
        for quarter, (created, reused) in sorted(trend_counts.items())
    ]

    # blob-mode propensity over eligible blobs (language from extension)
    propensity_blob: dict[str, list[int]] = {}
    for blob, flag in flags.items():
        lang = blob_language[blob]
        bucket = propensity_blob.setdefault(lang, [0, 0])
        bucket[1] += 1
        if flag:
            bucket[0] += 1

    # project features
    project_members: dict[str, list[str]] = {}
    for repo, project in clusters.items():
        project_members.setdefault(project, []).append(repo)
    project_features: dict[str, dict] = {}
    contingency: dict[tuple[str, str], int] = {}
    m_metric: dict[str, float] = {}

    meta_by_project: dict[str, tuple[int, int]] = {}
    for project, members in project_members.items():
        stars = max((script.meta.get(r, (0, 0))[0] for r in members), default=0)
        forks = max((script.meta.get(r, (0, 0))[1] for r in members), default=0)
        meta_by_project[project] = (stars, forks)

    for project, members in sorted(project_members.items()):
        labels = sorted({lbl for r in members for lbl in script.repos[r]})
        times = [effective[lbl] for lbl in labels]
        authors = {script.commits[lbl].author for lbl in labels}
        originated = [b for b, (p, _) in origin.items() if p == project and b not in deny]
        total = len(originated)
        binary_count = sum(1 for b in originated if blob_binary[b])
        copied = [b for b in originated if flags.get(b, False)]
        copied_binary = sum(1 for b in copied if blob_binary[b])
        langs = sorted(blob_language[b] for b in originated)
        dominant = None
        if langs:
            counts: dict[str, int] = {}
            for lang in langs:
                counts[lang] = counts.get(lang, 0) + 1
            top = max(counts.values())
            dominant = min(l for l, c in counts.items() if c == top)
        stars, forks = meta_by_project[project]
        first, last = min(times), max(times)
        months = max(1, -((last - first) // -(30 * 86400)))  # ceil
        project_features[project] = {
            "project": project,
            "n_blobs": total,
            "binary_ratio": (binary_count / total) if total else 0.0,
            "n_authors": len(authors),
            "n_commits": len(labels),
            "n_forks": forks,
            "n_stars": stars,
            "earliest_commit_time": first,
            "activity_months": months,
            "dominant_language": dominant,
            "has_reused_origin": bool(copied),
        }
        if copied and binary_count:
            m_metric[project] = (copied_binary / len(copied)) / (binary_count / total)

    # 3x3 contingency of origin class vs biggest downstream class
    class_rank = {"Big": 2, "Medium": 1, "Small": 0}
    project_class = {
        p: _size_class(project_features[p]["n_commits"], meta_by_project[p][0])
        for p in project_features
    }
    for blob in sorted(reused_blobs):
        dests = [inst[3] for inst in instances if inst[0] == blob]
        row = project_class[origin[blob][0]]
        col = max((project_class[d] for d in dests), key=lambda c: class_rank[c])
        contingency[(row, col)] = contingency.get((row, col), 0) + 1

    # project-mode propensity: mean per-project copied ratio by dominant language
    per_lang: dict[str, list[float]] = {}
    for project, feats in project_features.items():
        if feats["n_blobs"] == 0:
            continue
        copied_count = sum(
            1 for b, (p, _) in origin.items() if p == project and flags.get(b, False)
        )
        per_lang.setdefault(feats["dominant_language"], []).append(copied_count / feats["n_blobs"])
    propensity_project = {
        lang: (sum(vals) / len(vals), len(vals)) for lang, vals in per_lang.items()
    }

    return OracleOutput(
        commit_ids=commit_ids,
        effective_times=effective,
        repaired=repaired,
        clusters=clusters,
        raw_events=raw_events,
        events=events,
        instances=sorted(instances),
        origin=origin,
        flags=flags,
        blob_binary=blob_binary,
        blob_language=blob_language,
        trend=trend,
        propensity_blob={k: tuple(v) for k, v in propensity_blob.items()},
        propensity_project=propensity_project,
        contingency=contingency,
        project_features=project_features,
        m_metric=m_metric,
    )


def _size_class(commits: int, stars: int) -> str:
    if commits > 100 and stars > 10:
        return "Big"
    if stars == 0 and commits < 10:
        return "Small"
    return "Medium"


# --- seeded random scripts ---

_WORDS = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
]

_EXTENSIONS = [".c", ".py", ".js", ".rs", ".rb", ".go", ".txt", ".java", ".php", ".pl"]


def random_script(seed: int, n_repos: int = 8, n_commits: int = 5, fork_odds: float = 0.3) -> str:
    """Build a reproducible random corpus script.

    Repositories share content by drawing files from a common pool, so
    cross-project reuse arises naturally; some repos fork earlier ones.
    """
    rng = random.Random(seed)
    pool: list[tuple[str, str | bytes]] = [
        (f"{rng.choice(_WORDS)}_{k}{rng.choice(_EXTENSIONS)}", f"content {seed}-{k}\n")
        for k in range(n_repos * 3)
    ]
    for k in range(max(2, n_repos // 2)):  # shared binary assets
        payload = bytes([rng.randrange(256) for _ in range(8)]) + b"\x00\xff"
        pool.append((f"assets/art_{k}.png", payload))
    lines = []
    label_n = 0
    base_time = 1262304000  # 2010-01-01
    repo_heads: dict[str, str] = {}
    for r in range(n_repos):
        repo = f"repo{r:02d}"
        if r and rng.random() < fork_odds:
            src = f"repo{rng.randrange(r):02d}"
            lines.append(f"fork {repo} from {src}@{repo_heads[src]}")
            parent = repo_heads[src]
        else:
            lines.append(f"repo {repo}")
            parent = None
        tree: dict[str, str | bytes] = {}
        for c in range(rng.randrange(1, n_commits + 1)):
            label = f"c{label_n:03d}"
            label_n += 1
            time = base_time + rng.randrange(0, 10 * 365) * 86400
            parent_part = f" parent={parent}" if parent else ""
            author = rng.choice(["Ann", "Ben", "Cat"])
            lines.append(f"commit {label} time={time}{parent_part} author={author}")
            for _ in range(rng.randrange(1, 4)):
                name, content = rng.choice(pool)
                tree[name] = content
            for name, content in sorted(tree.items()):
                if isinstance(content, bytes):
                    lines.append(f"binfile {name} {content.hex()}")
                else:
                    lines.append(f"file {name} <<EOF")
                    lines.append(content.rstrip("\n"))
                    lines.append("EOF")
            parent = label
            repo_heads[repo] = label
        if rng.random() < 0.5:
            lines.append(f"meta {repo} stars={rng.randrange(0, 20)} forks={rng.randrange(0, 5)}")
    return "\n".join(lines) + "\n"
