"""Collapse forked repositories into deforked projects via shared commits."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import UnknownRepository
from .timeline import escape_field, unescape_field


class UnionFind:
    """Disjoint sets over arbitrary hashable items, path-halving + size."""

    def __init__(self, items: Iterable[str] = ()):
        self.parent: dict[str, str] = {}
        self.size: dict[str, int] = {}
        for item in items:
            self.add(item)

    def add(self, item: str) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.size[item] = 1

    def find(self, item: str) -> str:
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def components(self) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = {}
        for item in self.parent:
            groups.setdefault(self.find(item), []).append(item)
        return groups


@dataclass(frozen=True)
class ProjectCluster:
    """A deforked project: repositories connected through shared commits."""

    id: str  # lexicographically smallest member
    members: tuple[str, ...]
    shared_commit_counts: dict[tuple[str, str], int] | None = None


class Clusters:
    def __init__(self, clusters: list[ProjectCluster]):
        self.clusters = clusters
        self._by_repo = {m: c.id for c in clusters for m in c.members}

    def project_of(self, repo_id: str) -> str:
        try:
            return self._by_repo[repo_id]
        except KeyError:
            raise UnknownRepository(repo_id) from None

    def as_map(self) -> dict[str, str]:
        return dict(self._by_repo)

    def __len__(self) -> int:
        return len(self.clusters)

    def write_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", errors="surrogateescape") as out:
            for repo in sorted(self._by_repo):
                out.write(f"{escape_field(repo)}\t{escape_field(self._by_repo[repo])}\n")

    @classmethod
    def read_tsv(cls, path: str | Path) -> "Clusters":
        mapping: dict[str, list[str]] = {}
        with open(path, encoding="utf-8", errors="surrogateescape") as src:
            for line in src:
                repo, project = line.rstrip("\n").split("\t")
                mapping.setdefault(unescape_field(project), []).append(unescape_field(repo))
        return cls(
            [
                ProjectCluster(id=project, members=tuple(sorted(members)))
                for project, members in sorted(mapping.items())
            ]
        )


def build_clusters(
    repos: Iterable[str],
    commit_to_repos: Mapping[str, Iterable[str]],
    threshold: int = 1,
) -> Clusters:
    """Union repos into clusters by shared commits.

    At threshold 1 every commit unions all repos containing it; for k > 1
    only repo pairs sharing at least k commits are joined.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    uf = UnionFind(repos)
    counts: dict[tuple[str, str], int] | None = None
    if threshold == 1:
        for members in commit_to_repos.values():
            members = list(members)
            for other in members[1:]:
                uf.add(members[0])
                uf.add(other)
                uf.union(members[0], other)
    else:
        counts = {}
        for members in commit_to_repos.values():
            members = sorted(set(members))
            for i, a in enumerate(members):
                uf.add(a)
                for b in members[i + 1 :]:
                    pair = (a, b)
                    counts[pair] = counts.get(pair, 0) + 1
        for (a, b), n in counts.items():
            if n >= threshold:
                uf.union(a, b)

    clusters = []
    for _, members in sorted(uf.components().items()):
        members = tuple(sorted(members))
        pair_counts = None
        if counts is not None:
            pair_counts = {
                pair: n
                for pair, n in counts.items()
                if pair[0] in members and pair[1] in members
            }
        clusters.append(ProjectCluster(id=members[0], members=members, shared_commit_counts=pair_counts))
    clusters.sort(key=lambda c: c.id)
    return Clusters(clusters)
