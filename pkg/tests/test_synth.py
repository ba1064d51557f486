from __future__ import annotations

import hashlib
from pathlib import Path

import pytest

from copytrace import synth
from copytrace.errors import DirNotEmpty, ScriptInvalid

DAY = 86400
HORIZON = 1704067200


def _tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


MINI = """
repo solo
commit only time=2015-01-01T00:00:00Z
file hello.txt <<EOF
scripted content
EOF
"""


class TestGenerate:
    def test_single_blob_id_matches_independent_sha1(self, tmp_path):
        script = synth.parse_script(MINI)
        paths = synth.generate(script, tmp_path / "c")
        content = b"scripted content\n"
        expected = hashlib.sha1(b"blob %d\x00" % len(content) + content).hexdigest()
        assert (paths["solo"] / "objects" / expected[:2] / expected[2:]).exists()

    def test_fork_shares_commit_ids_verbatim(self, tmp_path):
        text = MINI + "fork twin from solo@only\n"
        script = synth.parse_script(text)
        paths = synth.generate(script, tmp_path / "c")
        ids, _ = synth.build_objects(script)
        loose = ids["only"]
        assert (paths["solo"] / "objects" / loose[:2] / loose[2:]).exists()
        assert (paths["twin"] / "objects" / loose[:2] / loose[2:]).exists()

    def test_same_script_twice_byte_identical(self, tmp_path):
        script = synth.parse_script(synth.random_script(3, n_repos=4))
        synth.generate(script, tmp_path / "a")
        synth.generate(script, tmp_path / "b")
        assert _tree_digest(tmp_path / "a") == _tree_digest(tmp_path / "b")

    def test_dir_not_empty(self, tmp_path):
        (tmp_path / "c").mkdir()
        (tmp_path / "c" / "junk").write_text("x")
        with pytest.raises(DirNotEmpty):
            synth.generate(synth.parse_script(MINI), tmp_path / "c")


class TestParseScript:
    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("commit c1 time=5\n", "before any repo"),
            ("repo a\nrepo a\n", "redefined"),
            ("repo a\ncommit c1 time=zzz\n", "unparseable time"),
            ("repo a\ncommit c1 time=5\ncommit c1 time=6\n", "reused"),
            ("repo a\ncommit c1 time=5 parent=nope\n", "parent nope"),
            ("repo a\ncommit c1 time=5\nfile x <<EOF\nbody\n", "unterminated"),
            ("repo a\nfork b from a@c9\n", "not in a"),
            ("fork b from ghost@c1\nrepo ghost\n", "unknown"),
            ("repo a\nmeta b stars=1 forks=0\n", "unknown repo"),
            ("repo a\nwhatever x\n", "unknown directive"),
            ("repo a\ncommit c1 time=5 color=red\n", "unknown commit attribute"),
        ],
    )
    def test_invalid_scripts(self, text, fragment):
        with pytest.raises(ScriptInvalid, match=fragment.split()[0]):
            synth.parse_script(text)

    def test_annotations_parsed(self):
        script = synth.parse_script(
            MINI + "fork twin from solo@only\nmeta solo stars=4 forks=1\n"
            "expect-cluster solo twin\n"
        )
        assert script.meta == {"solo": (4, 1)}
        assert script.expected_clusters == [frozenset({"solo", "twin"})]

    def test_epoch_and_iso_times(self):
        script = synth.parse_script(
            "repo a\ncommit c1 time=86400\nfile f <<EOF\nx\nEOF\n"
            "commit c2 time=2015-01-01T00:00:00Z parent=c1\nfile f <<EOF\nx\nEOF\n"
        )
        assert script.commits["c1"].time == 86400
        assert script.commits["c2"].time == 1420070400


class TestOracle:
    def test_disjoint_clusters_no_instances(self):
        script = synth.parse_script(
            "repo a\ncommit c1 time=2015-01-01T00:00:00Z\nfile f.c <<EOF\naaa\nEOF\n"
            "repo b\ncommit c2 time=2016-01-01T00:00:00Z\nfile g.c <<EOF\nbbb\nEOF\n"
        )
        orc = synth.oracle(script, horizon=HORIZON)
        assert orc.instances == []

    def test_three_cluster_window_semantics(self):
        t1 = 1420070400
        script = synth.parse_script(
            f"repo x\ncommit c1 time={t1}\nfile s.c <<EOF\nshared\nEOF\n"
            f"repo y\ncommit c2 time={t1 + 4 * DAY}\nfile s.c <<EOF\nshared\nEOF\n"
            f"repo z\ncommit c3 time={t1 + 8 * DAY}\nfile s.c <<EOF\nshared\nEOF\n"
        )
        orc = synth.oracle(script, window=5 * DAY, horizon=HORIZON)
        pairs = [(i[1], i[3]) for i in orc.instances]
        assert pairs == [("x", "y"), ("x", "z")]
        blob = orc.instances[0][0]
        assert orc.flags[blob] is True  # y landed within the window

    def test_seeded_script_counting_identity(self):
        script = synth.parse_script(synth.random_script(8, n_repos=8))
        orc = synth.oracle(script, horizon=HORIZON)
        deny = {synth.EMPTY_BLOB_HEX}
        projects_per_blob: dict[str, set] = {}
        for blob, _t, project, *_ in orc.events:
            if blob not in deny:
                projects_per_blob.setdefault(blob, set()).add(project)
        assert sum(len(p) - 1 for p in projects_per_blob.values()) == len(orc.instances)

    def test_expected_clusters_hold(self):
        script = synth.parse_script(
            MINI + "fork twin from solo@only\nexpect-cluster solo twin\n"
        )
        orc = synth.oracle(script, horizon=HORIZON)
        for expected in script.expected_clusters:
            projects = {orc.clusters[r] for r in expected}
            assert len(projects) == 1

    def test_oracle_events_sorted_and_deduped(self):
        script = synth.parse_script(synth.random_script(21, n_repos=6))
        orc = synth.oracle(script, horizon=HORIZON)
        keys = [(e[0], e[1], e[2]) for e in orc.events]
        assert keys == sorted(keys)
        assert len({(e[0], e[2]) for e in orc.events}) == len(orc.events)
