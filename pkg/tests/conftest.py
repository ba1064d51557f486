"""Shared pipeline-vs-oracle harness for unit and acceptance tests."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import pytest

from copytrace import cli, synth, timeline
from corpora import HORIZON, HORIZON_ISO, CorpusCase, denylist_ids


@dataclass
class PipelineRun:
    out: Path
    events: list[tuple]
    instances: list[tuple]
    clusters: dict[str, str]
    blob_flags: dict[str, bool]
    contingency: dict[tuple[str, str], int]
    propensity_blob: dict[str, tuple[int, int]]
    propensity_project: dict[str, tuple[str, int]]
    m_metric: dict[str, str]
    summary: dict
    stats: dict
    report_dir: Path = field(init=False)

    def __post_init__(self):
        self.report_dir = self.out / "report"


def base_args(case: CorpusCase, tmp: Path, shards: int | None = None) -> list[str]:
    args = [
        "--corpus", str(tmp / "corpus"),
        "--out", str(tmp / "out"),
        "--shards", str(shards if shards is not None else case.shards),
        "--horizon", HORIZON_ISO,
        "--window-days", str(case.window_days),
        "--threshold", str(case.threshold),
        "--jobs", "2",
    ]
    if case.denylist:
        args += ["--denylist", str(tmp / "denylist.txt")]
    meta = tmp / "metadata.tsv"
    if meta.exists():
        args += ["--metadata", str(meta)]
    return args


def prepare_corpus(case: CorpusCase, tmp: Path) -> synth.CorpusScript:
    script = synth.parse_script(case.text)
    synth.generate(script, tmp / "corpus")
    if script.meta:
        synth.write_metadata_sidecar(script, tmp / "metadata.tsv")
    if case.denylist:
        (tmp / "denylist.txt").write_text(
            "".join(f"{blob}\n" for blob in sorted(denylist_ids(case)))
        )
    return script


def run_case(
    case: CorpusCase,
    tmp: Path,
    shards: int | None = None,
    run_size: int | None = None,
    skip_report: bool = False,
) -> PipelineRun:
    if not (tmp / "corpus").exists():
        prepare_corpus(case, tmp)
    args = base_args(case, tmp, shards)
    if run_size is not None:
        args += ["--sort-run-size", str(run_size)]
    assert cli.main(["scan"] + args) == 0, f"{case.name}: scan failed"
    assert cli.main(["reuse"] + args) == 0, f"{case.name}: reuse failed"
    if not skip_report:
        assert cli.main(["report"] + args) == 0, f"{case.name}: report failed"
    return load_run(tmp / "out", shards if shards is not None else case.shards, skip_report)


def load_run(out: Path, n_shards: int, skip_report: bool = False) -> PipelineRun:
    events = []
    instances = []
    for shard in range(n_shards):
        for line in _lines(out / f"b2tP.{shard:03d}.tsv"):
            e = timeline.parse_event_line(line)
            events.append((e.blob, e.time, e.project, e.repo, e.path, e.size))
        for line in _lines(out / f"reuse.{shard:03d}.tsv"):
            i = timeline.parse_instance_line(line)
            instances.append(
                (i.blob, i.origin_project, i.origin_time, i.dest_project, i.dest_time,
                 i.ambiguous_origin)
            )
    clusters = {}
    for line in _lines(out / "p2P.tsv"):
        repo, project = line.rstrip("\n").split("\t")
        clusters[timeline.unescape_field(repo)] = timeline.unescape_field(project)

    blob_flags: dict[str, bool] = {}
    contingency: dict[tuple[str, str], int] = {}
    blob_prop: dict[str, tuple[int, int]] = {}
    project_prop: dict[str, tuple[str, int]] = {}
    m_metric: dict[str, str] = {}
    summary: dict = {}
    stats: dict = {}
    report = out / "report"
    if not skip_report and report.is_dir():
        with open(report / "blob_features.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                blob_flags[row["blob"]] = row["reused_within_window"] == "1"
        with open(report / "contingency.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                for col in ("Big", "Medium", "Small"):
                    contingency[(row["origin_class"], col)] = int(row[col])
        with open(report / "propensity.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                if row["mode"] == "blob":
                    blob_prop[row["language"]] = (int(row["reused"]), int(row["total"]))
                else:
                    project_prop[row["language"]] = (row["ratio"], int(row["total"]))
        with open(report / "project_features.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                if row["binary_reuse_m"]:
                    m_metric[row["project"]] = row["binary_reuse_m"]
        summary = json.loads((report / "summary.json").read_text())
        stats = json.loads((report / "stats.json").read_text())
    return PipelineRun(
        out=out,
        events=events,
        instances=instances,
        clusters=clusters,
        blob_flags=blob_flags,
        contingency=contingency,
        propensity_blob=blob_prop,
        propensity_project=project_prop,
        m_metric=m_metric,
        summary=summary,
        stats=stats,
    )


def oracle_for(case: CorpusCase, script: synth.CorpusScript) -> synth.OracleOutput:
    return synth.oracle(
        script,
        window=case.window_days * 86400,
        horizon=HORIZON,
        denylist=denylist_ids(case),
        threshold=case.threshold,
    )


def assert_run_matches_oracle(run: PipelineRun, orc: synth.OracleOutput, name: str) -> None:
    assert run.events == orc.events, f"{name}: b2tP rows diverge"
    assert sorted(run.instances) == orc.instances, f"{name}: instances diverge"
    assert run.clusters == orc.clusters, f"{name}: defork map diverges"
    assert run.blob_flags == orc.flags, f"{name}: window flags diverge"
    oracle_table = {
        (r, c): orc.contingency.get((r, c), 0) for r in ("Big", "Medium", "Small")
        for c in ("Big", "Medium", "Small")
    }
    assert run.contingency == oracle_table, f"{name}: contingency diverges"
    assert run.propensity_blob == {
        lang: (reused, total) for lang, (reused, total) in orc.propensity_blob.items()
    }, f"{name}: blob propensity diverges"
    assert run.propensity_project == {
        lang: (f"{ratio:.6f}", n) for lang, (ratio, n) in orc.propensity_project.items()
    }, f"{name}: project propensity diverges"
    assert run.m_metric == {
        project: f"{m:.6f}" for project, m in orc.m_metric.items()
    }, f"{name}: binary-reuse metric diverges"


def _lines(path: Path) -> list[str]:
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        return fh.readlines()


@pytest.fixture
def simple_case(tmp_path) -> tuple[CorpusCase, synth.CorpusScript, Path]:
    from corpora import all_cases

    case = all_cases()[0]
    script = prepare_corpus(case, tmp_path)
    return case, script, tmp_path
