import json, subprocess, tempfile
from pathlib import Path

from copytrace import synth, cli, timeline

script_text = """
repo alpha
commit c1 time=2015-01-01T00:00:00Z
file hello.c <<EOF
int main() { return 0; }
EOF
file README <<EOF
hi
EOF
commit c2 time=2015-06-01T00:00:00Z parent=c1
file hello.c <<EOF
int main() { return 0; }
EOF
file README <<EOF
hi there
EOF
binfile logo.png 89504e470d0a1a0a00ff
fork beta from alpha@c2
commit c3 time=2016-01-01T00:00:00Z parent=c2 author=Ann
file hello.c <<EOF
int main() { return 0; }
EOF
repo gamma
commit c4 time=2017-03-01T00:00:00Z
file hello.c <<EOF
int main() { return 0; }
EOF
file empty.txt <<EOF
EOF
binfile logo.png 89504e470d0a1a0a00ff
meta alpha stars=12 forks=3
expect-cluster alpha beta
"""

script = synth.parse_script(script_text)
tmp = Path(tempfile.mkdtemp())
corpus = tmp / "corpus"
out = tmp / "out"
synth.generate(script, corpus)
synth.write_metadata_sidecar(script, tmp / "meta.tsv")

HORIZON = "2024-01-01T00:00:00Z"
args = ["--corpus", str(corpus), "--out", str(out), "--shards", "4",
        "--horizon", HORIZON, "--metadata", str(tmp / "meta.tsv"), "--jobs", "2"]
assert cli.main(["scan"] + args) == 0
assert cli.main(["reuse"] + args) == 0
assert cli.main(["report"] + args) == 0

horizon_epoch = cli.parse_time(HORIZON)
orc = synth.oracle(script, horizon=horizon_epoch)

# compare deduped events
events = []
for shard in range(4):
    for line in (out / f"b2tP.{shard:03d}.tsv").read_text().splitlines():
        e = timeline.parse_event_line(line + "\n")
        events.append((e.blob, e.time, e.project, e.repo, e.path, e.size))
print("pipeline events:", len(events), "oracle:", len(orc.events))
assert events == orc.events, (sorted(events)[:5], orc.events[:5])

instances = []
for shard in range(4):
    for line in (out / f"reuse.{shard:03d}.tsv").read_text().splitlines():
        i = timeline.parse_instance_line(line + "\n")
        instances.append((i.blob, i.origin_project, i.origin_time, i.dest_project, i.dest_time, i.ambiguous_origin))
print("pipeline instances:", sorted(instances))
print("oracle instances:  ", orc.instances)
assert sorted(instances) == orc.instances

p2p = dict(line.split("\t") for line in (out / "p2P.tsv").read_text().splitlines())
print("clusters:", p2p)
assert p2p == orc.clusters

summary = json.loads((out / "report" / "summary.json").read_text())
print("summary:", {k: summary[k] for k in ("blobs_total", "blobs_reused", "instances", "counting_identity_ok")})
stats_doc = json.loads((out / "report" / "stats.json").read_text())
print("blob model keys:", list(stats_doc["blob_model"]))
print("contingency.csv:")
print((out / "report" / "contingency.csv").read_text())
print("propensity.csv:")
print((out / "report" / "propensity.csv").read_text())
print("report files:", sorted(p.name for p in (out / "report").iterdir()))

# oracle cross-checks
print("oracle flags:", orc.flags)
print("oracle contingency:", orc.contingency)
print("oracle m:", orc.m_metric)

# pack/loose equivalence quick check
packed = tmp / "packed"
subprocess.run(["cp", "-r", str(corpus), str(packed)], check=True)
for repo in sorted(packed.iterdir()):
    subprocess.run(["git", "--git-dir", str(repo), "repack", "-a", "-d", "-q"], check=True)
    # remove now-empty loose dirs is not needed; repack -d removes loose objects
out2 = tmp / "out2"
args2 = ["--corpus", str(packed), "--out", str(out2), "--shards", "4",
         "--horizon", HORIZON, "--metadata", str(tmp / "meta.tsv")]
assert cli.main(["scan"] + args2) == 0
assert cli.main(["reuse"] + args2) == 0
for shard in range(4):
    a = (out / f"b2tP.{shard:03d}.tsv").read_bytes()
    b = (out2 / f"b2tP.{shard:03d}.tsv").read_bytes()
    assert a == b, f"shard {shard} differs"
    a = (out / f"reuse.{shard:03d}.tsv").read_bytes()
    b = (out2 / f"reuse.{shard:03d}.tsv").read_bytes()
    assert a == b
print("pack/loose byte-identical outputs OK")
