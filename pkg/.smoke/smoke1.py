from copytrace import synth, gitstore
import subprocess, tempfile, os

script = synth.parse_script("""
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
meta alpha stars=12 forks=3
expect-cluster alpha beta
""")
tmp = tempfile.mkdtemp()
paths = synth.generate(script, tmp)
print("repos:", sorted(paths))

out = subprocess.run(["git", "--git-dir", str(paths["alpha"]), "rev-list", "--all", "--objects"],
                     capture_output=True, text=True)
print("git rev-list rc:", out.returncode)
print(out.stdout)
print(out.stderr[:500])

out = subprocess.run(["git", "--git-dir", str(paths["alpha"]), "fsck", "--strict"],
                     capture_output=True, text=True)
print("git fsck rc:", out.returncode, out.stdout[:200], out.stderr[:500])

store = gitstore.open_store(paths["alpha"])
ids = sorted(o.hex for o in store)
print("our object count:", len(ids))
for oid in ids:
    obj = store.read(gitstore.ObjectId.from_hex(oid))
    assert obj.id().hex == oid
print("round-trip ok")
refs = store.refs()
print("refs:", sorted(refs))
