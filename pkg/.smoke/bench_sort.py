import random, time, tempfile
from pathlib import Path
from copytrace.timeline import sort_shard

def gen(path, n, seed=7):
    rng = random.Random(seed)
    with open(path, "w") as out:
        for i in range(n):
            blob = f"{rng.getrandbits(160):040x}"
            t = rng.randrange(1_000_000_000, 1_700_000_000)
            out.write(f"{blob}\t{t:011d}\tproj{rng.randrange(50):03d}\trepo{rng.randrange(200):04d}\tsrc/file_{rng.randrange(1000)}.c\t{rng.randrange(10000)}\n")

tmp = Path(tempfile.mkdtemp())
for n in (10**6, 10**7):
    src = tmp / f"in{n}.spill"
    t0 = time.perf_counter()
    gen(src, n)
    t1 = time.perf_counter()
    out = tmp / f"out{n}.spill"
    sort_shard(src, out, run_size=10**6, tmp_dir=tmp)
    t2 = time.perf_counter()
    print(f"n={n}: gen {t1-t0:.1f}s, sort {t2-t1:.1f}s, size {src.stat().st_size/1e6:.0f}MB")
    src.unlink(); out.unlink()
