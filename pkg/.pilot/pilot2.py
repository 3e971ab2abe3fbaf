import sys, time
sys.path.insert(0, "/root/pkg/src")
import os
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

from dataclasses import replace
from augrl.trainer import TrainConfig, run_training
from augrl.daf import DafSpec

jobs = []
for seed in (0, 1):
    jobs.append(("base128", TrainConfig(seed=seed, td3_hidden_sizes=(128, 128))))
jobs.append(("base256", TrainConfig(seed=0, td3_hidden_sizes=(256, 256))))
jobs.append((
    "tr128",
    TrainConfig(
        seed=0,
        td3_hidden_sizes=(128, 128),
        daf_kind="translate",
        aug_m=1,
        aug_alpha=1.0,
    ),
))

for label, cfg in jobs:
    t0 = time.time()
    rec = run_training(cfg)
    dt = time.time() - t0
    rates = [(s, r) for (s, u, r) in rec.rows]
    best = max(r for _, r in rates)
    final = rates[-1][1]
    cross80 = next((s for s, r in rates if r >= 0.8), None)
    cross50 = next((s for s, r in rates if r >= 0.5), None)
    print(f"{label} seed={cfg.seed}: {dt:.0f}s final={final} best={best} cross50={cross50} cross80={cross80}", flush=True)
    dec = [(s, r) for s, r in rates if s % 20000 == 0]
    print(f"  curve: {dec}", flush=True)
