"""Sequentially trains every cached run the acceptance tests consume.

Safe to interrupt and rerun: finished (config, seed) files are skipped.
"""

import os
import sys
import time
from pathlib import Path

os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from acceptance_matrix import ACCEPT_DIR, ensure_run, jobs  # noqa: E402
from augrl.stats import run_filename  # noqa: E402


def main() -> int:
    todo = jobs()
    done = sum(1 for _, cfg in todo if (ACCEPT_DIR / run_filename(cfg)).exists())
    print(f"{len(todo)} jobs, {done} already cached, dir={ACCEPT_DIR}", flush=True)
    for i, (label, cfg) in enumerate(todo):
        path = ACCEPT_DIR / run_filename(cfg)
        if path.exists():
            continue
        t0 = time.time()
        ensure_run(cfg)
        print(
            f"[{i + 1}/{len(todo)}] {label} seed={cfg.seed} took {time.time() - t0:.0f}s",
            flush=True,
        )
    print("all jobs cached", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
