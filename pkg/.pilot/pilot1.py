import sys, time
sys.stdout.reconfigure(line_buffering=True)
from augrl.trainer import TrainConfig, run_training

for hidden in [(32, 32), (64, 64)]:
    for seed in (0, 1):
        cfg = TrainConfig(seed=seed, td3_hidden_sizes=hidden)
        t0 = time.time()
        rec = run_training(cfg)
        dt = time.time() - t0
        rates = [r[2] for r in rec.rows]
        cross = next((r[0] for r in rec.rows if r[2] >= 0.8), None)
        print(f"hidden={hidden} seed={seed}: {dt:.0f}s final={rates[-1]:.2f} best={max(rates):.2f} cross80={cross}")
        print("  curve:", [(r[0], round(r[2], 2)) for r in rec.rows[::8]])
