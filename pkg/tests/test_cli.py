"""Subcommand behavior on miniature budgets plus preset grid accounting."""

import math

import pytest

from augrl.cli import main, preset_grid
from augrl.config import config_hash, parse_config_text
from augrl.stats import read_run_csv
from augrl.trainer import TrainConfig

TINY = [
    "total_env_steps=300",
    "td3.warmup_steps=40",
    "td3.hidden_sizes=8,8",
    "batch_size=16",
    "eval.every_steps=100",
    "eval.episodes=4",
    "buffer.capacity=2000",
]


def tiny_args(*pairs):
    out = []
    for kv in TINY + list(pairs):
        out += ["--set", kv]
    return out


def test_train_writes_one_csv_and_echo_round_trips(tmp_path):
    rc = main(["train", "--seed", "3", "--out", str(tmp_path)] + tiny_args())
    assert rc == 0
    files = list(tmp_path.glob("*.csv"))
    assert len(files) == 1
    rec = read_run_csv(files[0])
    assert rec.seed == 3
    assert rec.config == parse_config_text("\n".join(TINY + ["seed=3"]))
    assert files[0].name == f"{config_hash(rec.config)}_seed3.csv"


def test_train_rejects_unknown_key(tmp_path, capsys):
    rc = main(["train", "--out", str(tmp_path), "--set", "nope=1"])
    assert rc == 2
    assert "unknown config key" in capsys.readouterr().err


def test_config_file_and_overrides_compose(tmp_path):
    cfg_file = tmp_path / "base.cfg"
    cfg_file.write_text("\n".join(TINY) + "\nseed = 7\n")
    rc = main(
        ["train", "--config", str(cfg_file), "--out", str(tmp_path / "runs"),
         "--set", "total_env_steps=200"]
    )
    assert rc == 0
    rec = read_run_csv(next((tmp_path / "runs").glob("*.csv")))
    assert rec.seed == 7
    assert rec.config.total_env_steps == 200


class TestPresetGrids:
    def test_benchmark_arms(self):
        grid = preset_grid("benchmark", TrainConfig())
        labels = [l for l, _ in grid]
        assert labels == ["x1", "x2", "x4", "x8", "x2-rotate", "x2-translate"]
        byl = dict(grid)
        assert byl["x4"].policy_data_multiplier == 4
        assert byl["x4"].batch_size == 4 * 256
        assert byl["x4"].total_env_steps == 4 * 200_000
        assert byl["x2-translate"].daf_kind == "translate"
        assert byl["x2-translate"].aug_alpha == 1.0

    def test_replay_ratio_arms(self):
        grid = preset_grid("replay_ratio", TrainConfig())
        ms = [cfg.aug_m for _, cfg in grid]
        assert ms == [1, 2, 4, 8]
        betas = [cfg.augmented_replay_ratio for _, cfg in grid]
        assert betas == [1.0, 0.5, 0.25, 0.125]

    def test_reward_density_arms(self):
        grid = preset_grid("reward_density", TrainConfig())
        ps = [cfg.daf_p for _, cfg in grid]
        assert ps == [0.0, 0.01, 0.05, 0.1, 0.5, 1.0]
        assert all(cfg.daf_kind == "translate_proximal" for _, cfg in grid)

    def test_coverage_alpha_is_exact_in_batch_composition(self):
        grid = dict(preset_grid("coverage", TrainConfig()))
        for label in ("tp0-1to5", "tp0-1to2", "tp0-1to1"):
            cfg = grid[label]
            n_aug = cfg.aug_alpha * cfg.batch_size
            assert n_aug == round(n_aug), label

    def test_coverage_mixes_match_data_ratios(self):
        grid = dict(preset_grid("coverage", TrainConfig()))
        assert grid["tp0-1to5"].m_effective == pytest.approx(0.2)
        assert grid["tp0-1to2"].m_effective == pytest.approx(0.5)
        assert grid["tp0-1to1"].m_effective == pytest.approx(1.0)

    def test_coverage_equalizes_sampling_pressure(self):
        # expected draws per observed transition: orr * batch; per augmented:
        # orr * alpha * batch / m_effective. All arms should sit near the
        # no-DA arm's 256.
        grid = dict(preset_grid("coverage", TrainConfig()))
        for label, cfg in grid.items():
            obs = cfg.observed_replay_ratio * cfg.batch_size
            assert obs == pytest.approx(256, rel=0.01), label
            if cfg.augmentation_enabled:
                aug = (
                    cfg.observed_replay_ratio * cfg.aug_alpha * cfg.batch_size
                    / cfg.m_effective
                )
                assert aug == pytest.approx(256, rel=0.01), label

    def test_every_grid_point_validates(self):
        base = TrainConfig()
        for name in ("benchmark", "coverage", "reward_density", "replay_ratio", "single"):
            for label, cfg in preset_grid(name, base):
                assert isinstance(cfg, TrainConfig), (name, label)

    def test_grids_have_distinct_hashes(self):
        base = TrainConfig()
        for name in ("benchmark", "coverage", "reward_density", "replay_ratio"):
            hashes = [config_hash(cfg) for _, cfg in preset_grid(name, base)]
            assert len(set(hashes)) == len(hashes), name


def test_sweep_replay_ratio_writes_grid_times_seeds(tmp_path):
    rc = main(
        ["sweep", "--preset", "replay_ratio", "--seeds", "2",
         "--out", str(tmp_path)] + tiny_args("daf.kind=translate")
    )
    assert rc == 0
    files = list(tmp_path.glob("*.csv"))
    assert len(files) == 4 * 2
    hashes = {f.name.split("_")[0] for f in files}
    assert len(hashes) == 4


def test_sweep_is_deterministic_in_job_set(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(
            ["sweep", "--preset", "single", "--seeds", "2", "--out", str(out)]
            + tiny_args()
        )
        assert rc == 0
    assert sorted(p.name for p in a.glob("*.csv")) == sorted(
        p.name for p in b.glob("*.csv")
    )
    for p in a.glob("*.csv"):
        assert p.read_text() == (b / p.name).read_text()


def test_aggregate_empty_dir_errors(tmp_path, capsys):
    rc = main(["aggregate", "--in", str(tmp_path), "--out", str(tmp_path / "s")])
    assert rc == 1
    assert "no run CSVs" in capsys.readouterr().err


def test_train_then_aggregate_end_to_end(tmp_path, capsys):
    runs = tmp_path / "runs"
    for seed in ("0", "1"):
        assert main(["train", "--seed", seed, "--out", str(runs)] + tiny_args()) == 0
    rc = main(["aggregate", "--in", str(runs), "--out", str(tmp_path / "sums")])
    assert rc == 0
    out = capsys.readouterr().out
    summaries = list((tmp_path / "sums").glob("*_summary.csv"))
    assert len(summaries) == 1
    assert "final_iqm" in out
    lines = [
        l for l in summaries[0].read_text().splitlines() if not l.startswith("#")
    ]
    assert lines[0] == "x,iqm,ci_lo,ci_hi,n_seeds"
    # 300 steps at eval every 100 -> initial row plus three evals
    assert len(lines) == 1 + 4


def test_validate_dafs_small_sample_passes(capsys):
    rc = main(["validate-dafs", "--samples", "500"])
    assert rc == 0
    out = capsys.readouterr().out
    for kind in ("rotate", "translate", "translate_proximal"):
        assert f"{kind}: 500 sampled, 0 invalid" in out
