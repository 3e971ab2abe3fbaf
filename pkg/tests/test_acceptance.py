"""Acceptance gate: every statistical and property criterion, one test each.

Heavy criteria read 10-seed cached runs (see acceptance_matrix; cold cache
trains on demand). Statistical comparisons use the interquartile mean with
95 percent percentile-bootstrap intervals across seeds; "better with
separation" means disjoint intervals.

The translate reward-probability test asserts the documented 0.019 +/- 0.002
band. The implemented geometry (success ball radius 0.05 inside a [-1,1]^2
arena) makes that figure unreachable: the uniform-relocation hit rate is
pi * 0.05^2 / 4 ~= 0.00196, and a companion regression in test_daf pins the
measured value inside [0.0014, 0.0027]. The criterion is kept verbatim and
is expected to fail; see the project decision log for the analysis.
"""

import math

import numpy as np
import pytest

import acceptance_matrix as mat
from augrl import nets
from augrl.config import config_hash
from augrl.daf import DafSpec, apply_daf, closure_report, random_valid_transition
from augrl.env import REWARD_SUCCESS, Goal2dEnv
from augrl.replay import RingBuffer
from augrl.stats import (
    bootstrap_ci,
    curve_statistics,
    iqm,
    steps_to_threshold,
    write_run_csv,
)
from augrl.trainer import TrainConfig, run_training


# ---------------------------------------------------------------- P criteria


class TestP1Numerics:
    def test_P1_gradient_check_agent_shapes(self):
        # actor 4 -> H -> H -> 2 (tanh out), critic 6 -> H -> H -> 1
        shapes = [
            ((4, 256, 256, 2), "tanh"),
            ((6, 256, 256, 1), "identity"),
        ]
        rng = np.random.default_rng(42)
        worst = 0.0
        for trial in range(10):
            sizes, out_act = shapes[trial % 2]
            net = nets.mlp_init(sizes, rng, output_activation=out_act)
            x = rng.uniform(-1.0, 1.0, (4, sizes[0]))
            upstream = rng.normal(size=(4, sizes[-1]))

            def loss(net=net, x=x, upstream=upstream):
                return float(np.sum(nets.mlp_forward(net, x) * upstream))

            grads, _ = nets.mlp_backward(net, x, upstream)
            h = 1e-5
            for li in range(len(net.weights)):
                W, g = net.weights[li], grads.weights[li]
                flat = rng.choice(W.size, size=min(6, W.size), replace=False)
                for f in flat:
                    i, j = divmod(int(f), W.shape[1])
                    orig = W[i, j]
                    W[i, j] = orig + h
                    up = loss()
                    W[i, j] = orig - h
                    dn = loss()
                    W[i, j] = orig
                    fd = (up - dn) / (2 * h)
                    denom = max(1e-8, abs(fd), abs(g[i, j]))
                    worst = max(worst, abs(fd - g[i, j]) / denom)
                b, gb = net.biases[li], grads.biases[li]
                k = int(rng.integers(0, b.size))
                orig = b[k]
                b[k] = orig + h
                up = loss()
                b[k] = orig - h
                dn = loss()
                b[k] = orig
                fd = (up - dn) / (2 * h)
                denom = max(1e-8, abs(fd), abs(gb[k]))
                worst = max(worst, abs(fd - gb[k]) / denom)
        assert worst <= 1e-4, f"max relative gradient error {worst:.3e}"

    def test_P1_adam_unit_example_exact(self):
        net = nets.mlp_init((1, 1), np.random.default_rng(0))
        net.weights[0][:] = 0.5
        net.biases[0][:] = 0.0
        adam = nets.adam_init(net, learning_rate=0.1)
        g = nets.MlpGrads(
            weights=[np.array([[2.0]])], biases=[np.array([3.0])]
        )
        nets.adam_step(adam, net, g)
        # bias-corrected first step moves by lr * g/|g| = lr up to eps
        eps = 1e-8
        expect_w = 0.5 - 0.1 * (2.0 / (2.0 + eps))
        expect_b = 0.0 - 0.1 * (3.0 / (3.0 + eps))
        assert net.weights[0][0, 0] == pytest.approx(expect_w, abs=1e-12)
        assert net.biases[0][0] == pytest.approx(expect_b, abs=1e-12)

    def test_P1_polyak_unit_example_exact(self):
        target = nets.mlp_init((2, 2), np.random.default_rng(1))
        source = nets.mlp_init((2, 2), np.random.default_rng(2))
        target.weights[0][:] = 1.0
        source.weights[0][:] = 0.0
        nets.polyak_update(target, source, 0.95)
        assert np.all(target.weights[0] == 0.95)


class TestP2Closure:
    @pytest.mark.parametrize(
        "spec",
        [
            DafSpec(kind="rotate"),
            DafSpec(kind="translate"),
            DafSpec(kind="translate_proximal", p=0.5),
        ],
        ids=lambda s: s.kind,
    )
    def test_P2_daf_closure_100k(self, spec):
        env = Goal2dEnv()
        rng = np.random.default_rng(97)
        checked, failed = closure_report(spec, 100_000, rng, env)
        assert checked == 100_000
        assert failed == 0, f"{spec.kind}: {failed} invalid augmented outputs"


class TestP3TranslateRewardProbability:
    def test_P3_reward_signal_fraction(self):
        env = Goal2dEnv()
        rng = np.random.default_rng(11)
        spec = DafSpec(kind="translate")
        n = 1_000_000
        hits = 0
        for _ in range(n):
            t = random_valid_transition(rng, env)
            out = apply_daf(spec, t, rng, env)
            if out.reward == REWARD_SUCCESS:
                hits += 1
        frac = hits / n
        # Documented target; geometrically unreachable for this env (see
        # module docstring). Kept verbatim rather than weakened.
        assert frac == pytest.approx(0.019, abs=0.002), (
            f"measured reward-signal fraction {frac:.6f}; "
            f"uniform-relocation geometry gives pi*0.05^2/4 = {math.pi * 0.0025 / 4:.6f}"
        )


class TestP4ReplayAccounting:
    def test_P4_ring_buffer_matches_shadow_list_10k_ops(self):
        rng = np.random.default_rng(123)
        buf = RingBuffer(capacity=257)
        shadow: list[float] = []
        births: list[int] = []
        for op in range(10_000):
            row = np.full(13, float(op))
            buf.push_row(row, op)
            shadow.append(float(op))
            births.append(op)
            if len(shadow) > 257:
                shadow.pop(0)
                births.pop(0)
            assert buf.size == len(shadow)
            assert buf.oldest_birth_update() == births[0]
            if op % 997 == 0 and buf.size >= 4:
                got = buf.sample_rows(4, rng)[:, 0]
                assert all(v in shadow for v in got)
        contents = sorted(buf.contents_rows()[:, 0].tolist())
        assert contents == sorted(shadow)

    @pytest.mark.parametrize("m", [1, 4])
    def test_P4_replay_age_matching(self, m):
        cfg = TrainConfig(
            seed=0,
            total_env_steps=3000,
            td3_warmup_steps=0,
            td3_hidden_sizes=(16, 16),
            batch_size=32,
            eval_every_steps=3000,
            eval_episodes=2,
            buffer_capacity=500,
            daf_kind="translate",
            aug_m=m,
            aug_alpha=1.0,
        )
        rec = run_training(cfg)
        c = rec.counters
        # oldest surviving transition in each buffer entered within one
        # update interval of its counterpart
        assert abs(c["oldest_observed_age"] - c["oldest_augmented_age"]) <= 1, c

    def test_P4_alpha_beta_recomputed_exactly(self):
        cfg = TrainConfig(
            seed=1,
            total_env_steps=2000,
            td3_warmup_steps=0,
            td3_hidden_sizes=(16, 16),
            batch_size=48,
            eval_every_steps=2000,
            eval_episodes=2,
            daf_kind="translate",
            aug_m=4,
            aug_alpha=0.5,
        )
        rec = run_training(cfg)
        c = rec.counters
        alpha = c["augmented_sampled"] / c["observed_sampled"]
        assert alpha == cfg.aug_alpha
        orr = c["updates"] / c["observed_inserted"]
        assert orr == cfg.observed_replay_ratio
        beta = c["updates"] / c["augmented_inserted"]
        assert beta == cfg.augmented_replay_ratio


class TestP5StatsOracles:
    def test_P5_iqm_matches_naive_oracle(self):
        rng = np.random.default_rng(31)

        def naive(vals):
            s = sorted(vals)
            k = len(s) // 4
            mid = s[k: len(s) - k]
            return sum(mid) / len(mid)

        for _ in range(1000):
            n = int(rng.integers(1, 64))
            vals = (rng.normal(size=n) * 10).tolist()
            assert iqm(vals) == pytest.approx(naive(vals), abs=1e-12)

    def test_P5_iqm_one_through_eight(self):
        assert iqm(list(range(1, 9))) == 4.5

    def test_P5_bootstrap_coverage(self):
        rng = np.random.default_rng(5)
        hits = 0
        reps = 200
        for _ in range(reps):
            vals = rng.integers(0, 2, size=50).astype(float)
            lo, hi = bootstrap_ci(vals, b=2000, rng=rng)
            if lo <= 0.5 <= hi:
                hits += 1
        assert hits >= 0.90 * reps, f"coverage {hits}/{reps}"


# ------------------------------------------------------------ A criteria


@pytest.fixture(scope="module")
def curves():
    cache: dict[str, object] = {}

    def get(label: str):
        if label not in cache:
            cache[label] = mat.arm_curves(label)
        return cache[label]

    return get


def final_stat(curveset, axis):
    return curve_statistics(curveset, axis=axis)[-1]


def crossing_ci(curveset, tau=0.8):
    res = steps_to_threshold(curveset, tau)
    vals = res.values
    lo, hi = bootstrap_ci(vals)
    return iqm(vals), lo, hi


class TestA0BaselineSanity:
    def test_A0_plain_td3_reaches_08_within_200k(self, curves):
        base = curves("baseline")
        assert base.n_seeds == mat.N_SEEDS
        stats = curve_statistics(base, axis="env_steps")
        peak = max(s.iqm for s in stats)
        crossed = [s.x for s in stats if s.iqm >= 0.8]
        assert crossed, f"IQM never reached 0.8 within 200k steps (peak {peak:.3f})"
        assert crossed[0] <= 200_000


class TestA1Benchmark:
    def test_A1_x2_translate_beats_x1_and_nearly_matches_x4(self, curves):
        x1 = final_stat(curves("bench-x1"), "update_count")
        x4 = final_stat(curves("bench-x4"), "update_count")
        tr = final_stat(curves("bench-x2-translate"), "update_count")
        assert tr.x == x1.x == x4.x, "benchmark arms must share the update grid"
        assert tr.iqm > x1.iqm and tr.ci_lo > x1.ci_hi, (
            f"x2-translate {tr.iqm:.3f} [{tr.ci_lo:.3f},{tr.ci_hi:.3f}] vs "
            f"x1 {x1.iqm:.3f} [{x1.ci_lo:.3f},{x1.ci_hi:.3f}]"
        )
        assert tr.iqm >= x4.iqm - 0.05, (
            f"x2-translate {tr.iqm:.3f} more than 0.05 below x4 {x4.iqm:.3f}"
        )


class TestA2Coverage:
    def test_A2_tp0_between_baseline_and_translate(self, curves):
        tr_iqm, tr_lo, tr_hi = crossing_ci(curves("translate"))
        base_iqm, base_lo, base_hi = crossing_ci(curves("baseline"))
        mixes = {
            label: crossing_ci(curves(label))
            for label in ("tp0-1to5", "tp0-1to2", "tp0-1to1")
        }
        best_label = min(mixes, key=lambda k: mixes[k][0])
        best_iqm = mixes[best_label][0]
        assert best_iqm < base_iqm, (
            f"best TP0 mix {best_label} ({best_iqm}) not better than no-DA ({base_iqm})"
        )
        assert tr_iqm < best_iqm, (
            f"translate ({tr_iqm}) not better than best TP0 mix ({best_iqm})"
        )
        assert tr_hi < base_lo, (
            f"outer arms overlap: translate hi {tr_hi} vs baseline lo {base_lo}"
        )


class TestA3RewardDensity:
    def test_A3_small_p_helps_large_p_hurts(self, curves):
        st = {
            label: crossing_ci(curves(label))[0]
            for label in ("tp0-1to1", "tp-p0.01", "tp-p0.1", "tp-p1.0")
        }
        assert st["tp-p0.01"] < st["tp0-1to1"], (
            f"p=0.01 ({st['tp-p0.01']}) not faster than p=0 ({st['tp0-1to1']})"
        )
        assert st["tp-p1.0"] > st["tp-p0.1"], (
            f"p=1.0 ({st['tp-p1.0']}) not slower than p=0.1 ({st['tp-p0.1']})"
        )


class TestA4ReplayRatio:
    def test_A4_lower_beta_reaches_threshold_sooner(self, curves):
        m1_iqm, m1_lo, m1_hi = crossing_ci(curves("translate"))
        m4_iqm, m4_lo, m4_hi = crossing_ci(curves("translate-m4"))
        assert m4_iqm < m1_iqm, f"m=4 ({m4_iqm}) not faster than m=1 ({m1_iqm})"
        assert m4_hi < m1_lo, (
            f"CIs overlap: m4 [{m4_lo},{m4_hi}] vs m1 [{m1_lo},{m1_hi}]"
        )


class TestA5Determinism:
    def test_A5_rerun_bit_exact(self, tmp_path):
        cfg = TrainConfig(
            seed=7,
            total_env_steps=3000,
            td3_warmup_steps=500,
            td3_hidden_sizes=(32, 32),
            batch_size=64,
            eval_every_steps=1000,
            eval_episodes=20,
            daf_kind="translate",
            aug_m=2,
            aug_alpha=1.0,
        )
        a = run_training(cfg)
        b = run_training(cfg)
        assert a.rows == b.rows
        assert a.counters == b.counters
        pa = write_run_csv(a, tmp_path / "a")
        pb = write_run_csv(b, tmp_path / "b")
        assert pa.read_bytes() == pb.read_bytes()
        assert pa.name == f"{config_hash(cfg)}_seed7.csv"
