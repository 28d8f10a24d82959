import math
import os
import subprocess

import pytest

import levelk

CLI = os.environ.get("LEVELK_CLI")


def run_episode(env, seed, slot=0):
    env.reset(seed=seed, population=8)
    rewards = []
    while not env.done:
        _, reward, _, _ = env.step(slot)
        rewards.append(reward)
    return rewards


def test_env_reset_and_step():
    env = levelk.MergeEnv(traffic="level0")
    obs = env.reset(seed=3, population=6)
    assert len(obs) == levelk.OBSERVATION_SIZE
    assert len(env.vehicles()) == 6
    obs, reward, done, info = env.step(0)
    assert len(obs) == levelk.OBSERVATION_SIZE
    assert math.isfinite(reward)
    assert info["step"] == 1
    assert set(info["terms"]) == {"collision", "headway", "velocity", "effort", "not_merging", "stopping"}


def test_env_is_deterministic_per_seed():
    env = levelk.MergeEnv(traffic="level0")
    assert run_episode(env, 11) == run_episode(env, 11)


def test_env_requires_installed_traffic(tmp_path):
    with pytest.raises(levelk.MissingPrerequisite):
        levelk.MergeEnv(traffic="level1", store=tmp_path)


def test_config_round_trip():
    cfg = levelk.Config.parse("seed = 4\nenv.v_nom = 11\n")
    assert cfg.get("seed") == "4"
    again = levelk.Config.parse(cfg.serialize())
    assert again.digest() == cfg.digest()
    cfg.set("trainer.gamma", "0.9")
    assert cfg.digest() != again.digest()
    assert "trainer.learning_rate" in levelk.Config.keys()
    with pytest.raises(levelk.ConfigError):
        cfg.set("no.such.key", "1")


def test_normalize_counts():
    a, b = levelk.normalize_counts([40, 350], 390)
    assert a == pytest.approx(10.256, abs=5e-4)
    assert b == pytest.approx(89.744, abs=5e-4)


def test_slot_mapping():
    assert levelk.action_for_slot(3, "ramp", True) == "merge"
    assert levelk.action_for_slot(3, "main", True) != "merge"


def test_qnetwork_round_trip(tmp_path):
    net = levelk.QNetwork.xavier([9, 16, 5], seed=2)
    path = tmp_path / "level1.qnet"
    net.save(path, "level1", episode=12)
    back = levelk.QNetwork.load(path)
    assert back.layers == [9, 16, 5]
    assert back.policy == "level1"
    assert back.episode == 12
    obs = [0.5] * 9
    assert back.q_values(obs) == net.q_values(obs)
    path.write_bytes(b"garbage")
    with pytest.raises(levelk.CheckpointError):
        levelk.QNetwork.load(path)


def test_trajectory_stats(tmp_path):
    path = tmp_path / "traj.csv"
    path.write_text("vehicle_id,frame,lane,x,v,a\n1,0,1,0,10,0\n2,0,1,12,12,0\n3,0,1,30,8,0\n")
    stats = levelk.trajectory_stats(path, "main")
    assert stats["headway"]["count"] == 2
    assert stats["headway"]["mean"] == pytest.approx(10.0)
    assert stats["velocity"]["mean"] == pytest.approx(10.0)
    assert stats["population"]["counts"] == {3: 1}


@pytest.mark.skipif(CLI is None, reason="LEVELK_CLI not set")
class TestCli:
    def run(self, tmp_path, *args, env=None):
        full_env = dict(os.environ, **(env or {}))
        return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=tmp_path, env=full_env)

    def test_usage_errors(self, tmp_path):
        assert self.run(tmp_path).returncode == 2
        assert self.run(tmp_path, "train").returncode == 2
        assert self.run(tmp_path, "simulate", "--ego", "level7").returncode == 2
        assert self.run(tmp_path, "simulate", "--set", "bogus=1").returncode == 2

    def test_missing_prerequisite(self, tmp_path):
        r = self.run(tmp_path, "evaluate", "--store", str(tmp_path / "empty"), "--out", str(tmp_path / "out"))
        assert r.returncode == 3
        assert not (tmp_path / "out").exists()

    def test_simulate_writes_trace(self, tmp_path):
        r = self.run(tmp_path, "simulate", "--ego", "level0", "--traffic", "level0", "--out", str(tmp_path / "o"),
                     "--set", "env.max_steps=30")
        assert r.returncode == 0, r.stderr
        out_dir = r.stdout.strip().splitlines()[-1]
        assert os.path.exists(os.path.join(out_dir, "trace.jsonl"))

    def test_environment_override(self, tmp_path):
        r = self.run(tmp_path, "simulate", "--ego", "level0", "--traffic", "level0", "--out", str(tmp_path / "o"),
                     env={"LEVELK_ENV_DT": "-1"})
        assert r.returncode == 2
