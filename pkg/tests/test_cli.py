import json
import subprocess
import sys

import numpy as np
import pytest

from loki_sim.aer import parse_packet_log
from loki_sim.cli import main
from loki_sim.config import NetworkConfig, random_config, save_config
from loki_sim.metrics import STATS_KEYS


@pytest.fixture
def files(tmp_path):
    cfg = tmp_path / "net.bin"
    save_config(random_config(np.random.default_rng(3)), cfg)
    ev = tmp_path / "in.txt"
    ev.write_text("# two timesteps\nS 1\nS 200\nT\nS 5\nT\n")
    return cfg, ev


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_sim_stats_keys(files, tmp_path):
    cfg, ev = files
    out = tmp_path / "stats.json"
    assert main(["sim", "--config", str(cfg), "--events", str(ev), "--stats-out", str(out)]) == 0
    stats = json.loads(out.read_text())
    assert set(STATS_KEYS) <= set(stats)
    assert stats["sops"] == 3 * 256 and stats["timesteps"] == 2
    assert stats["cycles"] == (3 + 9 * 2) + (3 + 9 * 1)


def test_sim_csv(files, tmp_path):
    cfg, ev = files
    out = tmp_path / "stats.csv"
    assert main(["sim", "--config", str(cfg), "--events", str(ev), "--stats-out", str(out)]) == 0
    head, row = out.read_text().splitlines()
    assert head.split(",") == list(STATS_KEYS)


@pytest.mark.parametrize("flag", ["--config", "--events"])
def test_missing_file(files, tmp_path, capsys, flag):
    cfg, ev = files
    args = {"--config": str(cfg), "--events": str(ev)}
    args[flag] = str(tmp_path / "nope")
    assert main(["sim", *[x for kv in args.items() for x in kv]]) != 0
    assert "nope" in capsys.readouterr().err


def test_bad_stream_reports_line(files, tmp_path, capsys):
    cfg, _ = files
    bad = tmp_path / "bad.txt"
    bad.write_text("S 1\nS 999\n")
    assert main(["sim", "--config", str(cfg), "--events", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_bad_config_rejected(tmp_path, files, capsys):
    _, ev = files
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"LOKI")
    assert main(["sim", "--config", str(bad), "--events", str(ev)]) == 2
    assert capsys.readouterr().err


def test_gen_dense(capsys):
    stats = run_json(capsys, "sim", "--gen-dense", "T=10")
    assert stats["sops"] == 655360
    assert stats["input_spikes"] == 2560 and stats["timesteps"] == 10


def test_events_out(files, tmp_path):
    cfg, ev = files
    out = tmp_path / "out.txt"
    assert main(["sim", "--config", str(cfg), "--events", str(ev), "--events-out", str(out)]) == 0
    steps = parse_packet_log(out.read_text())
    assert len(steps) == 2


def test_oracle_matches_sim_output(files, tmp_path, capsys):
    cfg, ev = files
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["sim", "--config", str(cfg), "--events", str(ev), "--events-out", str(a)]) == 0
    assert main(["oracle", "--config", str(cfg), "--events", str(ev), "--events-out", str(b)]) == 0
    assert a.read_text() == b.read_text()
    capsys.readouterr()


def test_chain(files, tmp_path, capsys):
    cfg, ev = files
    ones = tmp_path / "ones.bin"
    save_config(NetworkConfig(np.full((256, 256), 7, dtype=np.int8), 7), ones)
    stats = run_json(capsys, "sim", "--config", str(ones), "--events", str(ev), "--chain", str(cfg))
    # every neuron of layer 1 fires in both timesteps and feeds layer 2
    assert stats["input_spikes"] == 3 + 2 * 256


def test_compare_passes(files, capsys):
    cfg, ev = files
    assert main(["compare", "--config", str(cfg), "--events", str(ev)]) == 0
    assert "bit-exact" in capsys.readouterr().out


def test_compare_fault_injection(tmp_path, capsys):
    w = np.zeros((256, 256), dtype=np.int8)
    w[0, 3] = 2
    cfg = tmp_path / "c.bin"
    save_config(NetworkConfig(w, 50), cfg)
    ev = tmp_path / "e.txt"
    ev.write_text("T\nS 0\nT\n")
    assert main(["compare", "--config", str(cfg), "--events", str(ev),
                 "--inject-fault", "leak"]) == 1
    assert "timestep 1, neuron 3" in capsys.readouterr().out


def test_compare_trials_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert main(["compare", "--trials", "3", "--seed", "7"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "3/3" in outs[0]


def test_compare_trials_detects_fault(capsys):
    assert main(["compare", "--trials", "3", "--seed", "7", "--inject-fault", "leak"]) == 1


@pytest.mark.parametrize("clock,gsops", [("667e6", "18.95"), ("100e6", "2.84")])
def test_bench(capsys, clock, gsops):
    assert main(["bench", "--clock", clock]) == 0
    out = capsys.readouterr().out
    assert f"model throughput: {gsops} GSOP/s" in out
    assert "cycles/s" in out


def test_stats_byte_identical(tmp_path):
    paths = [tmp_path / f"s{i}.json" for i in range(2)]
    for p in paths:
        assert main(["bench", "--gen-dense", "T=2", "--seed", "4", "--stats-out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_energy_override(capsys):
    stats = run_json(capsys, "sim", "--gen-dense", "T=1", "--e-synapse", "0", "--e-neuron", "0",
                     "--e-logic", "0", "--e-handshake", "0")
    assert stats["pj_per_sop"] == 0


def test_module_entry_point(files):
    cfg, ev = files
    proc = subprocess.run([sys.executable, "-m", "loki_sim", "sim", "--config", str(cfg),
                           "--events", str(ev)], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["sops"] == 768
