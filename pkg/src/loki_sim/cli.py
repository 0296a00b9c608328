"""Command-line front end: ``loki-sim {sim,oracle,compare,bench}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import aer, metrics
from .config import DEFAULT_CLOCK_HZ, load_config, random_config, reference_config
from .engine import Core
from .errors import LokiError
from .golden import check_equivalence, golden_run
from .workloads import dense_events, random_events

log = logging.getLogger("loki_sim")


def _dense_arg(s: str) -> int:
    s = s.strip()
    if s.upper().startswith("T="):
        s = s[2:]
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T=<n>, got {s!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("timestep count must be positive")
    return n


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="network parameter file")
    common.add_argument("--events", type=Path, help="input event stream")
    common.add_argument("--gen-dense", type=_dense_arg, metavar="T=<n>",
                        help="generate a 0%%-sparsity stream of n timesteps")
    common.add_argument("--stats-out", type=Path,
                        help="stats document (.csv for a CSV row, JSON otherwise)")
    common.add_argument("--events-out", type=Path, help="output event stream")
    common.add_argument("--clock", type=_positive_float, default=DEFAULT_CLOCK_HZ,
                        help="model clock in Hz (default 667e6)")
    common.add_argument("--emit-empty-blocks", action="store_true",
                        help="send all 8 block AER packets every timestep")
    common.add_argument("--handshake-cycles", type=int, default=1)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for generated configs and streams")
    common.add_argument("--e-synapse", type=float, help="J per synapse word read")
    common.add_argument("--e-neuron", type=float, help="J per neuron word access")
    common.add_argument("--e-logic", type=float, help="J per clock cycle")
    common.add_argument("--e-handshake", type=float, help="J per output packet")

    p = argparse.ArgumentParser(prog="loki-sim", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("sim", parents=[common], help="run the cycle-accurate engine")
    s.add_argument("--chain", type=Path, metavar="CFG2",
                   help="feed the output spikes into a second core with this config")
    sub.add_parser("oracle", parents=[common], help="run the functional reference model")
    c = sub.add_parser("compare", parents=[common], help="engine vs reference, bit-exact")
    c.add_argument("--trials", type=int, help="randomized mode: number of trials")
    c.add_argument("--inject-fault", choices=["leak"],
                   help="deliberately break the engine to test the checker")
    sub.add_parser("bench", parents=[common], help="dense-workload throughput")
    return p


def _check_paths(args):
    for name in ("config", "events", "chain"):
        path = getattr(args, name, None)
        if path is not None and not path.is_file():
            raise FileNotFoundError(f"--{name}: no such file: {path}")
    for name in ("stats_out", "events_out"):
        path = getattr(args, name, None)
        if path is not None and not path.resolve().parent.is_dir():
            raise FileNotFoundError(f"--{name.replace('_', '-')}: directory does not exist: "
                                    f"{path.parent}")


def _config(args, required=False):
    if args.config is not None:
        return load_config(args.config, clock_hz=args.clock)
    if required:
        raise LokiError("--config is required")
    cfg = reference_config(args.seed)
    cfg.clock_hz = args.clock
    return cfg


def _events(args):
    if args.events is not None:
        return aer.parse_event_stream(args.events.read_text())
    if args.gen_dense is not None:
        return dense_events(args.gen_dense)
    raise LokiError("one of --events or --gen-dense is required")


def _energy_model(args) -> metrics.EnergyModel:
    return metrics.DEFAULT_ENERGY.replace(
        e_synapse_word_read=args.e_synapse, e_neuron_word_rw=args.e_neuron,
        e_logic_per_cycle=args.e_logic, e_handshake=args.e_handshake)


def _write_stats(args, stats: dict):
    if args.stats_out is None:
        sys.stdout.write(metrics.stats_json(stats))
    elif args.stats_out.suffix.lower() == ".csv":
        args.stats_out.write_text(metrics.stats_csv(stats))
    else:
        args.stats_out.write_text(metrics.stats_json(stats))


def _core(args, cfg, **kw) -> Core:
    return Core(cfg, emit_empty_blocks=args.emit_empty_blocks,
                handshake_cycles=args.handshake_cycles, **kw)


def cmd_sim(args) -> int:
    cfg = _config(args, required=args.gen_dense is None)
    chain = load_config(args.chain, clock_hz=args.clock) if args.chain else None
    events = _events(args)

    report, results = _core(args, cfg).run(events)
    reports = [report]
    if chain is not None:
        events2 = aer.packets_to_events([r.packets for r in results])
        report2, results = _core(args, chain).run(events2)
        reports.append(report2)
        log.info("layer 1: %s", report)
        log.info("layer 2: %s", report2)
    total = metrics.SimReport.merge(reports)
    _write_stats(args, metrics.stats_dict(total, cfg.clock_hz, _energy_model(args)))
    if args.events_out is not None:
        args.events_out.write_text(aer.serialize_output([r.packets for r in results]))
    return 0


def _fires_to_packets(fired: set[int]) -> list[aer.BlockAerPacket]:
    return [aer.encode_block(sorted(i for i in fired if i // 32 == g), group=g)
            for g in range(8) if any(i // 32 == g for i in fired)]


def cmd_oracle(args) -> int:
    cfg = _config(args, required=args.gen_dense is None)
    events = _events(args)
    _, fires = golden_run(cfg, events)
    n_in = sum(isinstance(e, aer.Spike) for e in events)
    stats = {
        "sops": metrics.SOPS_PER_SPIKE * n_in,
        "input_spikes": n_in,
        "output_spikes": sum(len(f) for f in fires),
        "timesteps": len(fires),
    }
    _write_stats(args, stats)
    if args.events_out is not None:
        args.events_out.write_text(aer.serialize_output([_fires_to_packets(f) for f in fires]))
    return 0


def cmd_compare(args) -> int:
    fault = args.inject_fault == "leak"
    if args.trials is not None:
        rng = np.random.default_rng(args.seed)
        failures = 0
        for i in range(args.trials):
            cfg = random_config(rng)
            events = random_events(rng)
            verdict = check_equivalence(cfg, events, core=_core(args, cfg, leak_fault=fault))
            if not verdict:
                failures += 1
                print(f"trial {i}: {verdict}")
        print(f"{args.trials - failures}/{args.trials} trials bit-exact (seed {args.seed})")
        return 0 if failures == 0 else 1
    cfg = _config(args, required=args.gen_dense is None)
    verdict = check_equivalence(cfg, _events(args), core=_core(args, cfg, leak_fault=fault))
    print(verdict)
    return 0 if verdict else 1


def cmd_bench(args) -> int:
    cfg = _config(args)
    events = dense_events(args.gen_dense or 10)
    core = _core(args, cfg)
    t0 = time.perf_counter()
    report, _ = core.run(events)
    wall = time.perf_counter() - t0
    stats = metrics.stats_dict(report, cfg.clock_hz, _energy_model(args))
    print(f"model throughput: {stats['gsops']:.2f} GSOP/s at {cfg.clock_hz / 1e6:g} MHz "
          f"({report.sops} SOPs in {report.cycles_measured} cycles)")
    if stats["pj_per_sop"] is not None:
        print(f"model energy:     {stats['pj_per_sop']:.4f} pJ/SOP")
    print(f"host speed:       {report.total_cycles / wall:,.0f} simulated cycles/s "
          f"({wall:.2f} s wall)")
    if args.stats_out is not None:
        _write_stats(args, stats)
    return 0


COMMANDS = {"sim": cmd_sim, "oracle": cmd_oracle, "compare": cmd_compare, "bench": cmd_bench}


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("LOKI_SIM_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        _check_paths(args)
        return COMMANDS[args.cmd](args)
    except (LokiError, OSError, ValueError) as e:
        print(f"loki-sim {args.cmd}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
