"""Command-line interface.

Subcommands:
    run          execute a command script against a scenario, write metrics
    serve        run the live WebSocket teleoperation service
    export-gait  export a demo trajectory as CSV plus figures
    check        run the invariant suite against the current config

Exit codes: 0 success, 2 incomplete scenario, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .checks import run_all
from .config import ConfigError, default_config, load_config
from .gait import GaitError
from .reporting import (
    TrajectoryRecorder,
    export_gait_report,
    save_run_figure,
)
from .scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    load_script,
    run_scripted,
    write_event_log,
)
from .world import Simulation


def _load_config_arg(path):
    if path is None:
        return default_config()
    return load_config(path)


def _cmd_run(args) -> int:
    config = _load_config_arg(args.config)
    scenario = load_scenario(args.scenario)
    script = load_script(args.script)
    recorder = TrajectoryRecorder()
    sink = recorder if (args.figures or args.out) else None
    if args.speed and args.speed > 0:
        # Wall-clock pacing for watching a run live; 0 runs flat out.
        dt = 1.0 / (config.gait.tick_rate * args.speed)

        def paced(sim):
            if sink is not None:
                recorder(sim)
            time.sleep(dt)

        result = run_scripted(script, scenario, config, trajectory_sink=paced)
    else:
        result = run_scripted(script, scenario, config, trajectory_sink=sink)

    print(
        f"{'success' if result.success else 'incomplete'}: "
        f"total {result.metrics.total_time:.2f} s, "
        f"walk-to-goal {result.metrics.walk_to_goal_time:.2f} s, "
        f"telemanipulation {result.metrics.telemanipulation_time:.2f} s, "
        f"walk-to-start {result.metrics.walk_to_start_time:.2f} s, "
        f"trials {result.metrics.trials}"
    )
    if args.out:
        out = Path(args.out)
        doc = result.metrics.to_dict()
        doc["success"] = result.success
        out.write_text(json.dumps(doc, indent=2) + "\n")
        events_path = out.with_suffix("") .as_posix() + "_events.jsonl"
        write_event_log(result.events, events_path)
        print(f"wrote {out} and {events_path}")
    if args.figures:
        fig_path = Path(args.figures)
        fig_path.mkdir(parents=True, exist_ok=True)
        run_png = fig_path / "run_path.png"
        save_run_figure(result.events, scenario, recorder.rows, run_png)
        print(f"wrote {run_png}")
    return 0 if result.success else 2


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config_arg(args.config)
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    interval = 1.0 / (config.gait.tick_rate * args.speed) if args.speed else None
    app = create_app(config, scenario, tick_interval=interval)
    ui_dir = Path(args.ui) if args.ui else Path("frontend")
    if (ui_dir / "index.html").exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
        print(f"serving operator console at /ui from {ui_dir}")
    port = int(os.environ.get("MORPHOARMS_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def _cmd_export_gait(args) -> int:
    config = _load_config_arg(args.config)
    scenario = Scenario(robot_heading=0.0)
    sim = Simulation(config, scenario.layout())
    recorder = TrajectoryRecorder()
    from .teleop import Command, CommandKind

    script = [
        Command(CommandKind.STEP_FORWARD),
        Command(CommandKind.STEP_LEFT),
        Command(CommandKind.ROTATE_LEFT),
        Command(CommandKind.SWITCH_MODE),
        Command(CommandKind.SWITCH_MODE),
    ]
    for cmd in script:
        sim.submit(cmd)
        while sim.session.busy:
            sim.tick()
            recorder(sim)
    written = export_gait_report(
        recorder.rows, recorder.slip, config.gait.tick_rate, args.out
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_check(args) -> int:
    config = _load_config_arg(args.config)
    results = run_all(config)
    failed = 0
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        print(f"{status}  {name}: {detail}")
        if not passed:
            failed += 1
    if failed:
        print(f"{failed} check(s) failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphoarms",
        description="Kinematic walking/manipulation simulator and teleoperation stack",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a command script against a scenario")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--script", required=True, help="command script JSON file")
    p_run.add_argument("--config", help="robot config JSON file")
    p_run.add_argument("--speed", type=float, default=0.0,
                       help="wall-clock pacing multiplier (0 = as fast as possible)")
    p_run.add_argument("--out", help="write metrics JSON (events written alongside)")
    p_run.add_argument("--figures", help="directory for run figures")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="serve the live teleoperation session")
    p_serve.add_argument("--port", type=int, default=8710)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--scenario", help="scenario JSON file")
    p_serve.add_argument("--config", help="robot config JSON file")
    p_serve.add_argument("--speed", type=float, default=1.0,
                         help="simulation speed multiplier")
    p_serve.add_argument("--ui", help="operator console directory to serve at /ui")
    p_serve.set_defaults(func=_cmd_serve)

    p_export = sub.add_parser("export-gait", help="export a demo gait trajectory")
    p_export.add_argument("--config", help="robot config JSON file")
    p_export.add_argument("--out", default="traj.csv", help="trajectory CSV path")
    p_export.set_defaults(func=_cmd_export_gait)

    p_check = sub.add_parser("check", help="run the invariant suite")
    p_check.add_argument("--config", help="robot config JSON file")
    p_check.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScenarioError, GaitError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
