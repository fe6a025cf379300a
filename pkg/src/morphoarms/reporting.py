"""Trajectory CSV export, slip reports and figure rendering.

The trajectory CSV has one row per tick per limb:

    t,limb,theta0,theta1,theta2,foot_x,foot_y,foot_z,body_x,body_y,heading

Floats are written with repr precision so golden-file comparisons are exact.
Figures are rendered with the Agg backend next to the delimited output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .gait import NUM_LIMBS, SlipSample
from .world import Simulation

TRAJECTORY_COLUMNS = (
    "t",
    "limb",
    "theta0",
    "theta1",
    "theta2",
    "foot_x",
    "foot_y",
    "foot_z",
    "body_x",
    "body_y",
    "heading",
)

SLIP_COLUMNS = ("t", "limb", "theta0", "radial_residual", "slip_distance")


@dataclass
class TrajectoryRow:
    t: float
    limb: int
    theta0: float
    theta1: float
    theta2: float
    foot_x: float
    foot_y: float
    foot_z: float
    body_x: float
    body_y: float
    heading: float

    def as_list(self) -> list:
        return [getattr(self, name) for name in TRAJECTORY_COLUMNS]


class TrajectoryRecorder:
    """Collects one row per limb per tick from a running simulation."""

    def __init__(self):
        self.rows: List[TrajectoryRow] = []
        self.slip: List[SlipSample] = []
        self._seen_slip = 0

    def __call__(self, sim: Simulation) -> None:
        t = sim.clock
        feet = sim.engine.foot_positions()
        for limb in range(NUM_LIMBS):
            q = sim.engine.joints[limb]
            self.rows.append(
                TrajectoryRow(
                    t=t,
                    limb=limb,
                    theta0=q.shoulder_yaw,
                    theta1=q.upper_arm_pitch,
                    theta2=q.forearm_pitch,
                    foot_x=feet[limb][0],
                    foot_y=feet[limb][1],
                    foot_z=feet[limb][2],
                    body_x=sim.engine.body_x,
                    body_y=sim.engine.body_y,
                    heading=sim.engine.heading,
                )
            )
        log = sim.engine.slip_log
        if len(log) < self._seen_slip:
            self._seen_slip = 0
        self.slip.extend(log[self._seen_slip:])
        self._seen_slip = len(log)


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_trajectory_csv(rows: Sequence[TrajectoryRow], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(v) for v in row.as_list()])


def read_trajectory_csv(path: Union[str, Path]) -> List[TrajectoryRow]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for record in reader:
            out.append(
                TrajectoryRow(
                    t=float(record["t"]),
                    limb=int(record["limb"]),
                    theta0=float(record["theta0"]),
                    theta1=float(record["theta1"]),
                    theta2=float(record["theta2"]),
                    foot_x=float(record["foot_x"]),
                    foot_y=float(record["foot_y"]),
                    foot_z=float(record["foot_z"]),
                    body_x=float(record["body_x"]),
                    body_y=float(record["body_y"]),
                    heading=float(record["heading"]),
                )
            )
    return out


def write_slip_csv(samples: Sequence[SlipSample], tick_rate: float, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SLIP_COLUMNS)
        for s in samples:
            writer.writerow(
                [
                    _fmt(s.tick / tick_rate),
                    s.limb,
                    _fmt(s.theta0),
                    _fmt(s.radial_residual),
                    _fmt(s.slip_distance),
                ]
            )


def save_joint_figure(rows: Sequence[TrajectoryRow], path) -> None:
    """Joint angle profiles over time, one panel per limb."""
    fig, axes = plt.subplots(NUM_LIMBS, 1, figsize=(9, 10), sharex=True)
    for limb in range(NUM_LIMBS):
        ts = [r.t for r in rows if r.limb == limb]
        ax = axes[limb]
        for name, label in (("theta0", "yaw"), ("theta1", "upper arm"), ("theta2", "forearm")):
            ax.plot(ts, [getattr(r, name) for r in rows if r.limb == limb], label=label)
        ax.set_ylabel(f"limb {limb} [rad]")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("t [s]")
    fig.suptitle("Joint trajectories")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_topdown_figure(rows: Sequence[TrajectoryRow], path) -> None:
    """Body path and foot paths on the ground plane."""
    fig, ax = plt.subplots(figsize=(7, 7))
    body = [(r.body_x, r.body_y) for r in rows if r.limb == 0]
    ax.plot([p[0] for p in body], [p[1] for p in body], "k-", lw=2, label="body")
    for limb in range(NUM_LIMBS):
        feet = [(r.foot_x, r.foot_y) for r in rows if r.limb == limb]
        ax.plot([p[0] for p in feet], [p[1] for p in feet], lw=0.8, label=f"foot {limb}")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    ax.set_title("Top-down trajectory")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_slip_figure(samples: Sequence[SlipSample], tick_rate: float, path) -> None:
    """Radial residual and total slip of the pushing feet over a step."""
    fig, ax = plt.subplots(figsize=(8, 5))
    limbs = sorted({s.limb for s in samples})
    for limb in limbs:
        ts = [s.tick / tick_rate for s in samples if s.limb == limb]
        ax.plot(
            ts,
            [s.radial_residual for s in samples if s.limb == limb],
            label=f"limb {limb} radial residual",
        )
        ax.plot(
            ts,
            [s.slip_distance for s in samples if s.limb == limb],
            "--",
            label=f"limb {limb} slip distance",
        )
    ax.set_xlabel("t [s]")
    ax.set_ylabel("residual [m]")
    ax.set_title("Arc-to-line compensation residual (push stroke)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_run_figure(sim_events: Sequence, scenario, rows: Sequence[TrajectoryRow], path) -> None:
    """Scenario overview: body path, ball spawn, box and start tolerance."""
    fig, ax = plt.subplots(figsize=(7, 7))
    body = [(r.body_x, r.body_y) for r in rows if r.limb == 0]
    if body:
        ax.plot([p[0] for p in body], [p[1] for p in body], "k-", lw=1.5, label="body path")
    sx, sy = scenario.robot_start
    ax.plot(sx, sy, "g^", ms=10, label="start")
    bx, by = scenario.ball_start
    ax.plot(bx, by, "o", color="tab:orange", ms=8, label="ball")
    qx, qy = scenario.box_position
    ax.plot(qx, qy, "s", color="tab:brown", ms=10, label="box")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title("Scenario run")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def export_gait_report(
    rows: Sequence[TrajectoryRow],
    slip: Sequence[SlipSample],
    tick_rate: float,
    out_csv: Union[str, Path],
) -> List[Path]:
    """Write the trajectory CSV plus slip CSV and figures alongside it.

    Returns the list of files written.
    """
    out_csv = Path(out_csv)
    write_trajectory_csv(rows, out_csv)
    written = [out_csv]
    stem = out_csv.with_suffix("")
    slip_csv = Path(f"{stem}_slip.csv")
    write_slip_csv(slip, tick_rate, slip_csv)
    written.append(slip_csv)
    joints_png = Path(f"{stem}_joints.png")
    save_joint_figure(rows, joints_png)
    written.append(joints_png)
    topdown_png = Path(f"{stem}_topdown.png")
    save_topdown_figure(rows, topdown_png)
    written.append(topdown_png)
    if slip:
        slip_png = Path(f"{stem}_slip.png")
        save_slip_figure(slip, tick_rate, slip_png)
        written.append(slip_png)
    return written
