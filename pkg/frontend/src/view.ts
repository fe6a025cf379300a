// World rendering: top-down scene plus a side elevation of the arm.
//
// The renderer draws snapshot fields verbatim; the mirror toggle flips the
// top-down x axis at draw time only and never touches outbound commands.

import { Snapshot } from './protocol.js';

const SCALE = 120; // pixels per meter
const BODY_HALF = 0.18;
const STALE_MS = 2000;

function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return canvas.getContext('2d');
  } catch {
    return null; // headless DOM without canvas support
  }
}

export class WorldView {
  readonly root: HTMLElement;
  private readonly topdown: HTMLCanvasElement;
  private readonly side: HTMLCanvasElement;
  private readonly staleBanner: HTMLElement;
  private mirror: boolean;
  private snapshot: Snapshot | null = null;
  private lastSnapshotAt = 0;
  private readonly now: () => number;

  constructor(mirror: boolean, now: () => number = () => Date.now()) {
    this.mirror = mirror;
    this.now = now;
    this.root = document.createElement('section');
    this.root.className = 'world';
    this.topdown = document.createElement('canvas');
    this.topdown.width = 640;
    this.topdown.height = 480;
    this.topdown.className = 'topdown';
    this.side = document.createElement('canvas');
    this.side.width = 320;
    this.side.height = 200;
    this.side.className = 'side';
    this.staleBanner = document.createElement('div');
    this.staleBanner.className = 'stale hidden';
    this.staleBanner.textContent = 'telemetry stale';
    this.root.append(this.staleBanner, this.topdown, this.side);
  }

  setMirror(mirror: boolean): void {
    this.mirror = mirror;
    this.draw();
  }

  isMirrored(): boolean {
    return this.mirror;
  }

  apply(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    this.lastSnapshotAt = this.now();
    this.draw();
  }

  current(): Snapshot | null {
    return this.snapshot;
  }

  checkStaleness(): boolean {
    const stale =
      this.snapshot !== null && this.now() - this.lastSnapshotAt > STALE_MS;
    this.staleBanner.classList.toggle('hidden', !stale);
    return stale;
  }

  private project(x: number, y: number): [number, number] {
    const sx = this.mirror ? -x : x;
    return [
      this.topdown.width / 2 + sx * SCALE,
      this.topdown.height / 2 - y * SCALE,
    ];
  }

  private draw(): void {
    if (!this.snapshot) {
      return;
    }
    const snap = this.snapshot;
    const ctx = context2d(this.topdown);
    if (ctx) {
      ctx.clearRect(0, 0, this.topdown.width, this.topdown.height);

      // Reach disk.
      ctx.fillStyle = 'rgba(90, 160, 255, 0.15)';
      const [rx, ry] = this.project(snap.reach.x, snap.reach.y);
      ctx.beginPath();
      ctx.arc(rx, ry, snap.reach.radius * SCALE, 0, Math.PI * 2);
      ctx.fill();

      // Box.
      ctx.strokeStyle = '#8a5a2b';
      const [bx, by] = this.project(snap.box.x, snap.box.y);
      ctx.strokeRect(bx - 12, by - 12, 24, 24);

      // Ball.
      ctx.fillStyle = snap.ball.state === 'in_box' ? '#4caf50' : '#e9a714';
      const [ballX, ballY] = this.project(snap.ball.x, snap.ball.y);
      ctx.beginPath();
      ctx.arc(ballX, ballY, 6, 0, Math.PI * 2);
      ctx.fill();

      // Body square and heading arrow.
      const [cx, cy] = this.project(snap.body.x, snap.body.y);
      ctx.save();
      ctx.translate(cx, cy);
      const heading = this.mirror ? Math.PI - snap.body.heading : snap.body.heading;
      ctx.rotate(-heading);
      ctx.strokeStyle = snap.busy ? '#d8773a' : '#3a7bd8';
      ctx.strokeRect(-BODY_HALF * SCALE, -BODY_HALF * SCALE, 2 * BODY_HALF * SCALE, 2 * BODY_HALF * SCALE);
      ctx.beginPath();
      ctx.moveTo(0, 0);
      ctx.lineTo(BODY_HALF * SCALE * 1.4, 0);
      ctx.stroke();
      ctx.restore();

      // Feet.
      ctx.fillStyle = '#333';
      for (const foot of snap.feet) {
        const fx = foot[0] ?? 0;
        const fy = foot[1] ?? 0;
        const [px, py] = this.project(fx, fy);
        ctx.beginPath();
        ctx.arc(px, py, 3, 0, Math.PI * 2);
        ctx.fill();
      }
    }
    this.drawSide(snap);
  }

  private drawSide(snap: Snapshot): void {
    const ctx = context2d(this.side);
    if (!ctx) {
      return;
    }
    ctx.clearRect(0, 0, this.side.width, this.side.height);
    ctx.strokeStyle = '#555';
    const groundY = this.side.height - 20;
    ctx.beginPath();
    ctx.moveTo(0, groundY);
    ctx.lineTo(this.side.width, groundY);
    ctx.stroke();
    if (!snap.arm) {
      return;
    }
    // Elevation along the arm's vertical plane: horizontal distance from the
    // shoulder against height.
    const shoulder = snap.arm.shoulder;
    const ee = snap.arm.ee;
    const sx = 60;
    const scale = 220;
    const reachPx = Math.hypot(
      (ee[0] ?? 0) - (shoulder[0] ?? 0),
      (ee[1] ?? 0) - (shoulder[1] ?? 0),
    ) * scale;
    const shoulderY = groundY - (shoulder[2] ?? 0) * scale;
    const eeY = groundY - (ee[2] ?? 0) * scale;
    ctx.strokeStyle = '#d8773a';
    ctx.beginPath();
    ctx.moveTo(sx, shoulderY);
    ctx.lineTo(sx + reachPx, eeY);
    ctx.stroke();
    ctx.fillStyle = '#d8773a';
    ctx.beginPath();
    ctx.arc(sx + reachPx, eeY, 5, 0, Math.PI * 2);
    ctx.fill();
  }
}
