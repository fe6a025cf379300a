// Virtual-joystick panels: pointer drags stand in for the tracked hand.
//
// Drag zones carry the motion commands (four steps, two rotations, six arm
// jogs); the stateful commands (cancel rotation, mode switch, gripper) are
// buttons under the panels.  One completed drag emits exactly one command.

import { CommandMessage, Mode, armJog, command } from './protocol.js';

export type PanelSide = 'left' | 'right';

// Screen deltas: dx right-positive, dy down-positive.
export function resolveZone(
  dx: number,
  dy: number,
  side: PanelSide,
  mode: Mode,
  thresholdPx: number,
): CommandMessage | null {
  if (Math.hypot(dx, dy) < thresholdPx) {
    return null;
  }
  const up = -dy;
  if (side === 'right' && mode === 'locomotion') {
    // Dominant axis, four zones; ties go to the horizontal-step pair.
    if (Math.abs(up) > Math.abs(dx)) {
      return up > 0 ? command('step_forward') : command('step_backward');
    }
    return dx < 0 ? command('step_left') : command('step_right');
  }
  if (side === 'left' && mode === 'locomotion') {
    // Horizontal drags rotate; vertical drags are unbound.
    if (Math.abs(dx) >= Math.abs(up)) {
      return dx < 0 ? command('rotate_left') : command('rotate_right');
    }
    return null;
  }
  if (side === 'right' && mode === 'manipulation') {
    // Octants: cardinals jog x/y, the right-hand diagonals jog z.
    const angle = Math.atan2(up, dx) * (180 / Math.PI);
    if (angle >= 67.5 && angle < 112.5) return armJog('x', 1);
    if (angle >= -112.5 && angle < -67.5) return armJog('x', -1);
    if (angle >= 157.5 || angle < -157.5) return armJog('y', 1);
    if (angle >= -22.5 && angle < 22.5) return armJog('y', -1);
    if (angle >= 22.5 && angle < 67.5) return armJog('z', 1);
    if (angle >= -67.5 && angle < -22.5) return armJog('z', -1);
    return null; // north-west / south-west octants are unbound
  }
  return null; // manipulation left hand uses the buttons only
}

export interface PanelLabels {
  title: string;
  zones: string[];
  buttons: { label: string; message: CommandMessage }[];
}

export function panelLabels(side: PanelSide, mode: Mode): PanelLabels {
  if (side === 'right' && mode === 'locomotion') {
    return {
      title: 'right hand: walk',
      zones: ['forward', 'backward', 'step left', 'step right'],
      buttons: [],
    };
  }
  if (side === 'left' && mode === 'locomotion') {
    return {
      title: 'left hand: turn',
      zones: ['rotate left', 'rotate right'],
      buttons: [
        { label: 'cancel rotation', message: command('cancel_rotation') },
        { label: 'switch mode', message: command('switch_mode') },
      ],
    };
  }
  if (side === 'right' && mode === 'manipulation') {
    return {
      title: 'right hand: arm',
      zones: ['x+', 'x-', 'y+', 'y-', 'z+', 'z-'],
      buttons: [],
    };
  }
  return {
    title: 'left hand: gripper',
    zones: [],
    buttons: [
      { label: 'open gripper', message: command('gripper_open') },
      { label: 'close gripper', message: command('gripper_close') },
      { label: 'switch mode', message: command('switch_mode') },
    ],
  };
}

export interface PanelOptions {
  side: PanelSide;
  thresholdPx: number;
  send: (message: CommandMessage) => void;
}

export class JoystickPanel {
  readonly root: HTMLElement;
  private readonly pad: HTMLElement;
  private readonly buttonRow: HTMLElement;
  private readonly options: PanelOptions;
  private mode: Mode = 'locomotion';
  private locked = false;
  private dragStart: { x: number; y: number } | null = null;

  constructor(options: PanelOptions) {
    this.options = options;
    this.root = document.createElement('section');
    this.root.className = `panel panel-${options.side}`;
    this.pad = document.createElement('div');
    this.pad.className = 'pad';
    this.buttonRow = document.createElement('div');
    this.buttonRow.className = 'buttons';
    this.root.append(this.pad, this.buttonRow);
    this.pad.addEventListener('pointerdown', (event) => this.onDown(event));
    this.pad.addEventListener('pointerup', (event) => this.onUp(event));
    this.pad.addEventListener('pointercancel', () => {
      this.dragStart = null;
    });
    this.render();
  }

  setMode(mode: Mode): void {
    if (mode !== this.mode) {
      this.mode = mode;
      this.dragStart = null;
      this.render();
    }
  }

  setLocked(locked: boolean): void {
    this.locked = locked;
    this.root.classList.toggle('locked', locked);
  }

  isLocked(): boolean {
    return this.locked;
  }

  private render(): void {
    const labels = panelLabels(this.options.side, this.mode);
    this.pad.textContent = '';
    const title = document.createElement('h3');
    title.textContent = labels.title;
    this.pad.append(title);
    for (const zone of labels.zones) {
      const tag = document.createElement('span');
      tag.className = 'zone';
      tag.textContent = zone;
      this.pad.append(tag);
    }
    this.buttonRow.textContent = '';
    for (const { label, message } of labels.buttons) {
      const button = document.createElement('button');
      button.textContent = label;
      button.addEventListener('click', () => this.options.send(message));
      this.buttonRow.append(button);
    }
  }

  private onDown(event: PointerEvent): void {
    this.dragStart = { x: event.clientX, y: event.clientY };
  }

  private onUp(event: PointerEvent): void {
    if (!this.dragStart) {
      return;
    }
    const dx = event.clientX - this.dragStart.x;
    const dy = event.clientY - this.dragStart.y;
    this.dragStart = null;
    const message = resolveZone(
      dx,
      dy,
      this.options.side,
      this.mode,
      this.options.thresholdPx,
    );
    if (message) {
      // Locked panels still forward the attempt; the server rejects it and
      // the rejected ack renders as a busy notice.
      this.options.send(message);
    }
  }
}
