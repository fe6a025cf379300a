import { Snapshot } from '../protocol.js';

export function makeSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: 'snapshot',
    v: 1,
    clock: 1.0,
    mode: 'locomotion',
    busy: false,
    body: { x: 0, y: 0, heading: 0 },
    joints: [
      [0, 0.1745, 1.3963],
      [0, 0.1745, 1.3963],
      [0, 0.1745, 1.3963],
      [0, 0.1745, 1.3963],
    ],
    ball: { x: -2, y: -1, z: 0.0335, state: 'on_ground' },
    box: { x: -2, y: -0.8 },
    trial_count: 1,
    metrics: {
      total_time: 12.5,
      walk_to_goal_time: 4.0,
      telemanipulation_time: 6.0,
      walk_to_start_time: 2.5,
      trials: 1,
    },
    feet: [
      [0.6, 0, 0],
      [0, 0.6, 0],
      [-0.6, 0, 0],
      [0, -0.6, 0],
    ],
    arm: null,
    reach: { x: 0.25, y: 0, radius: 0.38 },
    success: false,
    ...overrides,
  };
}

export function drag(pad: Element, dx: number, dy: number): void {
  pad.dispatchEvent(
    new MouseEvent('pointerdown', { clientX: 300, clientY: 300, bubbles: true }),
  );
  pad.dispatchEvent(
    new MouseEvent('pointerup', {
      clientX: 300 + dx,
      clientY: 300 + dy,
      bubbles: true,
    }),
  );
}

export function pad(root: HTMLElement): Element {
  const found = root.querySelector('.pad');
  if (!found) {
    throw new Error('panel pad missing');
  }
  return found;
}
