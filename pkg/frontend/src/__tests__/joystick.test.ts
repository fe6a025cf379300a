// Loopback: drag every zone once per mode and check exactly the twelve
// distinct motion command messages reach the server side of the socket.

import { beforeEach, describe, expect, it } from 'vitest';

import { ConsoleApp } from '../app.js';
import { defaultConfig } from '../config.js';
import { resolveZone } from '../joystick.js';
import { drag, makeSnapshot, pad } from './helpers.js';

function makeApp() {
  const inbox: string[] = [];
  const config = { ...defaultConfig(), thresholdPx: 100, showInstructions: false };
  const app = new ConsoleApp(config, undefined, (payload) => {
    inbox.push(payload);
    return true;
  });
  document.body.append(app.root);
  return { app, inbox };
}

beforeEach(() => {
  document.body.innerHTML = '';
});

describe('zone resolution', () => {
  it('ignores drags inside the dead zone', () => {
    expect(resolveZone(50, 0, 'right', 'locomotion', 100)).toBeNull();
    expect(resolveZone(0, -99, 'right', 'locomotion', 100)).toBeNull();
  });

  it('maps locomotion right-hand quadrants to steps', () => {
    expect(resolveZone(0, -150, 'right', 'locomotion', 100)?.name).toBe('step_forward');
    expect(resolveZone(0, 150, 'right', 'locomotion', 100)?.name).toBe('step_backward');
    expect(resolveZone(-150, 0, 'right', 'locomotion', 100)?.name).toBe('step_left');
    expect(resolveZone(150, 0, 'right', 'locomotion', 100)?.name).toBe('step_right');
  });

  it('maps locomotion left-hand horizontals to rotations', () => {
    expect(resolveZone(-150, 0, 'left', 'locomotion', 100)?.name).toBe('rotate_left');
    expect(resolveZone(150, 0, 'left', 'locomotion', 100)?.name).toBe('rotate_right');
    expect(resolveZone(0, -150, 'left', 'locomotion', 100)).toBeNull();
  });

  it('maps manipulation right-hand octants to jogs', () => {
    expect(resolveZone(0, -150, 'right', 'manipulation', 100)).toEqual({
      type: 'command',
      name: 'arm_jog',
      axis: 'x',
      sign: 1,
    });
    expect(resolveZone(120, -120, 'right', 'manipulation', 100)?.axis).toBe('z');
    expect(resolveZone(120, 120, 'right', 'manipulation', 100)).toEqual({
      type: 'command',
      name: 'arm_jog',
      axis: 'z',
      sign: -1,
    });
    expect(resolveZone(-120, -120, 'right', 'manipulation', 100)).toBeNull();
  });

  it('manipulation left hand has no drag zones', () => {
    expect(resolveZone(200, 0, 'left', 'manipulation', 100)).toBeNull();
  });
});

describe('loopback of the command bindings', () => {
  it('delivers exactly the 12 distinct motion commands, one per drag', () => {
    const { app, inbox } = makeApp();
    app.applySnapshot(makeSnapshot({ mode: 'locomotion' }));

    const right = pad(app.rightPanel.root);
    const left = pad(app.leftPanel.root);
    drag(right, 0, -180);
    drag(right, 0, 180);
    drag(right, -180, 0);
    drag(right, 180, 0);
    drag(left, -180, 0);
    drag(left, 180, 0);

    app.applySnapshot(makeSnapshot({ mode: 'manipulation' }));
    drag(right, 0, -180);
    drag(right, 0, 180);
    drag(right, -180, 0);
    drag(right, 180, 0);
    drag(right, 140, -140);
    drag(right, 140, 140);

    expect(inbox).toHaveLength(12);
    expect(new Set(inbox).size).toBe(12);
    expect(new Set(inbox)).toEqual(
      new Set([
        '{"type":"command","name":"step_forward"}',
        '{"type":"command","name":"step_backward"}',
        '{"type":"command","name":"step_left"}',
        '{"type":"command","name":"step_right"}',
        '{"type":"command","name":"rotate_left"}',
        '{"type":"command","name":"rotate_right"}',
        '{"type":"command","name":"arm_jog","axis":"x","sign":1}',
        '{"type":"command","name":"arm_jog","axis":"x","sign":-1}',
        '{"type":"command","name":"arm_jog","axis":"y","sign":1}',
        '{"type":"command","name":"arm_jog","axis":"y","sign":-1}',
        '{"type":"command","name":"arm_jog","axis":"z","sign":1}',
        '{"type":"command","name":"arm_jog","axis":"z","sign":-1}',
      ]),
    );
  });

  it('sends nothing for a dead-zone drag', () => {
    const { app, inbox } = makeApp();
    app.applySnapshot(makeSnapshot());
    drag(pad(app.rightPanel.root), 30, -30);
    expect(inbox).toHaveLength(0);
  });

  it('emits one message per completed drag, no autorepeat', () => {
    const { app, inbox } = makeApp();
    app.applySnapshot(makeSnapshot());
    const right = pad(app.rightPanel.root);
    for (let i = 0; i < 3; i += 1) {
      drag(right, 0, -180);
    }
    expect(inbox).toHaveLength(3);
    expect(new Set(inbox).size).toBe(1);
  });

  it('buttons cover the stateful commands', () => {
    const { app, inbox } = makeApp();
    app.applySnapshot(makeSnapshot({ mode: 'locomotion' }));
    const locoButtons = Array.from(
      app.leftPanel.root.querySelectorAll('button'),
    );
    locoButtons.forEach((b) => b.click());
    app.applySnapshot(makeSnapshot({ mode: 'manipulation' }));
    const manipButtons = Array.from(
      app.leftPanel.root.querySelectorAll('button'),
    );
    manipButtons.forEach((b) => b.click());
    expect(new Set(inbox)).toEqual(
      new Set([
        '{"type":"command","name":"cancel_rotation"}',
        '{"type":"command","name":"switch_mode"}',
        '{"type":"command","name":"gripper_open"}',
        '{"type":"command","name":"gripper_close"}',
      ]),
    );
  });
});

describe('busy handling', () => {
  it('locks the panels and renders a rejected ack as a busy notice', () => {
    const { app, inbox } = makeApp();
    app.applySnapshot(makeSnapshot({ busy: true }));
    expect(app.rightPanel.root.classList.contains('locked')).toBe(true);
    expect(app.leftPanel.root.classList.contains('locked')).toBe(true);

    drag(pad(app.rightPanel.root), 0, -180);
    expect(inbox).toHaveLength(1); // the attempt still reaches the server

    app.handleMessage({ type: 'ack', result: 'rejected_busy' });
    const toast = app.root.querySelector('.toast');
    expect(toast?.classList.contains('hidden')).toBe(false);
    expect(toast?.textContent).toContain('busy');
  });

  it('unlocks when the robot goes idle', () => {
    const { app } = makeApp();
    app.applySnapshot(makeSnapshot({ busy: true }));
    app.applySnapshot(makeSnapshot({ busy: false }));
    expect(app.rightPanel.root.classList.contains('locked')).toBe(false);
  });

  it('relabels zones on mode change', () => {
    const { app } = makeApp();
    app.applySnapshot(makeSnapshot({ mode: 'locomotion' }));
    expect(app.rightPanel.root.textContent).toContain('forward');
    app.applySnapshot(makeSnapshot({ mode: 'manipulation' }));
    expect(app.rightPanel.root.textContent).toContain('z+');
    expect(app.leftPanel.root.textContent).toContain('open gripper');
  });
});
