// Contract check against a snapshot emitted by the actual simulation
// service (frozen under fixtures/), so the console and the server cannot
// drift apart silently.

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { beforeEach, describe, expect, it } from 'vitest';

import { ConsoleApp } from '../app.js';
import { defaultConfig } from '../config.js';
import { Snapshot, parseServerMessage } from '../protocol.js';

const here = dirname(fileURLToPath(import.meta.url));
const raw = readFileSync(join(here, 'fixtures', 'live_snapshot.json'), 'utf-8');

beforeEach(() => {
  document.body.innerHTML = '';
});

describe('live snapshot contract', () => {
  it('parses as a snapshot with every field the console renders', () => {
    const message = parseServerMessage(raw);
    expect(message).not.toBeNull();
    expect(message?.type).toBe('snapshot');
    const snap = message as Snapshot;
    expect(snap.v).toBe(1);
    expect(snap.joints).toHaveLength(4);
    expect(snap.feet).toHaveLength(4);
    expect(typeof snap.body.heading).toBe('number');
    expect(snap.reach.radius).toBeGreaterThan(0);
    expect(snap.metrics).toHaveProperty('walk_to_goal_time');
    expect(snap.ball.state).toBe('on_ground');
  });

  it('applies to the console, locking panels while the robot is busy', () => {
    const app = new ConsoleApp(
      { ...defaultConfig(), showInstructions: false },
      undefined,
      () => true,
    );
    document.body.append(app.root);
    const snap = parseServerMessage(raw) as Snapshot;
    app.applySnapshot(snap);
    expect(app.view.current()).toBe(snap);
    expect(app.rightPanel.isLocked()).toBe(snap.busy);
    expect(app.leftPanel.isLocked()).toBe(snap.busy);
  });
});
