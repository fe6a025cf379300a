import { beforeEach, describe, expect, it } from 'vitest';

import { ConsoleApp } from '../app.js';
import { defaultConfig } from '../config.js';
import { MetricsStrip } from '../timers.js';
import { WorldView } from '../view.js';
import { makeSnapshot } from './helpers.js';

beforeEach(() => {
  document.body.innerHTML = '';
});

describe('world view', () => {
  it('holds the latest snapshot verbatim, never fabricating state', () => {
    const view = new WorldView(false);
    const snapshot = makeSnapshot({ clock: 7.7, trial_count: 3 });
    view.apply(snapshot);
    expect(view.current()).toBe(snapshot);
    const newer = makeSnapshot({ clock: 8.0 });
    view.apply(newer);
    expect(view.current()).toBe(newer);
  });

  it('reports staleness after two seconds without snapshots', () => {
    let nowMs = 1000;
    const view = new WorldView(false, () => nowMs);
    document.body.append(view.root);
    view.apply(makeSnapshot());
    expect(view.checkStaleness()).toBe(false);
    nowMs += 1500;
    expect(view.checkStaleness()).toBe(false);
    nowMs += 1000;
    expect(view.checkStaleness()).toBe(true);
    expect(view.root.querySelector('.stale')?.classList.contains('hidden')).toBe(
      false,
    );
  });
});

describe('metrics strip', () => {
  it('renders segment timers and the trial counter from the snapshot', () => {
    const strip = new MetricsStrip();
    strip.apply(
      makeSnapshot({
        trial_count: 2,
        metrics: {
          total_time: 125.0,
          walk_to_goal_time: 61.0,
          telemanipulation_time: 24.0,
          walk_to_start_time: 40.0,
          trials: 2,
        },
      }),
    );
    expect(strip.root.textContent).toContain('total: 2:05.0');
    expect(strip.root.textContent).toContain('walk to goal: 1:01.0');
    expect(strip.root.textContent).toContain('trials: 2');
  });
});

describe('success banner', () => {
  it('announces completion with total time and trials', () => {
    const config = { ...defaultConfig(), showInstructions: false };
    const app = new ConsoleApp(config, undefined, () => true);
    document.body.append(app.root);
    app.applySnapshot(
      makeSnapshot({
        success: true,
        trial_count: 2,
        metrics: {
          total_time: 126.7,
          walk_to_goal_time: 61.0,
          telemanipulation_time: 25.7,
          walk_to_start_time: 40.0,
          trials: 2,
        },
      }),
    );
    const banner = app.root.querySelector('.banner');
    expect(banner?.classList.contains('hidden')).toBe(false);
    expect(banner?.textContent).toContain('126.7');
    expect(banner?.textContent).toContain('2 trial');
  });
});
