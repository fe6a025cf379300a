// Segment timers and trial counter fed from snapshot metrics.

import { Snapshot } from './protocol.js';

function formatSeconds(value: number): string {
  const minutes = Math.floor(value / 60);
  const seconds = value - minutes * 60;
  return `${minutes}:${seconds.toFixed(1).padStart(4, '0')}`;
}

export class MetricsStrip {
  readonly root: HTMLElement;
  private readonly fields = new Map<string, HTMLElement>();

  constructor() {
    this.root = document.createElement('section');
    this.root.className = 'metrics';
    for (const [key, label] of [
      ['total_time', 'total'],
      ['walk_to_goal_time', 'walk to goal'],
      ['telemanipulation_time', 'telemanipulation'],
      ['walk_to_start_time', 'walk to start'],
      ['trials', 'trials'],
    ] as const) {
      const cell = document.createElement('span');
      cell.className = `metric metric-${key}`;
      cell.textContent = `${label}: -`;
      this.fields.set(key, cell);
      this.root.append(cell);
    }
  }

  apply(snapshot: Snapshot): void {
    const metrics = snapshot.metrics;
    const labels: Record<string, string> = {
      total_time: 'total',
      walk_to_goal_time: 'walk to goal',
      telemanipulation_time: 'telemanipulation',
      walk_to_start_time: 'walk to start',
    };
    for (const [key, label] of Object.entries(labels)) {
      const cell = this.fields.get(key);
      const value = metrics[key as keyof typeof metrics];
      if (cell && typeof value === 'number') {
        cell.textContent = `${label}: ${formatSeconds(value)}`;
      }
    }
    const trials = this.fields.get('trials');
    if (trials) {
      trials.textContent = `trials: ${snapshot.trial_count}`;
    }
  }
}
