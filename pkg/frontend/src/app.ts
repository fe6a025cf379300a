// Operator console wiring: socket, joystick panels, world view, timers.

import { UiConfig, validateConfig } from './config.js';
import { JoystickPanel } from './joystick.js';
import { CommandMessage, ServerMessage, Snapshot, encodeCommand } from './protocol.js';
import { ConsoleSocket, createSocket } from './socket.js';
import { MetricsStrip } from './timers.js';
import { WorldView } from './view.js';

const INSTRUCTIONS = [
  'right pad: drag up/down/left/right to step (locomotion) or jog the arm',
  'right pad diagonals (manipulation): z up / z down',
  'left pad: drag left/right to rotate; buttons cancel or switch mode',
  'gripper buttons appear in manipulation mode',
  'drags shorter than the threshold are ignored (dead zone)',
];

export class ConsoleApp {
  readonly root: HTMLElement;
  readonly leftPanel: JoystickPanel;
  readonly rightPanel: JoystickPanel;
  readonly view: WorldView;
  readonly metrics: MetricsStrip;
  readonly commandLog: string[] = [];
  private readonly socket: ConsoleSocket;
  private readonly toast: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly sendOverride: ((payload: string) => boolean) | null;

  constructor(
    config: UiConfig,
    socket?: ConsoleSocket,
    sendOverride?: (payload: string) => boolean,
  ) {
    validateConfig(config);
    this.sendOverride = sendOverride ?? null;
    this.root = document.createElement('main');
    this.root.className = 'console';

    this.banner = document.createElement('div');
    this.banner.className = 'banner hidden';
    this.toast = document.createElement('div');
    this.toast.className = 'toast hidden';

    this.view = new WorldView(config.mirrorView);
    this.metrics = new MetricsStrip();

    const send = (message: CommandMessage) => this.sendCommand(message);
    this.leftPanel = new JoystickPanel({
      side: 'left',
      thresholdPx: config.thresholdPx,
      send,
    });
    this.rightPanel = new JoystickPanel({
      side: 'right',
      thresholdPx: config.thresholdPx,
      send,
    });

    const mirrorToggle = document.createElement('button');
    mirrorToggle.className = 'mirror-toggle';
    mirrorToggle.textContent = 'mirror view';
    mirrorToggle.addEventListener('click', () => {
      this.view.setMirror(!this.view.isMirrored());
    });

    this.root.append(
      this.banner,
      this.toast,
      this.metrics.root,
      this.view.root,
      this.leftPanel.root,
      this.rightPanel.root,
      mirrorToggle,
    );

    if (config.showInstructions) {
      const overlay = document.createElement('aside');
      overlay.className = 'instructions';
      for (const line of INSTRUCTIONS) {
        const item = document.createElement('p');
        item.textContent = line;
        overlay.append(item);
      }
      this.root.append(overlay);
    }

    this.socket =
      socket ??
      createSocket(config.serverUrl, {
        onStatus: (status) => {
          const offline = status !== 'connected';
          this.banner.classList.toggle('hidden', !offline);
          this.banner.textContent = offline ? 'reconnecting...' : '';
          this.leftPanel.root.classList.toggle('disabled', offline);
          this.rightPanel.root.classList.toggle('disabled', offline);
        },
        onMessage: (message) => this.handleMessage(message),
      });
  }

  connect(): void {
    this.socket.connect();
  }

  sendCommand(message: CommandMessage): void {
    const payload = encodeCommand(message);
    const delivered = this.sendOverride
      ? this.sendOverride(payload)
      : this.socket.sendRaw(payload);
    if (delivered) {
      this.commandLog.push(payload);
    }
  }

  handleMessage(message: ServerMessage): void {
    if (message.type === 'snapshot') {
      this.applySnapshot(message);
    } else if (message.type === 'ack') {
      if (message.result !== 'accepted') {
        this.showToast(
          message.result === 'rejected_busy'
            ? 'busy: command rejected'
            : 'wrong mode: command rejected',
        );
      }
    } else if (message.type === 'error') {
      this.showToast(message.error);
    }
  }

  applySnapshot(snapshot: Snapshot): void {
    this.view.apply(snapshot);
    this.metrics.apply(snapshot);
    this.leftPanel.setMode(snapshot.mode);
    this.rightPanel.setMode(snapshot.mode);
    this.leftPanel.setLocked(snapshot.busy);
    this.rightPanel.setLocked(snapshot.busy);
    if (snapshot.success) {
      this.banner.classList.remove('hidden');
      const total = snapshot.metrics.total_time.toFixed(1);
      this.banner.textContent =
        `task complete in ${total} s over ${snapshot.trial_count} trial(s)`;
    }
  }

  showToast(text: string): void {
    this.toast.textContent = text;
    this.toast.classList.remove('hidden');
  }

  claimOperator(): void {
    const delivered = this.sendOverride
      ? this.sendOverride(JSON.stringify({ type: 'claim', role: 'operator' }))
      : this.socket.sendRaw(JSON.stringify({ type: 'claim', role: 'operator' }));
    void delivered;
  }
}
