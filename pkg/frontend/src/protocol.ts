// Wire protocol shared with the simulation service.

export type Mode = 'locomotion' | 'manipulation';
export type JogAxis = 'x' | 'y' | 'z';

export interface CommandMessage {
  type: 'command';
  name: string;
  axis?: JogAxis;
  sign?: 1 | -1;
}

export interface AckMessage {
  type: 'ack';
  result: 'accepted' | 'rejected_busy' | 'rejected_wrong_mode';
}

export interface ErrorMessage {
  type: 'error';
  error: string;
}

export interface RoleMessage {
  type: 'role';
  role: 'operator';
}

export interface Snapshot {
  type: 'snapshot';
  v: number;
  clock: number;
  mode: Mode;
  busy: boolean;
  body: { x: number; y: number; heading: number };
  joints: number[][];
  ball: { x: number; y: number; z: number; state: string };
  box: { x: number; y: number };
  trial_count: number;
  metrics: {
    total_time: number;
    walk_to_goal_time: number;
    telemanipulation_time: number;
    walk_to_start_time: number;
    trials: number;
  };
  feet: number[][];
  arm: { shoulder: number[]; ee: number[] } | null;
  reach: { x: number; y: number; radius: number };
  success: boolean;
}

export type ServerMessage = AckMessage | ErrorMessage | RoleMessage | Snapshot;

export function command(name: string): CommandMessage {
  return { type: 'command', name };
}

export function armJog(axis: JogAxis, sign: 1 | -1): CommandMessage {
  return { type: 'command', name: 'arm_jog', axis, sign };
}

export function encodeCommand(message: CommandMessage): string {
  // Stable key order keeps outbound logs byte-comparable.
  if (message.name === 'arm_jog') {
    return JSON.stringify({
      type: message.type,
      name: message.name,
      axis: message.axis,
      sign: message.sign,
    });
  }
  return JSON.stringify({ type: message.type, name: message.name });
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== 'object' || doc === null || !('type' in doc)) {
    return null;
  }
  const type = (doc as { type: unknown }).type;
  if (type === 'snapshot' || type === 'ack' || type === 'error' || type === 'role') {
    return doc as ServerMessage;
  }
  return null;
}
