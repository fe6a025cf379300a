// WebSocket client wrapper with reconnect and typed message dispatch.

import { CommandMessage, ServerMessage, encodeCommand, parseServerMessage } from './protocol.js';

export type ConnectionStatus = 'disconnected' | 'connecting' | 'connected';

export interface SocketHandlers {
  onStatus?: (status: ConnectionStatus) => void;
  onMessage?: (message: ServerMessage) => void;
}

export interface ConsoleSocket {
  connect: () => void;
  disconnect: () => void;
  sendCommand: (message: CommandMessage) => boolean;
  sendRaw: (payload: string) => boolean;
  status: () => ConnectionStatus;
}

export function createSocket(
  url: string,
  handlers: SocketHandlers = {},
  reconnectMs = 1000,
): ConsoleSocket {
  let ws: WebSocket | null = null;
  let status: ConnectionStatus = 'disconnected';
  let closedByUser = false;
  let retryTimer: ReturnType<typeof setTimeout> | null = null;

  function setStatus(next: ConnectionStatus): void {
    status = next;
    handlers.onStatus?.(next);
  }

  function connect(): void {
    if (ws) {
      return;
    }
    closedByUser = false;
    setStatus('connecting');
    ws = new WebSocket(url);
    ws.addEventListener('open', () => setStatus('connected'));
    ws.addEventListener('close', () => {
      ws = null;
      setStatus('disconnected');
      if (!closedByUser && reconnectMs > 0) {
        retryTimer = setTimeout(connect, reconnectMs);
      }
    });
    ws.addEventListener('message', (event: MessageEvent) => {
      if (typeof event.data !== 'string') {
        return;
      }
      const message = parseServerMessage(event.data);
      if (message) {
        handlers.onMessage?.(message);
      }
    });
  }

  return {
    connect,
    disconnect() {
      closedByUser = true;
      if (retryTimer !== null) {
        clearTimeout(retryTimer);
        retryTimer = null;
      }
      ws?.close();
      ws = null;
      setStatus('disconnected');
    },
    sendCommand(message: CommandMessage): boolean {
      return this.sendRaw(encodeCommand(message));
    },
    sendRaw(payload: string): boolean {
      if (!ws || ws.readyState !== WebSocket.OPEN) {
        return false;
      }
      ws.send(payload);
      return true;
    },
    status: () => status,
  };
}
