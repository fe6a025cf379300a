export interface UiConfig {
  serverUrl: string;
  mirrorView: boolean;
  thresholdPx: number;
  showInstructions: boolean;
}

export function defaultConfig(): UiConfig {
  const page = typeof window !== 'undefined' ? window.location : null;
  const host = page && page.hostname ? page.hostname : 'localhost';
  return {
    serverUrl: `ws://${host}:8710/ws`,
    mirrorView: false,
    thresholdPx: 120,
    showInstructions: true,
  };
}

export function validateConfig(config: UiConfig): void {
  if (!(config.thresholdPx > 0)) {
    throw new Error('thresholdPx must be > 0');
  }
}
