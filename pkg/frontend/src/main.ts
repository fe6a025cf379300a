import { ConsoleApp } from './app.js';
import { defaultConfig } from './config.js';

const config = defaultConfig();
const params = new URLSearchParams(window.location.search);
const server = params.get('server');
if (server) {
  config.serverUrl = server;
}
config.mirrorView = params.get('mirror') === '1';
const threshold = params.get('threshold');
if (threshold) {
  config.thresholdPx = Number(threshold);
}

const app = new ConsoleApp(config);
document.body.append(app.root);
app.connect();
app.claimOperator();
