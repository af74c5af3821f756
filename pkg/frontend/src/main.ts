// Browser entry point: connect to the bridge WebSocket (same host) and
// render into #app. The bridge forwards protocol lines verbatim between
// this socket and the play service's TCP endpoint.

import { GameClient } from './client.js';
import { renderInto } from './ui.js';

const client = new GameClient();
const root = document.getElementById('app');
if (root === null) throw new Error('missing #app element');
renderInto(root, client);

const socket = new WebSocket(`ws://${window.location.host}/session`);
client.attach({
  send: (data) => socket.send(data),
  close: () => socket.close(),
});
socket.onmessage = (event) => client.receiveChunk(String(event.data));
socket.onclose = () => {
  client.handleMessage({ v: 1, type: 'error', code: 'Disconnected', message: 'connection lost; reload to resume' });
};
