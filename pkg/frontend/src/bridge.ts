// Development bridge: serves the static client and forwards protocol lines
// verbatim between a browser WebSocket and the play service's TCP socket.
// Browsers cannot open raw TCP connections, so this is the one extra hop;
// the protocol itself passes through untouched in both directions.
//
//   node dist/src/bridge.js [--service 127.0.0.1:7643] [--port 8080]

import { createServer } from 'node:http';
import { createConnection } from 'node:net';
import { readFile } from 'node:fs/promises';
import { dirname, extname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { WebSocketServer, WebSocket } from 'ws';

const here = dirname(fileURLToPath(import.meta.url));
const webRoot = join(here, '..', '..');

function argValue(flag: string, fallback: string): string {
  const index = process.argv.indexOf(flag);
  const value = index >= 0 ? process.argv[index + 1] : undefined;
  return value ?? fallback;
}

const serviceAddr = argValue('--service', '127.0.0.1:7643');
const port = Number(argValue('--port', '8080'));
const [serviceHost, servicePort] = serviceAddr.split(':');

const contentTypes: Record<string, string> = {
  '.html': 'text/html; charset=utf-8',
  '.css': 'text/css; charset=utf-8',
  '.js': 'text/javascript; charset=utf-8',
};

const server = createServer(async (req, res) => {
  const path = req.url === '/' || req.url === undefined ? '/index.html' : req.url;
  try {
    const body = await readFile(join(webRoot, path));
    res.writeHead(200, { 'content-type': contentTypes[extname(path)] ?? 'application/octet-stream' });
    res.end(body);
  } catch {
    res.writeHead(404);
    res.end('not found');
  }
});

const wss = new WebSocketServer({ server, path: '/session' });

wss.on('connection', (ws: WebSocket) => {
  const tcp = createConnection({ host: serviceHost ?? '127.0.0.1', port: Number(servicePort) });
  tcp.setEncoding('utf-8');
  tcp.on('data', (chunk: string) => ws.send(chunk));
  tcp.on('close', () => ws.close());
  tcp.on('error', () => ws.close());
  ws.on('message', (data) => tcp.write(String(data)));
  ws.on('close', () => tcp.destroy());
});

server.listen(port, () => {
  console.log(`bridge on http://127.0.0.1:${port} -> play service ${serviceAddr}`);
});
