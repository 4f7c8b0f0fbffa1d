/**
 * HTTP embedding service implementing the gateway wire contract:
 * POST /embed with {"texts": [...]} answers {"dim": N, "vectors": [[...]]},
 * order-preserving and deterministic across calls.
 */

import http from 'node:http';

import { EMBEDDING_DIM, phraseVector, type Pooling } from './embed.js';

const BODY_LIMIT = 10 * 1024 * 1024;

function sendJson(res: http.ServerResponse, status: number, payload: unknown): void {
  const body = JSON.stringify(payload);
  res.writeHead(status, {
    'Content-Type': 'application/json',
    'Content-Length': Buffer.byteLength(body),
  });
  res.end(body);
}

export function createEmbeddingServer(pooling: Pooling = 'mean'): http.Server {
  const cache = new Map<string, number[]>();
  return http.createServer((req, res) => {
    if (req.method !== 'POST' || req.url !== '/embed') {
      sendJson(res, 404, { error: 'only POST /embed is served' });
      return;
    }
    const chunks: Buffer[] = [];
    let size = 0;
    req.on('data', (chunk: Buffer) => {
      size += chunk.length;
      if (size > BODY_LIMIT) {
        sendJson(res, 400, { error: 'request body too large' });
        req.destroy();
        return;
      }
      chunks.push(chunk);
    });
    req.on('end', () => {
      if (res.writableEnded) return;
      let parsed: unknown;
      try {
        parsed = JSON.parse(Buffer.concat(chunks).toString('utf-8'));
      } catch {
        sendJson(res, 400, { error: 'body is not valid JSON' });
        return;
      }
      const texts = (parsed as { texts?: unknown })?.texts;
      if (!Array.isArray(texts) || texts.length === 0 || !texts.every((t) => typeof t === 'string')) {
        sendJson(res, 400, { error: 'expected {"texts": [non-empty list of strings]}' });
        return;
      }
      try {
        const vectors = texts.map((text) => {
          const hit = cache.get(text);
          if (hit) return hit;
          const vector = [...phraseVector(text, { pooling })];
          cache.set(text, vector);
          return vector;
        });
        sendJson(res, 200, { dim: EMBEDDING_DIM, vectors });
      } catch (error) {
        sendJson(res, 500, { error: String(error) });
      }
    });
  });
}

export function serveEmbeddings(port: number, pooling: Pooling = 'mean'): http.Server {
  const server = createEmbeddingServer(pooling);
  server.listen(port, () => {
    const address = server.address();
    const actual = typeof address === 'object' && address ? address.port : port;
    console.log(`embedding service listening on :${actual} (dim ${EMBEDDING_DIM})`);
  });
  return server;
}
