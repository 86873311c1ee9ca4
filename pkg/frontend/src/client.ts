/** Gateway client: the only three calls the board is allowed to make.
 *
 * The event stream is read with fetch + ReadableStream rather than
 * EventSource so the same code runs in the browser and under node tests.
 */

import type { LogRecord, Snapshot, SubmitReply } from "./types.js";

export type FetchLike = typeof fetch;

export class GatewayError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
  }
}

async function readError(response: Response): Promise<never> {
  let code = `HTTP${response.status}`;
  let message = response.statusText;
  try {
    const body = (await response.json()) as { error?: { code: string; message: string } };
    if (body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the HTTP status
  }
  throw new GatewayError(code, message);
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  async getSnapshot(): Promise<Snapshot> {
    const response = await this.fetchImpl(`${this.baseUrl}/snapshot`);
    if (!response.ok) await readError(response);
    return (await response.json()) as Snapshot;
  }

  async submitIdea(text: string, tile?: number): Promise<SubmitReply> {
    const payload: Record<string, unknown> = { text };
    if (tile !== undefined) payload.tile = tile;
    const response = await this.fetchImpl(`${this.baseUrl}/ideas`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) await readError(response);
    return (await response.json()) as SubmitReply;
  }

  /**
   * Consume the server-sent event stream from a tick onward.  Each `data:`
   * line carries one log record.  Resolves when the stream ends; the
   * AbortSignal is how the board detaches.
   */
  async streamEvents(
    since: number,
    onRecord: (record: LogRecord) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await this.fetchImpl(`${this.baseUrl}/events?since=${since}`, {
      signal,
    });
    if (!response.ok) await readError(response);
    if (!response.body) throw new GatewayError("NoBody", "stream has no body");
    for await (const data of sseDataLines(response.body)) {
      onRecord(JSON.parse(data) as LogRecord);
    }
  }
}

/** Split a byte stream into SSE `data:` payloads. */
export async function* sseDataLines(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<string> {
  const decoder = new TextDecoder();
  const reader = body.getReader();
  let buffer = "";
  try {
    while (true) {
      const { value, done } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let index;
      while ((index = buffer.indexOf("\n\n")) >= 0) {
        const frame = buffer.slice(0, index);
        buffer = buffer.slice(index + 2);
        const lines = frame.split("\n");
        if (lines.includes("event: end")) {
          return; // run finished; the server closes after this frame
        }
        for (const line of lines) {
          if (line.startsWith("data: ")) {
            yield line.slice("data: ".length);
          }
        }
      }
    }
  } finally {
    reader.releaseLock();
  }
}
