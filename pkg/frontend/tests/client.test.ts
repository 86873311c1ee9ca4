import { describe, expect, it, vi } from "vitest";

import { GatewayClient, GatewayError, sseDataLines } from "../src/client.js";

function streamOf(...chunks: string[]): ReadableStream<Uint8Array> {
  const encoder = new TextEncoder();
  return new ReadableStream({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
      controller.close();
    },
  });
}

async function collect(stream: AsyncGenerator<string>): Promise<string[]> {
  const out: string[] = [];
  for await (const item of stream) out.push(item);
  return out;
}

describe("sse parsing", () => {
  it("yields one payload per data frame", async () => {
    const lines = await collect(
      sseDataLines(streamOf('data: {"a":1}\n\ndata: {"b":2}\n\n')),
    );
    expect(lines).toEqual(['{"a":1}', '{"b":2}']);
  });

  it("reassembles frames split across chunks", async () => {
    const lines = await collect(
      sseDataLines(streamOf("data: {\"a\"", ":1}\n", "\ndata: {\"b\":2}\n\n")),
    );
    expect(lines).toEqual(['{"a":1}', '{"b":2}']);
  });

  it("stops cleanly at the end frame", async () => {
    const lines = await collect(
      sseDataLines(
        streamOf('data: {"a":1}\n\nevent: end\ndata: {}\n\ndata: {"c":3}\n\n'),
      ),
    );
    expect(lines).toEqual(['{"a":1}']);
  });
});

describe("gateway client", () => {
  it("builds the events url with the since tick", async () => {
    const fetchMock = vi.fn(async () =>
      new Response('data: {"kind":"header","format":1}\n\nevent: end\ndata: {}\n\n', {
        status: 200,
      }),
    );
    const client = new GatewayClient("http://gw", fetchMock);
    const records: unknown[] = [];
    await client.streamEvents(17, (record) => records.push(record));
    expect(fetchMock).toHaveBeenCalledWith("http://gw/events?since=17", {
      signal: undefined,
    });
    expect(records).toEqual([{ kind: "header", format: 1 }]);
  });

  it("raises typed errors from the error body", async () => {
    const fetchMock = vi.fn(async () =>
      new Response(JSON.stringify({ error: { code: "InvalidSince", message: "nope" } }), {
        status: 400,
      }),
    );
    const client = new GatewayClient("http://gw", fetchMock);
    await expect(client.getSnapshot()).rejects.toThrowError(GatewayError);
    await expect(client.getSnapshot()).rejects.toMatchObject({ code: "InvalidSince" });
  });

  it("posts ideas with the optional tile", async () => {
    const fetchMock = vi.fn(async () =>
      new Response(JSON.stringify({ tile: 3, tick: 7 }), { status: 200 }),
    );
    const client = new GatewayClient("http://gw", fetchMock);
    const reply = await client.submitIdea("bike lanes", 3);
    expect(reply).toEqual({ tile: 3, tick: 7 });
    const [, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(JSON.parse(init.body as string)).toEqual({ text: "bike lanes", tile: 3 });
  });
});
