/** Wire shapes served by the gateway (GET /snapshot, GET /events). */

export interface TileSnapshot {
  id: number;
  x: number;
  y: number;
  heading: number;
  color: string;
  aggregate: number;
  phase: string; // idle | has_idea | navigating | settled | unassigned
  idea: string | null;
}

export interface MarkerSnapshot {
  id: number;
  x: number;
  y: number;
}

export interface Snapshot {
  tick: number;
  done: boolean;
  arena: { width: number; height: number };
  markers: MarkerSnapshot[];
  tiles: TileSnapshot[];
  metrics: {
    nonzero_aggregate_count: number;
    unassigned_count: number;
    messages_sent: number;
  };
}

/** One line of the event log, as streamed over /events. */
export interface LogRecord {
  kind: string; // header | event | final
  tick?: number;
  seq?: number;
  type?: string;
  [key: string]: unknown;
}

export interface SubmitReply {
  tile: number;
  tick: number;
}

export interface GatewayErrorBody {
  error: { code: string; message: string };
}
