/** Pure derivation of everything the board draws from a gateway snapshot.
 * No DOM here; the canvas renderer and the tests both consume this. */

import { cssForColor } from "./colors.js";
import type { Snapshot, TileSnapshot } from "./types.js";

export interface TileView {
  id: number;
  px: number; // canvas coordinates
  py: number;
  headingRad: number;
  color: string; // gateway color name
  css: string;
  aggregate: number;
  phase: string;
  idea: string | null;
  highlighted: boolean;
}

export interface LegendEntry {
  aggregate: number;
  color: string;
  css: string;
  size: number;
  sampleIdeas: string[];
}

export interface MarkerView {
  id: number;
  px: number;
  py: number;
  radiusPx: number;
}

export interface BoardViewModel {
  tick: number;
  done: boolean;
  stale: boolean;
  tiles: TileView[];
  markers: MarkerView[];
  legend: LegendEntry[];
  unassignedCount: number;
}

export interface ViewState {
  highlightedTile: number | null;
  stale: boolean;
}

export const TILE_PX = 18;
const LEGEND_SAMPLES = 3;
const AGGREGATE_RADIUS_M = 0.5;

export interface CanvasTransform {
  scale: number;
  toPx(x: number, y: number): [number, number];
}

/** Fit the arena into the canvas, y flipped so the arena's origin is
 * bottom-left like the simulation's. */
export function makeTransform(
  arena: { width: number; height: number },
  canvasWidth: number,
  canvasHeight: number,
): CanvasTransform {
  const scale = Math.min(canvasWidth / arena.width, canvasHeight / arena.height);
  return {
    scale,
    toPx(x: number, y: number): [number, number] {
      return [x * scale, canvasHeight - y * scale];
    },
  };
}

export function buildLegend(tiles: TileSnapshot[]): LegendEntry[] {
  const byAggregate = new Map<number, TileSnapshot[]>();
  for (const tile of tiles) {
    if (tile.aggregate === 0) continue; // unassigned is not an aggregate
    const group = byAggregate.get(tile.aggregate) ?? [];
    group.push(tile);
    byAggregate.set(tile.aggregate, group);
  }
  return [...byAggregate.entries()]
    .sort(([a], [b]) => a - b)
    .map(([aggregate, members]) => {
      const color = members[0].color;
      return {
        aggregate,
        color,
        css: cssForColor(color),
        size: members.length,
        sampleIdeas: members
          .filter((t) => t.idea !== null)
          .slice(0, LEGEND_SAMPLES)
          .map((t) => t.idea as string),
      };
    });
}

export function buildViewModel(
  snapshot: Snapshot,
  state: ViewState,
  canvasWidth: number,
  canvasHeight: number,
): BoardViewModel {
  const transform = makeTransform(snapshot.arena, canvasWidth, canvasHeight);
  const tiles = snapshot.tiles.map((tile) => {
    const [px, py] = transform.toPx(tile.x, tile.y);
    return {
      id: tile.id,
      px,
      py,
      headingRad: tile.heading,
      color: tile.color,
      css: cssForColor(tile.color),
      aggregate: tile.aggregate,
      phase: tile.phase,
      idea: tile.idea,
      highlighted: state.highlightedTile === tile.id,
    };
  });
  const markers = snapshot.markers.map((marker) => {
    const [px, py] = transform.toPx(marker.x, marker.y);
    return { id: marker.id, px, py, radiusPx: AGGREGATE_RADIUS_M * transform.scale };
  });
  return {
    tick: snapshot.tick,
    done: snapshot.done,
    stale: state.stale,
    tiles,
    markers,
    legend: buildLegend(snapshot.tiles),
    unassignedCount: snapshot.metrics.unassigned_count,
  };
}

/** Blend two snapshots for animation: tile positions interpolate, every
 * discrete field (color, phase, aggregate) comes from the newer frame. */
export function interpolateSnapshots(a: Snapshot, b: Snapshot, t: number): Snapshot {
  const frac = Math.min(1, Math.max(0, t));
  const older = new Map(a.tiles.map((tile) => [tile.id, tile]));
  return {
    ...b,
    tiles: b.tiles.map((tile) => {
      const prev = older.get(tile.id);
      if (!prev) return tile;
      return {
        ...tile,
        x: prev.x + (tile.x - prev.x) * frac,
        y: prev.y + (tile.y - prev.y) * frac,
      };
    }),
  };
}
