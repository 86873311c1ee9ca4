/** Canvas renderer: draws exactly what the view model says, nothing else. */

import type { BoardViewModel, TileView } from "./viewmodel.js";
import { TILE_PX } from "./viewmodel.js";

export class BoardRenderer {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(private readonly canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(vm: BoardViewModel): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "#1c2124";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    for (const marker of vm.markers) {
      ctx.beginPath();
      ctx.arc(marker.px, marker.py, marker.radiusPx, 0, Math.PI * 2);
      ctx.strokeStyle = "#3a4449";
      ctx.setLineDash([6, 6]);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.fillStyle = "#5c6a70";
      ctx.font = "12px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(`M${marker.id}`, marker.px, marker.py - marker.radiusPx - 6);
    }

    for (const tile of vm.tiles) {
      this.drawTile(tile);
    }
  }

  private drawTile(tile: TileView): void {
    const { ctx } = this;
    const half = TILE_PX / 2;
    ctx.save();
    ctx.translate(tile.px, tile.py);
    ctx.rotate(-tile.headingRad); // canvas y is flipped
    ctx.fillStyle = tile.css;
    ctx.fillRect(-half, -half, TILE_PX, TILE_PX);
    ctx.strokeStyle = tile.highlighted ? "#ffee58" : "#101314";
    ctx.lineWidth = tile.highlighted ? 3 : 1;
    ctx.strokeRect(-half, -half, TILE_PX, TILE_PX);
    // heading notch
    ctx.beginPath();
    ctx.moveTo(half - 4, 0);
    ctx.lineTo(half, 0);
    ctx.strokeStyle = "#101314";
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.restore();
  }

  /** Hit test in canvas pixels, for idea tooltips. */
  tileAt(vm: BoardViewModel, px: number, py: number): TileView | null {
    const half = TILE_PX / 2;
    for (let i = vm.tiles.length - 1; i >= 0; i--) {
      const tile = vm.tiles[i];
      if (Math.abs(tile.px - px) <= half && Math.abs(tile.py - py) <= half) {
        return tile;
      }
    }
    return null;
  }
}
