// Canvas drawing for one floor of the site: occupancy grid, labeled
// locations, shaft stops, the active path polyline and the robot marker.

import { pathPolyline, robotMarker, type ViewState } from "./state.js";
import type { FloorDescription, MapDescription } from "./types.js";

const COLORS = {
  free: "#ffffff",
  occupied: "#3a3f4b",
  gridLine: "#d8dbe2",
  path: "#2e9e4f",
  robot: "#7a3fbf",
  goal: "#2e9e4f",
  label: "#1f2430",
  shaft: "#c87f1e",
  stale: "rgba(120, 120, 120, 0.45)",
};

export function cellSize(floor: FloorDescription, width: number, height: number): number {
  return Math.max(4, Math.floor(Math.min(width / floor.width, height / floor.height)));
}

function center(cell: [number, number], px: number): [number, number] {
  return [cell[0] * px + px / 2, cell[1] * px + px / 2];
}

export function drawFloor(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  map: MapDescription,
  floorId: string,
): void {
  const floor = map.floors.find((f) => f.id === floorId);
  if (!floor) return;
  const px = cellSize(floor, ctx.canvas.width, ctx.canvas.height);
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);

  for (let row = 0; row < floor.height; row++) {
    for (let col = 0; col < floor.width; col++) {
      ctx.fillStyle = floor.occupied_rows[row][col] === "1" ? COLORS.occupied : COLORS.free;
      ctx.fillRect(col * px, row * px, px, px);
    }
  }
  ctx.strokeStyle = COLORS.gridLine;
  ctx.lineWidth = 1;
  for (let col = 0; col <= floor.width; col++) {
    ctx.beginPath();
    ctx.moveTo(col * px + 0.5, 0);
    ctx.lineTo(col * px + 0.5, floor.height * px);
    ctx.stroke();
  }
  for (let row = 0; row <= floor.height; row++) {
    ctx.beginPath();
    ctx.moveTo(0, row * px + 0.5);
    ctx.lineTo(floor.width * px, row * px + 0.5);
    ctx.stroke();
  }

  for (const shaft of map.shafts) {
    for (const stop of shaft.stops) {
      if (stop.floor !== floorId) continue;
      const [x, y] = center(stop.cell, px);
      ctx.strokeStyle = COLORS.shaft;
      ctx.lineWidth = 2;
      ctx.strokeRect(x - px / 2 + 2, y - px / 2 + 2, px - 4, px - 4);
      ctx.fillStyle = COLORS.shaft;
      ctx.font = `${Math.max(9, px * 0.35)}px sans-serif`;
      ctx.fillText(shaft.id, x - px / 2 + 2, y - px / 2);
    }
  }

  for (const loc of map.locations) {
    if (loc.floor !== floorId) continue;
    const [x, y] = center(loc.cell, px);
    ctx.fillStyle = COLORS.goal;
    ctx.beginPath();
    ctx.arc(x, y, Math.max(3, px * 0.2), 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = COLORS.label;
    ctx.font = `${Math.max(10, px * 0.4)}px sans-serif`;
    ctx.fillText(loc.display_name, x + px * 0.4, y - px * 0.3);
  }

  const line = pathPolyline(view, floorId);
  if (line.length > 1) {
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = Math.max(2, px * 0.18);
    ctx.beginPath();
    const [x0, y0] = center(line[0], px);
    ctx.moveTo(x0, y0);
    for (const cell of line.slice(1)) {
      const [x, y] = center(cell, px);
      ctx.lineTo(x, y);
    }
    ctx.stroke();
  }

  const marker = robotMarker(view, floorId);
  if (marker) {
    const [x, y] = center(marker.cell, px);
    const r = Math.max(4, px * 0.3);
    ctx.fillStyle = COLORS.robot;
    ctx.beginPath();
    ctx.arc(x, y, r, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + r * Math.cos(marker.heading), y + r * Math.sin(marker.heading));
    ctx.stroke();
  }

  if (view.stale) {
    ctx.fillStyle = COLORS.stale;
    ctx.fillRect(0, 0, floor.width * px, floor.height * px);
  }
}
