// Pure view state for the console. The renderer reads this and nothing else,
// so "what is on screen" is testable without a DOM: the robot marker always
// comes from the last received state message (no client-side extrapolation).

import type {
  Cell,
  ConnectionStatus,
  MapDescription,
  StatePayload,
  StreamMessage,
} from "./types.js";

export type OperatorStatus = "pending" | "commanded" | "ignored" | "failed";

export type LogEntry =
  | { who: "operator"; text: string; status: OperatorStatus; note?: string }
  | { who: "robot"; text: string };

export interface ViewState {
  map: MapDescription | null;
  lastState: StatePayload | null;
  pinnedFloor: string | null; // operator picked a tab; null = follow the robot
  connection: ConnectionStatus;
  stale: boolean; // true when the view may lag reality (connection lost)
  log: LogEntry[];
}

export function initialView(): ViewState {
  return {
    map: null,
    lastState: null,
    pinnedFloor: null,
    connection: "connecting",
    stale: false,
    log: [],
  };
}

export function setMap(view: ViewState, map: MapDescription): ViewState {
  return { ...view, map };
}

export function applyStream(view: ViewState, msg: StreamMessage): ViewState {
  if (msg.kind === "state") {
    return { ...view, lastState: msg.payload, stale: false };
  }
  return { ...view, log: [...view.log, { who: "robot", text: msg.payload.text }] };
}

export function setConnection(view: ViewState, status: ConnectionStatus): ViewState {
  return { ...view, connection: status, stale: status !== "open" ? true : view.stale };
}

export function pinFloor(view: ViewState, floorId: string | null): ViewState {
  return { ...view, pinnedFloor: floorId };
}

/** Floor currently shown: pinned tab if any, else auto-follow the robot. */
export function activeFloor(view: ViewState): string | null {
  if (view.pinnedFloor !== null) return view.pinnedFloor;
  if (view.lastState !== null) return view.lastState.floor_id;
  return view.map?.floors[0]?.id ?? null;
}

/** Robot cell to draw on the given floor, straight from the last StateMsg. */
export function robotMarker(view: ViewState, floorId: string): { cell: Cell; heading: number } | null {
  const s = view.lastState;
  if (s === null || s.floor_id !== floorId) return null;
  return { cell: s.cell, heading: s.heading_rad };
}

/** Active path waypoints crossing the given floor, for the polyline. */
export function pathPolyline(view: ViewState, floorId: string): Cell[] {
  const path = view.lastState?.path;
  if (!path) return [];
  const cells: Cell[] = [];
  for (const seg of path.segments) {
    if (seg.floor_id === floorId) cells.push(...seg.waypoints);
  }
  return cells;
}

// -- conversation log -------------------------------------------------------

export function operatorSaid(view: ViewState, text: string): { view: ViewState; index: number } {
  const entry: LogEntry = { who: "operator", text, status: "pending" };
  return { view: { ...view, log: [...view.log, entry] }, index: view.log.length };
}

function updateEntry(view: ViewState, index: number, patch: Partial<LogEntry>): ViewState {
  const log = view.log.map((entry, i) => (i === index ? { ...entry, ...patch } : entry));
  return { ...view, log: log as LogEntry[] };
}

export function markCommanded(view: ViewState, index: number): ViewState {
  return updateEntry(view, index, { status: "commanded" });
}

export function markIgnored(view: ViewState, index: number): ViewState {
  return updateEntry(view, index, { status: "ignored", note: "ignored (no wake word)" });
}

export function markFailed(view: ViewState, index: number, note: string): ViewState {
  return updateEntry(view, index, { status: "failed", note });
}
