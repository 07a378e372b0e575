// Wire types mirroring the gateway's documented JSON schemas.

export type Cell = [number, number]; // [col, row]

export interface FloorDescription {
  id: string;
  width: number;
  height: number;
  resolution_m: number;
  occupied_rows: string[]; // row 0 first, '0' free / '1' occupied
}

export interface LocationDescription {
  id: string;
  display_name: string;
  floor: string;
  cell: Cell;
  heading_rad: number;
}

export interface ShaftStopDescription {
  floor: string;
  cell: Cell;
}

export interface ShaftDescription {
  id: string;
  stops: ShaftStopDescription[];
}

export interface MapDescription {
  floors: FloorDescription[];
  locations: LocationDescription[];
  shafts: ShaftDescription[];
  elevator_cost: number;
}

export interface PathSegment {
  floor_id: string;
  waypoints: Cell[];
}

export interface PathDescription {
  segments: PathSegment[];
  transitions: { shaft_id: string; from_index: number; to_index: number }[];
  total_cost: number;
}

export interface StatePayload {
  floor_id: string;
  cell: Cell;
  heading_rad: number;
  status: "idle" | "navigating" | "stopped";
  goal_location_id?: string;
  path?: PathDescription;
}

export interface SpeechOutPayload {
  text: string;
}

export type StreamMessage =
  | { t: number; kind: "state"; payload: StatePayload }
  | { t: number; kind: "speech_out"; payload: SpeechOutPayload };

export interface IntentPayload {
  kind: "go_to" | "stop" | "unknown";
  location_id?: string;
  tokens?: string[];
}

export interface UtteranceReply {
  outcome: "commanded" | "ignored";
  intent: IntentPayload | null;
  response: string | null;
}

export type ConnectionStatus = "connecting" | "open" | "lost";
