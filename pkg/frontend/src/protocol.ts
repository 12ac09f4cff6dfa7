/**
 * Wire protocol for the session bridge: newline-delimited JSON over TCP.
 *
 * The server answers every accepted frame with a feedback message and,
 * when the scene changed, a delta whose entity payloads are canonically
 * quantized (integer micrometers / 1e-7 quaternion steps), so a client
 * folding deltas into its own document reproduces the server scene hash.
 */

export type PoseArr = [number, number, number, number, number, number, number];

export const PEN_PRIMARY = 1;
export const PEN_SECONDARY = 2;
export const OFF_A = 4;
export const OFF_B = 8;

export interface FrameMessage {
  type: "frame";
  t: number;
  head: PoseArr;
  pen: PoseArr;
  off: PoseArr;
  btn: number;
}

export interface StrokeData {
  id: number;
  kind: string;
  radius_um: number;
  color: number[];
  samples_um: number[][];
}

export interface PrimitiveData {
  id: number;
  kind: string;
  pos_um: number[];
  quat_q7: number[];
  extents_um: number[];
  color: number[];
}

export interface PlaneData {
  pos_um: number[];
  quat_q7: number[];
  grid_cell_um: number;
  half_u_um: number;
  half_v_um: number;
}

export interface WorldData {
  scale_q7: number;
  offset_um: number[];
}

export interface StyleData {
  color: number[];
  radius_um: number;
}

export type DeltaOp =
  | { op: "add_stroke"; data: StrokeData }
  | { op: "add_primitive"; data: PrimitiveData }
  | { op: "update_primitive"; data: PrimitiveData }
  | { op: "remove_primitive"; id: number }
  | { op: "set_world"; data: WorldData }
  | { op: "set_plane"; data: PlaneData | null }
  | { op: "set_style"; data: StyleData };

export interface FeedbackMessage {
  type: "feedback";
  mode: string;
  tip_position: number[];
  tip_color: number[];
  tip_radius: number;
  arrow: boolean;
  ink_drop: boolean;
  laser_ray: number[][] | null;
  hover_entity: number | null;
  selection: number[];
  menu_state: string;
  menu_center: number[] | null;
  menu_buttons: [string, number[]][];
  menu_hover: string | null;
  menu_current_color: number[];
  draft: {
    kind: string;
    variant: string;
    center: number[];
    extents: number[];
  } | null;
  draft_gold: boolean;
  wire_cube: number[];
  bin_shown: boolean;
  plane_tool_on: boolean;
}

export type ServerMessage =
  | { type: "delta"; ops: DeltaOp[] }
  | FeedbackMessage
  | { type: "scene"; data: unknown }
  | { type: "hash"; value: string }
  | { type: "recorded"; path: string; frames: number }
  | { type: "error"; msg: string };

export type ClientMessage =
  | FrameMessage
  | { type: "save_scene" }
  | { type: "load_scene"; data: unknown }
  | { type: "record"; on: boolean; path?: string }
  | { type: "hash" };

export function encodeMessage(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

/** Reassembles newline-delimited JSON from arbitrary byte chunks. */
export class LineSplitter {
  private buffer = "";

  push(chunk: string): ServerMessage[] {
    this.buffer += chunk;
    const out: ServerMessage[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (line.length > 0) out.push(JSON.parse(line) as ServerMessage);
    }
    return out;
  }
}
