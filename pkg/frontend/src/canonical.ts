/**
 * Canonical scene document and hashing, matching the engine byte for byte.
 *
 * Lengths are integer micrometers (round half to even), quaternion
 * components and the world scale integer 1e-7 steps; keys are sorted
 * lexicographically and the JSON is compact, so SHA-256 of the text is
 * identical to the server's hash of the same scene.
 */

import type { PlaneData, PrimitiveData, StrokeData, StyleData, WorldData } from "./protocol.js";

export interface SceneDoc {
  format: "airsketch-scene";
  version: 1;
  next_id: number;
  tracked_volume_um: number[];
  world: WorldData;
  style: StyleData;
  proxy_plane: PlaneData | null;
  strokes: StrokeData[];
  primitives: PrimitiveData[];
}

export const DEFAULT_COLOR = [255, 255, 255, 255];
export const DEFAULT_RADIUS_UM = 4000; // 0.004 m

export function emptySceneDoc(trackedVolume: number[] = [4, 2, 3]): SceneDoc {
  return {
    format: "airsketch-scene",
    version: 1,
    next_id: 1,
    tracked_volume_um: trackedVolume.map((v) => um(v)),
    world: { scale_q7: 10000000, offset_um: [0, 0, 0] },
    style: { color: [...DEFAULT_COLOR], radius_um: DEFAULT_RADIUS_UM },
    proxy_plane: null,
    strokes: [],
    primitives: [],
  };
}

/** Round half to even, like Python's round(). */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function um(meters: number): number {
  return roundHalfEven(meters * 1e6);
}

export function q7(value: number): number {
  return roundHalfEven(value * 1e7);
}

/** Compact JSON with lexicographically sorted object keys. */
export function canonicalStringify(value: unknown): string {
  if (value === null) return "null";
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  if (typeof value === "object") {
    const obj = value as Record<string, unknown>;
    const parts = Object.keys(obj)
      .sort()
      .map((k) => JSON.stringify(k) + ":" + canonicalStringify(obj[k]));
    return "{" + parts.join(",") + "}";
  }
  return JSON.stringify(value);
}

export async function sha256Hex(text: string): Promise<string> {
  const bytes = new TextEncoder().encode(text);
  const digest = await crypto.subtle.digest("SHA-256", bytes);
  return [...new Uint8Array(digest)]
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

export async function sceneDocHash(doc: SceneDoc): Promise<string> {
  return sha256Hex(canonicalStringify(doc));
}
