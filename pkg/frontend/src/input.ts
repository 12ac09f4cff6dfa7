/**
 * Desktop input emulation: a mouse ray positions the pen tip at a
 * configurable working depth, modifier keys set the off-hand palm facing
 * (U = up, D = down, T = toward the pen), and buttons map onto mouse
 * buttons / keys.  Frames are emitted at a fixed 60 Hz with strictly
 * increasing integer millisecond timestamps.
 */

import { OFF_A, OFF_B, PEN_PRIMARY, PEN_SECONDARY, type FrameMessage, type PoseArr } from "./protocol.js";

export type Vec = [number, number, number];
export type Quat = [number, number, number, number]; // x, y, z, w

export const QUAT_IDENTITY: Quat = [0, 0, 0, 1];
export const QUAT_PALM_DOWN: Quat = [1, 0, 0, 0]; // 180 degrees about X

function norm(v: Vec): number {
  return Math.hypot(v[0], v[1], v[2]);
}

function scale(v: Vec, s: number): Vec {
  return [v[0] * s, v[1] * s, v[2] * s];
}

function cross(a: Vec, b: Vec): Vec {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function dot(a: Vec, b: Vec): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/** Minimal rotation mapping unit vector a onto unit vector b. */
export function quatBetween(a: Vec, b: Vec): Quat {
  const c = cross(a, b);
  const d = dot(a, b);
  if (d < -0.999999) {
    // opposite: rotate 180 degrees about any perpendicular axis
    const axis: Vec = Math.abs(a[0]) < 0.9 ? [1, 0, 0] : [0, 1, 0];
    const p = cross(a, axis);
    const n = norm(p);
    return [p[0] / n, p[1] / n, p[2] / n, 0];
  }
  const w = 1 + d;
  const q: Quat = [c[0], c[1], c[2], w];
  const qn = Math.hypot(q[0], q[1], q[2], q[3]);
  return [q[0] / qn, q[1] / qn, q[2] / qn, q[3] / qn];
}

export type PalmKey = "up" | "down" | "toward" | "neutral";

const FRAME_INTERVAL_MS = 1000 / 60;

export interface EmulatorOptions {
  workingDepth?: number; // pen distance along the mouse ray, meters
  headPosition?: Vec;
  offhandPosition?: Vec;
}

export class InputEmulator {
  workingDepth: number;
  palm: PalmKey = "neutral";
  buttons = 0;
  penRotation: Quat = QUAT_IDENTITY;
  private rayOrigin: Vec;
  private rayDirection: Vec = [0, 0, -1];
  private offhand: Vec;
  private head: Vec;
  private clock = 0; // fractional milliseconds
  private lastT = 0;

  constructor(opts: EmulatorOptions = {}) {
    this.workingDepth = opts.workingDepth ?? 0.8;
    this.head = opts.headPosition ?? [0, 1.7, 0];
    this.offhand = opts.offhandPosition ?? [-0.3, 1.1, -0.5];
    this.rayOrigin = [...this.head];
  }

  /** Mouse ray in physical coordinates (typically from the camera). */
  setMouseRay(origin: Vec, direction: Vec): void {
    const n = norm(direction);
    this.rayOrigin = origin;
    this.rayDirection = scale(direction, 1 / n);
  }

  setOffhandPosition(p: Vec): void {
    this.offhand = p;
  }

  keyDown(key: string): void {
    switch (key.toLowerCase()) {
      case "u":
        this.palm = "up";
        break;
      case "d":
        this.palm = "down";
        break;
      case "t":
        this.palm = "toward";
        break;
      case "a":
        this.buttons |= OFF_A;
        break;
      case "b":
        this.buttons |= OFF_B;
        break;
      case "g":
        this.buttons |= PEN_SECONDARY;
        break;
    }
  }

  keyUp(key: string): void {
    switch (key.toLowerCase()) {
      case "u":
      case "d":
      case "t":
        if (this.palm !== "neutral") this.palm = "neutral";
        break;
      case "a":
        this.buttons &= ~OFF_A;
        break;
      case "b":
        this.buttons &= ~OFF_B;
        break;
      case "g":
        this.buttons &= ~PEN_SECONDARY;
        break;
    }
  }

  mouseDown(): void {
    this.buttons |= PEN_PRIMARY;
  }

  mouseUp(): void {
    this.buttons &= ~PEN_PRIMARY;
  }

  penPosition(): Vec {
    return [
      this.rayOrigin[0] + this.rayDirection[0] * this.workingDepth,
      this.rayOrigin[1] + this.rayDirection[1] * this.workingDepth,
      this.rayOrigin[2] + this.rayDirection[2] * this.workingDepth,
    ];
  }

  private palmQuat(pen: Vec): Quat {
    switch (this.palm) {
      case "up":
        return QUAT_IDENTITY;
      case "down":
        return QUAT_PALM_DOWN;
      case "toward": {
        const to: Vec = [
          pen[0] - this.offhand[0],
          pen[1] - this.offhand[1],
          pen[2] - this.offhand[2],
        ];
        const n = norm(to);
        if (n < 1e-9) return QUAT_IDENTITY;
        return quatBetween([0, 1, 0], scale(to, 1 / n));
      }
      case "neutral":
        // 90 degrees from up, away from the pen: outside every enter cone
        return quatBetween([0, 1, 0], [-1, 0, 0]);
    }
  }

  /** Emit the next 60 Hz frame with a strictly increasing integer t. */
  nextFrame(): FrameMessage {
    this.clock += FRAME_INTERVAL_MS;
    const t = Math.max(this.lastT + 1, Math.round(this.clock));
    this.lastT = t;
    const pen = this.penPosition();
    const palm = this.palmQuat(pen);
    const pose = (p: Vec, q: Quat): PoseArr => [p[0], p[1], p[2], ...q];
    return {
      type: "frame",
      t,
      head: pose(this.head, QUAT_IDENTITY),
      pen: pose(pen, this.penRotation),
      off: pose(this.offhand, palm),
      btn: this.buttons,
    };
  }
}
