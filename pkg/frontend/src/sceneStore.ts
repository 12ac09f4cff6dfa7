/**
 * Client-side scene document kept in sync by folding server deltas.
 * The UI never mutates scene state except through these ops; the server
 * stays authoritative and the local hash must always match its hash.
 */

import { emptySceneDoc, sceneDocHash, type SceneDoc } from "./canonical.js";
import type { DeltaOp } from "./protocol.js";

export class SceneStore {
  doc: SceneDoc;
  private listeners: (() => void)[] = [];

  constructor(doc?: SceneDoc) {
    this.doc = doc ?? emptySceneDoc();
  }

  onChange(cb: () => void): void {
    this.listeners.push(cb);
  }

  /** Replace the whole document (connect / reconnect refresh). */
  replace(doc: SceneDoc): void {
    this.doc = doc;
    this.notify();
  }

  applyOps(ops: DeltaOp[]): void {
    for (const op of ops) this.applyOp(op);
    this.notify();
  }

  private applyOp(op: DeltaOp): void {
    const d = this.doc;
    switch (op.op) {
      case "add_stroke":
        d.strokes.push(op.data);
        d.next_id = Math.max(d.next_id, op.data.id + 1);
        break;
      case "add_primitive":
        d.primitives.push(op.data);
        d.next_id = Math.max(d.next_id, op.data.id + 1);
        break;
      case "update_primitive":
        d.primitives = d.primitives.map((p) =>
          p.id === op.data.id ? op.data : p,
        );
        break;
      case "remove_primitive":
        d.primitives = d.primitives.filter((p) => p.id !== op.id);
        break;
      case "set_world":
        d.world = op.data;
        break;
      case "set_plane":
        d.proxy_plane = op.data;
        break;
      case "set_style":
        d.style = op.data;
        break;
    }
  }

  hash(): Promise<string> {
    return sceneDocHash(this.doc);
  }

  private notify(): void {
    for (const cb of this.listeners) cb();
  }
}
