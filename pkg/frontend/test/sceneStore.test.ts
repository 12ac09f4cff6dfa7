import { describe, expect, it } from "vitest";
import { SceneStore } from "../src/sceneStore.js";
import type { PrimitiveData, StrokeData } from "../src/protocol.js";

const stroke: StrokeData = {
  id: 1,
  kind: "air",
  radius_um: 4000,
  color: [255, 255, 255, 255],
  samples_um: [
    [0, 1000000, 0],
    [100000, 1100000, 0],
  ],
};

const prim: PrimitiveData = {
  id: 2,
  kind: "box",
  pos_um: [0, 500000, -1000000],
  quat_q7: [0, 0, 0, 10000000],
  extents_um: [400000, 400000, 400000],
  color: [255, 255, 255, 255],
};

describe("SceneStore", () => {
  it("tracks next_id through adds", () => {
    const store = new SceneStore();
    store.applyOps([
      { op: "add_stroke", data: stroke },
      { op: "add_primitive", data: prim },
    ]);
    expect(store.doc.next_id).toBe(3);
    expect(store.doc.strokes).toHaveLength(1);
    expect(store.doc.primitives).toHaveLength(1);
  });

  it("updates and removes primitives by id", () => {
    const store = new SceneStore();
    store.applyOps([{ op: "add_primitive", data: prim }]);
    const moved = { ...prim, pos_um: [100000, 500000, -1000000] };
    store.applyOps([{ op: "update_primitive", data: moved }]);
    expect(store.doc.primitives[0].pos_um[0]).toBe(100000);
    store.applyOps([{ op: "remove_primitive", id: prim.id }]);
    expect(store.doc.primitives).toHaveLength(0);
    // deleted ids are never reused, so next_id stays advanced
    expect(store.doc.next_id).toBe(3);
  });

  it("applies world, plane, and style settings", () => {
    const store = new SceneStore();
    store.applyOps([
      { op: "set_world", data: { scale_q7: 20000000, offset_um: [0, 0, 100000] } },
      { op: "set_style", data: { color: [220, 50, 47, 255], radius_um: 8000 } },
      { op: "set_plane", data: null },
    ]);
    expect(store.doc.world.scale_q7).toBe(20000000);
    expect(store.doc.style.radius_um).toBe(8000);
    expect(store.doc.proxy_plane).toBeNull();
  });

  it("hash is deterministic and changes with content", async () => {
    const a = new SceneStore();
    const b = new SceneStore();
    const h0 = await a.hash();
    expect(await b.hash()).toBe(h0);
    a.applyOps([{ op: "add_stroke", data: stroke }]);
    expect(await a.hash()).not.toBe(h0);
    b.applyOps([{ op: "add_stroke", data: stroke }]);
    expect(await b.hash()).toBe(await a.hash());
  });
});
