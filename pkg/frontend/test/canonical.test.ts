import { describe, expect, it } from "vitest";
import {
  canonicalStringify,
  emptySceneDoc,
  q7,
  roundHalfEven,
  sceneDocHash,
  um,
} from "../src/canonical.js";

// frozen by the engine's test suite; an empty scene must hash identically
const EMPTY_SCENE_HASH =
  "0f395d68355a076a5abf5a3c9a9a1b21c4664f2f7e5a08780e507d99aa6e72d1";

describe("roundHalfEven", () => {
  it("rounds ties to the even neighbor", () => {
    expect(roundHalfEven(0.5)).toBe(0);
    expect(roundHalfEven(1.5)).toBe(2);
    expect(roundHalfEven(2.5)).toBe(2);
    expect(roundHalfEven(-0.5)).toBe(0);
    expect(roundHalfEven(-1.5)).toBe(-2);
    expect(roundHalfEven(-2.5)).toBe(-2);
  });

  it("rounds non-ties to nearest", () => {
    expect(roundHalfEven(1.49)).toBe(1);
    expect(roundHalfEven(1.51)).toBe(2);
    expect(roundHalfEven(-1.49)).toBe(-1);
    expect(roundHalfEven(-1.51)).toBe(-2);
  });

  it("quantizes meters and unit-scale values", () => {
    expect(um(0.004)).toBe(4000);
    expect(um(1.0)).toBe(1000000);
    expect(q7(1.0)).toBe(10000000);
    expect(q7(-0.7071067811865476)).toBe(-7071068);
  });
});

describe("canonicalStringify", () => {
  it("sorts keys and stays compact", () => {
    expect(canonicalStringify({ b: 1, a: [2, null], c: { z: 0, y: "s" } })).toBe(
      '{"a":[2,null],"b":1,"c":{"y":"s","z":0}}',
    );
  });
});

describe("empty scene", () => {
  it("hashes identically to the engine", async () => {
    expect(await sceneDocHash(emptySceneDoc())).toBe(EMPTY_SCENE_HASH);
  });
});
