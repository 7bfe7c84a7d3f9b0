import { describe, expect, it } from "vitest";
import { clampBrush, EditBuffer, UNDO_DEPTH } from "../src/brush";
import type { BrushState } from "../src/brush";

const ADD: BrushState = { radius: 6, intensity: 0.8, mode: "add" };

function argmax(values: Float32Array): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) if (values[i] > values[best]) best = i;
  return best;
}

describe("EditBuffer shape", () => {
  it("allocates exactly width*height values", () => {
    const buf = new EditBuffer(7, 5);
    expect(buf.values.length).toBe(35);
    expect(buf.width).toBe(7);
    expect(buf.height).toBe(5);
  });

  it("rejects a seed whose size does not match the view", () => {
    expect(() => new EditBuffer(4, 4, new Float32Array(15))).toThrow(/needs 16/);
    expect(() => new EditBuffer(0, 4)).toThrow(/bad buffer shape/);
  });

  it("copies the seed instead of aliasing it", () => {
    const seed = new Float32Array([0.1, 0.2, 0.3, 0.4]);
    const buf = new EditBuffer(2, 2, seed);
    buf.stamp(0, 0, { radius: 1, intensity: 1, mode: "add" });
    expect(seed[0]).toBeCloseTo(0.1, 7);
  });
});

describe("stamp", () => {
  it("a single click peaks exactly at the click position", () => {
    const buf = new EditBuffer(33, 33);
    buf.stamp(16, 16, ADD);
    const peak = argmax(buf.values);
    expect(peak % 33).toBe(16);
    expect(Math.floor(peak / 33)).toBe(16);
    expect(buf.values[peak]).toBeCloseTo(0.8, 6);
  });

  it("falls off as a Gaussian with sigma radius/2", () => {
    const buf = new EditBuffer(33, 33);
    buf.stamp(16, 16, ADD);
    const sigma = ADD.radius / 2;
    const at = (dx: number, dy: number) => buf.values[(16 + dy) * 33 + (16 + dx)];
    for (const [dx, dy] of [[1, 0], [0, 2], [3, 4]]) {
      const d2 = dx * dx + dy * dy;
      const want = 0.8 * Math.exp(-d2 / (2 * sigma * sigma));
      expect(at(dx, dy)).toBeCloseTo(want, 6);
    }
    // outside the 1.5*radius cutoff nothing is written
    expect(at(10, 0)).toBe(0);
    expect(at(0, -12)).toBe(0);
  });

  it("add is a max blend, so restamping never darkens", () => {
    const buf = new EditBuffer(17, 17);
    buf.stamp(8, 8, ADD);
    const before = buf.values.slice();
    buf.stamp(8, 8, { ...ADD, intensity: 0.3 });
    for (let i = 0; i < before.length; i++) {
      expect(buf.values[i]).toBeGreaterThanOrEqual(before[i]);
    }
  });

  it("clamps to [0, 1] even with out-of-range intensity", () => {
    const buf = new EditBuffer(9, 9);
    buf.stamp(4, 4, { radius: 4, intensity: 5, mode: "add" });
    expect(buf.values[4 * 9 + 4]).toBe(1);
    for (const v of buf.values) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
  });

  it("erase pulls painted values toward 0 and floors at 0", () => {
    const buf = new EditBuffer(17, 17, new Float32Array(289).fill(0.5));
    buf.stamp(8, 8, { radius: 4, intensity: 1, mode: "erase" });
    expect(buf.values[8 * 17 + 8]).toBe(0);
    const near = buf.values[8 * 17 + 10];
    expect(near).toBeLessThan(0.5);
    expect(near).toBeGreaterThanOrEqual(0);
    // far corner untouched
    expect(buf.values[0]).toBeCloseTo(0.5, 7);
  });

  it("marks the buffer touched", () => {
    const buf = new EditBuffer(5, 5);
    expect(buf.touched).toBe(false);
    buf.stamp(2, 2, ADD);
    expect(buf.touched).toBe(true);
  });
});

describe("undo", () => {
  it("one undo restores the exact pre-stroke buffer", () => {
    const seed = new Float32Array(64);
    for (let i = 0; i < 64; i++) seed[i] = (i % 10) / 10;
    const buf = new EditBuffer(8, 8, seed);
    const before = buf.values.slice();
    buf.beginStroke();
    buf.stamp(3, 3, ADD);
    buf.stamp(4, 4, ADD);
    buf.stamp(5, 3, ADD);
    buf.endStroke();
    expect(Array.from(buf.values)).not.toEqual(Array.from(before));
    expect(buf.undo()).toBe(true);
    for (let i = 0; i < 64; i++) {
      expect(Object.is(buf.values[i], before[i])).toBe(true);
    }
  });

  it("groups all stamps of one stroke into one undo step", () => {
    const buf = new EditBuffer(16, 16);
    buf.beginStroke();
    for (let x = 2; x < 14; x++) buf.stamp(x, 8, ADD);
    buf.endStroke();
    expect(buf.undoDepth).toBe(1);
    buf.undo();
    expect(Array.from(buf.values)).toEqual(Array.from(new Float32Array(256)));
  });

  it("supports at least 20 undo steps", () => {
    expect(UNDO_DEPTH).toBeGreaterThanOrEqual(20);
    const buf = new EditBuffer(64, 1);
    for (let i = 0; i < 40; i++) {
      buf.beginStroke();
      buf.stamp(i, 0, { radius: 1, intensity: 1, mode: "add" });
      buf.endStroke();
    }
    let undone = 0;
    while (buf.undo()) undone++;
    expect(undone).toBeGreaterThanOrEqual(20);
    expect(buf.undo()).toBe(false);
  });

  it("returns false on an empty stack", () => {
    expect(new EditBuffer(4, 4).undo()).toBe(false);
  });

  it("beginStroke is idempotent while a stroke is open", () => {
    const buf = new EditBuffer(8, 8);
    buf.beginStroke();
    buf.stamp(2, 2, ADD);
    buf.beginStroke(); // pointermove jitter must not split the stroke
    buf.stamp(5, 5, ADD);
    buf.endStroke();
    expect(buf.undoDepth).toBe(1);
  });
});

describe("clampBrush", () => {
  it("clamps intensity to [0, 1] and radius to at least 1", () => {
    const b = clampBrush({ radius: 0, intensity: -2, mode: "add" });
    expect(b.radius).toBe(1);
    expect(b.intensity).toBe(0);
    const c = clampBrush({ radius: 9999, intensity: 3, mode: "erase" });
    expect(c.radius).toBe(256);
    expect(c.intensity).toBe(1);
    expect(c.mode).toBe("erase");
  });
});
