import { describe, expect, it } from "vitest";
import { b64ToBytes, b64ToF32, b64ToU32, bytesToB64, f32ToB64 } from "../src/b64";

describe("byte <-> base64", () => {
  it("round-trips arbitrary bytes", () => {
    const bytes = new Uint8Array(1000);
    for (let i = 0; i < bytes.length; i++) bytes[i] = (i * 37 + 11) % 256;
    expect(Array.from(b64ToBytes(bytesToB64(bytes)))).toEqual(Array.from(bytes));
  });

  it("matches the platform encoder on small inputs", () => {
    const bytes = new Uint8Array([0, 0, 128, 63]);
    expect(bytesToB64(bytes)).toBe(btoa(String.fromCharCode(0, 0, 128, 63)));
  });

  it("handles buffers larger than one chunk", () => {
    const bytes = new Uint8Array(0x2000 * 3 + 5).fill(7);
    expect(b64ToBytes(bytesToB64(bytes)).length).toBe(bytes.length);
  });
});

describe("float32 payloads", () => {
  it("encodes 1.0f as little-endian IEEE bytes", () => {
    // 1.0f is 00 00 80 3f little-endian
    expect(f32ToB64(new Float32Array([1]))).toBe("AACAPw==");
    expect(f32ToB64(new Float32Array([0.5]))).toBe("AAAAPw==");
  });

  it("round-trips bit-exactly", () => {
    const vals = new Float32Array([0, 0.1, 0.25, 0.7, 1, 1e-30, Math.fround(1 / 3)]);
    const back = b64ToF32(f32ToB64(vals), vals.length);
    expect(back.length).toBe(vals.length);
    for (let i = 0; i < vals.length; i++) {
      expect(Object.is(back[i], vals[i])).toBe(true);
    }
  });

  it("rejects a count mismatch", () => {
    const b64 = f32ToB64(new Float32Array([1, 2, 3]));
    expect(() => b64ToF32(b64, 4)).toThrow(/expected 4/);
  });

  it("rejects byte lengths that are not a multiple of 4", () => {
    expect(() => b64ToF32(bytesToB64(new Uint8Array([1, 2, 3])))).toThrow(
      /multiple of 4/,
    );
  });

  it("accepts the empty payload", () => {
    expect(b64ToF32(f32ToB64(new Float32Array(0))).length).toBe(0);
  });
});

describe("uint32 payloads", () => {
  it("round-trips including the extremes", () => {
    const vals = new Uint32Array([0, 1, 2, 4294967295]);
    const bytes = new Uint8Array(vals.length * 4);
    new DataView(bytes.buffer).setUint32(0, vals[0], true);
    new DataView(bytes.buffer).setUint32(4, vals[1], true);
    new DataView(bytes.buffer).setUint32(8, vals[2], true);
    new DataView(bytes.buffer).setUint32(12, vals[3], true);
    const back = b64ToU32(bytesToB64(bytes), 4);
    expect(Array.from(back)).toEqual(Array.from(vals));
  });

  it("rejects a count mismatch", () => {
    expect(() => b64ToU32(bytesToB64(new Uint8Array(8)), 3)).toThrow(/expected 3/);
  });
});
