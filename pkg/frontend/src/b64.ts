// base64 <-> typed-array helpers. The service serializes float32/uint32
// buffers as little-endian bytes; DataView keeps the byte order explicit
// so an encoded payload round-trips bit-identically on any platform.

export function bytesToB64(bytes: Uint8Array): string {
  let bin = "";
  const chunk = 0x2000; // avoid call-stack limits on large buffers
  for (let i = 0; i < bytes.length; i += chunk) {
    bin += String.fromCharCode(...bytes.subarray(i, i + chunk));
  }
  return btoa(bin);
}

export function b64ToBytes(b64: string): Uint8Array {
  const bin = atob(b64);
  const out = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
  return out;
}

export function f32ToB64(values: Float32Array): string {
  const buf = new ArrayBuffer(values.length * 4);
  const dv = new DataView(buf);
  for (let i = 0; i < values.length; i++) dv.setFloat32(i * 4, values[i], true);
  return bytesToB64(new Uint8Array(buf));
}

export function b64ToF32(b64: string, expected?: number): Float32Array {
  const bytes = b64ToBytes(b64);
  if (bytes.length % 4 !== 0) {
    throw new Error(`float32 payload is ${bytes.length} bytes, not a multiple of 4`);
  }
  const n = bytes.length / 4;
  if (expected !== undefined && n !== expected) {
    throw new Error(`expected ${expected} float32 values, got ${n}`);
  }
  const dv = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) out[i] = dv.getFloat32(i * 4, true);
  return out;
}

export function b64ToU32(b64: string, expected?: number): Uint32Array {
  const bytes = b64ToBytes(b64);
  if (bytes.length % 4 !== 0) {
    throw new Error(`uint32 payload is ${bytes.length} bytes, not a multiple of 4`);
  }
  const n = bytes.length / 4;
  if (expected !== undefined && n !== expected) {
    throw new Error(`expected ${expected} uint32 values, got ${n}`);
  }
  const dv = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const out = new Uint32Array(n);
  for (let i = 0; i < n; i++) out[i] = dv.getUint32(i * 4, true);
  return out;
}
