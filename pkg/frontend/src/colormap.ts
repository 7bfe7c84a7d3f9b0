// Fixed perceptual ramp (dark violet -> teal -> yellow). Every overlay and
// the legend use this one table so intensity reads the same across raters,
// sessions, and screenshots.

type Rgb = [number, number, number];

const STOPS: [number, Rgb][] = [
  [0.0, [68, 1, 84]],
  [0.125, [71, 44, 122]],
  [0.25, [59, 81, 139]],
  [0.375, [44, 113, 142]],
  [0.5, [33, 144, 141]],
  [0.625, [39, 173, 129]],
  [0.75, [92, 200, 99]],
  [0.875, [170, 220, 50]],
  [1.0, [253, 231, 37]],
];

export function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** Piecewise-linear lookup into the ramp; input is clamped to [0, 1]. */
export function heatColor(t: number): Rgb {
  const x = clamp01(t);
  for (let i = 1; i < STOPS.length; i++) {
    const [t1, c1] = STOPS[i];
    if (x <= t1) {
      const [t0, c0] = STOPS[i - 1];
      const f = (x - t0) / (t1 - t0);
      return [
        c0[0] + f * (c1[0] - c0[0]),
        c0[1] + f * (c1[1] - c0[1]),
        c0[2] + f * (c1[2] - c0[2]),
      ];
    }
  }
  return STOPS[STOPS.length - 1][1];
}

/**
 * RGBA overlay pixels for a heatmap. Alpha scales with both the global
 * opacity and the local value, so zero heat stays fully transparent and
 * opacity 0 leaves the raw image untouched.
 */
export function heatToOverlay(
  values: ArrayLike<number>,
  width: number,
  height: number,
  opacity: number,
): Uint8ClampedArray {
  const n = width * height;
  if (values.length !== n) {
    throw new Error(`overlay needs ${n} values, got ${values.length}`);
  }
  const alpha = clamp01(opacity);
  const out = new Uint8ClampedArray(n * 4);
  for (let i = 0; i < n; i++) {
    const v = clamp01(values[i]);
    const [r, g, b] = heatColor(v);
    const o = i * 4;
    out[o] = Math.round(r);
    out[o + 1] = Math.round(g);
    out[o + 2] = Math.round(b);
    out[o + 3] = Math.round(255 * alpha * v);
  }
  return out;
}

/** Opaque horizontal gradient strip for the legend, `height` identical rows. */
export function legendPixels(width: number, height = 1): Uint8ClampedArray {
  const row = new Uint8ClampedArray(width * 4);
  for (let x = 0; x < width; x++) {
    const [r, g, b] = heatColor(width <= 1 ? 0 : x / (width - 1));
    const o = x * 4;
    row[o] = Math.round(r);
    row[o + 1] = Math.round(g);
    row[o + 2] = Math.round(b);
    row[o + 3] = 255;
  }
  const out = new Uint8ClampedArray(width * height * 4);
  for (let y = 0; y < height; y++) out.set(row, y * width * 4);
  return out;
}
