// Gaussian brush over a single-view heatmap buffer. The buffer always has
// exactly width*height float32 values in [0, 1]; strokes snapshot the buffer
// on begin so one undo restores the exact pre-stroke state.

export type BrushMode = "add" | "erase";

export interface BrushState {
  radius: number; // pixels
  intensity: number; // [0, 1]
  mode: BrushMode;
}

export const UNDO_DEPTH = 32;

export function clampBrush(b: BrushState): BrushState {
  return {
    radius: Math.max(1, Math.min(256, b.radius)),
    intensity: b.intensity < 0 ? 0 : b.intensity > 1 ? 1 : b.intensity,
    mode: b.mode,
  };
}

export class EditBuffer {
  readonly width: number;
  readonly height: number;
  values: Float32Array;
  touched = false;
  strokeOpen = false;

  private undoStack: Float32Array[] = [];

  constructor(width: number, height: number, initial?: Float32Array) {
    if (width <= 0 || height <= 0) {
      throw new Error(`bad buffer shape ${height}x${width}`);
    }
    this.width = width;
    this.height = height;
    this.values = new Float32Array(width * height);
    if (initial !== undefined) {
      if (initial.length !== width * height) {
        throw new Error(
          `seed has ${initial.length} values, view needs ${width * height}`,
        );
      }
      this.values.set(initial);
    }
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  /** Snapshot the buffer; every stamp until endStroke() is one undo unit. */
  beginStroke(): void {
    if (this.strokeOpen) return;
    this.strokeOpen = true;
    this.undoStack.push(this.values.slice());
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
  }

  endStroke(): void {
    this.strokeOpen = false;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) return false;
    this.values = prev;
    this.strokeOpen = false;
    this.touched = true;
    return true;
  }

  /**
   * Gaussian stamp centered on (x, y). Add raises values toward the brush
   * intensity (max blend, so overlapping stamps in a stroke stay smooth);
   * erase subtracts and clamps at 0. sigma is radius/2 and the stamp is
   * cut off at 1.5*radius (3 sigma).
   */
  stamp(x: number, y: number, brush: BrushState): void {
    const { radius, intensity, mode } = clampBrush(brush);
    const sigma = radius / 2;
    const denom = 2 * sigma * sigma;
    const reach = radius * 1.5;
    const x0 = Math.max(0, Math.floor(x - reach));
    const x1 = Math.min(this.width - 1, Math.ceil(x + reach));
    const y0 = Math.max(0, Math.floor(y - reach));
    const y1 = Math.min(this.height - 1, Math.ceil(y + reach));
    for (let py = y0; py <= y1; py++) {
      for (let px = x0; px <= x1; px++) {
        const dx = px - x;
        const dy = py - y;
        const d2 = dx * dx + dy * dy;
        if (d2 > reach * reach) continue;
        const g = Math.exp(-d2 / denom);
        const idx = py * this.width + px;
        const v = this.values[idx];
        const next = mode === "add" ? Math.max(v, intensity * g) : v - intensity * g;
        this.values[idx] = next < 0 ? 0 : next > 1 ? 1 : next;
      }
    }
    this.touched = true;
  }
}
