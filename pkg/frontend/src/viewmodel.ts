import { describeError } from "./api";
import { b64ToF32, f32ToB64 } from "./b64";
import { clampBrush, EditBuffer } from "./brush";
import type { BrushMode, BrushState } from "./brush";
import { clamp01 } from "./colormap";
import { RATING_CRITERIA } from "./types";
import type {
  Criteria,
  CriterionKey,
  CriterionValue,
  PairDetail,
  PairSummary,
  RatingBody,
  RefineBody,
  RefineResponse,
  Tier,
  ViewPayload,
} from "./types";

/** The slice of the service client the pair screen needs. */
export interface PairApi {
  getPair(recordId: string): Promise<PairDetail>;
  submitRating(recordId: string, body: RatingBody): Promise<PairSummary>;
  submitRefine(recordId: string, body: RefineBody): Promise<RefineResponse>;
}

export const KEY_TO_TIER: Record<string, Tier> = {
  "1": "good",
  "2": "ok",
  "3": "not_good",
};

export interface Toast {
  kind: "error" | "info";
  message: string;
}

export interface ViewModelHooks {
  onChange?: () => void;
  onToast?: (toast: Toast) => void;
}

export function defaultCriteria(): Criteria {
  return {
    semantic_relevance: "pass",
    spatial_accuracy: "pass",
    coverage: "pass",
  };
}

/**
 * State behind the pair screen: the loaded record, selected view, overlay
 * opacity, brush settings, and one lazily seeded edit buffer per view.
 * Annotation state is only ever changed through the service API; edits stay
 * local until submitRefine ships them and the reload shows server truth.
 */
export class PairViewModel {
  detail: PairDetail | null = null;
  selectedView = 0;
  opacity = 0.6;
  brush: BrushState = { radius: 14, intensity: 0.85, mode: "add" };
  raterId = "anon";
  criteria: Criteria = defaultCriteria();
  busy = false;

  private buffers = new Map<number, EditBuffer>();
  private dirtyViews = new Set<number>();

  constructor(
    private api: PairApi,
    private hooks: ViewModelHooks = {},
  ) {}

  private emit(): void {
    this.hooks.onChange?.();
  }

  private toast(kind: Toast["kind"], message: string): void {
    this.hooks.onToast?.({ kind, message });
  }

  async load(recordId: string): Promise<void> {
    const detail = await this.api.getPair(recordId);
    this.detail = detail;
    this.buffers.clear();
    this.dirtyViews.clear();
    this.selectedView = detail.selection
      ? detail.selection.best
      : (detail.views[0]?.view_id ?? 0);
    this.emit();
  }

  view(viewId: number): ViewPayload | null {
    return this.detail?.views.find((v) => v.view_id === viewId) ?? null;
  }

  get currentView(): ViewPayload | null {
    return this.view(this.selectedView);
  }

  /**
   * Per-view edit buffer, created on first touch with the served heatmap as
   * seed (zeros when the view has no contribution yet). Dimensions always
   * equal the view's.
   */
  bufferFor(viewId: number): EditBuffer {
    const view = this.view(viewId);
    if (view === null) throw new Error(`no view ${viewId} on this record`);
    let buf = this.buffers.get(viewId);
    if (buf === undefined) {
      const seed =
        view.heatmap_b64 !== null
          ? b64ToF32(view.heatmap_b64, view.width * view.height)
          : undefined;
      buf = new EditBuffer(view.width, view.height, seed);
      this.buffers.set(viewId, buf);
    }
    return buf;
  }

  isDirty(viewId: number): boolean {
    return this.dirtyViews.has(viewId);
  }

  get dirtyViewIds(): number[] {
    return [...this.dirtyViews].sort((a, b) => a - b);
  }

  selectView(viewId: number): void {
    if (this.view(viewId) === null) return;
    this.selectedView = viewId;
    this.emit();
  }

  setOpacity(v: number): void {
    this.opacity = clamp01(v);
    this.emit();
  }

  setBrush(patch: Partial<BrushState>): void {
    this.brush = clampBrush({ ...this.brush, ...patch });
    this.emit();
  }

  toggleMode(): BrushMode {
    this.setBrush({ mode: this.brush.mode === "add" ? "erase" : "add" });
    return this.brush.mode;
  }

  setCriterion(key: CriterionKey, value: CriterionValue): void {
    this.criteria = { ...this.criteria, [key]: value };
    this.emit();
  }

  beginStroke(x: number, y: number): void {
    const buf = this.bufferFor(this.selectedView);
    buf.beginStroke();
    buf.stamp(x, y, this.brush);
    this.dirtyViews.add(this.selectedView);
    this.emit();
  }

  continueStroke(x: number, y: number): void {
    const buf = this.buffers.get(this.selectedView);
    if (buf === undefined || !buf.strokeOpen) return;
    buf.stamp(x, y, this.brush);
    this.emit();
  }

  endStroke(): void {
    this.buffers.get(this.selectedView)?.endStroke();
  }

  undoEdit(): boolean {
    const buf = this.buffers.get(this.selectedView);
    if (buf === undefined || !buf.undo()) return false;
    this.emit();
    return true;
  }

  /** Drop local edits on a view and reseed from the served heatmap. */
  revertView(viewId: number): void {
    this.buffers.delete(viewId);
    this.dirtyViews.delete(viewId);
    this.emit();
  }

  /** Keyboard rating: 1/2/3 map to good/ok/not_good. */
  applyKey(key: string): boolean {
    const tier = KEY_TO_TIER[key];
    if (tier === undefined || this.detail === null) return false;
    void this.submitRating(tier);
    return true;
  }

  /**
   * Criteria consistent with the tier: good forces all passes, not_good
   * needs at least one failure (all marked fail when the rater has none),
   * ok keeps the checkboxes as they are.
   */
  criteriaForTier(tier: Tier): Criteria {
    if (tier === "good") return defaultCriteria();
    const crit: Criteria = { ...this.criteria };
    if (tier === "not_good" && !Object.values(crit).includes("fail")) {
      for (const key of RATING_CRITERIA) crit[key] = "fail";
    }
    return crit;
  }

  /**
   * Rate the loaded pair. The status flips optimistically so the UI reacts
   * at once; a rejected request rolls it back and raises an error toast.
   */
  async submitRating(tier: Tier, criteria?: Criteria): Promise<boolean> {
    const detail = this.detail;
    if (detail === null) return false;
    const body: RatingBody = {
      rater_id: this.raterId,
      tier,
      criteria: criteria ?? this.criteriaForTier(tier),
    };
    const prev = {
      status: detail.status,
      tier: detail.tier,
      criteria: detail.criteria,
      rater_id: detail.rater_id,
    };
    detail.status = tier;
    detail.tier = tier;
    detail.criteria = { ...body.criteria };
    detail.rater_id = body.rater_id;
    this.emit();
    try {
      const summary = await this.api.submitRating(detail.record_id, body);
      Object.assign(detail, summary);
      this.emit();
      this.toast("info", `rated ${summary.record_id}: ${tier}`);
      return true;
    } catch (err) {
      Object.assign(detail, prev);
      this.emit();
      this.toast("error", describeError(err));
      return false;
    }
  }

  /**
   * Ship the edited view and reload the record. The fused 3D summary and
   * the served per-view heatmaps only change through this round trip, so
   * what the screen shows afterwards is exactly what the server re-fused.
   */
  async submitRefine(viewId?: number): Promise<boolean> {
    const detail = this.detail;
    if (detail === null) return false;
    const vid = viewId ?? this.selectedView;
    const view = this.view(vid);
    if (view === null) return false;
    const buf = this.buffers.get(vid);
    if (buf === undefined || !this.dirtyViews.has(vid)) {
      this.toast("info", `no local edits on view ${vid}`);
      return false;
    }
    const body: RefineBody = {
      view_id: vid,
      width: view.width,
      height: view.height,
      values_b64: f32ToB64(buf.values),
      rater_id: this.raterId,
    };
    this.busy = true;
    this.emit();
    try {
      await this.api.submitRefine(detail.record_id, body);
      await this.load(detail.record_id);
      this.selectedView = vid;
      this.toast("info", `view ${vid} refined, fusion updated`);
      this.emit();
      return true;
    } catch (err) {
      this.toast("error", describeError(err));
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }
}
