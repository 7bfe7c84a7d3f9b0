import { describeError, ReviewApi } from "./api";
import { b64ToF32 } from "./b64";
import { heatColor, heatToOverlay, legendPixels } from "./colormap";
import { KEY_TO_TIER, PairViewModel } from "./viewmodel";
import type { Toast } from "./viewmodel";
import { RATING_CRITERIA, RATING_TIERS } from "./types";
import type {
  CriterionKey,
  PairSummary,
  StatsPayload,
  Tier,
  ViewPayload,
} from "./types";

const TIER_LABELS: Record<Tier, string> = {
  good: "good [1]",
  ok: "ok [2]",
  not_good: "not good [3]",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function pct(frac: number | null): string {
  return frac === null ? "n/a" : `${(100 * frac).toFixed(1)}%`;
}

/**
 * Pair screen: sidebar pair list, thumbnail grid over every view, a main
 * canvas with the heatmap overlay and brush, rating controls, and a fused
 * summary panel that refreshes only after the server re-fuses.
 */
export class ReviewUi {
  private vm: PairViewModel;
  private pairs: PairSummary[] = [];
  private stats: StatsPayload | null = null;
  private statusFilter = "";

  private listEl!: HTMLElement;
  private statsEl!: HTMLElement;
  private queryEl!: HTMLElement;
  private thumbsEl!: HTMLElement;
  private stageMsg!: HTMLElement;
  private canvas!: HTMLCanvasElement;
  private ratingStatus!: HTMLElement;
  private fusedEl!: HTMLElement;
  private toastsEl!: HTMLElement;
  private raterInput!: HTMLInputElement;
  private opacityInput!: HTMLInputElement;
  private radiusInput!: HTMLInputElement;
  private intensityInput!: HTMLInputElement;
  private modeBtn!: HTMLButtonElement;
  private undoBtn!: HTMLButtonElement;
  private revertBtn!: HTMLButtonElement;
  private refineBtn!: HTMLButtonElement;
  private filterSel!: HTMLSelectElement;
  private tierButtons = new Map<Tier, HTMLButtonElement>();
  private critButtons = new Map<CriterionKey, HTMLButtonElement>();

  private overlay = document.createElement("canvas");
  private images = new Map<string, HTMLImageElement>();
  private painting = false;

  constructor(
    private root: HTMLElement,
    private api: ReviewApi,
  ) {
    this.vm = new PairViewModel(api, {
      onChange: () => this.render(),
      onToast: (t) => this.showToast(t),
    });
    this.buildLayout();
    this.bindKeys();
  }

  async start(): Promise<void> {
    await this.refreshStats();
    await this.refreshList();
    const first = this.pairs[0];
    if (first !== undefined) await this.open(first.record_id);
  }

  async open(recordId: string): Promise<void> {
    try {
      await this.vm.load(recordId);
    } catch (err) {
      this.showToast({ kind: "error", message: describeError(err) });
    }
  }

  private async refreshList(): Promise<void> {
    try {
      const res = await this.api.listPairs(this.statusFilter || undefined);
      this.pairs = res.pairs;
      this.renderList();
    } catch (err) {
      this.showToast({ kind: "error", message: describeError(err) });
    }
  }

  private async refreshStats(): Promise<void> {
    try {
      this.stats = await this.api.getStats();
      this.renderStats();
    } catch (err) {
      this.showToast({ kind: "error", message: describeError(err) });
    }
  }

  // ---- layout ----------------------------------------------------------

  private buildLayout(): void {
    this.root.textContent = "";
    this.root.className = "review-root";

    const header = el("header", "topbar");
    header.append(el("span", "brand", "afforge review"));
    this.statsEl = el("span", "stats-line", "loading stats");
    header.append(this.statsEl);
    const raterWrap = el("label", "rater-wrap", "rater ");
    this.raterInput = el("input", "rater-input");
    this.raterInput.value = this.vm.raterId;
    this.raterInput.addEventListener("change", () => {
      const v = this.raterInput.value.trim();
      this.vm.raterId = v.length > 0 ? v : "anon";
      this.raterInput.value = this.vm.raterId;
    });
    raterWrap.append(this.raterInput);
    header.append(raterWrap);
    if (this.api.baseUrl) {
      header.append(el("span", "api-base", `api: ${this.api.baseUrl}`));
    }

    const sidebar = el("aside", "sidebar");
    this.filterSel = el("select", "status-filter");
    for (const opt of ["", "unreviewed", "good", "ok", "not_good", "refined"]) {
      const o = el("option", undefined, opt === "" ? "all statuses" : opt);
      o.value = opt;
      this.filterSel.append(o);
    }
    this.filterSel.addEventListener("change", () => {
      this.statusFilter = this.filterSel.value;
      void this.refreshList();
    });
    sidebar.append(this.filterSel);
    this.listEl = el("div", "pair-list");
    sidebar.append(this.listEl);

    const main = el("main", "stage");
    this.queryEl = el("div", "query-box", "no pair loaded");
    main.append(this.queryEl);
    this.thumbsEl = el("div", "thumb-grid");
    main.append(this.thumbsEl);
    this.stageMsg = el("div", "stage-msg");
    main.append(this.stageMsg);
    this.canvas = el("canvas", "main-canvas");
    this.canvas.addEventListener("contextmenu", (e) => e.preventDefault());
    this.canvas.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    this.canvas.addEventListener("pointermove", (e) => this.onPointerMove(e));
    this.canvas.addEventListener("pointerup", () => this.onPointerUp());
    this.canvas.addEventListener("pointercancel", () => this.onPointerUp());
    main.append(this.canvas);

    const panel = el("aside", "panel");
    panel.append(this.buildRatingPanel());
    panel.append(this.buildBrushPanel());
    panel.append(this.buildLegend());
    this.fusedEl = el("section", "fused-panel");
    panel.append(this.fusedEl);

    this.toastsEl = el("div", "toasts");

    this.root.append(header, sidebar, main, panel, this.toastsEl);
  }

  private buildRatingPanel(): HTMLElement {
    const box = el("section", "rating-panel");
    box.append(el("h3", undefined, "rating"));
    this.ratingStatus = el("div", "rating-status", "no pair loaded");
    box.append(this.ratingStatus);

    const tiersRow = el("div", "tier-row");
    for (const tier of RATING_TIERS) {
      const btn = el("button", `tier-btn tier-${tier}`, TIER_LABELS[tier]);
      btn.addEventListener("click", () => void this.rate(tier));
      this.tierButtons.set(tier, btn);
      tiersRow.append(btn);
    }
    box.append(tiersRow);

    const critBox = el("div", "crit-box");
    for (const key of RATING_CRITERIA) {
      const row = el("div", "crit-row");
      row.append(el("span", "crit-name", key.replace("_", " ")));
      const btn = el("button", "crit-btn", "pass");
      btn.addEventListener("click", () => {
        const next = this.vm.criteria[key] === "pass" ? "fail" : "pass";
        this.vm.setCriterion(key, next);
      });
      this.critButtons.set(key, btn);
      row.append(btn);
      critBox.append(row);
    }
    box.append(critBox);
    box.append(
      el(
        "p",
        "hint",
        "good forces all criteria to pass; not good marks every criterion " +
          "failed unless you flagged specific ones",
      ),
    );
    return box;
  }

  private buildBrushPanel(): HTMLElement {
    const box = el("section", "brush-panel");
    box.append(el("h3", undefined, "brush"));

    const opacityRow = el("label", "slider-row", "overlay ");
    this.opacityInput = el("input");
    this.opacityInput.type = "range";
    this.opacityInput.min = "0";
    this.opacityInput.max = "1";
    this.opacityInput.step = "0.05";
    this.opacityInput.value = String(this.vm.opacity);
    this.opacityInput.addEventListener("input", () =>
      this.vm.setOpacity(Number(this.opacityInput.value)),
    );
    opacityRow.append(this.opacityInput);
    box.append(opacityRow);

    const radiusRow = el("label", "slider-row", "radius ");
    this.radiusInput = el("input");
    this.radiusInput.type = "range";
    this.radiusInput.min = "1";
    this.radiusInput.max = "64";
    this.radiusInput.step = "1";
    this.radiusInput.value = String(this.vm.brush.radius);
    this.radiusInput.addEventListener("input", () =>
      this.vm.setBrush({ radius: Number(this.radiusInput.value) }),
    );
    radiusRow.append(this.radiusInput);
    box.append(radiusRow);

    const intRow = el("label", "slider-row", "intensity ");
    this.intensityInput = el("input");
    this.intensityInput.type = "range";
    this.intensityInput.min = "0";
    this.intensityInput.max = "1";
    this.intensityInput.step = "0.05";
    this.intensityInput.value = String(this.vm.brush.intensity);
    this.intensityInput.addEventListener("input", () =>
      this.vm.setBrush({ intensity: Number(this.intensityInput.value) }),
    );
    intRow.append(this.intensityInput);
    box.append(intRow);

    const btnRow = el("div", "btn-row");
    this.modeBtn = el("button", "mode-btn", "mode: add");
    this.modeBtn.addEventListener("click", () => this.vm.toggleMode());
    this.undoBtn = el("button", undefined, "undo [ctrl+z]");
    this.undoBtn.addEventListener("click", () => this.vm.undoEdit());
    this.revertBtn = el("button", undefined, "revert view");
    this.revertBtn.addEventListener("click", () =>
      this.vm.revertView(this.vm.selectedView),
    );
    btnRow.append(this.modeBtn, this.undoBtn, this.revertBtn);
    box.append(btnRow);

    this.refineBtn = el("button", "refine-btn", "submit refinement");
    this.refineBtn.addEventListener("click", () => void this.refine());
    box.append(this.refineBtn);
    return box;
  }

  private buildLegend(): HTMLElement {
    const box = el("section", "legend-panel");
    box.append(el("h3", undefined, "heat scale"));
    const strip = el("canvas", "legend-strip");
    strip.width = 256;
    strip.height = 12;
    const ctx = strip.getContext("2d");
    if (ctx !== null) {
      ctx.putImageData(new ImageData(legendPixels(256, 12), 256, 12), 0, 0);
    }
    const labels = el("div", "legend-labels");
    labels.append(el("span", undefined, "0"), el("span", undefined, "1"));
    box.append(strip, labels);
    return box;
  }

  // ---- actions ---------------------------------------------------------

  private async rate(tier: Tier): Promise<void> {
    if (await this.vm.submitRating(tier)) {
      await this.refreshList();
      await this.refreshStats();
    }
  }

  private async refine(): Promise<void> {
    if (await this.vm.submitRefine()) {
      await this.refreshList();
      await this.refreshStats();
    }
  }

  private bindKeys(): void {
    document.addEventListener("keydown", (e) => {
      const target = e.target as HTMLElement | null;
      if (
        target instanceof HTMLInputElement ||
        target instanceof HTMLTextAreaElement ||
        target instanceof HTMLSelectElement
      ) {
        return;
      }
      if ((e.ctrlKey || e.metaKey) && e.key.toLowerCase() === "z") {
        e.preventDefault();
        this.vm.undoEdit();
        return;
      }
      const tier = KEY_TO_TIER[e.key];
      if (tier !== undefined) {
        e.preventDefault();
        void this.rate(tier);
        return;
      }
      if (e.key === "e") this.vm.toggleMode();
      if (e.key === "[") this.vm.setBrush({ radius: this.vm.brush.radius - 2 });
      if (e.key === "]") this.vm.setBrush({ radius: this.vm.brush.radius + 2 });
    });
  }

  private onPointerDown(e: PointerEvent): void {
    if (this.vm.currentView === null) return;
    this.canvas.setPointerCapture(e.pointerId);
    this.painting = true;
    const { x, y } = this.canvasCoords(e);
    this.vm.beginStroke(x, y);
  }

  private onPointerMove(e: PointerEvent): void {
    if (!this.painting) return;
    const { x, y } = this.canvasCoords(e);
    this.vm.continueStroke(x, y);
  }

  private onPointerUp(): void {
    if (!this.painting) return;
    this.painting = false;
    this.vm.endStroke();
  }

  private canvasCoords(e: PointerEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    const sx = rect.width > 0 ? this.canvas.width / rect.width : 1;
    const sy = rect.height > 0 ? this.canvas.height / rect.height : 1;
    return { x: (e.clientX - rect.left) * sx, y: (e.clientY - rect.top) * sy };
  }

  // ---- rendering -------------------------------------------------------

  private render(): void {
    this.renderList();
    this.renderQuery();
    this.renderThumbs();
    this.renderCanvas();
    this.renderRating();
    this.renderBrush();
    this.renderFused();
  }

  private renderStats(): void {
    const s = this.stats;
    if (s === null) return;
    this.statsEl.textContent =
      `${s.total} pairs, ${s.rated} rated ` +
      `(good ${pct(s.tier_fractions.good)}, ok ${pct(s.tier_fractions.ok)}, ` +
      `not good ${pct(s.tier_fractions.not_good)}), ${s.refined} refined, ` +
      `splits ${s.splits.train}/${s.splits.test}/${s.splits.excluded}`;
  }

  private renderList(): void {
    this.listEl.textContent = "";
    const current = this.vm.detail?.record_id;
    for (const pair of this.pairs) {
      const row = el(
        "div",
        pair.record_id === current ? "pair-row active" : "pair-row",
      );
      row.append(el("span", "pair-id", pair.record_id));
      const chip = el("span", `chip chip-${pair.status}`, pair.status);
      row.append(chip);
      if (pair.tier !== null && pair.status !== pair.tier) {
        row.append(el("span", "chip chip-tier", pair.tier));
      }
      row.addEventListener("click", () => void this.open(pair.record_id));
      this.listEl.append(row);
    }
    if (this.pairs.length === 0) {
      this.listEl.append(el("div", "empty", "no pairs"));
    }
  }

  private renderQuery(): void {
    const d = this.vm.detail;
    if (d === null) {
      this.queryEl.textContent = "no pair loaded";
      return;
    }
    this.queryEl.textContent = "";
    this.queryEl.append(el("div", "query-text", `"${d.text}"`));
    this.queryEl.append(
      el(
        "div",
        "query-meta",
        `${d.record_id}  affordance: ${d.affordance_phrase}  class: ` +
          `${d.object_class}  points: ${d.point_count}` +
          (d.low_support ? "  LOW SUPPORT" : "") +
          (d.all_zero ? "  ALL ZERO" : ""),
      ),
    );
  }

  private renderThumbs(): void {
    this.thumbsEl.textContent = "";
    const d = this.vm.detail;
    if (d === null) return;
    for (const view of d.views) {
      const cell = el(
        "div",
        view.view_id === this.vm.selectedView ? "thumb active" : "thumb",
      );
      const img = el("img");
      img.src = this.api.imageUrl(view.image_url);
      img.loading = "lazy";
      img.alt = `view ${view.view_id}`;
      cell.append(img);
      const tag = el("span", "thumb-tag", String(view.view_id));
      cell.append(tag);
      if (this.vm.isDirty(view.view_id)) {
        cell.append(el("span", "thumb-badge dirty", "*"));
      } else if (view.refined) {
        cell.append(el("span", "thumb-badge refined", "R"));
      } else if (view.has_contribution) {
        cell.append(el("span", "thumb-badge contrib", "+"));
      }
      cell.addEventListener("click", () => this.vm.selectView(view.view_id));
      this.thumbsEl.append(cell);
    }
  }

  private baseImage(view: ViewPayload): HTMLImageElement {
    const url = this.api.imageUrl(view.image_url);
    let img = this.images.get(url);
    if (img === undefined) {
      img = new Image();
      img.addEventListener("load", () => this.renderCanvas());
      img.src = url;
      this.images.set(url, img);
    }
    return img;
  }

  private renderCanvas(): void {
    const view = this.vm.currentView;
    if (view === null) {
      this.canvas.style.display = "none";
      this.stageMsg.textContent = this.vm.detail
        ? "this record has no rendered views"
        : "";
      return;
    }
    this.canvas.style.display = "block";
    this.stageMsg.textContent = "";
    this.canvas.width = view.width;
    this.canvas.height = view.height;
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    ctx.clearRect(0, 0, view.width, view.height);

    const img = this.baseImage(view);
    if (img.complete && img.naturalWidth > 0) {
      ctx.drawImage(img, 0, 0, view.width, view.height);
    } else {
      ctx.fillStyle = "#202027";
      ctx.fillRect(0, 0, view.width, view.height);
    }

    if (this.vm.opacity > 0) {
      const buf = this.vm.bufferFor(view.view_id);
      const rgba = heatToOverlay(
        buf.values,
        view.width,
        view.height,
        this.vm.opacity,
      );
      this.overlay.width = view.width;
      this.overlay.height = view.height;
      const octx = this.overlay.getContext("2d");
      if (octx !== null) {
        octx.putImageData(new ImageData(rgba, view.width, view.height), 0, 0);
        ctx.drawImage(this.overlay, 0, 0);
      }
    }

    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 1.5;
    for (const pt of view.interaction_points) {
      if (pt.length < 2) continue;
      ctx.beginPath();
      ctx.arc(pt[0], pt[1], 3, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  private renderRating(): void {
    const d = this.vm.detail;
    this.ratingStatus.textContent =
      d === null
        ? "no pair loaded"
        : `status: ${d.status}` +
          (d.tier !== null ? `  tier: ${d.tier}` : "") +
          (d.rater_id !== null ? `  by ${d.rater_id}` : "") +
          (d.refined_views.length > 0
            ? `  refined views: ${d.refined_views.join(",")}`
            : "");
    for (const [tier, btn] of this.tierButtons) {
      btn.disabled = d === null;
      btn.classList.toggle("selected", d !== null && d.tier === tier);
    }
    for (const [key, btn] of this.critButtons) {
      const v = this.vm.criteria[key];
      btn.textContent = v;
      btn.classList.toggle("fail", v === "fail");
    }
  }

  private renderBrush(): void {
    this.opacityInput.value = String(this.vm.opacity);
    this.radiusInput.value = String(this.vm.brush.radius);
    this.intensityInput.value = String(this.vm.brush.intensity);
    this.modeBtn.textContent = `mode: ${this.vm.brush.mode} [e]`;
    this.modeBtn.classList.toggle("erase", this.vm.brush.mode === "erase");
    const view = this.vm.currentView;
    const dirty = view !== null && this.vm.isDirty(view.view_id);
    this.refineBtn.disabled = !dirty || this.vm.busy;
    this.refineBtn.textContent = this.vm.busy
      ? "re-fusing on server..."
      : dirty
        ? `submit refinement (view ${view.view_id})`
        : "submit refinement (no edits)";
    this.undoBtn.disabled = view === null;
    this.revertBtn.disabled = !dirty;
  }

  private renderFused(): void {
    this.fusedEl.textContent = "";
    const d = this.vm.detail;
    if (d === null) return;
    this.fusedEl.append(el("h3", undefined, "fused 3d heat"));
    const fused = b64ToF32(d.fused.values_b64, d.point_count);
    this.fusedEl.append(this.fusedBlock("original fusion", fused));
    if (d.refined_fused !== null) {
      const refined = b64ToF32(d.refined_fused.values_b64, d.point_count);
      this.fusedEl.append(this.fusedBlock("after refinement", refined));
    }
    this.fusedEl.append(
      el("p", "hint", "updates only after the server re-fuses an edit"),
    );
  }

  private fusedBlock(label: string, values: Float32Array): HTMLElement {
    const box = el("div", "fused-block");
    let sum = 0;
    let max = 0;
    let hot = 0;
    for (const v of values) {
      sum += v;
      if (v > max) max = v;
      if (v >= 0.5) hot++;
    }
    const n = Math.max(1, values.length);
    box.append(el("div", "fused-label", label));
    box.append(
      el(
        "div",
        "fused-stats",
        `mean ${(sum / n).toFixed(4)}  max ${max.toFixed(4)}  ` +
          `>=0.5: ${((100 * hot) / n).toFixed(1)}%`,
      ),
    );
    const hist = el("canvas", "fused-hist");
    hist.width = 256;
    hist.height = 40;
    this.drawHistogram(hist, values);
    box.append(hist);
    return box;
  }

  private drawHistogram(cv: HTMLCanvasElement, values: Float32Array): void {
    const ctx = cv.getContext("2d");
    if (ctx === null) return;
    const bins = new Array<number>(16).fill(0);
    for (const v of values) {
      const b = Math.min(15, Math.max(0, Math.floor(v * 16)));
      bins[b]++;
    }
    const top = Math.max(1, ...bins);
    ctx.clearRect(0, 0, cv.width, cv.height);
    const bw = cv.width / 16;
    for (let i = 0; i < 16; i++) {
      const h = (bins[i] / top) * (cv.height - 2);
      const [r, g, b] = heatColor((i + 0.5) / 16);
      ctx.fillStyle = `rgb(${Math.round(r)},${Math.round(g)},${Math.round(b)})`;
      ctx.fillRect(i * bw + 1, cv.height - h, bw - 2, h);
    }
  }

  private showToast(toast: Toast): void {
    const node = el("div", `toast toast-${toast.kind}`, toast.message);
    this.toastsEl.append(node);
    setTimeout(() => node.remove(), 4000);
  }
}
