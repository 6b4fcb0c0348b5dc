// DOM layer: pending-alert queue with confirm/dismiss, chunk inspector
// (thumbnail strip + score bars), summary panel, and status banners.
// State logic lives in AlertFeed / PollController / submitReview; this
// module only renders and forwards events.

import { AlertFeed } from "./alertFeed.js";
import { VigilClient } from "./client.js";
import { PollController } from "./poller.js";
import { submitReview } from "./reviewFlow.js";
import { CLASS_NAMES, type AlertRecord } from "./types.js";

const POLL_INTERVAL_MS = 3000;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function ageLabel(createdTs: number): string {
  const seconds = Math.max(0, Math.round((Date.now() - createdTs) / 1000));
  if (seconds < 60) return `${seconds}s ago`;
  if (seconds < 3600) return `${Math.floor(seconds / 60)}m ago`;
  return `${Math.floor(seconds / 3600)}h ago`;
}

function scoreBars(scores: number[]): HTMLElement {
  const wrap = el("div", "scores");
  scores.forEach((score, i) => {
    const row = el("div", "score-row");
    row.appendChild(el("span", "score-name", CLASS_NAMES[i]));
    const bar = el("div", "score-bar");
    const fill = el("div", "score-fill");
    fill.style.width = `${Math.round(score * 100)}%`;
    bar.appendChild(fill);
    row.appendChild(bar);
    row.appendChild(el("span", "score-value", score.toFixed(2)));
    wrap.appendChild(row);
  });
  return wrap;
}

export class Dashboard {
  private feed = new AlertFeed();
  private poller: PollController;
  private reviewer: string;

  constructor(
    private client: VigilClient,
    private root: HTMLElement,
    reviewer?: string,
  ) {
    this.reviewer = reviewer || "caregiver";
    this.poller = new PollController(() => this.refresh(), POLL_INTERVAL_MS, () =>
      this.renderBanners(),
    );
  }

  start(): void {
    this.renderShell();
    this.poller.start();
  }

  private async refresh(): Promise<void> {
    const page = await this.client.listAlerts({ state: "pending", pageSize: 100 });
    this.feed.apply(page.alerts);
    this.renderAlerts();
    const summary = await this.client.metricsSummary();
    const queue = await this.client.retrainingQueue();
    const summaryBox = this.root.querySelector("#summary")!;
    summaryBox.textContent =
      `chunks ${summary.chunks} · inferences ${summary.total_inferences} · ` +
      `pending ${summary.alerts.pending} · confirmed ${summary.alerts.confirmed} · ` +
      `dismissed ${summary.alerts.dismissed} · retraining queue ${queue.count}`;
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <h1>vigil — alert review</h1>
        <div id="banners"></div>
        <div id="summary" class="summary">loading…</div>
      </header>
      <main>
        <section id="alerts" class="alerts"></section>
        <section id="inspector" class="inspector">
          <p class="hint">Select an alert to inspect its chunk.</p>
        </section>
      </main>`;
  }

  private renderBanners(): void {
    const box = this.root.querySelector("#banners")!;
    box.innerHTML = "";
    if (this.poller.status.authFailed) {
      box.appendChild(el("div", "banner auth", "Authentication required: check the API token."));
      this.root.querySelector("#alerts")!.innerHTML = "";
      return;
    }
    if (this.poller.status.degraded) {
      box.appendChild(
        el("div", "banner degraded", "Connection degraded — retrying in the background."),
      );
    }
  }

  private renderAlerts(): void {
    const box = this.root.querySelector("#alerts")!;
    box.innerHTML = "";
    if (this.feed.size === 0) {
      box.appendChild(el("p", "empty", "No pending alerts."));
      return;
    }
    for (const alert of this.feed.pending) {
      box.appendChild(this.alertCard(alert));
    }
  }

  private alertCard(alert: AlertRecord): HTMLElement {
    const card = el("article", "alert-card");
    if (this.feed.highlights.has(alert.alert_id)) card.classList.add("new");
    const head = el("div", "alert-head");
    head.appendChild(el("span", `badge ${alert.label_name.toLowerCase()}`, alert.label_name));
    head.appendChild(el("span", "stream", alert.stream_id));
    head.appendChild(el("span", "age", ageLabel(alert.created_ts)));
    head.appendChild(el("span", "state", alert.state));
    card.appendChild(head);
    card.appendChild(scoreBars(alert.scores));

    const actions = el("div", "actions");
    const confirmBtn = el("button", "confirm", "Confirm");
    confirmBtn.addEventListener("click", () => void this.handleReview(alert, "confirmed"));
    actions.appendChild(confirmBtn);

    const dismissBtn = el("button", "dismiss", "Dismiss…");
    const picker = el("select", "label-picker");
    picker.appendChild(new Option("actual class…", ""));
    CLASS_NAMES.forEach((name, i) => {
      if (i !== alert.label) picker.appendChild(new Option(name, String(i)));
    });
    picker.hidden = true;
    dismissBtn.addEventListener("click", () => {
      picker.hidden = false; // dismissal asks for the corrected label first
    });
    picker.addEventListener("change", () => {
      const corrected = picker.value === "" ? undefined : Number(picker.value);
      void this.handleReview(alert, "dismissed", corrected);
    });
    actions.appendChild(dismissBtn);
    actions.appendChild(picker);
    card.appendChild(actions);

    card.addEventListener("click", (ev) => {
      if (ev.target instanceof HTMLButtonElement || ev.target instanceof HTMLSelectElement) return;
      void this.inspect(alert.chunk_id);
    });
    return card;
  }

  private async handleReview(
    alert: AlertRecord,
    decision: "confirmed" | "dismissed",
    correctedLabel?: number,
  ): Promise<void> {
    const outcome = await submitReview(
      this.client, this.feed, alert.alert_id, decision, this.reviewer, correctedLabel,
    );
    if (outcome.kind === "conflict") {
      await this.refresh(); // reviewed elsewhere: show the fresh state
      this.toast(`Already reviewed elsewhere: ${outcome.message}`);
      return;
    }
    if (outcome.kind === "error") {
      this.toast(`Review failed: ${outcome.message}`);
      return;
    }
    this.renderAlerts();
    await this.refresh();
  }

  private async inspect(chunkId: string): Promise<void> {
    const box = this.root.querySelector("#inspector")!;
    box.innerHTML = "<p class='hint'>loading…</p>";
    try {
      const [meta, thumbs] = await Promise.all([
        this.client.chunk(chunkId),
        this.client.chunkThumbs(chunkId),
      ]);
      box.innerHTML = "";
      box.appendChild(
        el(
          "h2",
          undefined,
          `${meta.chunk_id} — ${meta.duration_s}s, ${meta.frame_count} frames` +
            (meta.partial ? " (partial)" : ""),
        ),
      );
      const strip = el("div", "thumb-strip");
      for (const thumb of thumbs.thumbs) {
        const img = new Image();
        img.src = `data:image/png;base64,${thumb.png_base64}`;
        img.title = `frame ${thumb.index}`;
        strip.appendChild(img);
      }
      box.appendChild(strip);
      if (meta.inferences.length > 0) {
        const latest = meta.inferences[meta.inferences.length - 1];
        box.appendChild(el("h3", undefined, `scores (${latest.model_id})`));
        box.appendChild(scoreBars(latest.scores));
      }
    } catch (err) {
      box.innerHTML = "";
      box.appendChild(el("p", "not-found", `Chunk unavailable: ${(err as Error).message}`));
    }
  }

  private toast(message: string): void {
    const note = el("div", "toast", message);
    this.root.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }
}
