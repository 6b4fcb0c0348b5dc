// Pending-alert feed state. Rendered membership is a function of the last
// fetched snapshot -- the feed never invents a state transition; alerts
// leave the pending list only via a fresh snapshot or an acknowledged
// (2xx) review.

import type { AlertRecord } from "./types.js";

export interface FeedUpdate {
  added: string[];
  removed: string[];
}

export class AlertFeed {
  private byId = new Map<string, AlertRecord>();
  private order: string[] = [];
  /** Alerts that arrived in the latest snapshot, for visual highlight. */
  readonly highlights = new Set<string>();

  /** Replace the feed with a full pending snapshot (newest first). */
  apply(alerts: AlertRecord[]): FeedUpdate {
    const nextIds = new Set(alerts.map((a) => a.alert_id));
    const added = alerts.filter((a) => !this.byId.has(a.alert_id)).map((a) => a.alert_id);
    const removed = this.order.filter((id) => !nextIds.has(id));

    this.byId = new Map(alerts.map((a) => [a.alert_id, a]));
    this.order = alerts.map((a) => a.alert_id);
    this.highlights.clear();
    for (const id of added) this.highlights.add(id);
    return { added, removed };
  }

  /** Drop one alert after a 2xx review response. */
  acknowledgeReview(alertId: string): void {
    if (!this.byId.delete(alertId)) return;
    this.order = this.order.filter((id) => id !== alertId);
    this.highlights.delete(alertId);
  }

  get pending(): AlertRecord[] {
    return this.order.map((id) => this.byId.get(id)!);
  }

  get(alertId: string): AlertRecord | undefined {
    return this.byId.get(alertId);
  }

  get size(): number {
    return this.order.length;
  }
}
