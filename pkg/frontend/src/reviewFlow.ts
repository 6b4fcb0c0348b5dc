// Review action semantics: exactly one API call per action. The alert
// leaves the pending feed only on a 2xx response; a 409 (someone else
// reviewed it first) reports a conflict so the caller refreshes the feed
// instead of retrying.

import type { AlertFeed } from "./alertFeed.js";
import { ConflictError, VigilClient } from "./client.js";
import type { AlertRecord } from "./types.js";

export type ReviewOutcome =
  | { kind: "ok"; alert: AlertRecord }
  | { kind: "conflict"; message: string }
  | { kind: "error"; message: string };

export async function submitReview(
  client: VigilClient,
  feed: AlertFeed,
  alertId: string,
  decision: "confirmed" | "dismissed",
  reviewer: string,
  correctedLabel?: number,
): Promise<ReviewOutcome> {
  try {
    const alert = await client.review(alertId, decision, reviewer, correctedLabel);
    feed.acknowledgeReview(alertId);
    return { kind: "ok", alert };
  } catch (err) {
    if (err instanceof ConflictError) {
      // reviewed elsewhere; the next snapshot refresh reconciles the feed
      return { kind: "conflict", message: err.message };
    }
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "error", message };
  }
}
