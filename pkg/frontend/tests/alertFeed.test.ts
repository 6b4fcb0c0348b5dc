import { describe, expect, it } from "vitest";

import { AlertFeed } from "../src/alertFeed.js";
import type { AlertRecord } from "../src/types.js";

function alert(id: string, createdTs = 0): AlertRecord {
  return {
    alert_id: id,
    chunk_id: `cam1:${id}`,
    stream_id: "cam1",
    label: 0,
    label_name: "Falling",
    scores: [0.97, 0.01, 0.01, 0.01],
    state: "pending",
    created_ts: createdTs,
    reviewed_ts: null,
    reviewer: null,
  };
}

describe("AlertFeed", () => {
  it("mirrors the latest snapshot, newest first", () => {
    const feed = new AlertFeed();
    feed.apply([alert("a2", 200), alert("a1", 100)]);
    expect(feed.pending.map((a) => a.alert_id)).toEqual(["a2", "a1"]);
    expect(feed.size).toBe(2);
  });

  it("reports added and removed alerts between snapshots", () => {
    const feed = new AlertFeed();
    feed.apply([alert("a1")]);
    const update = feed.apply([alert("a3", 300), alert("a2", 200)]);
    expect(update.added).toEqual(["a3", "a2"]);
    expect(update.removed).toEqual(["a1"]);
    expect(feed.pending.map((a) => a.alert_id)).toEqual(["a3", "a2"]);
  });

  it("highlights exactly the newly arrived alerts", () => {
    const feed = new AlertFeed();
    feed.apply([alert("a1")]);
    feed.apply([alert("a2", 50), alert("a1")]);
    expect([...feed.highlights]).toEqual(["a2"]);
  });

  it("never shows an alert after an acknowledged review", () => {
    const feed = new AlertFeed();
    feed.apply([alert("a1"), alert("a2")]);
    feed.acknowledgeReview("a1");
    expect(feed.pending.map((a) => a.alert_id)).toEqual(["a2"]);
    // acknowledging an unknown id is a no-op
    feed.acknowledgeReview("a9");
    expect(feed.size).toBe(1);
  });

  it("an empty snapshot empties the feed", () => {
    const feed = new AlertFeed();
    feed.apply([alert("a1")]);
    const update = feed.apply([]);
    expect(update.removed).toEqual(["a1"]);
    expect(feed.pending).toEqual([]);
  });
});
