// Wire types for the backend REST API.

export const CLASS_NAMES = ["Falling", "Staggering", "ChestPain", "Normal"] as const;
export type ClassName = (typeof CLASS_NAMES)[number];

export type AlertState = "pending" | "confirmed" | "dismissed";

export interface AlertRecord {
  alert_id: string;
  chunk_id: string;
  stream_id: string;
  label: number;
  label_name: ClassName;
  scores: number[];
  state: AlertState;
  created_ts: number;
  reviewed_ts: number | null;
  reviewer: string | null;
}

export interface AlertPage {
  alerts: AlertRecord[];
  page: number;
  page_size: number;
  total: number;
}

export interface InferenceView {
  inference_id: number;
  chunk_id: string;
  model_id: string;
  label: number;
  label_name: ClassName;
  scores: number[];
  latency_ms: number;
  created_ts: number;
}

export interface ChunkMeta {
  chunk_id: string;
  stream_id: string;
  start_ts: number;
  duration_s: number;
  frame_count: number;
  storage_key: string;
  partial: boolean;
  inferences: InferenceView[];
}

export interface Thumb {
  index: number;
  ts_ms: number;
  png_base64: string;
}

export interface RetrainingItem {
  item_id: number;
  chunk_id: string;
  predicted: number;
  corrected: number | null;
  created_ts: number;
  alert_id: string | null;
}

export interface RetrainingQueue {
  items: RetrainingItem[];
  count: number;
}

export interface MetricsSummary {
  inference_counts: Record<string, number>;
  total_inferences: number;
  alerts: Record<AlertState, number>;
  chunks: number;
  retraining_items: number;
}
