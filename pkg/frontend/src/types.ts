/** Wire types of the graphforge HTTP API. Field names are the contract. */

export interface MetricPoint {
  step: number;
  split: string;
  accuracy: number;
  infoacc: number;
  batch_size: number;
}

export interface ApiErrorItem {
  line: number;
  col: number;
  message: string;
  category: string;
}

export interface GraphCreateResponse {
  id: string;
  node_count: number;
  shapes: Record<string, Array<number | null>>;
}

export interface ComplexityReport {
  description_bits: number;
  compressed_bits: number;
  node_count: number;
  ncd_to_reference: number | null;
  pagerank: Record<string, number>;
  compressor: string;
}

export interface GraphGetResponse {
  dsl: string;
  node_count: number;
  complexity: ComplexityReport;
}

export interface TrainConfig {
  batch_size: number;
  learning_rate: number;
  steps: number;
  seed: number;
  eval_interval: number;
  eval_batch_size: number;
}

export interface SyntheticDataset {
  kind: "synthetic";
  n_classes: number;
  dim: number;
  m_per_class: number;
  seed: number;
  spread: number;
}

export interface IdxDataset {
  kind: "idx";
  train_images: string;
  train_labels: string;
  test_images: string;
  test_labels: string;
  n_classes: number;
}

export type DatasetSpec = SyntheticDataset | IdxDataset;

export interface BattleConfig {
  train_config: TrainConfig;
  dataset: DatasetSpec;
  priority?: string[];
}

export interface BattleResult {
  contender_a: string;
  contender_b: string;
  final_a: MetricPoint;
  final_b: MetricPoint;
  curve_a: MetricPoint[];
  curve_b: MetricPoint[];
  winner: "A" | "B" | "draw";
  config: BattleConfig;
  seed: number;
}
