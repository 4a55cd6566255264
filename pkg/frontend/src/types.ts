/** Response shapes of the lake service, as served (canonical JSON). */

export type NodeClass = "entity" | "activity" | "agent";

export type NodeKind =
  | "dataset"
  | "model"
  | "code"
  | "environment"
  | "source"
  | "ingest"
  | "process"
  | "analysis"
  | "user"
  | "study"
  | "task";

export interface SearchHit {
  node_id: string;
  node_kind: NodeKind;
  name: string;
  snippet: string;
  score: number;
}

export interface LineageNode {
  node_id: string;
  node_class: NodeClass;
  node_kind: NodeKind;
}

export interface LineageEdge {
  from: string;
  to: string;
  kind: string;
  split?: string;
}

/** The {nodes, edges} export document (project lineage sections). */
export interface LineageExport {
  nodes: LineageNode[];
  edges: LineageEdge[];
}

/** A focused bundle as served by GET /lineage/{id}. */
export interface LineageBundle extends LineageExport {
  focus: string;
  upstream_entities: string[];
  activities: string[];
  agents: string[];
  environments: string[];
}

export interface DatasetEntry {
  node_id: string;
  dataset: {
    dataset_id: string;
    name?: string;
    format?: string;
    description?: string;
    tags?: string[];
    location?: string;
    created_at?: string;
    metafeatures?: {
      n_rows?: number;
      n_attributes?: number;
      per_attribute_descriptors?: Array<{
        attribute_name: string;
        declared_type?: string;
        missing_fraction?: number;
      }>;
      extra?: Record<string, number>;
    };
  };
  version_count: number;
}

export interface ModelEntry {
  node_id: string;
  analysis: {
    analysis_id?: string;
    description?: string;
    analysis_type?: string;
    performed_by?: string;
    performed_at?: string;
  };
  algorithm: { name: string; family?: string } | null;
  parameters: Array<{ name: string; value?: string; value_type?: string }>;
  performance: Record<string, number>;
  model: string;
}

export interface ProjectView {
  node_id: string;
  study: { study_id: string; description?: string; study_type?: string };
  dataset_section: DatasetEntry[];
  model_section: ModelEntry[];
  lineage_section: LineageExport;
}

export interface ComplianceReport {
  model: string;
  approved_sources: string[];
  verdict: "compliant" | "non_compliant" | "undetermined";
  offending_sources: string[];
  undocumented_paths: string[];
}

export interface LakeHealth {
  total_models: number;
  documented_models: number;
  documentation_rate: number;
  mean_completeness: number;
  swamp_flag: boolean;
}

export interface RecordDoc {
  node_id: string;
  node_class: NodeClass;
  node_kind: NodeKind;
  record_type: string;
  record: Record<string, unknown> | null;
}

export interface HealthDoc {
  status: string;
  records: number;
}

export interface TraversalDoc {
  focus: string;
  direction: "upstream" | "downstream";
  nodes: string[];
}
