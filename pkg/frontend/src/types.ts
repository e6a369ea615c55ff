// Shapes of the review service payloads and the model/report files.

export interface StageSummary {
  status: string;
  detail?: string;
  pending?: number;
}

export interface SessionSummary {
  state_dir: string;
  stages: Record<string, StageSummary>;
  journal: { path: string | null; revision: number };
}

export interface Excerpt {
  sentence_id: string;
  text: string;
  highlights: Array<[number, number]>;
  label: string;
}

export interface PendingRequest {
  request_id: string;
  kind: string;
  target: string;
  suggested: unknown;
  evidence?: Record<string, unknown>;
  context?: Excerpt[];
}

export interface DecisionEntry {
  decision_id: string;
  kind: string;
  target: string;
  choice: unknown;
  author: string;
  timestamp: string;
}

export interface DecisionsResponse {
  revision: number;
  pending: PendingRequest[];
  decided: DecisionEntry[];
}

export interface Attribute {
  ident: string;
  aliases: string[];
}

export interface Component {
  name: string;
  aliases: string[];
  attributes: Attribute[];
}

export interface Catalog {
  components: Component[];
}

export interface StateResponse {
  summary: SessionSummary;
  document: unknown;
  catalog: Catalog | null;
  revision: number;
}

export interface Invariant {
  id: number;
  type: string;
  text: string;
  signature: string;
  system_output: boolean;
  traces: string[];
}

export interface Decomposition {
  parent: number;
  mode: "AND" | "OR";
  children: number[];
}

export interface IrmModel {
  schema_version: number;
  components: Component[];
  invariants: Invariant[];
  decompositions: Decomposition[];
}

export interface Finding {
  kind: string;
  severity: string;
  subject: string;
  involved: number[];
  config: string;
}

export interface Configuration {
  id: string;
  choices: Record<string, number>;
  selected: number[];
}

export interface Report {
  verdict: string;
  configuration_count: number;
  errors: number;
  warnings: number;
  findings: Finding[];
  configurations: Configuration[];
}

export interface SubmitAccepted {
  revision: number;
  pending: PendingRequest[];
}

export interface ServiceError {
  error: string;
  [key: string]: unknown;
}
