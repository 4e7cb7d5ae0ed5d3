/** Wire shapes of the /v1 API responses the dashboard consumes. */

export interface DemographicCall {
  label: string;
  confidence: number;
}

export interface Speaker {
  name: string;
  title: string;
  organization: string;
  gender: DemographicCall;
  race: DemographicCall;
}

export interface Quote {
  text: string;
  word_count: number;
  long: boolean;
  doubtful: boolean;
  rule: string;
  speaker: Speaker | null;
}

export interface AnnotationSummary {
  gender_proportions: Record<string, number>;
  race_proportions: Record<string, number>;
  titled_proportion: number;
}

export interface AnnotationPayload {
  article_id: string;
  quotes: Quote[];
  summary: AnnotationSummary;
}

export interface AnnotateRequest {
  article_id: string;
  body: string;
  site?: string;
  author?: string;
  title?: string;
  published_at?: string;
}

export interface ReportScope {
  kind: string;
  site?: string;
  sites?: string[];
  author?: string;
}

export interface TopEntry {
  name: string;
  quotes: number;
}

export interface Report {
  scope: ReportScope;
  period: { from: string; to: string };
  total_quotes: number;
  gender_proportions: Record<string, number>;
  race_proportions: Record<string, number>;
  titled_proportion: number;
  top_persons: TopEntry[];
  top_organizations: TopEntry[];
}

export interface SitesResponse {
  sites: string[];
}

export type MonthPeriod = { from: string; to: string };
