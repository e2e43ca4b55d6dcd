// Payload shapes of the vlqa HTTP API. References arrive pre-parsed and
// pre-validated from the backend; the client never interprets answer text.

export type ReferenceStatus =
  | "valid"
  | "unknown_video"
  | "out_of_bounds"
  | "not_retrieved";

export interface MomentReferencePayload {
  video_id: string;
  timestamp_in: number;
  timestamp_out: number;
  span: [number, number];
  status: ReferenceStatus;
}

export interface MomentSummary {
  moment_id: string;
  video_id: string;
  video_title: string;
  t_in: number;
  t_out: number;
  score: number;
}

export interface AskResponse {
  answer: string;
  raw_answer: string;
  references: MomentReferencePayload[];
  external_links: string[];
  moments: MomentSummary[];
  queries: string[];
  timings_ms: Record<string, number>;
}

export interface TranscriptEntry {
  speaker: string;
  t_start: number;
  t_end: number;
  text: string;
}

export interface CaptionEntry {
  t_frame: number;
  caption: string;
}

export interface MomentDetail {
  document: {
    doc_id: string;
    video_id: string;
    video_title: string;
    t_in: number;
    t_out: number;
    transcript_text: string;
    captions_text: string;
    speakers: string[];
  };
  moment: {
    moment_id: string;
    video_id: string;
    t_in: number;
    t_out: number;
    transcript: TranscriptEntry[];
    captions: CaptionEntry[];
  };
  media_uri: string | null;
}

export interface HealthResponse {
  status: string;
  docs: number;
  generation: number;
}
