import type { AskResponse, MomentDetail } from "../src/types.js";

export function mixedStatusAsk(): AskResponse {
  return {
    answer:
      "Launch: [Apollo 11 Launch Coverage (0–30s)](vlqa://moment/V001?in=0&out=30). " +
      "Skip [B999](5;15) and [youtu.be/xyz](0;10).",
    raw_answer: "Launch: [V001](0;30). Skip [B999](5;15) and [youtu.be/xyz](0;10).",
    references: [
      { video_id: "V001", timestamp_in: 0, timestamp_out: 30, span: [8, 22], status: "valid" },
      { video_id: "B999", timestamp_in: 5, timestamp_out: 15, span: [29, 43], status: "not_retrieved" },
      { video_id: "youtu.be/xyz", timestamp_in: 0, timestamp_out: 10, span: [48, 69], status: "unknown_video" },
    ],
    external_links: ["https://youtu.be/xyz"],
    moments: [
      {
        moment_id: "V001_m0",
        video_id: "V001",
        video_title: "Apollo 11 Launch Coverage",
        t_in: 0,
        t_out: 30,
        score: 2.4,
      },
    ],
    queries: ["rocket launch", "liftoff pad", "apollo mission", "countdown", "ignition"],
    timings_ms: { query_generation: 1.0, search: 2.0, total: 5.0 },
  };
}

export function momentDetail(): MomentDetail {
  return {
    document: {
      doc_id: "V001_m0",
      video_id: "V001",
      video_title: "Apollo 11 Launch Coverage",
      t_in: 0,
      t_out: 30,
      transcript_text: "SPEAKER_00: ignition sequence start",
      captions_text: "rocket on launch pad\nengines igniting with smoke\nsmoke and flame below",
      speakers: ["SPEAKER_00"],
    },
    moment: {
      moment_id: "V001_m0",
      video_id: "V001",
      t_in: 0,
      t_out: 30,
      transcript: [
        { speaker: "SPEAKER_00", t_start: 5, t_end: 10, text: "ignition sequence start" },
      ],
      captions: [
        { t_frame: 5, caption: "rocket on launch pad" },
        { t_frame: 15, caption: "engines igniting with smoke" },
        { t_frame: 25, caption: "smoke and flame below" },
      ],
    },
    media_uri: "https://media.example/v001.mp4",
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
