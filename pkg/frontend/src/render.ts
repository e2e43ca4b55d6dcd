import type { ChatTurn } from "./state.js";
import type {
  AskResponse,
  MomentDetail,
  MomentReferencePayload,
  MomentSummary,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function formatSeconds(value: number): string {
  return Number.isInteger(value) ? String(value) : String(value);
}

function refLabel(ref: MomentReferencePayload, title?: string): string {
  const name = title ?? ref.video_id;
  return `${name} (${formatSeconds(ref.timestamp_in)}–${formatSeconds(ref.timestamp_out)}s)`;
}

/** Retrieved moment whose interval overlaps the reference, if any. */
export function momentForReference(
  ref: MomentReferencePayload,
  moments: MomentSummary[],
): MomentSummary | undefined {
  return moments.find(
    (m) =>
      m.video_id === ref.video_id &&
      Math.max(m.t_in, ref.timestamp_in) < Math.min(m.t_out, ref.timestamp_out),
  );
}

function referenceRow(answer: AskResponse): HTMLElement {
  const row = el("div", "reference-row");
  for (const ref of answer.references) {
    if (ref.status === "valid") {
      const moment = momentForReference(ref, answer.moments);
      const chip = el("button", "moment-chip", refLabel(ref, moment?.video_title));
      chip.type = "button";
      if (moment) chip.dataset.momentId = moment.moment_id;
      row.appendChild(chip);
    } else {
      const struck = el("s", "ref-invalid", refLabel(ref));
      struck.title = ref.status;
      row.appendChild(struck);
    }
  }
  return row;
}

function externalLinksBanner(links: string[]): HTMLElement {
  const banner = el("div", "external-links-warning");
  banner.appendChild(
    el("strong", undefined, "External links in the answer (not library moments):"),
  );
  const list = el("ul");
  for (const url of links) {
    list.appendChild(el("li", undefined, url));
  }
  banner.appendChild(list);
  return banner;
}

function debugSection(answer: AskResponse): HTMLElement {
  const details = el("details", "debug");
  details.open = false; // collapsed by default
  details.appendChild(el("summary", undefined, "Queries and timings"));
  const queries = el("ul", "debug-queries");
  for (const q of answer.queries) {
    queries.appendChild(el("li", undefined, q));
  }
  details.appendChild(queries);
  const timings = el("ul", "debug-timings");
  for (const [stage, ms] of Object.entries(answer.timings_ms)) {
    timings.appendChild(el("li", undefined, `${stage}: ${ms.toFixed(1)} ms`));
  }
  details.appendChild(timings);
  return details;
}

export function turnElement(turn: ChatTurn): HTMLElement {
  const article = el("article", `turn turn-${turn.status}`);
  article.dataset.turnId = String(turn.id);
  article.appendChild(el("p", "user-text", turn.user));

  if (turn.status === "pending") {
    article.appendChild(el("p", "pending-note", "Thinking…"));
  } else if (turn.status === "error") {
    article.appendChild(el("p", "error-note", turn.error ?? "request failed"));
    const retry = el("button", "retry-button", "Retry");
    retry.type = "button";
    retry.dataset.retryTurn = String(turn.id);
    article.appendChild(retry);
  } else if (turn.answer) {
    article.appendChild(el("p", "answer-text", turn.answer.answer));
    article.appendChild(referenceRow(turn.answer));
    if (turn.answer.external_links.length > 0) {
      article.appendChild(externalLinksBanner(turn.answer.external_links));
    }
    article.appendChild(debugSection(turn.answer));
  }
  return article;
}

export function renderTurns(container: HTMLElement, turns: ChatTurn[]): void {
  container.replaceChildren(...turns.map(turnElement));
}

export function momentPanel(detail: MomentDetail): HTMLElement {
  const panel = el("section", "moment-detail");
  panel.appendChild(el("h2", undefined, detail.document.video_title));
  panel.appendChild(
    el(
      "p",
      "moment-interval",
      `${formatSeconds(detail.moment.t_in)}s – ${formatSeconds(detail.moment.t_out)}s`,
    ),
  );
  const transcript = el("ul", "transcript-lines");
  for (const seg of detail.moment.transcript) {
    transcript.appendChild(el("li", undefined, `${seg.speaker}: ${seg.text}`));
  }
  panel.appendChild(transcript);
  const captions = el("ul", "caption-lines");
  for (const cap of detail.moment.captions) {
    captions.appendChild(
      el("li", undefined, `${formatSeconds(cap.t_frame)}s — ${cap.caption}`),
    );
  }
  panel.appendChild(captions);
  if (detail.media_uri) {
    const link = el("a", "media-link", "Open media");
    link.href = detail.media_uri;
    link.target = "_blank";
    link.rel = "noopener";
    panel.appendChild(link);
  }
  return panel;
}

export function momentNotFound(momentId: string): HTMLElement {
  return el("p", "moment-not-found", `Moment ${momentId} was not found.`);
}
