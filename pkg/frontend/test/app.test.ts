// UI contract: mixed-status references render as chips vs struck-through
// items, the detail panel populates from GET /moments/{id}, and error turns
// expose retry.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountApp } from "../src/app.js";
import { jsonResponse, mixedStatusAsk, momentDetail } from "./fixtures.js";

const flush = () => new Promise<void>((r) => setTimeout(r, 0));

function setup(handler: (url: string, init?: RequestInit) => Response | Promise<Response>) {
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => handler(url, init)),
  );
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  return { root, app: mountApp(root, new ApiClient()) };
}

function submitQuestion(root: HTMLElement, text: string) {
  const input = root.querySelector<HTMLInputElement>("input[name=question]")!;
  const form = root.querySelector<HTMLFormElement>(".ask-form")!;
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

describe("chat view", () => {
  beforeEach(() => {
    vi.unstubAllGlobals();
  });

  it("renders the chip/struck-through split for mixed-status references", async () => {
    const { root } = setup((url) => {
      if (url === "/ask") return jsonResponse(mixedStatusAsk());
      throw new Error(`unexpected fetch ${url}`);
    });
    submitQuestion(root, "find launch footage");
    expect(root.querySelector(".turn-pending")).not.toBeNull();
    await flush();

    const chips = root.querySelectorAll(".moment-chip");
    const struck = root.querySelectorAll(".ref-invalid");
    expect(chips).toHaveLength(1); // the single valid reference
    expect(struck).toHaveLength(2); // not_retrieved + unknown_video
    expect(chips[0]!.textContent).toContain("Apollo 11 Launch Coverage");
    expect(chips[0]!.textContent).toContain("0–30s");
    const tooltips = [...struck].map((s) => s.getAttribute("title"));
    expect(tooltips).toEqual(["not_retrieved", "unknown_video"]);

    const banner = root.querySelector(".external-links-warning");
    expect(banner?.textContent).toContain("https://youtu.be/xyz");

    const debug = root.querySelector<HTMLDetailsElement>("details.debug")!;
    expect(debug.open).toBe(false); // collapsed by default
    expect(debug.querySelectorAll(".debug-queries li")).toHaveLength(5);
    expect(debug.querySelector(".debug-timings")!.textContent).toContain("total");
  });

  it("populates the detail panel from GET /moments/{id} on chip click", async () => {
    const { root } = setup((url) => {
      if (url === "/ask") return jsonResponse(mixedStatusAsk());
      if (url === "/moments/V001_m0") return jsonResponse(momentDetail());
      throw new Error(`unexpected fetch ${url}`);
    });
    submitQuestion(root, "find launch footage");
    await flush();

    const chip = root.querySelector<HTMLButtonElement>(".moment-chip")!;
    expect(chip.dataset.momentId).toBe("V001_m0");
    chip.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();

    const panel = root.querySelector(".panel")!;
    expect(panel.querySelector("h2")!.textContent).toBe("Apollo 11 Launch Coverage");
    expect(panel.querySelector(".moment-interval")!.textContent).toBe("0s – 30s");
    const lines = [...panel.querySelectorAll(".transcript-lines li")].map(
      (li) => li.textContent,
    );
    expect(lines).toEqual(["SPEAKER_00: ignition sequence start"]);
    expect(panel.querySelectorAll(".caption-lines li")).toHaveLength(3);
    const media = panel.querySelector<HTMLAnchorElement>(".media-link")!;
    expect(media.href).toBe("https://media.example/v001.mp4");
  });

  it("shows an inline notice when the moment is gone (404)", async () => {
    const ask = mixedStatusAsk();
    const { root } = setup((url) => {
      if (url === "/ask") return jsonResponse(ask);
      if (url.startsWith("/moments/")) return jsonResponse({ detail: "unknown" }, 404);
      throw new Error(`unexpected fetch ${url}`);
    });
    submitQuestion(root, "q");
    await flush();
    root
      .querySelector<HTMLButtonElement>(".moment-chip")!
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();
    expect(root.querySelector(".panel .moment-not-found")?.textContent).toContain(
      "V001_m0",
    );
  });

  it("omits the media link when media_uri is absent", async () => {
    const detail = { ...momentDetail(), media_uri: null };
    const { root } = setup((url) => {
      if (url === "/ask") return jsonResponse(mixedStatusAsk());
      if (url.startsWith("/moments/")) return jsonResponse(detail);
      throw new Error(`unexpected fetch ${url}`);
    });
    submitQuestion(root, "q");
    await flush();
    root
      .querySelector<HTMLButtonElement>(".moment-chip")!
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();
    expect(root.querySelector(".panel .media-link")).toBeNull();
  });

  it("exposes retry on error turns and recovers on click", async () => {
    let failures = 1;
    const { root } = setup((url) => {
      if (url === "/ask") {
        if (failures > 0) {
          failures -= 1;
          return jsonResponse({ detail: { stage: "query_generation", reason: "down" } }, 502);
        }
        return jsonResponse(mixedStatusAsk());
      }
      throw new Error(`unexpected fetch ${url}`);
    });
    submitQuestion(root, "q");
    await flush();

    const errorTurn = root.querySelector(".turn-error")!;
    expect(errorTurn.querySelector(".error-note")).not.toBeNull();
    const retry = errorTurn.querySelector<HTMLButtonElement>(".retry-button")!;
    retry.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();

    expect(root.querySelector(".turn-error")).toBeNull();
    expect(root.querySelectorAll(".turn-done")).toHaveLength(1);
    expect(root.querySelectorAll(".moment-chip")).toHaveLength(1);
  });

  it("disables submit for empty input", () => {
    const { root } = setup(() => jsonResponse(mixedStatusAsk()));
    const input = root.querySelector<HTMLInputElement>("input[name=question]")!;
    const submit = root.querySelector<HTMLButtonElement>("button[type=submit]")!;
    expect(submit.disabled).toBe(true);
    input.value = "something";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(submit.disabled).toBe(false);
    input.value = "   ";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(submit.disabled).toBe(true);
  });
});
