import { ApiClient, ApiError } from "./api.js";
import { momentNotFound, momentPanel, renderTurns } from "./render.js";
import { ChatStore } from "./state.js";

export interface App {
  store: ChatStore;
  root: HTMLElement;
}

/** Wire the chat view, input form, and moment detail panel into `root`. */
export function mountApp(root: HTMLElement, api: ApiClient): App {
  root.innerHTML = `
    <main class="layout">
      <section class="chat">
        <div class="turns"></div>
        <form class="ask-form">
          <input name="question" type="text" placeholder="Ask about the library…" autocomplete="off" />
          <button type="submit" disabled>Ask</button>
        </form>
      </section>
      <aside class="panel"></aside>
    </main>
  `;
  const turnsBox = root.querySelector<HTMLElement>(".turns")!;
  const form = root.querySelector<HTMLFormElement>(".ask-form")!;
  const input = root.querySelector<HTMLInputElement>("input[name=question]")!;
  const submit = root.querySelector<HTMLButtonElement>("button[type=submit]")!;
  const panel = root.querySelector<HTMLElement>(".panel")!;

  const store = new ChatStore(api, () => renderTurns(turnsBox, store.turns));

  input.addEventListener("input", () => {
    submit.disabled = input.value.trim() === "";
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (store.submit(input.value)) {
      input.value = "";
      submit.disabled = true;
    }
  });

  async function openMoment(momentId: string): Promise<void> {
    try {
      const detail = await api.getMoment(momentId);
      panel.replaceChildren(momentPanel(detail));
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        panel.replaceChildren(momentNotFound(momentId));
      } else {
        throw error;
      }
    }
  }

  turnsBox.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const chip = target.closest<HTMLElement>(".moment-chip");
    if (chip?.dataset.momentId) {
      void openMoment(chip.dataset.momentId);
      return;
    }
    const retry = target.closest<HTMLElement>(".retry-button");
    if (retry?.dataset.retryTurn) {
      store.retry(Number(retry.dataset.retryTurn));
    }
  });

  return { store, root };
}
