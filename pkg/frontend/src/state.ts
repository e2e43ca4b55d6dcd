import type { AskResponse } from "./types.js";

export type TurnStatus = "pending" | "done" | "error";

export interface ChatTurn {
  id: number;
  user: string;
  status: TurnStatus;
  answer?: AskResponse;
  error?: string;
}

export interface AskFn {
  ask(query: string): Promise<AskResponse>;
}

/**
 * Append-only chat session. At most one /ask is in flight; further
 * submissions queue client-side. Answers attach to the turn that created
 * them, so turn order is stable even if responses arrive out of order.
 */
export class ChatStore {
  readonly turns: ChatTurn[] = [];
  private queue: number[] = [];
  private inFlight = false;
  private nextId = 1;

  constructor(
    private readonly api: AskFn,
    private readonly onChange: () => void = () => {},
  ) {}

  submit(text: string): ChatTurn | null {
    const user = text.trim();
    if (!user) return null;
    const turn: ChatTurn = { id: this.nextId++, user, status: "pending" };
    this.turns.push(turn);
    this.queue.push(turn.id);
    this.onChange();
    this.pump();
    return turn;
  }

  retry(turnId: number): void {
    const turn = this.turns.find((t) => t.id === turnId);
    if (!turn || turn.status !== "error") return;
    turn.status = "pending";
    turn.error = undefined;
    this.queue.push(turn.id);
    this.onChange();
    this.pump();
  }

  getTurn(turnId: number): ChatTurn | undefined {
    return this.turns.find((t) => t.id === turnId);
  }

  private pump(): void {
    if (this.inFlight) return;
    const turnId = this.queue.shift();
    if (turnId === undefined) return;
    const turn = this.turns.find((t) => t.id === turnId);
    if (!turn) return;
    this.inFlight = true;
    this.api
      .ask(turn.user)
      .then((answer) => {
        turn.status = "done";
        turn.answer = answer;
      })
      .catch((error: unknown) => {
        turn.status = "error";
        turn.error = error instanceof Error ? error.message : String(error);
      })
      .finally(() => {
        this.inFlight = false;
        this.onChange();
        this.pump();
      });
  }
}
