/** Idea-entry flow, mirroring the handheld interaction: type on the
 * keyboard view, press enter to see the idea full-screen with a re-enter
 * affordance, then "put the tile down" to submit.  After submission the
 * assigned tile stays highlighted until it settles.
 */

import { GatewayClient, GatewayError } from "./client.js";

export const MAX_IDEA_CHARS = 280;

export type FlowView = "keyboard" | "confirm" | "tracking";

export interface FlowState {
  view: FlowView;
  draft: string;
  error: string | null;
  trackedTile: number | null;
}

export function initialFlow(): FlowState {
  return { view: "keyboard", draft: "", error: null, trackedTile: null };
}

/** Client-side mirror of the gateway's idea validation, for inline errors
 * before any request goes out. */
export function validateDraft(raw: string): string | null {
  const trimmed = raw.trim();
  if (trimmed.length === 0) return "enter an idea first";
  if (trimmed.length > MAX_IDEA_CHARS) {
    return `ideas are capped at ${MAX_IDEA_CHARS} characters`;
  }
  return null;
}

export class FlowController {
  state: FlowState = initialFlow();

  constructor(
    private readonly client: GatewayClient,
    private readonly onChange: (state: FlowState) => void = () => {},
  ) {}

  private update(patch: Partial<FlowState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  type(text: string): void {
    this.update({ draft: this.state.draft + text, error: null });
  }

  backspace(): void {
    this.update({ draft: this.state.draft.slice(0, -1), error: null });
  }

  setDraft(text: string): void {
    this.update({ draft: text, error: null });
  }

  /** Keyboard -> confirm; rejects invalid drafts inline with no request. */
  pressEnter(): void {
    const error = validateDraft(this.state.draft);
    if (error) {
      this.update({ error });
      return;
    }
    this.update({ view: "confirm", draft: this.state.draft.trim(), error: null });
  }

  /** Confirm -> keyboard, keeping the draft for editing; typing replaces it. */
  reenter(): void {
    this.update({ view: "keyboard", error: null });
  }

  /** Confirm -> submit to the gateway ("putting the tile down"). */
  async putDown(): Promise<number | null> {
    const error = validateDraft(this.state.draft);
    if (error) {
      this.update({ error });
      return null;
    }
    try {
      const reply = await this.client.submitIdea(this.state.draft.trim());
      this.update({ view: "tracking", trackedTile: reply.tile, error: null });
      return reply.tile;
    } catch (err) {
      const message =
        err instanceof GatewayError ? `${err.code}: ${err.message}` : String(err);
      this.update({ error: message });
      return null;
    }
  }

  /** Called per snapshot; the highlight clears once the tile settles. */
  observePhase(tile: number, phase: string): void {
    if (this.state.trackedTile === tile && phase === "settled") {
      this.update({ view: "keyboard", draft: "", trackedTile: null, error: null });
    }
  }

  highlightedTile(): number | null {
    return this.state.trackedTile;
  }
}
