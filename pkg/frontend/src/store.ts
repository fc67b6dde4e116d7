/** Batch state: one card per queued pair, labeled via keyboard or clicks.
 *
 * The store is deliberately free of DOM and network concerns so the
 * submission-gating and shortcut rules are directly testable. It holds no
 * authoritative state: it is rebuilt from /api/queue on every load.
 */

import type { QueuedPair } from "./api.js";

export type BinaryLabel = 0 | 1;

export interface PairCard extends QueuedPair {
  chosenLabel: BinaryLabel | null;
}

export class BatchStore {
  readonly batchId: string;
  readonly cards: PairCard[];
  private cursorIndex = 0;

  constructor(batchId: string, pairs: QueuedPair[]) {
    this.batchId = batchId;
    this.cards = pairs.map((p) => ({ ...p, chosenLabel: null }));
  }

  get cursor(): number {
    return this.cursorIndex;
  }

  get size(): number {
    return this.cards.length;
  }

  get labeledCount(): number {
    return this.cards.filter((c) => c.chosenLabel !== null).length;
  }

  /** Submission is blocked until every card carries a label. */
  get allLabeled(): boolean {
    return this.cards.length > 0 && this.cards.every((c) => c.chosenLabel !== null);
  }

  setLabel(index: number, label: BinaryLabel): void {
    if (index < 0 || index >= this.cards.length) {
      throw new RangeError(`card index ${index} out of range`);
    }
    this.cards[index].chosenLabel = label;
  }

  moveCursor(index: number): void {
    if (index < 0 || index >= this.cards.length) return;
    this.cursorIndex = index;
  }

  /** Advance to the next unlabeled card, wrapping; stay put if none left. */
  advance(): void {
    const n = this.cards.length;
    for (let step = 1; step <= n; step++) {
      const i = (this.cursorIndex + step) % n;
      if (this.cards[i].chosenLabel === null) {
        this.cursorIndex = i;
        return;
      }
    }
    if (this.cursorIndex < n - 1) this.cursorIndex += 1;
  }

  /**
   * Keyboard shortcuts: "1" marks the current card redundant, "0" marks it
   * distinct (both auto-advance), "Enter" skips ahead. Returns true when the
   * key was consumed.
   */
  handleKey(key: string): boolean {
    if (this.cards.length === 0) return false;
    if (key === "1" || key === "0") {
      this.setLabel(this.cursorIndex, key === "1" ? 1 : 0);
      this.advance();
      return true;
    }
    if (key === "Enter") {
      this.advance();
      return true;
    }
    return false;
  }

  /** Payload for POST /api/labels; only valid once allLabeled. */
  toSubmission(): { pair_id: string; label: BinaryLabel }[] {
    if (!this.allLabeled) {
      throw new Error("cannot submit: some cards are still unlabeled");
    }
    return this.cards.map((c) => ({ pair_id: c.pair_id, label: c.chosenLabel as BinaryLabel }));
  }
}
