// What-if history: the last few results with the parameters that made
// them, so a click restores that parameterization into the controls.

import type { EnhanceResponse } from "./api.js";
import type { ModeParams } from "./state.js";

export const HISTORY_CAP = 8;

export interface HistoryEntry {
  params: ModeParams;
  response: EnhanceResponse;
}

export class HistoryStrip {
  private entries: HistoryEntry[] = [];

  push(params: ModeParams, response: EnhanceResponse): void {
    this.entries.push({ params, response });
    if (this.entries.length > HISTORY_CAP) {
      this.entries.shift(); // oldest evicted
    }
  }

  get(index: number): HistoryEntry | undefined {
    return this.entries[index];
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  get length(): number {
    return this.entries.length;
  }
}

export function entryLabel(entry: HistoryEntry): string {
  const { params } = entry;
  switch (params.mode) {
    case "reference":
      return "reference image";
    case "zfc":
      return `brightness ${params.zfcTarget.toFixed(2)}`;
    case "iterations":
      return `${params.iterations} iterations`;
  }
}
