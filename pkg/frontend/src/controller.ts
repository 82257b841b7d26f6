// Orchestration between state, client and history; main.ts binds this
// to the DOM. Kept framework-free so the whole flow runs under vitest
// with a mocked transport.

import { ApiClient } from "./api.js";
import { HistoryStrip } from "./history.js";
import {
  SessionState,
  canRun,
  initialState,
  modeParams,
  serializeRequest,
} from "./state.js";

export interface UploadResult {
  accepted: boolean;
  message?: string;
}

const IMAGE_TYPES = ["image/png", "image/x-portable-pixmap", "image/ppm"];

export function looksLikeImageFile(name: string, mimeType: string): boolean {
  if (IMAGE_TYPES.includes(mimeType)) return true;
  return /\.(png|ppm|pgm)$/i.test(name);
}

export class SessionController {
  state: SessionState = initialState();
  readonly history = new HistoryStrip();

  constructor(private readonly client: ApiClient) {}

  /** Upload the low-light input; scores it and unlocks the controls. */
  async uploadInput(name: string, mimeType: string, base64: string): Promise<UploadResult> {
    if (!looksLikeImageFile(name, mimeType)) {
      return { accepted: false, message: `${name} is not a supported image file` };
    }
    const result = await this.client.score(base64);
    if (!result.ok) {
      return { accepted: false, message: result.error.detail };
    }
    this.state = {
      ...this.state,
      inputImage: base64,
      inputScore: result.value,
      lastResponse: null,
      lastError: null,
    };
    return { accepted: true };
  }

  async uploadReference(name: string, mimeType: string, base64: string): Promise<UploadResult> {
    if (!looksLikeImageFile(name, mimeType)) {
      return { accepted: false, message: `${name} is not a supported image file` };
    }
    this.state = { ...this.state, referenceImage: base64, mode: "reference" };
    return { accepted: true };
  }

  /** Post one enhancement request; duplicate submissions are ignored. */
  async runEnhance(): Promise<void> {
    if (!canRun(this.state)) return;
    const request = serializeRequest(this.state);
    this.state = { ...this.state, inFlight: true, lastError: null };
    try {
      const result = await this.client.enhance(request);
      if (result.ok) {
        this.history.push(modeParams(this.state), result.value);
        this.state = { ...this.state, lastResponse: result.value };
      } else {
        this.state = { ...this.state, lastError: result.error.detail };
      }
    } finally {
      this.state = { ...this.state, inFlight: false };
    }
  }

  restoreFromHistory(index: number): void {
    const entry = this.history.get(index);
    if (!entry) return;
    this.state = {
      ...this.state,
      mode: entry.params.mode,
      referenceImage: entry.params.referenceImage,
      zfcTarget: entry.params.zfcTarget,
      iterations: entry.params.iterations,
      lastResponse: entry.response,
    };
  }
}
