// DOM wiring. All logic lives in controller/state/render; this file
// only moves bytes between the page and the controller.

import { ApiClient, fetchTransport } from "./api.js";
import { SessionController } from "./controller.js";
import { entryLabel } from "./history.js";
import {
  errorPanelHtml,
  histogramSvg,
  historyThumbHtml,
  resultPaneHtml,
  COLOR_INPUT,
} from "./render.js";
import { setIterations, setMode, setZfcTarget, canRun, Mode } from "./state.js";

const controller = new SessionController(new ApiClient(fetchTransport));

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function fileToBase64(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onerror = () => reject(reader.error);
    reader.onload = () => {
      const url = reader.result as string;
      resolve(url.slice(url.indexOf(",") + 1));
    };
    reader.readAsDataURL(file);
  });
}

function toast(message: string): void {
  const box = $("toast");
  box.textContent = message;
  box.classList.add("visible");
  setTimeout(() => box.classList.remove("visible"), 4000);
}

function sync(): void {
  const s = controller.state;
  ($("run") as HTMLButtonElement).disabled = !canRun(s);
  for (const mode of ["reference", "zfc", "iterations"] as const) {
    $(`mode-${mode}`).classList.toggle("active", s.mode === mode);
  }
  ($("zfc-slider") as HTMLInputElement).value = String(s.zfcTarget);
  $("zfc-value").textContent = s.zfcTarget.toFixed(2);
  ($("iters-input") as HTMLInputElement).value = String(s.iterations);
  $("controls").classList.toggle("disabled", s.inFlight);

  if (s.inputImage) {
    ($("input-preview") as HTMLImageElement).src =
      `data:image/png;base64,${s.inputImage}`;
  }
  if (s.inputScore) {
    $("input-histogram").innerHTML = histogramSvg([
      { counts: s.inputScore.histogram, color: COLOR_INPUT, label: "input" },
    ]);
    $("input-stats").textContent =
      `quality ${s.inputScore.quality_score.toFixed(3)} - ` +
      `brightness ${s.inputScore.normalized_zfc.toFixed(3)}`;
  }
  $("result").innerHTML = s.lastError
    ? errorPanelHtml(s.lastError)
    : s.lastResponse
      ? resultPaneHtml(s.lastResponse)
      : "";
  $("history").innerHTML = controller.history
    .list()
    .map((entry, i) => historyThumbHtml(i, entry.response.output_image, entryLabel(entry)))
    .join("");
}

async function handleUpload(input: HTMLInputElement, isReference: boolean): Promise<void> {
  const file = input.files?.[0];
  if (!file) return;
  const base64 = await fileToBase64(file);
  const result = isReference
    ? await controller.uploadReference(file.name, file.type, base64)
    : await controller.uploadInput(file.name, file.type, base64);
  if (!result.accepted && result.message) toast(result.message);
  sync();
}

window.addEventListener("DOMContentLoaded", () => {
  $("input-file").addEventListener("change", (e) =>
    handleUpload(e.target as HTMLInputElement, false),
  );
  $("reference-file").addEventListener("change", (e) =>
    handleUpload(e.target as HTMLInputElement, true),
  );
  for (const mode of ["reference", "zfc", "iterations"] as const) {
    $(`mode-${mode}`).addEventListener("click", () => {
      controller.state = setMode(controller.state, mode as Mode);
      sync();
    });
  }
  $("zfc-slider").addEventListener("input", (e) => {
    controller.state = setZfcTarget(
      controller.state,
      Number((e.target as HTMLInputElement).value),
    );
    sync();
  });
  $("iters-input").addEventListener("change", (e) => {
    controller.state = setIterations(
      controller.state,
      Number((e.target as HTMLInputElement).value),
    );
    sync();
  });
  ($("steps-toggle") as HTMLInputElement).addEventListener("change", (e) => {
    controller.state = {
      ...controller.state,
      returnSteps: (e.target as HTMLInputElement).checked,
    };
  });
  $("run").addEventListener("click", async () => {
    sync();
    await controller.runEnhance();
    sync();
  });
  $("history").addEventListener("click", (e) => {
    const btn = (e.target as HTMLElement).closest<HTMLButtonElement>(".history-thumb");
    if (!btn) return;
    controller.restoreFromHistory(Number(btn.dataset.index));
    sync();
  });
  sync();
});
