// Pure render functions: data in, markup string out. The DOM binder in
// main.ts only assigns innerHTML, so everything visual is testable
// without a browser.

import type { EnhanceResponse, TrajectoryPoint } from "./api.js";

export const COLOR_INPUT = "#9aa0a6";
export const COLOR_OUTPUT = "#4285f4"; // enhanced results in blue
export const COLOR_REFERENCE = "#ea4335"; // reference in red

const CHART_W = 320;
const CHART_H = 120;

export interface HistogramSeries {
  counts: number[];
  color: string;
  label: string;
}

export function histogramSvg(series: HistogramSeries[]): string {
  const bins = series[0]?.counts.length ?? 0;
  if (bins === 0) return "<svg></svg>";
  const peak = Math.max(1, ...series.flatMap((s) => s.counts));
  const barW = CHART_W / bins;
  const bars = series
    .map((s, si) => {
      const rects = s.counts
        .map((count, i) => {
          const h = (count / peak) * (CHART_H - 4);
          const x = (i * barW).toFixed(2);
          const y = (CHART_H - h).toFixed(2);
          return `<rect x="${x}" y="${y}" width="${barW.toFixed(2)}" height="${h.toFixed(2)}" fill="${s.color}" fill-opacity="0.55"><title>${s.label} bin ${i}: ${count}</title></rect>`;
        })
        .join("");
      return `<g data-series="${si}">${rects}</g>`;
    })
    .join("");
  return `<svg viewBox="0 0 ${CHART_W} ${CHART_H}" class="histogram" role="img">${bars}</svg>`;
}

export function trajectorySvg(points: TrajectoryPoint[]): string {
  if (points.length === 0) return "<svg></svg>";
  const maxStep = Math.max(1, points[points.length - 1]!.step);
  const maxZfc = Math.max(1e-6, ...points.map((p) => p.zfc));
  const coords = points.map((p) => {
    const x = (p.step / maxStep) * (CHART_W - 16) + 8;
    const y = CHART_H - 8 - (p.zfc / maxZfc) * (CHART_H - 16);
    return [x, y] as const;
  });
  const path = coords.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  const dots = coords
    .map(
      ([x, y], i) =>
        `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3" fill="${COLOR_OUTPUT}"><title>step ${points[i]!.step}: zfc ${points[i]!.zfc.toFixed(4)}</title></circle>`,
    )
    .join("");
  return `<svg viewBox="0 0 ${CHART_W} ${CHART_H}" class="trajectory" role="img"><polyline points="${path}" fill="none" stroke="${COLOR_OUTPUT}" stroke-width="1.5"/>${dots}</svg>`;
}

export function trajectoryPointCount(svg: string): number {
  return (svg.match(/<circle /g) ?? []).length;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function convergedBadge(converged: boolean, iterations: number): string {
  const cls = converged ? "badge ok" : "badge warn";
  const text = converged
    ? `converged in ${iterations} iteration${iterations === 1 ? "" : "s"}`
    : `stopped after ${iterations} iteration${iterations === 1 ? "" : "s"}`;
  return `<span class="${cls}">${text}</span>`;
}

export function errorPanelHtml(message: string): string {
  return `<div class="error-panel" role="alert">${escapeHtml(message)}</div>`;
}

export function resultPaneHtml(response: EnhanceResponse): string {
  const histograms: HistogramSeries[] = [
    { counts: response.input_histogram, color: COLOR_INPUT, label: "input" },
    { counts: response.output_histogram, color: COLOR_OUTPUT, label: "output" },
  ];
  if (response.reference_histogram) {
    histograms.push({
      counts: response.reference_histogram,
      color: COLOR_REFERENCE,
      label: "reference",
    });
  }
  const steps = (response.step_images ?? [])
    .map((b64, i) => `<img class="step" src="data:image/png;base64,${b64}" alt="step ${i}">`)
    .join("");
  return [
    `<div class="result-images"><img src="data:image/png;base64,${response.output_image}" alt="enhanced output"></div>`,
    convergedBadge(response.converged, response.iterations_used),
    `<div class="charts">${histogramSvg(histograms)}${trajectorySvg(response.zfc_trajectory)}</div>`,
    steps ? `<div class="steps">${steps}</div>` : "",
  ].join("");
}

export function historyThumbHtml(index: number, outputImage: string, label: string): string {
  return `<button class="history-thumb" data-index="${index}" title="${escapeHtml(label)}"><img src="data:image/png;base64,${outputImage}" alt="${escapeHtml(label)}"></button>`;
}
