import { describe, expect, it } from "vitest";

import {
  ITERATIONS_MAX,
  ZFC_SLIDER_MAX,
  ZFC_SLIDER_MIN,
  canRun,
  initialState,
  modeParams,
  restoreParams,
  serializeRequest,
  serializeTarget,
  setIterations,
  setMode,
  setZfcTarget,
} from "../src/state.js";

function uploaded() {
  return { ...initialState(), inputImage: "aGVsbG8=" };
}

describe("mode exclusivity", () => {
  it("serializes exactly one target field per mode", () => {
    let state = { ...uploaded(), referenceImage: "cmVm" };
    for (const mode of ["reference", "zfc", "iterations"] as const) {
      state = setMode(state, mode);
      const target = serializeTarget(state);
      expect(Object.keys(target)).toHaveLength(1);
    }
  });

  it("slider value is carried verbatim as zfc_target", () => {
    let state = setMode(uploaded(), "zfc");
    state = setZfcTarget(state, 0.45);
    const request = serializeRequest(state);
    expect(request.target).toEqual({ zfc_target: 0.45 });
    expect(request.target.reference_image).toBeUndefined();
    expect(request.target.fixed_iterations).toBeUndefined();
  });

  it("iteration mode carries only fixed_iterations", () => {
    let state = setMode(uploaded(), "iterations");
    state = setIterations(state, 3);
    expect(serializeRequest(state).target).toEqual({ fixed_iterations: 3 });
  });

  it("reference mode requires an uploaded reference", () => {
    const state = setMode(uploaded(), "reference");
    expect(() => serializeTarget(state)).toThrow(/reference/);
    expect(canRun(state)).toBe(false);
  });
});

describe("control ranges", () => {
  it("clamps the slider to [0.05, 0.95]", () => {
    expect(setZfcTarget(initialState(), -1).zfcTarget).toBe(ZFC_SLIDER_MIN);
    expect(setZfcTarget(initialState(), 2).zfcTarget).toBe(ZFC_SLIDER_MAX);
  });

  it("clamps iterations to [1, 20] and rounds", () => {
    expect(setIterations(initialState(), 0).iterations).toBe(1);
    expect(setIterations(initialState(), 99).iterations).toBe(ITERATIONS_MAX);
    expect(setIterations(initialState(), 4.6).iterations).toBe(5);
  });
});

describe("run guards", () => {
  it("cannot run without an input image", () => {
    expect(canRun(initialState())).toBe(false);
  });

  it("cannot run while a request is in flight", () => {
    const state = { ...uploaded(), inFlight: true };
    expect(canRun(state)).toBe(false);
  });
});

describe("history parameter restore", () => {
  it("round-trips mode parameters", () => {
    let state = setMode(uploaded(), "zfc");
    state = setZfcTarget(state, 0.62);
    const params = modeParams(state);
    const restored = restoreParams(setZfcTarget(setMode(uploaded(), "iterations"), 0.2), params);
    expect(restored.mode).toBe("zfc");
    expect(restored.zfcTarget).toBe(0.62);
  });
});
