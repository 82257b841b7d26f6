// Session state machine. Exactly one personalization mode is active at
// a time, and only that mode's parameters are ever serialized into a
// request; an in-flight flag guards against duplicate submissions.

import type { EnhanceRequest, EnhanceResponse, ScoreResponse, TargetBody } from "./api.js";

export type Mode = "reference" | "zfc" | "iterations";

export const ZFC_SLIDER_MIN = 0.05;
export const ZFC_SLIDER_MAX = 0.95;
export const ITERATIONS_MIN = 1;
export const ITERATIONS_MAX = 20;

export interface SessionState {
  inputImage: string | null; // base64 image file bytes
  inputScore: ScoreResponse | null;
  mode: Mode;
  referenceImage: string | null;
  zfcTarget: number;
  iterations: number;
  returnSteps: boolean;
  inFlight: boolean;
  lastResponse: EnhanceResponse | null;
  lastError: string | null;
}

export function initialState(): SessionState {
  return {
    inputImage: null,
    inputScore: null,
    mode: "zfc",
    referenceImage: null,
    zfcTarget: 0.45,
    iterations: 5,
    returnSteps: false,
    inFlight: false,
    lastResponse: null,
    lastError: null,
  };
}

export function setMode(state: SessionState, mode: Mode): SessionState {
  return { ...state, mode };
}

export function setZfcTarget(state: SessionState, value: number): SessionState {
  const clamped = Math.min(ZFC_SLIDER_MAX, Math.max(ZFC_SLIDER_MIN, value));
  return { ...state, zfcTarget: clamped };
}

export function setIterations(state: SessionState, value: number): SessionState {
  const clamped = Math.min(ITERATIONS_MAX, Math.max(ITERATIONS_MIN, Math.round(value)));
  return { ...state, iterations: clamped };
}

export function canRun(state: SessionState): boolean {
  if (state.inputImage === null || state.inFlight) return false;
  if (state.mode === "reference") return state.referenceImage !== null;
  return true;
}

/** Build the target body for the active mode only. */
export function serializeTarget(state: SessionState): TargetBody {
  switch (state.mode) {
    case "reference":
      if (state.referenceImage === null) {
        throw new Error("reference mode needs an uploaded reference image");
      }
      return { reference_image: state.referenceImage };
    case "zfc":
      return { zfc_target: state.zfcTarget };
    case "iterations":
      return { fixed_iterations: state.iterations };
  }
}

export function serializeRequest(state: SessionState): EnhanceRequest {
  if (state.inputImage === null) throw new Error("no input image uploaded");
  return {
    input_image: state.inputImage,
    target: serializeTarget(state),
    return_steps: state.returnSteps,
  };
}

/** Parameters worth restoring from the history strip. */
export interface ModeParams {
  mode: Mode;
  referenceImage: string | null;
  zfcTarget: number;
  iterations: number;
}

export function modeParams(state: SessionState): ModeParams {
  return {
    mode: state.mode,
    referenceImage: state.referenceImage,
    zfcTarget: state.zfcTarget,
    iterations: state.iterations,
  };
}

export function restoreParams(state: SessionState, params: ModeParams): SessionState {
  return {
    ...state,
    mode: params.mode,
    referenceImage: params.referenceImage,
    zfcTarget: params.zfcTarget,
    iterations: params.iterations,
  };
}
