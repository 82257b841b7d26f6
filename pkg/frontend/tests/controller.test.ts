import { describe, expect, it } from "vitest";

import { ApiClient, Transport } from "../src/api.js";
import { SessionController, looksLikeImageFile } from "../src/controller.js";
import { setIterations, setMode } from "../src/state.js";
import { fixedResponse } from "./fixtures.js";

const scoreBody = {
  quality_score: 0.41,
  normalized_zfc: 0.12,
  histogram: [256, 0, 0, 0],
};

interface Call {
  method: string;
  path: string;
  body: unknown;
}

function mockTransport(
  responder: (path: string, body: unknown) => { status: number; body: unknown },
): { transport: Transport; calls: Call[] } {
  const calls: Call[] = [];
  const transport: Transport = async (method, path, body) => {
    calls.push({ method, path, body });
    return responder(path, body);
  };
  return { transport, calls };
}

function happyResponder(path: string) {
  if (path === "/api/score") return { status: 200, body: scoreBody };
  if (path === "/api/enhance") return { status: 200, body: fixedResponse() };
  return { status: 404, body: { detail: "no such endpoint" } };
}

async function uploadedController(responder = happyResponder) {
  const { transport, calls } = mockTransport(responder);
  const controller = new SessionController(new ApiClient(transport));
  const result = await controller.uploadInput("low.png", "image/png", "aW1n");
  expect(result.accepted).toBe(true);
  return { controller, calls };
}

describe("upload and preview", () => {
  it("scores the uploaded image and stores the histogram", async () => {
    const { controller } = await uploadedController();
    expect(controller.state.inputScore?.histogram).toEqual([256, 0, 0, 0]);
    expect(controller.state.inputImage).toBe("aW1n");
  });

  it("rejects non-image files before any upload", async () => {
    const { transport, calls } = mockTransport(happyResponder);
    const controller = new SessionController(new ApiClient(transport));
    const result = await controller.uploadInput("notes.txt", "text/plain", "eA==");
    expect(result.accepted).toBe(false);
    expect(calls).toHaveLength(0); // client-side rejection, no request
  });

  it("surfaces a 413 as a message", async () => {
    const { transport } = mockTransport(() => ({
      status: 413,
      body: { detail: "image exceeds the 4000000-pixel limit" },
    }));
    const controller = new SessionController(new ApiClient(transport));
    const result = await controller.uploadInput("big.png", "image/png", "eA==");
    expect(result.accepted).toBe(false);
    expect(result.message).toMatch(/pixel limit/);
  });

  it("accepts ppm by extension", () => {
    expect(looksLikeImageFile("frame.PPM", "")).toBe(true);
    expect(looksLikeImageFile("frame.exe", "application/x-thing")).toBe(false);
  });
});

describe("run_enhance", () => {
  it("posts the active mode's parameters only", async () => {
    const { controller, calls } = await uploadedController();
    controller.state = setIterations(setMode(controller.state, "iterations"), 3);
    await controller.runEnhance();
    const enhanceCall = calls.find((c) => c.path === "/api/enhance");
    expect(enhanceCall).toBeDefined();
    expect((enhanceCall!.body as { target: object }).target).toEqual({
      fixed_iterations: 3,
    });
  });

  it("trajectory point count equals iterations_used + 1", async () => {
    const { controller } = await uploadedController();
    await controller.runEnhance();
    const response = controller.state.lastResponse!;
    expect(response.zfc_trajectory).toHaveLength(response.iterations_used + 1);
  });

  it("surfaces a 422 degenerate reference inline", async () => {
    const { controller } = await uploadedController((path) =>
      path === "/api/score"
        ? { status: 200, body: scoreBody }
        : { status: 422, body: { detail: "degenerate reference: zero brightness" } },
    );
    controller.state = { ...setMode(controller.state, "reference"), referenceImage: "cmVm" };
    await controller.runEnhance();
    expect(controller.state.lastError).toMatch(/degenerate reference/);
    expect(controller.state.lastResponse).toBeNull();
    expect(controller.state.inFlight).toBe(false);
  });

  it("ignores a second submission while one is in flight", async () => {
    let release: (v: { status: number; body: unknown }) => void = () => {};
    const pending = new Promise<{ status: number; body: unknown }>((resolve) => {
      release = resolve;
    });
    const calls: { path: string }[] = [];
    const transport: Transport = async (_method, path) => {
      calls.push({ path });
      if (path === "/api/score") return { status: 200, body: scoreBody };
      return pending;
    };
    const controller = new SessionController(new ApiClient(transport));
    await controller.uploadInput("low.png", "image/png", "aW1n");

    const first = controller.runEnhance();
    const second = controller.runEnhance(); // guarded: no extra POST
    release({ status: 200, body: fixedResponse() });
    await Promise.all([first, second]);
    expect(calls.filter((c) => c.path === "/api/enhance")).toHaveLength(1);
  });
});

describe("history", () => {
  it("keeps the last 8 results, oldest evicted, click restores params", async () => {
    const { controller } = await uploadedController();
    for (let i = 0; i < 10; i++) {
      controller.state = setIterations(setMode(controller.state, "iterations"), i + 1);
      await controller.runEnhance();
    }
    expect(controller.history.length).toBe(8);
    // oldest two (iterations 1 and 2) evicted
    expect(controller.history.get(0)?.params.iterations).toBe(3);

    controller.state = setIterations(controller.state, 20);
    controller.restoreFromHistory(0);
    expect(controller.state.iterations).toBe(3);
    expect(controller.state.mode).toBe("iterations");
  });
});
