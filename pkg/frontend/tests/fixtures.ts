import type { EnhanceResponse } from "../src/api.js";

export function fixedResponse(iterations = 3): EnhanceResponse {
  return {
    output_image: "b3V0",
    iterations_used: iterations,
    converged: true,
    zfc_trajectory: Array.from({ length: iterations + 1 }, (_, step) => ({
      step,
      zfc: 0.1 + 0.05 * step,
    })),
    input_histogram: [4, 0, 2, 10],
    output_histogram: [0, 4, 2, 10],
  };
}
