import { describe, expect, it } from "vitest";

import { PLACEHOLDER_RATING, chipRating } from "../src/chip.js";

describe("chipRating", () => {
  it("formats the flagship value", () => {
    expect(chipRating(2.6)).toBe("2.6 bits");
  });

  it("formats zero", () => {
    expect(chipRating(0)).toBe("0.0 bits");
  });

  it("keeps the sign of negatives, rounding half away from zero", () => {
    expect(chipRating(-1.160964)).toBe("-1.2 bits");
    expect(chipRating(-0.25)).toBe("-0.3 bits");
    expect(chipRating(0.25)).toBe("0.3 bits");
  });

  it("shows tiny negatives as unsigned zero", () => {
    expect(chipRating(-0.01)).toBe("0.0 bits");
  });

  it("placeholder matches the zero format", () => {
    expect(PLACEHOLDER_RATING).toBe(chipRating(0));
  });
});
