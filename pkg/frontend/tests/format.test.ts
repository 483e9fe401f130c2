import { describe, expect, it } from "vitest";

import { formatScore, renderColumnValue, sortMetricsAscending } from "../src/format.js";

describe("formatScore", () => {
  it("renders two decimals", () => {
    expect(formatScore(100)).toBe("100.00");
    expect(formatScore(87.5)).toBe("87.50");
    expect(formatScore(57.142857142857146)).toBe("57.14");
    expect(formatScore(0)).toBe("0.00");
  });

  it("renders n/a for missing scores", () => {
    expect(formatScore(null)).toBe("n/a");
  });
});

describe("sortMetricsAscending", () => {
  it("puts the worst score first", () => {
    const rows = [
      { id: "b", score: 100 },
      { id: "a", score: 70 },
      { id: "c", score: 85 },
    ];
    expect(sortMetricsAscending(rows).map((r) => r.score)).toEqual([70, 85, 100]);
  });

  it("sinks unscored rows and breaks ties by id", () => {
    const rows = [
      { id: "b", score: null },
      { id: "c", score: 50 },
      { id: "a", score: 50 },
    ];
    expect(sortMetricsAscending(rows).map((r) => r.id)).toEqual(["a", "c", "b"]);
  });

  it("does not mutate its input", () => {
    const rows = [
      { id: "x", score: 2 },
      { id: "y", score: 1 },
    ];
    sortMetricsAscending(rows);
    expect(rows[0]!.id).toBe("x");
  });
});

describe("renderColumnValue", () => {
  it("joins lists and renders numbers compactly", () => {
    expect(renderColumnValue(["Sprint 01", "Sprint 02"])).toBe("Sprint 01, Sprint 02");
    expect(renderColumnValue(3)).toBe("3");
    expect(renderColumnValue(0.75)).toBe("0.75");
    expect(renderColumnValue(null)).toBe("—");
  });
});
