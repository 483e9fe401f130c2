// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import type { RadarPayload, ScoresPayload, TrendPayload } from "../src/api.js";
import { initialState, openEditor } from "../src/state.js";
import { renderComparison, renderEditor, renderTeamView } from "../src/views.js";

const RADAR: RadarPayload = {
  sprint: "Sprint 03",
  categories: ["Backlog Maintenance", "XP Practices", "Developer Productivity"],
  teams: [
    { team: "blue", scores: [100, 100, 100] },
    { team: "red", scores: [57.14, 100, 100] },
  ],
};

const SCORES: ScoresPayload = {
  team: "red",
  sprint: "Sprint 03",
  overall: 84.21,
  categories: [
    { name: "Backlog Maintenance", score: 57.14 },
    { name: "XP Practices", score: 100 },
    { name: "Developer Productivity", score: 100 },
  ],
  metrics: [
    {
      id: "monster-stories",
      name: "Monster Stories",
      category: "Backlog Maintenance",
      severity: "Medium",
      status: "scored",
      score: 100,
      violation_count: 0,
      revision: 1,
      detail: "",
    },
    {
      id: "neverending-story",
      name: "The Neverending Story",
      category: "Backlog Maintenance",
      severity: "High",
      status: "scored",
      score: 0,
      violation_count: 3,
      revision: 1,
      detail: "",
    },
    {
      id: "lottie-and-lisa",
      name: "Lottie and Lisa",
      category: "Backlog Maintenance",
      severity: "Medium",
      status: "scored",
      score: 89.47,
      violation_count: 1,
      revision: 1,
      detail: "",
    },
  ],
};

const TREND: TrendPayload = {
  team: "red",
  target: "overall",
  points: [
    { sprint: "Sprint 01", ordinal: 1, score: 100 },
    { sprint: "Sprint 02", ordinal: 2, score: null },
    { sprint: "Sprint 03", ordinal: 3, score: 84.21 },
  ],
};

const CATEGORY_ORDER = ["Backlog Maintenance", "XP Practices", "Developer Productivity"];

describe("renderComparison", () => {
  it("draws one polygon per team with axes in category order", () => {
    const view = renderComparison(RADAR);
    expect(view.querySelectorAll(".radar-polygon")).toHaveLength(2);
    const labels = [...view.querySelectorAll(".radar-axis-label")].map((n) => n.textContent);
    expect(labels).toEqual(RADAR.categories);
  });

  it("axis click navigates to the category", () => {
    let clicked: string | null = null;
    const view = renderComparison(RADAR, { onCategoryClick: (c) => (clicked = c) });
    (view.querySelector('[data-category="XP Practices"]') as SVGElement).dispatchEvent(
      new Event("click"),
    );
    expect(clicked).toBe("XP Practices");
  });

  it("hides the legend for a single team", () => {
    const view = renderComparison({ ...RADAR, teams: [RADAR.teams[0]!] });
    expect(view.querySelector(".radar-legend")!.classList.contains("hidden")).toBe(true);
  });

  it("renders an empty state without teams", () => {
    const view = renderComparison({ sprint: "s", categories: [], teams: [] });
    expect(view.querySelector(".empty-state")).not.toBeNull();
  });
});

describe("renderTeamView", () => {
  it("lists metrics ascending by score within the category", () => {
    const view = renderTeamView(SCORES, TREND, CATEGORY_ORDER, null, null);
    const scores = [...view.querySelectorAll(".metric-row .metric-score")].map(
      (n) => n.textContent,
    );
    expect(scores).toEqual(["0.00", "89.47", "100.00"]);
  });

  it("renders every displayed score with two decimals from the API value", () => {
    const view = renderTeamView(SCORES, TREND, CATEGORY_ORDER, null, null);
    expect(view.querySelector(".overall-score")!.textContent).toBe("overall 84.21");
    expect(view.querySelector(".category-score")!.textContent).toContain("57.14");
  });

  it("draws the trend with a gap marker for the inapplicable sprint", () => {
    const view = renderTeamView(SCORES, TREND, CATEGORY_ORDER, null, null);
    expect(view.querySelectorAll(".trend-dot")).toHaveLength(2);
    expect(view.querySelectorAll(".trend-gap")).toHaveLength(1);
  });

  it("expanded metric shows violation rows with outbound links", () => {
    const violations = [
      {
        kind: "Issue",
        ref: "https://git.example.com/acme/project/issues/31",
        columns: { Issues: "https://git.example.com/acme/project/issues/31", InSprints: 3, Sprints: ["Sprint 01", "Sprint 02", "Sprint 03"] },
      },
    ];
    const view = renderTeamView(SCORES, TREND, CATEGORY_ORDER, "neverending-story", violations);
    const link = view.querySelector(".violation-table a") as HTMLAnchorElement;
    expect(link.getAttribute("href")).toBe("https://git.example.com/acme/project/issues/31");
    const headers = [...view.querySelectorAll(".violation-table th")].map((n) => n.textContent);
    expect(headers).toEqual(["artifact", "Issues", "InSprints", "Sprints"]);
  });
});

describe("renderEditor", () => {
  const METRIC = {
    id: "neverending-story",
    name: "The Neverending Story",
    category: "Backlog Maintenance",
    severity: "High" as const,
    data_source: "tracker",
    description: "",
    kind: "query" as const,
    query: "MATCH (i:Issue) RETURN i AS Issues",
    context_queries: {},
    params: { threshold: 2 },
    rating: "max(0, 100 - violations)",
    aliases: {},
    revision: 1,
  };

  it("shows fields from the draft", () => {
    const state = openEditor(initialState(), METRIC);
    const view = renderEditor(state.editor!, METRIC);
    expect((view.querySelector(".editor-rating") as HTMLInputElement).value).toBe(METRIC.rating);
    expect((view.querySelector('[data-param="threshold"]') as HTMLInputElement).value).toBe("2");
  });

  it("renders validation errors inline with offsets and keeps the draft", () => {
    const state = openEditor(initialState(), METRIC);
    const draft = {
      ...state.editor!,
      errors: [{ metric: METRIC.id, field: "rating", reason: "expected )", offset: 15 }],
    };
    const view = renderEditor(draft, METRIC);
    const error = view.querySelector(".editor-errors li")!;
    expect(error.textContent).toContain("offset 15");
    expect((view.querySelector(".editor-rating") as HTMLInputElement).value).toBe(METRIC.rating);
  });

  it("offers reload-and-merge on a stale conflict", () => {
    const state = openEditor(initialState(), METRIC);
    let reloaded = false;
    const view = renderEditor({ ...state.editor!, staleRevision: 3 }, METRIC, {
      onReload: () => (reloaded = true),
    });
    (view.querySelector(".editor-reload") as HTMLButtonElement).click();
    expect(reloaded).toBe(true);
    expect(view.querySelector(".editor-stale")!.textContent).toContain("revision 3");
  });
});
