/** DOM construction for the three views. All score text goes through
 * formatScore, so rendered numbers are the API's to two decimals. */

import type {
  MetricDef,
  MetricScore,
  RadarPayload,
  ScoresPayload,
  TrendPayload,
  ViolationRow,
} from "./api.js";
import { lineGeometry, radarGeometry, teamColor } from "./charts.js";
import { formatScore, renderColumnValue, sortMetricsAscending } from "./format.js";
import type { EditorDraft } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}, text?: string): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export interface ComparisonHandlers {
  onCategoryClick?: (category: string) => void;
  onTeamClick?: (team: string) => void;
}

/** Radar comparing every team by category scores for one sprint. */
export function renderComparison(payload: RadarPayload, handlers: ComparisonHandlers = {}): HTMLElement {
  const root = el("section", { class: "comparison-view" });
  if (!payload.teams.length || !payload.categories.length) {
    root.append(el("p", { class: "empty-state" }, "No scores yet — ingest data and evaluate first."));
    return root;
  }
  const geometry = radarGeometry(payload.categories, payload.teams);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${geometry.size} ${geometry.size}`,
    class: "radar-chart",
    role: "img",
  });
  for (const ring of geometry.rings) {
    svg.append(svgEl("polygon", { points: ring, class: "radar-ring" }));
  }
  for (const axis of geometry.axes) {
    svg.append(
      svgEl("line", {
        x1: String(geometry.center),
        y1: String(geometry.center),
        x2: String(axis.x2),
        y2: String(axis.y2),
        class: "radar-axis",
      }),
    );
    const label = svgEl(
      "text",
      {
        x: String(axis.labelX),
        y: String(axis.labelY),
        class: "radar-axis-label",
        "data-category": axis.label,
        "text-anchor": "middle",
      },
      axis.label,
    );
    label.addEventListener("click", () => handlers.onCategoryClick?.(axis.label));
    svg.append(label);
  }
  geometry.polygons.forEach((polygon, index) => {
    svg.append(
      svgEl("polygon", {
        points: polygon.points,
        class: "radar-polygon",
        "data-team": polygon.team,
        style: `stroke:${teamColor(index)};fill:${teamColor(index)}33`,
      }),
    );
  });
  root.append(svg);

  const legend = el("ul", { class: `radar-legend${payload.teams.length < 2 ? " hidden" : ""}` });
  payload.teams.forEach(({ team }, index) => {
    const item = el(
      "li",
      { class: "legend-entry", "data-team": team },
      el("span", { class: "swatch", style: `background:${teamColor(index)}` }),
      `team ${team}`,
    );
    item.addEventListener("click", () => handlers.onTeamClick?.(team));
    legend.append(item);
  });
  root.append(legend);
  return root;
}

export interface TeamViewHandlers {
  onToggleMetric?: (metricId: string) => void;
  onEditMetric?: (metricId: string) => void;
}

/** Line chart of the overall score plus the category/metric drill-down. */
export function renderTeamView(
  scores: ScoresPayload,
  trend: TrendPayload,
  categoryOrder: readonly string[],
  expandedMetric: string | null,
  violations: ViolationRow[] | null,
  handlers: TeamViewHandlers = {},
): HTMLElement {
  const root = el("section", { class: "team-view" });
  root.append(
    el(
      "header",
      { class: "team-header" },
      el("h2", {}, `team ${scores.team} — ${scores.sprint}`),
      el("p", { class: "overall-score" }, `overall ${formatScore(scores.overall)}`),
    ),
  );

  const geometry = lineGeometry(trend.points);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${geometry.width} ${geometry.height}`,
    class: "trend-chart",
    role: "img",
  });
  for (const fraction of [0, 0.5, 1]) {
    const y = 10 + (geometry.height - 32) * (1 - fraction);
    svg.append(
      svgEl("line", { x1: "34", y1: String(y), x2: String(geometry.width - 12), y2: String(y), class: "trend-grid" }),
      svgEl("text", { x: "4", y: String(y + 4), class: "trend-grid-label" }, String(fraction * 100)),
    );
  }
  for (const segment of geometry.segments) {
    svg.append(svgEl("path", { d: segment, class: "trend-line" }));
  }
  for (const dot of geometry.dots) {
    svg.append(
      svgEl("circle", {
        cx: String(dot.x),
        cy: String(dot.y),
        r: "4",
        class: "trend-dot",
        "data-score": formatScore(dot.score),
      }),
    );
  }
  for (const gap of geometry.gaps) {
    svg.append(
      svgEl("text", { x: String(gap.x), y: String(geometry.height - 36), class: "trend-gap", "text-anchor": "middle" }, "×"),
    );
  }
  for (const tick of geometry.ticks) {
    svg.append(
      svgEl("text", { x: String(tick.x), y: String(geometry.height - 6), class: "trend-tick", "text-anchor": "middle" }, tick.label),
    );
  }
  root.append(svg);

  const byCategory = new Map<string, MetricScore[]>();
  for (const metric of scores.metrics) {
    const bucket = byCategory.get(metric.category) ?? [];
    bucket.push(metric);
    byCategory.set(metric.category, bucket);
  }
  const categoryScore = new Map(scores.categories.map((entry) => [entry.name, entry.score]));
  for (const category of categoryOrder) {
    const bucket = byCategory.get(category);
    if (!bucket) continue;
    const section = el("section", { class: "category-block", "data-category": category });
    section.append(
      el(
        "h3",
        {},
        category,
        el("span", { class: "category-score" }, ` ${formatScore(categoryScore.get(category) ?? null)}`),
      ),
    );
    const list = el("ul", { class: "metric-list" });
    for (const metric of sortMetricsAscending(bucket)) {
      const row = el(
        "li",
        { class: "metric-row", "data-metric": metric.id },
        el("span", { class: "metric-score", "data-score": formatScore(metric.score) }, formatScore(metric.score)),
        el("span", { class: "metric-name" }, metric.name),
        el("span", { class: `severity severity-${metric.severity.toLowerCase()}` }, metric.severity),
        el("span", { class: "violation-count" }, `${metric.violation_count} violations`),
      );
      const editButton = el("button", { class: "edit-metric", type: "button" }, "edit");
      editButton.addEventListener("click", (event) => {
        event.stopPropagation();
        handlers.onEditMetric?.(metric.id);
      });
      row.append(editButton);
      if (metric.status !== "scored") {
        row.append(el("span", { class: "metric-status" }, metric.status));
      }
      row.addEventListener("click", () => handlers.onToggleMetric?.(metric.id));
      list.append(row);
      if (expandedMetric === metric.id) {
        list.append(renderViolationDetail(metric, violations ?? []));
      }
    }
    section.append(list);
    root.append(section);
  }
  return root;
}

function renderViolationDetail(metric: MetricScore, violations: ViolationRow[]): HTMLElement {
  const detail = el("li", { class: "violation-detail", "data-metric-detail": metric.id });
  if (!violations.length) {
    detail.append(el("p", { class: "no-violations" }, "No violations."));
    return detail;
  }
  const columns = Object.keys(violations[0]?.columns ?? {});
  const table = el("table", { class: "violation-table" });
  const head = el("tr", {}, el("th", {}, "artifact"));
  for (const column of columns) {
    head.append(el("th", {}, column));
  }
  table.append(head);
  for (const violation of violations) {
    const row = el("tr", {});
    const link = el("a", { href: violation.ref, target: "_blank", rel: "noopener" }, violation.ref);
    row.append(el("td", {}, link));
    for (const column of columns) {
      row.append(el("td", {}, renderColumnValue(violation.columns[column])));
    }
    table.append(row);
  }
  detail.append(table);
  return detail;
}

export interface EditorHandlers {
  onField?: (field: "severity" | "query" | "rating", value: string) => void;
  onParam?: (name: string, value: number) => void;
  onSave?: () => void;
  onCancel?: () => void;
  onReload?: () => void;
}

/** The metric editor panel; validation errors render inline with their
 * parse offsets, a stale conflict offers reload-and-merge. */
export function renderEditor(draft: EditorDraft, metric: MetricDef, handlers: EditorHandlers = {}): HTMLElement {
  const root = el("section", { class: "editor-panel", "data-editor": draft.metricId });
  root.append(el("h3", {}, `edit ${metric.name} (revision ${draft.baseRevision})`));

  const severity = el("select", { class: "editor-severity" });
  for (const level of ["Low", "Medium", "High"]) {
    const option = el("option", { value: level }, level);
    if (level === draft.fields.severity) option.setAttribute("selected", "selected");
    severity.append(option);
  }
  severity.addEventListener("change", () => handlers.onField?.("severity", severity.value));
  root.append(el("label", {}, "severity ", severity));

  const params = el("div", { class: "editor-params" });
  for (const [name, value] of Object.entries(draft.fields.params)) {
    const input = el("input", {
      type: "number",
      step: "any",
      value: String(value),
      "data-param": name,
    });
    input.addEventListener("change", () => handlers.onParam?.(name, Number(input.value)));
    params.append(el("label", {}, `${name} `, input));
  }
  root.append(params);

  const query = el("textarea", { class: "editor-query", rows: "7" }, draft.fields.query);
  query.addEventListener("change", () => handlers.onField?.("query", query.value));
  root.append(el("label", {}, metric.kind === "native" ? "detector " : "query ", query));

  const rating = el("input", { class: "editor-rating", value: draft.fields.rating });
  rating.addEventListener("change", () => handlers.onField?.("rating", rating.value));
  root.append(el("label", {}, "rating ", rating));

  if (draft.errors) {
    const list = el("ul", { class: "editor-errors" });
    for (const error of draft.errors) {
      const offset = error.offset !== undefined ? ` (offset ${error.offset})` : "";
      list.append(el("li", { "data-field": error.field }, `${error.field}: ${error.reason}${offset}`));
    }
    root.append(list);
  }
  if (draft.staleRevision !== null) {
    const reload = el("button", { class: "editor-reload", type: "button" }, "reload and merge");
    reload.addEventListener("click", () => handlers.onReload?.());
    root.append(
      el(
        "p",
        { class: "editor-stale" },
        `someone saved revision ${draft.staleRevision} while you edited — `,
        reload,
      ),
    );
  }

  const save = el("button", { class: "editor-save", type: "button" }, draft.saving ? "saving…" : "save");
  if (draft.saving) save.setAttribute("disabled", "disabled");
  save.addEventListener("click", () => handlers.onSave?.());
  const cancel = el("button", { class: "editor-cancel", type: "button" }, "cancel");
  cancel.addEventListener("click", () => handlers.onCancel?.());
  root.append(el("div", { class: "editor-actions" }, save, cancel));
  return root;
}
