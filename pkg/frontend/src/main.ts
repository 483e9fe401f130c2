/** Bootstrap and wiring: fetch, render, handle navigation and the
 * edit-save-re-evaluate loop. */

import { ApiClient, type MetricDef, type SprintInfo, type TeamInfo } from "./api.js";
import {
  applyStaleConflict,
  applyValidationErrors,
  closeEditor,
  editField,
  editParam,
  initialState,
  markSaving,
  openComparison,
  openEditor,
  openTeam,
  rebaseDraft,
  selectSprint,
  toggleMetric,
  type ViewState,
} from "./state.js";
import { renderComparison, renderEditor, renderTeamView } from "./views.js";

const api = new ApiClient();

let state: ViewState = initialState();
let teams: TeamInfo[] = [];
let sprints: SprintInfo[] = [];
let categoryOrder: string[] = [];
let metricDefs = new Map<string, MetricDef>();

async function loadCatalog(): Promise<void> {
  const listing = await api.metrics();
  categoryOrder = listing.category_order;
  metricDefs = new Map(listing.metrics.map((metric) => [metric.id, metric]));
}

function setState(next: ViewState): void {
  state = next;
  void render();
}

function renderChrome(root: HTMLElement): void {
  const nav = document.createElement("nav");
  nav.className = "top-nav";

  const home = document.createElement("button");
  home.textContent = "team comparison";
  home.className = "nav-home";
  home.addEventListener("click", () => setState(openComparison(state)));
  nav.append(home);

  const sprintSelect = document.createElement("select");
  sprintSelect.className = "sprint-select";
  for (const sprint of sprints) {
    const option = document.createElement("option");
    option.value = sprint.title;
    option.textContent = sprint.title;
    if (sprint.title === state.sprint) option.selected = true;
    sprintSelect.append(option);
  }
  sprintSelect.addEventListener("change", () => setState(selectSprint(state, sprintSelect.value)));
  nav.append(sprintSelect);

  for (const team of teams) {
    const button = document.createElement("button");
    button.textContent = `team ${team.name}`;
    button.className = state.team === team.name && state.view === "team" ? "nav-team active" : "nav-team";
    button.addEventListener("click", () => setState(openTeam(state, team.name)));
    nav.append(button);
  }
  root.append(nav);
}

async function render(): Promise<void> {
  const root = document.getElementById("app");
  if (!root || !state.sprint) return;
  root.replaceChildren();
  renderChrome(root);

  if (state.view === "comparison") {
    const radar = await api.radar(state.sprint);
    root.append(
      renderComparison(radar, {
        onTeamClick: (team) => setState(openTeam(state, team)),
        onCategoryClick: (category) => {
          const first = teams[0];
          if (first) setState(openTeam(state, state.team ?? first.name, category));
        },
      }),
    );
    return;
  }

  if (!state.team) return;
  const [scores, trend] = await Promise.all([
    api.scores(state.team, state.sprint),
    api.trend(state.team),
  ]);
  const violations = state.expandedMetric
    ? (await api.violations(state.expandedMetric, state.team, state.sprint)).violations
    : null;
  const view = renderTeamView(scores, trend, categoryOrder, state.expandedMetric, violations, {
    onToggleMetric: (metricId) => setState(toggleMetric(state, metricId)),
    onEditMetric: (metricId) => {
      const def = metricDefs.get(metricId);
      if (def) setState(openEditor(state, def));
    },
  });
  root.append(view);
  if (state.focusCategory) {
    view.querySelector(`[data-category="${state.focusCategory}"]`)?.scrollIntoView();
  }

  if (state.editor) {
    const def = metricDefs.get(state.editor.metricId);
    if (def) {
      root.append(
        renderEditor(state.editor, def, {
          onField: (field, value) => setState(editField(state, field, value)),
          onParam: (name, value) => setState(editParam(state, name, value)),
          onCancel: () => setState(closeEditor(state)),
          onReload: async () => {
            await loadCatalog();
            const fresh = metricDefs.get(state.editor!.metricId);
            if (fresh) setState(rebaseDraft(state, fresh));
          },
          onSave: () => void saveDraft(),
        }),
      );
    }
  }
}

/** Save the draft; on success re-evaluate and refresh — the lifecycle
 * loop. 422 pins errors to the draft, 409 offers reload-and-merge. */
async function saveDraft(): Promise<void> {
  const draft = state.editor;
  if (!draft) return;
  setState(markSaving(state));
  const result = await api.putMetric(draft.metricId, draft.baseRevision, {
    severity: draft.fields.severity as MetricDef["severity"],
    query: draft.fields.query,
    rating: draft.fields.rating,
    params: draft.fields.params,
  });
  if (result.kind === "invalid") {
    setState(applyValidationErrors(state, result.errors));
    return;
  }
  if (result.kind === "stale") {
    setState(applyStaleConflict(state, result.currentRevision));
    return;
  }
  metricDefs.set(result.metric.id, result.metric);
  await api.evaluate();
  setState(closeEditor(state));
}

async function bootstrap(): Promise<void> {
  [teams, sprints] = await Promise.all([api.teams(), api.sprints()]);
  await loadCatalog();
  const latest = sprints[sprints.length - 1];
  if (latest) {
    state = selectSprint(state, latest.title);
  }
  await render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootstrap();
}

export { bootstrap, render, saveDraft };
