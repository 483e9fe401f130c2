/** View state and the editor draft lifecycle.
 *
 * The draft remembers the revision it was loaded from; saving sends
 * that base revision so a concurrent edit surfaces as a stale-revision
 * conflict instead of clobbering. Validation failures keep the draft
 * with its errors attached; nothing the user typed is ever dropped. */

import type { FieldError, MetricDef } from "./api.js";

export interface EditorDraft {
  metricId: string;
  baseRevision: number;
  fields: {
    severity: string;
    query: string;
    rating: string;
    params: Record<string, number>;
  };
  errors: FieldError[] | null;
  staleRevision: number | null;
  saving: boolean;
}

export interface ViewState {
  view: "comparison" | "team";
  sprint: string | null;
  team: string | null;
  focusCategory: string | null;
  expandedMetric: string | null;
  editor: EditorDraft | null;
}

export function initialState(): ViewState {
  return {
    view: "comparison",
    sprint: null,
    team: null,
    focusCategory: null,
    expandedMetric: null,
    editor: null,
  };
}

export function selectSprint(state: ViewState, sprint: string): ViewState {
  return { ...state, sprint, expandedMetric: null };
}

export function openTeam(state: ViewState, team: string, category: string | null = null): ViewState {
  return { ...state, view: "team", team, focusCategory: category, expandedMetric: null };
}

export function openComparison(state: ViewState): ViewState {
  return { ...state, view: "comparison", focusCategory: null, expandedMetric: null };
}

export function toggleMetric(state: ViewState, metricId: string): ViewState {
  return { ...state, expandedMetric: state.expandedMetric === metricId ? null : metricId };
}

export function openEditor(state: ViewState, metric: MetricDef): ViewState {
  return {
    ...state,
    editor: {
      metricId: metric.id,
      baseRevision: metric.revision,
      fields: {
        severity: metric.severity,
        query: metric.query,
        rating: metric.rating,
        params: { ...metric.params },
      },
      errors: null,
      staleRevision: null,
      saving: false,
    },
  };
}

export function closeEditor(state: ViewState): ViewState {
  return { ...state, editor: null };
}

export function editField(
  state: ViewState,
  field: "severity" | "query" | "rating",
  value: string,
): ViewState {
  if (!state.editor) return state;
  return {
    ...state,
    editor: { ...state.editor, fields: { ...state.editor.fields, [field]: value } },
  };
}

export function editParam(state: ViewState, name: string, value: number): ViewState {
  if (!state.editor) return state;
  return {
    ...state,
    editor: {
      ...state.editor,
      fields: {
        ...state.editor.fields,
        params: { ...state.editor.fields.params, [name]: value },
      },
    },
  };
}

export function markSaving(state: ViewState): ViewState {
  if (!state.editor) return state;
  return { ...state, editor: { ...state.editor, saving: true, errors: null, staleRevision: null } };
}

/** A 422 keeps the draft and pins the errors to it. */
export function applyValidationErrors(state: ViewState, errors: FieldError[]): ViewState {
  if (!state.editor) return state;
  return { ...state, editor: { ...state.editor, errors, saving: false } };
}

/** A 409 keeps the draft and records the revision to reload against. */
export function applyStaleConflict(state: ViewState, currentRevision: number): ViewState {
  if (!state.editor) return state;
  return { ...state, editor: { ...state.editor, staleRevision: currentRevision, saving: false } };
}

/** After a reload-and-merge the draft keeps the user's field values but
 * rebases onto the current revision. */
export function rebaseDraft(state: ViewState, metric: MetricDef): ViewState {
  if (!state.editor) return state;
  return {
    ...state,
    editor: {
      ...state.editor,
      baseRevision: metric.revision,
      staleRevision: null,
      saving: false,
    },
  };
}
