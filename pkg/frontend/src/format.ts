/** Display formatting. Scores render with exactly two decimals so what
 * the user reads matches the API value to the cent. */

export function formatScore(score: number | null): string {
  if (score === null || Number.isNaN(score)) {
    return "n/a";
  }
  return score.toFixed(2);
}

/** Ascending by score, the worst first; unscored entries sink to the
 * bottom; ties break on id for a stable listing. */
export function sortMetricsAscending<T extends { score: number | null; id: string }>(
  rows: readonly T[],
): T[] {
  return [...rows].sort((a, b) => {
    if (a.score === null && b.score === null) return a.id < b.id ? -1 : 1;
    if (a.score === null) return 1;
    if (b.score === null) return -1;
    if (a.score !== b.score) return a.score - b.score;
    return a.id < b.id ? -1 : 1;
  });
}

export function severityRank(severity: string): number {
  return { High: 3, Medium: 2, Low: 1 }[severity] ?? 0;
}

export function renderColumnValue(value: unknown): string {
  if (value === null || value === undefined) return "—";
  if (Array.isArray(value)) return value.map(renderColumnValue).join(", ");
  if (typeof value === "number") return Number.isInteger(value) ? String(value) : value.toFixed(2);
  return String(value);
}
