/** Chart geometry, kept pure so tests can pin it down. Both charts use
 * a fixed 0..100 value scale; only pixel placement happens here, never
 * score math. */

export interface RadarAxis {
  label: string;
  x2: number;
  y2: number;
  labelX: number;
  labelY: number;
}

export interface RadarVertex {
  x: number;
  y: number;
  value: number | null;
}

export interface RadarPolygon {
  team: string;
  points: string;
  vertices: RadarVertex[];
}

export interface RadarGeometry {
  size: number;
  center: number;
  radius: number;
  axes: RadarAxis[];
  rings: string[];
  polygons: RadarPolygon[];
}

function angleOf(index: number, count: number): number {
  return -Math.PI / 2 + (2 * Math.PI * index) / count;
}

function ringPoints(center: number, radius: number, count: number): string {
  const points: string[] = [];
  for (let i = 0; i < count; i += 1) {
    const angle = angleOf(i, count);
    points.push(`${center + radius * Math.cos(angle)},${center + radius * Math.sin(angle)}`);
  }
  return points.join(" ");
}

export function radarGeometry(
  categories: readonly string[],
  teams: readonly { team: string; scores: readonly (number | null)[] }[],
  size = 360,
): RadarGeometry {
  const center = size / 2;
  const radius = size / 2 - 48;
  const count = Math.max(categories.length, 1);
  const axes: RadarAxis[] = categories.map((label, index) => {
    const angle = angleOf(index, count);
    return {
      label,
      x2: center + radius * Math.cos(angle),
      y2: center + radius * Math.sin(angle),
      labelX: center + (radius + 24) * Math.cos(angle),
      labelY: center + (radius + 24) * Math.sin(angle),
    };
  });
  const rings = [0.25, 0.5, 0.75, 1].map((fraction) =>
    ringPoints(center, radius * fraction, count),
  );
  const polygons: RadarPolygon[] = teams.map(({ team, scores }) => {
    const vertices: RadarVertex[] = categories.map((_, index) => {
      const value = scores[index] ?? null;
      const scaled = value === null ? 0 : Math.max(0, Math.min(100, value)) / 100;
      const angle = angleOf(index, count);
      return {
        x: center + radius * scaled * Math.cos(angle),
        y: center + radius * scaled * Math.sin(angle),
        value,
      };
    });
    return {
      team,
      vertices,
      points: vertices.map((v) => `${v.x},${v.y}`).join(" "),
    };
  });
  return { size, center, radius, axes, rings, polygons };
}

export interface LineDot {
  x: number;
  y: number;
  score: number;
  sprint: string;
}

export interface LineGap {
  x: number;
  sprint: string;
}

export interface LineGeometry {
  width: number;
  height: number;
  /** one "M … L …" segment per unbroken run of applicable sprints */
  segments: string[];
  dots: LineDot[];
  gaps: LineGap[];
  ticks: { x: number; label: string }[];
}

export function lineGeometry(
  points: readonly { sprint: string; ordinal: number; score: number | null }[],
  width = 520,
  height = 180,
): LineGeometry {
  const padding = { left: 34, right: 12, top: 10, bottom: 22 };
  const innerWidth = width - padding.left - padding.right;
  const innerHeight = height - padding.top - padding.bottom;
  const count = Math.max(points.length, 1);
  const xOf = (index: number) =>
    padding.left + (count === 1 ? innerWidth / 2 : (innerWidth * index) / (count - 1));
  const yOf = (score: number) => padding.top + innerHeight * (1 - Math.max(0, Math.min(100, score)) / 100);

  const segments: string[] = [];
  const dots: LineDot[] = [];
  const gaps: LineGap[] = [];
  const ticks = points.map((point, index) => ({ x: xOf(index), label: point.sprint }));
  let current: string[] = [];
  points.forEach((point, index) => {
    if (point.score === null) {
      if (current.length > 1) segments.push(`M ${current.join(" L ")}`);
      current = [];
      gaps.push({ x: xOf(index), sprint: point.sprint });
      return;
    }
    const x = xOf(index);
    const y = yOf(point.score);
    dots.push({ x, y, score: point.score, sprint: point.sprint });
    current.push(`${x},${y}`);
  });
  if (current.length > 1) segments.push(`M ${current.join(" L ")}`);
  return { width, height, segments, dots, gaps, ticks };
}

/** Stable team palette: same team, same stroke, across views. */
export function teamColor(index: number): string {
  const palette = ["#c0392b", "#2980b9", "#27ae60", "#d68910", "#8e44ad", "#16a085", "#7f8c8d"];
  return palette[index % palette.length] ?? "#333";
}
