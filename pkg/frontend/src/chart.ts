/** Dev-F1-per-round chart rendered as a plain SVG polyline. */

export interface ChartPoint {
  round: number;
  devF1: number;
}

export interface ChartGeometry {
  /** "x,y x,y ..." polyline attribute; empty for no points. */
  polyline: string;
  points: { x: number; y: number; round: number; devF1: number }[];
}

/**
 * Map (round, dev F1) history onto an SVG viewport. Rounds must be strictly
 * increasing; F1 is plotted on a fixed [0, 1] axis so rounds are comparable.
 */
export function chartGeometry(
  history: ChartPoint[],
  width: number,
  height: number,
  margin = 10,
): ChartGeometry {
  for (let i = 1; i < history.length; i++) {
    if (history[i].round <= history[i - 1].round) {
      throw new Error("chart points must be monotone in round index");
    }
  }
  if (history.length === 0) return { polyline: "", points: [] };
  const innerW = width - 2 * margin;
  const innerH = height - 2 * margin;
  const minRound = history[0].round;
  const span = Math.max(1, history[history.length - 1].round - minRound);
  const points = history.map((p) => ({
    x: margin + ((p.round - minRound) / span) * innerW,
    y: margin + (1 - clamp01(p.devF1)) * innerH,
    round: p.round,
    devF1: p.devF1,
  }));
  return {
    polyline: points.map((p) => `${round2(p.x)},${round2(p.y)}`).join(" "),
    points,
  };
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
