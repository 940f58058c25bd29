/** All figure styling lives here; figure code never hard-codes style. */

export const WIDTH = 640;
export const HEIGHT = 420;

export const MARGIN = { top: 40, right: 24, bottom: 52, left: 64 };

export const FONT_FAMILY = "Helvetica, Arial, sans-serif";
export const FONT_SIZE = 12;
export const TITLE_SIZE = 14;

export const AXIS_COLOR = "#333333";
export const GRID_COLOR = "#dddddd";
export const GUIDE_COLOR = "#888888";
export const GUIDE_DASH = "6 4";

export const LINE_WIDTH = 1.6;
export const MARKER_RADIUS = 3;

// colorblind-safe series palette keyed by method name, with fallbacks
export const SERIES_COLORS: Record<string, string> = {
  hmc: "#cc79a7",
  rmhmc: "#0072b2",
  lmc: "#e69f00",
  ilmc: "#009e73",
  leapfrog: "#0072b2",
  inverted: "#e69f00",
  difference: "#009e73",
};
export const FALLBACK_COLORS = ["#56b4e9", "#d55e00", "#f0e442", "#999999"];

export const BAR_FILL_OPACITY = 0.85;
export const BOX_FILL_OPACITY = 0.35;

// low-to-high color stops for heatmap cells
export const HEAT_STOPS: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function seriesColor(name: string, index: number): string {
  const fixed = SERIES_COLORS[name];
  if (fixed !== undefined) return fixed;
  return FALLBACK_COLORS[index % FALLBACK_COLORS.length]!;
}

export function heatColor(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (HEAT_STOPS.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, HEAT_STOPS.length - 1);
  const frac = pos - lo;
  const a = HEAT_STOPS[lo]!;
  const b = HEAT_STOPS[hi]!;
  const mix = (i: number) => Math.round(a[i]! + (b[i]! - a[i]!) * frac);
  return `rgb(${mix(0)},${mix(1)},${mix(2)})`;
}
