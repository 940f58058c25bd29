export interface Scale {
  (value: number): number;
  ticks: number[];
  domain: [number, number];
}

function makeScale(
  domain: [number, number],
  range: [number, number],
  transform: (v: number) => number,
  ticks: number[],
): Scale {
  const [d0, d1] = [transform(domain[0]), transform(domain[1])];
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) =>
    range[0] + ((transform(value) - d0) / span) * (range[1] - range[0])) as Scale;
  scale.ticks = ticks;
  scale.domain = domain;
  return scale;
}

/** Round tick step to 1/2/5 times a power of ten. */
function niceStep(rawStep: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const residual = rawStep / power;
  if (residual <= 1) return power;
  if (residual <= 2) return 2 * power;
  if (residual <= 5) return 5 * power;
  return 10 * power;
}

export function linearTicks(min: number, max: number, count = 6): number[] {
  if (min === max) return [min];
  const step = niceStep((max - min) / count);
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    // normalize -0 and float drift so labels are stable
    ticks.push(Number(v.toPrecision(12)) + 0);
  }
  return ticks;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale(domain, range, (v) => v, linearTicks(domain[0], domain[1]));
}

export function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (
    let exp = Math.ceil(Math.log10(min) - 1e-9);
    exp <= Math.floor(Math.log10(max) + 1e-9);
    exp += 1
  ) {
    // Math.pow(10, -4) drifts off 1e-4; decimal parsing rounds correctly
    ticks.push(Number(`1e${exp}`));
  }
  return ticks;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error("log scale needs a positive domain");
  }
  return makeScale(domain, range, Math.log10, decadeTicks(domain[0], domain[1]));
}

export function extent(values: number[]): [number, number] {
  if (values.length === 0) throw new Error("extent of empty list");
  let lo = values[0]!;
  let hi = values[0]!;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}
