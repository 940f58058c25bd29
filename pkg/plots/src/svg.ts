/** Minimal deterministic SVG assembly: attribute order is insertion order,
 * numbers go through one fixed formatter, nothing depends on time or RNG. */

export function fmt(value: number): string {
  if (!Number.isFinite(value)) throw new Error(`non-finite coordinate: ${value}`);
  if (Number.isInteger(value) && Math.abs(value) < 1e15) return String(value);
  const rendered = value.toPrecision(6);
  // trim trailing zeros without touching exponents
  if (rendered.includes("e")) return rendered;
  return rendered.replace(/\.?0+$/, "");
}

export function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export type Attrs = Record<string, string | number>;

function renderAttrs(attrs: Attrs): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(attrs)) {
    const text = typeof value === "number" ? fmt(value) : value;
    parts.push(` ${key}="${text}"`);
  }
  return parts.join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) return `<${tag}${renderAttrs(attrs)}/>`;
  return `<${tag}${renderAttrs(attrs)}>${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${renderAttrs(attrs)}>${escapeText(content)}</text>`;
}

export function document(width: number, height: number, body: string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">`;
  return open + body.join("") + "</svg>\n";
}
