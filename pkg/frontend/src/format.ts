/** Display formatting. Absent values render as "n/a", never as zero. */

export function fmt(value: number | null | undefined, digits = 3): string {
  if (value === null || value === undefined) {
    return "n/a";
  }
  if (Number.isInteger(value)) {
    return String(value);
  }
  return value.toFixed(digits);
}

export function fmtPercent(value: number | null | undefined): string {
  if (value === null || value === undefined) {
    return "n/a";
  }
  return `${(value * 100).toFixed(1)}%`;
}

/**
 * A span carrying the untouched API value in data-value (contract-testable)
 * and a formatted label as its text.
 */
export function valueSpan(
  doc: Document,
  value: number | null | undefined,
  digits = 3,
): HTMLSpanElement {
  const span = doc.createElement("span");
  span.className = "value";
  span.dataset.value = value === null || value === undefined ? "null" : String(value);
  span.textContent = fmt(value, digits);
  return span;
}

export function shortId(id: string): string {
  return id.slice(0, 8);
}
