/** Number and label formatting shared by tables and charts. */

/** Render a 0..1 proportion as a percent label, e.g. 0.3333 -> "33.3%". */
export function formatPercent(proportion: number): string {
  return `${(proportion * 100).toFixed(1)}%`;
}

/** Parse a formatPercent label back to a 0..1 proportion (used by tests). */
export function parsePercent(label: string): number {
  return Number.parseFloat(label.replace("%", "")) / 100;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Stable display order: largest share first, ties alphabetical. */
export function sortedEntries(
  proportions: Record<string, number>,
): Array<[string, number]> {
  return Object.entries(proportions).sort(
    (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
  );
}
