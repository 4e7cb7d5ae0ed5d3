/** Hand-rolled SVG pie charts driven directly by API proportion maps. */

import { formatPercent, sortedEntries } from "./format";

const SVG_NS = "http://www.w3.org/2000/svg";

const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
  "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

function slicePath(
  cx: number,
  cy: number,
  r: number,
  start: number,
  end: number,
): string {
  const [x0, y0] = polar(cx, cy, r, start);
  const [x1, y1] = polar(cx, cy, r, end);
  const largeArc = end - start > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${x0} ${y0} A ${r} ${r} 0 ${largeArc} 1 ${x1} ${y1} Z`;
}

/**
 * Build a pie chart with legend for a proportion map. Every slice carries
 * data-label / data-share attributes so the rendering stays checkable
 * against the API payload it came from.
 */
export function pieChart(
  title: string,
  proportions: Record<string, number>,
  size = 160,
): HTMLElement {
  const wrapper = document.createElement("figure");
  wrapper.className = "pie";
  const caption = document.createElement("figcaption");
  caption.textContent = title;
  wrapper.appendChild(caption);

  const entries = sortedEntries(proportions).filter(([, share]) => share > 0);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", title);

  const cx = size / 2;
  const cy = size / 2;
  const r = size / 2 - 4;
  let angle = 0;
  entries.forEach(([label, share], index) => {
    const sweep = share * 2 * Math.PI;
    let shape: SVGElement;
    if (sweep >= 2 * Math.PI - 1e-9) {
      // A full-turn arc collapses to nothing; a 100% share is a circle.
      shape = document.createElementNS(SVG_NS, "circle");
      shape.setAttribute("cx", String(cx));
      shape.setAttribute("cy", String(cy));
      shape.setAttribute("r", String(r));
    } else {
      shape = document.createElementNS(SVG_NS, "path");
      shape.setAttribute("d", slicePath(cx, cy, r, angle, angle + sweep));
    }
    shape.setAttribute("fill", PALETTE[index % PALETTE.length]);
    shape.setAttribute("data-label", label);
    shape.setAttribute("data-share", String(share));
    shape.classList.add("pie-slice");
    svg.appendChild(shape);
    angle += sweep;
  });
  wrapper.appendChild(svg);

  const legend = document.createElement("ul");
  legend.className = "pie-legend";
  entries.forEach(([label, share], index) => {
    const item = document.createElement("li");
    item.dataset.label = label;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = PALETTE[index % PALETTE.length];
    item.appendChild(swatch);
    item.appendChild(
      document.createTextNode(` ${label} ${formatPercent(share)}`),
    );
    legend.appendChild(item);
  });
  wrapper.appendChild(legend);
  return wrapper;
}

/** Pie over a single yes-share, e.g. titled vs untitled speakers. */
export function binaryPie(
  title: string,
  yesLabel: string,
  noLabel: string,
  yesShare: number,
  size = 160,
): HTMLElement {
  return pieChart(
    title,
    { [yesLabel]: yesShare, [noLabel]: 1 - yesShare },
    size,
  );
}
