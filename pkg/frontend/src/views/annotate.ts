/** Draft annotation view: paste text, get the quote table and charts. */

import { ApiClient, ApiError } from "../api";
import { binaryPie, pieChart } from "../charts";
import { escapeHtml, formatPercent } from "../format";
import type { AnnotationPayload, Quote } from "../types";

function speakerCells(quote: Quote): string {
  const speaker = quote.speaker;
  if (speaker === null) {
    return `<td class="unattributed" colspan="5">(unattributed)</td>`;
  }
  return [
    `<td>${escapeHtml(speaker.name)}</td>`,
    `<td>${escapeHtml(speaker.title)}</td>`,
    `<td>${escapeHtml(speaker.organization)}</td>`,
    `<td>${escapeHtml(speaker.gender.label)} ${formatPercent(speaker.gender.confidence)}</td>`,
    `<td>${escapeHtml(speaker.race.label)} ${formatPercent(speaker.race.confidence)}</td>`,
  ].join("");
}

function quoteRow(quote: Quote): string {
  const badges = [
    quote.doubtful ? `<span class="badge doubtful">doubtful</span>` : "",
    quote.long ? `<span class="badge long">long</span>` : "",
  ].join(" ");
  return `<tr class="quote-row${quote.doubtful ? " is-doubtful" : ""}" data-rule="${quote.rule}">
    <td class="quote-text">"${escapeHtml(quote.text)}"</td>
    ${speakerCells(quote)}
    <td class="flags">${badges}</td>
  </tr>`;
}

export class AnnotateView {
  private readonly container: HTMLElement;
  private readonly client: () => ApiClient;

  constructor(container: HTMLElement, client: () => ApiClient) {
    this.container = container;
    this.client = client;
    this.render();
  }

  private render(): void {
    this.container.innerHTML = `
      <section class="annotate">
        <h2>Check a draft</h2>
        <textarea id="draft" rows="12"
          placeholder="Paste the draft article text or HTML here"></textarea>
        <button id="annotate-submit" type="button">Get source diversity</button>
        <div id="annotate-error" class="error" hidden></div>
        <div id="annotate-results"></div>
      </section>`;
    const button = this.container.querySelector<HTMLButtonElement>("#annotate-submit")!;
    button.addEventListener("click", () => void this.submit());
  }

  async submit(): Promise<void> {
    const draft = this.container.querySelector<HTMLTextAreaElement>("#draft")!;
    const errorBox = this.container.querySelector<HTMLElement>("#annotate-error")!;
    const results = this.container.querySelector<HTMLElement>("#annotate-results")!;
    errorBox.hidden = true;
    try {
      // No site field: draft checks must never enter the report store.
      const payload = await this.client().annotate({
        article_id: "draft",
        body: draft.value,
      });
      this.renderResults(results, payload);
    } catch (error) {
      // The draft text stays in the textarea; only the result pane changes.
      results.innerHTML = "";
      errorBox.hidden = false;
      if (error instanceof ApiError && error.status === 401) {
        errorBox.textContent =
          "Not authorized: check the API credential in the connection bar.";
      } else if (error instanceof ApiError) {
        errorBox.textContent = `Server error (${error.status}): ${error.message}`;
      } else {
        errorBox.textContent = `Could not reach the API: ${String(error)}`;
      }
    }
  }

  renderResults(results: HTMLElement, payload: AnnotationPayload): void {
    if (payload.quotes.length === 0) {
      results.innerHTML = `<p class="empty">No quotes of five words or more found.</p>`;
      return;
    }
    results.innerHTML = `
      <table class="quote-table">
        <thead>
          <tr><th>Quote</th><th>Speaker</th><th>Title</th><th>Organization</th>
              <th>Gender</th><th>Race</th><th>Flags</th></tr>
        </thead>
        <tbody>${payload.quotes.map(quoteRow).join("")}</tbody>
      </table>
      <div class="charts" id="annotate-charts"></div>`;
    const charts = results.querySelector<HTMLElement>("#annotate-charts")!;
    charts.appendChild(pieChart("Gender", payload.summary.gender_proportions));
    charts.appendChild(pieChart("Race", payload.summary.race_proportions));
    charts.appendChild(binaryPie("Titled sources", "titled", "untitled",
      payload.summary.titled_proportion));
  }
}
