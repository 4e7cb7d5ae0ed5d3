/** Scope dashboard: proportions, totals, and top sources for a period. */

import { ApiClient, ApiError } from "../api";
import { binaryPie, pieChart } from "../charts";
import { escapeHtml } from "../format";
import type { MonthPeriod, Report, TopEntry } from "../types";

export type ReportScope =
  | { kind: "site"; site: string }
  | { kind: "author"; site: string; author: string };

function scopeLabel(scope: ReportScope): string {
  return scope.kind === "site"
    ? scope.site
    : `${scope.author} @ ${scope.site}`;
}

function topTable(title: string, entries: TopEntry[]): string {
  if (entries.length === 0) {
    return `<div class="top-block"><h4>${title}</h4><p class="empty">none</p></div>`;
  }
  const rows = entries
    .map((entry) =>
      `<tr class="top-row"><td>${escapeHtml(entry.name)}</td><td>${entry.quotes}</td></tr>`)
    .join("");
  return `<div class="top-block"><h4>${title}</h4>
    <table><thead><tr><th>Name</th><th>Quotes</th></tr></thead>
    <tbody>${rows}</tbody></table></div>`;
}

export class ReportView {
  private readonly container: HTMLElement;
  private readonly client: ApiClient;
  private readonly scope: ReportScope;
  private inflight: AbortController | null = null;
  /** Resolves when the most recent load settles; tests await this. */
  ready: Promise<void> = Promise.resolve();

  constructor(container: HTMLElement, client: ApiClient, scope: ReportScope) {
    this.container = container;
    this.client = client;
    this.scope = scope;
    this.render();
    // First load carries no period: the API answers for the most recent
    // populated month, which becomes the selector's initial value.
    this.load();
  }

  private render(): void {
    this.container.innerHTML = `
      <section class="report">
        <h2>Source diversity: <span id="report-scope">${escapeHtml(scopeLabel(this.scope))}</span></h2>
        <div class="period-picker">
          <label>From <input type="month" id="period-from"></label>
          <label>To <input type="month" id="period-to"></label>
        </div>
        <div id="report-status" class="status" hidden></div>
        <div id="report-body"></div>
      </section>`;
    for (const id of ["#period-from", "#period-to"]) {
      this.container
        .querySelector<HTMLInputElement>(id)!
        .addEventListener("change", () => this.reload());
    }
  }

  private reload(): void {
    const from = this.container.querySelector<HTMLInputElement>("#period-from")!.value;
    const to = this.container.querySelector<HTMLInputElement>("#period-to")!.value;
    if (from && to) {
      this.load({ from, to });
    }
  }

  load(period?: MonthPeriod): void {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.ready = this.fetchAndRender(period, controller.signal);
  }

  private async fetchAndRender(
    period: MonthPeriod | undefined,
    signal: AbortSignal,
  ): Promise<void> {
    const status = this.container.querySelector<HTMLElement>("#report-status")!;
    const body = this.container.querySelector<HTMLElement>("#report-body")!;
    try {
      const report = this.scope.kind === "site"
        ? await this.client.siteReport(this.scope.site, period, signal)
        : await this.client.authorReport(
            this.scope.site, this.scope.author, period, signal);
      if (signal.aborted) {
        return;
      }
      status.hidden = true;
      this.setPeriodInputs(report.period);
      this.renderReport(body, report);
    } catch (error) {
      if (signal.aborted) {
        return; // superseded by a newer request or by navigation
      }
      body.innerHTML = "";
      status.hidden = false;
      if (error instanceof ApiError && error.status === 404) {
        status.textContent =
          `No data recorded for ${scopeLabel(this.scope)} yet.`;
      } else if (error instanceof ApiError && error.status === 401) {
        status.textContent =
          "Not authorized: check the API credential in the connection bar.";
      } else {
        status.textContent = `Could not load the report: ${String(error)}`;
      }
    }
  }

  private setPeriodInputs(period: MonthPeriod): void {
    this.container.querySelector<HTMLInputElement>("#period-from")!.value =
      period.from;
    this.container.querySelector<HTMLInputElement>("#period-to")!.value =
      period.to;
  }

  private renderReport(body: HTMLElement, report: Report): void {
    if (report.total_quotes === 0) {
      body.innerHTML = `<p class="empty" id="report-zero">No quotes recorded in
        ${report.period.from === report.period.to
          ? report.period.from
          : `${report.period.from} to ${report.period.to}`}.</p>`;
      return;
    }
    body.innerHTML = `
      <p class="total">Total quotes:
        <strong id="report-total">${report.total_quotes}</strong>
        <span class="period-label" id="report-period">${report.period.from} to ${report.period.to}</span>
      </p>
      <div class="charts" id="report-charts"></div>
      <div class="tops" id="report-tops"></div>`;
    const charts = body.querySelector<HTMLElement>("#report-charts")!;
    charts.appendChild(pieChart("Gender", report.gender_proportions));
    charts.appendChild(pieChart("Race", report.race_proportions));
    charts.appendChild(binaryPie("Titled sources", "titled", "untitled",
      report.titled_proportion));
    body.querySelector<HTMLElement>("#report-tops")!.innerHTML =
      topTable("Top quoted people", report.top_persons) +
      topTable("Top organizations", report.top_organizations);
  }

  /** Cancel any in-flight request; call when navigating away. */
  destroy(): void {
    this.inflight?.abort();
    this.inflight = null;
  }
}
