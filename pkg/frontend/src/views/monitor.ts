/** Multi-site monitor: pick a site, see its dashboard. */

import { ApiClient } from "../api";
import { ReportView } from "./report";

export class MonitorView {
  private readonly container: HTMLElement;
  private readonly client: ApiClient;
  private report: ReportView | null = null;
  /** Resolves when the site list load settles; tests await this. */
  ready: Promise<void>;

  constructor(container: HTMLElement, client: ApiClient) {
    this.container = container;
    this.client = client;
    this.ready = this.init();
  }

  private async init(): Promise<void> {
    this.container.innerHTML = `
      <section class="monitor">
        <h2>Monitored sites</h2>
        <div id="monitor-status" class="status" hidden></div>
        <div id="monitor-picker"></div>
        <div id="monitor-report"></div>
      </section>`;
    const status = this.container.querySelector<HTMLElement>("#monitor-status")!;
    const picker = this.container.querySelector<HTMLElement>("#monitor-picker")!;
    try {
      const { sites } = await this.client.sites();
      if (sites.length === 0) {
        status.hidden = false;
        status.innerHTML = `<p class="empty" id="monitor-onboarding">No sites
          yet. Ingest an archive or annotate articles with a site id to start
          monitoring.</p>`;
        return;
      }
      const select = document.createElement("select");
      select.id = "site-select";
      for (const site of sites) {
        const option = document.createElement("option");
        option.value = site;
        option.textContent = site;
        select.appendChild(option);
      }
      select.addEventListener("change", () => this.showSite(select.value));
      picker.appendChild(select);
      this.showSite(sites[0]);
    } catch (error) {
      status.hidden = false;
      status.innerHTML = `<p class="error">Could not load the site list:
        ${String(error)}</p>
        <button type="button" id="monitor-retry">Retry</button>`;
      status
        .querySelector<HTMLButtonElement>("#monitor-retry")!
        .addEventListener("click", () => {
          this.ready = this.init();
        });
    }
  }

  private showSite(site: string): void {
    this.report?.destroy();
    const mount = this.container.querySelector<HTMLElement>("#monitor-report")!;
    this.report = new ReportView(mount, this.client, { kind: "site", site });
  }

  /** The report view of the currently selected site, if any. */
  get current(): ReportView | null {
    return this.report;
  }

  destroy(): void {
    this.report?.destroy();
    this.report = null;
  }
}
