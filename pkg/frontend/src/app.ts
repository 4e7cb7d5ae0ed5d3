/** Application shell: connection settings, navigation, view lifecycle. */

import { ApiClient } from "./api";
import { AnnotateView } from "./views/annotate";
import { MonitorView } from "./views/monitor";

export interface AppConfig {
  baseUrl?: string;
  token?: string;
}

type ViewName = "annotate" | "monitor";

export class App {
  private readonly container: HTMLElement;
  private activeView: AnnotateView | MonitorView | null = null;
  private activeName: ViewName | null = null;

  constructor(container: HTMLElement, config: AppConfig = {}) {
    this.container = container;
    this.container.innerHTML = `
      <header class="topbar">
        <h1>Source diversity dashboard</h1>
        <div class="connection">
          <label>API <input id="api-base" placeholder="http://127.0.0.1:8000"
            value="${config.baseUrl ?? ""}"></label>
          <label>Token <input id="api-token" type="password"
            value="${config.token ?? ""}"></label>
        </div>
        <nav>
          <button type="button" id="nav-annotate">Check a draft</button>
          <button type="button" id="nav-monitor">Site monitor</button>
        </nav>
      </header>
      <main id="view-mount"></main>`;
    this.container
      .querySelector<HTMLButtonElement>("#nav-annotate")!
      .addEventListener("click", () => this.show("annotate"));
    this.container
      .querySelector<HTMLButtonElement>("#nav-monitor")!
      .addEventListener("click", () => this.show("monitor"));
    this.show("annotate");
  }

  client(): ApiClient {
    const base =
      this.container.querySelector<HTMLInputElement>("#api-base")!.value ||
      "http://127.0.0.1:8000";
    const token =
      this.container.querySelector<HTMLInputElement>("#api-token")!.value;
    return new ApiClient(base, token);
  }

  show(name: ViewName): void {
    if (this.activeName === name) {
      return;
    }
    // Leaving a view cancels whatever it still has in flight.
    if (this.activeView instanceof MonitorView) {
      this.activeView.destroy();
    }
    const mount = this.container.querySelector<HTMLElement>("#view-mount")!;
    mount.innerHTML = "";
    this.activeName = name;
    this.activeView = name === "annotate"
      ? new AnnotateView(mount, () => this.client())
      : new MonitorView(mount, this.client());
  }

  get active(): AnnotateView | MonitorView | null {
    return this.activeView;
  }
}
