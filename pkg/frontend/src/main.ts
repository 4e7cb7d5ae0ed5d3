import { App } from "./app";

declare global {
  interface Window {
    SOURCEAUDIT_CONFIG?: { baseUrl?: string; token?: string };
  }
}

document.addEventListener("DOMContentLoaded", () => {
  const mount = document.getElementById("app");
  if (mount) {
    new App(mount, window.SOURCEAUDIT_CONFIG ?? {});
  }
});
