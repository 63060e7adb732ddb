/**
 * Entry point: wire the evidence board to the review service and keep a
 * failed case load recoverable with a retry prompt instead of a blank or
 * half-built page.
 */

import { ApiClient } from "./api.js";
import { EvidenceBoard } from "./board.js";

export function bootstrap(
  root: HTMLElement,
  api: ApiClient,
  storage: Storage,
): { start: () => Promise<void> } {
  async function start(): Promise<void> {
    root.textContent = "";
    root.classList.remove("locked");
    const board = new EvidenceBoard(root, api, storage);
    try {
      await board.load();
    } catch (error) {
      const reason = error instanceof Error ? error.message : String(error);
      root.textContent = "";
      const panel = document.createElement("div");
      panel.className = "load-error";
      const message = document.createElement("p");
      message.textContent = `Could not reach the case desk: ${reason}`;
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry";
      retry.textContent = "Try again";
      retry.addEventListener("click", () => {
        void start();
      });
      panel.append(message, retry);
      root.append(panel);
    }
  }
  return { start };
}

function main(): void {
  const root = document.querySelector<HTMLElement>("#app");
  if (!root) return;
  const base = root.dataset.apiBase ?? "/api/v1";
  const api = new ApiClient(base);
  void bootstrap(root, api, window.localStorage).start();
}

if (typeof document !== "undefined" && document.querySelector("#app")) {
  main();
}
