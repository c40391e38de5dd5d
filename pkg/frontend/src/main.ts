import { mount, type App } from "./app.js";

// Browser entry: mount the explorer against the service URL in the address
// bar (?service=...) or the local default.

const params = new URLSearchParams(window.location.search);
const DEFAULT_URL = "http://127.0.0.1:8080";

let app: App | null = null;

function boot(baseUrl: string): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  app = mount(root, baseUrl);
}

const urlInput = document.getElementById("service-url") as HTMLInputElement | null;
const initial = params.get("service") ?? DEFAULT_URL;
if (urlInput) {
  urlInput.value = initial;
  urlInput.addEventListener("change", () => {
    boot(urlInput.value);
  });
}
boot(initial);

export { app };
