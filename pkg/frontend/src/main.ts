import { AnnotationApp } from "./app.js";
import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const sessionId = new URLSearchParams(window.location.search).get("session") ?? "default";
const app = new AnnotationApp(new ApiClient(sessionId), (state) => {
  root.innerHTML = renderApp(state);
});

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!target) return;
  const term = target.dataset.term ?? "";
  switch (target.dataset.action) {
    case "mark-causal":
      void app.markCausal(term);
      break;
    case "mark-noncausal":
      void app.markNonCausal(term);
      break;
    case "toggle-antonym":
      void app.toggleAntonym(term, target.dataset.antonym ?? "");
      break;
    case "retrain":
      void app.retrain();
      break;
    case "retry":
      void app.refresh();
      break;
    case "dismiss-error":
      app.dismissError();
      break;
    case "prev-page":
      app.changePage(-1);
      break;
    case "next-page":
      app.changePage(1);
      break;
  }
});

void app.refresh().then(() => app.loadLastReport());
