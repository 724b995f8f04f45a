/** Application bootstrap: the setup panel creates a session from an uploaded
 * CSV, then the front view and per-pattern dashboards take over. */

import { ApiClient, ApiError } from "./api.js";
import { renderDashboard } from "./dashboardView.js";
import { FrontView } from "./frontView.js";
import { SessionStore } from "./state.js";

const DEFAULT_SCHEMA = {
  case_id_col: "case_id",
  activity_col: "activity",
  timestamp_col: "timestamp",
  outcome_col: "outcome",
  outcome_kind: "continuous",
  numeric_attrs: [],
  categorical_attrs: [],
};

const DEFAULT_CONFIG = {
  max_iterations: 3,
  rules: ["df", "dp", "conc", "ef", "ep"],
};

export function bootstrap(doc: Document, baseUrl = ""): void {
  const api = new ApiClient(baseUrl);
  const store = new SessionStore();

  const setup = doc.getElementById("setup")!;
  const main = doc.getElementById("front")!;
  const dashboard = doc.getElementById("dashboard")!;
  const schemaInput = doc.getElementById("schema-json") as HTMLTextAreaElement;
  const configInput = doc.getElementById("config-json") as HTMLTextAreaElement;
  const fileInput = doc.getElementById("csv-file") as HTMLInputElement;
  const startButton = doc.getElementById("start-session") as HTMLButtonElement;
  const setupError = doc.getElementById("setup-error")!;

  schemaInput.value = JSON.stringify(DEFAULT_SCHEMA, null, 2);
  configInput.value = JSON.stringify(DEFAULT_CONFIG, null, 2);

  const view = new FrontView(
    main,
    store,
    api,
    (patternId) => void openDashboard(patternId),
    () => {
      setup.classList.remove("hidden");
    },
  );
  void view;

  async function openDashboard(patternId: string): Promise<void> {
    const session = store.current;
    if (!session) {
      return;
    }
    try {
      const data = await api.dashboard(session.session_id, patternId);
      renderDashboard(dashboard, data);
      dashboard.classList.remove("hidden");
    } catch (error) {
      dashboard.replaceChildren();
      const note = doc.createElement("p");
      note.className = "banner error";
      note.textContent =
        error instanceof ApiError ? `dashboard unavailable: ${error.message}` : String(error);
      dashboard.appendChild(note);
      dashboard.classList.remove("hidden");
    }
  }

  startButton.addEventListener("click", () => {
    void (async () => {
      setupError.textContent = "";
      try {
        const schema = JSON.parse(schemaInput.value) as Record<string, unknown>;
        const config = JSON.parse(configInput.value) as Record<string, unknown>;
        const file = fileInput.files?.[0];
        if (!file) {
          setupError.textContent = "choose a CSV file first";
          return;
        }
        const csvText = await file.text();
        const summary = await api.uploadLog({ csv_text: csvText }, schema);
        const created = await api.createSession(summary.log_id, config);
        const detail = await api.getSession(created.session_id);
        store.setSession(detail);
        setup.classList.add("hidden");
      } catch (error) {
        setupError.textContent =
          error instanceof ApiError ? `${error.status}: ${error.message}` : String(error);
      }
    })();
  });
}

declare global {
  interface Window {
    __TRACEPATTERNS_TEST__?: boolean;
  }
}

if (typeof window !== "undefined" && !window.__TRACEPATTERNS_TEST__) {
  bootstrap(document, "");
}
