/** Iteration browser: the front scatter, the sortable candidate table, and
 * the extension controls (foundational selection, rules, min frequency). */

import { ApiClient, ApiError } from "./api.js";
import { shortId, valueSpan } from "./format.js";
import { renderPairPlot, renderScatter } from "./scatter.js";
import type { SessionStore } from "./state.js";
import type { CandidateDto, InterestDimension } from "./types.js";
import { EXTENSION_RULES, INTEREST_DIMENSIONS, RULE_LABELS, patternSummary } from "./types.js";

export class FrontView {
  private sort: { dim: InterestDimension | null; descending: boolean } = {
    dim: null,
    descending: true,
  };
  private yaw = 0.7;
  private pitch = 0.45;
  private dragging: { x: number; y: number } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly api: ApiClient,
    private readonly onOpenDashboard: (patternId: string) => void,
    private readonly onStaleSession: () => void,
  ) {
    store.subscribe(() => this.render());
  }

  private sortedCandidates(): CandidateDto[] {
    const iteration = this.store.iteration;
    if (!iteration) {
      return [];
    }
    const candidates = [...iteration.candidates];
    const { dim, descending } = this.sort;
    if (dim) {
      candidates.sort((a, b) => {
        const delta = a.interest[dim] - b.interest[dim];
        return descending ? -delta : delta;
      });
    }
    return candidates;
  }

  async submitExtension(): Promise<void> {
    const session = this.store.current;
    if (!session || !this.store.canExtend()) {
      return;
    }
    this.store.pending = true;
    this.store.banner = null;
    this.store.notify();
    try {
      const response = await this.api.extend(
        session.session_id,
        [...this.store.selection].sort(),
        [...this.store.rules].sort(),
        this.store.minCaseFrequency,
      );
      if (response.iteration === null) {
        this.store.markDone(response.status);
      } else {
        this.store.appendIteration(response.iteration, response.status);
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.store.banner = { kind: "conflict", message: "step in progress" };
      } else if (error instanceof ApiError && error.status === 404) {
        this.store.banner = {
          kind: "stale",
          message: "session no longer exists on the server",
        };
        this.onStaleSession();
      } else {
        this.store.banner = { kind: "error", message: String(error) };
      }
      this.store.notify();
    } finally {
      this.store.pending = false;
      this.store.notify();
    }
  }

  render(): void {
    const doc = this.root.ownerDocument;
    const session = this.store.current;
    const iteration = this.store.iteration;
    this.root.replaceChildren();
    if (!session || !iteration) {
      return;
    }

    if (this.store.banner) {
      const banner = doc.createElement("div");
      banner.className = `banner ${this.store.banner.kind}`;
      banner.textContent = this.store.banner.message;
      if (this.store.banner.kind === "error") {
        const retry = doc.createElement("button");
        retry.textContent = "retry";
        retry.className = "retry";
        retry.addEventListener("click", () => void this.submitExtension());
        banner.appendChild(retry);
      }
      this.root.appendChild(banner);
    }

    const nav = doc.createElement("nav");
    nav.className = "iterations";
    session.iterations.forEach((entry, index) => {
      const tab = doc.createElement("button");
      tab.textContent = `iteration ${entry.index}`;
      tab.className = index === this.store.viewedIteration ? "tab active" : "tab";
      tab.dataset.iteration = String(entry.index);
      tab.addEventListener("click", () => this.store.viewIteration(index));
      nav.appendChild(tab);
    });
    const status = doc.createElement("span");
    status.className = `status ${session.status}`;
    status.textContent = session.status;
    nav.appendChild(status);
    this.root.appendChild(nav);

    const scatterBox = doc.createElement("section");
    scatterBox.className = "scatter-box";
    const modeToggle = doc.createElement("button");
    modeToggle.className = "mode-toggle";
    modeToggle.textContent =
      this.store.scatterMode === "projected" ? "switch to pair plots" : "switch to 3-axis view";
    modeToggle.addEventListener("click", () => {
      this.store.scatterMode = this.store.scatterMode === "projected" ? "pairs" : "projected";
      this.store.notify();
    });
    scatterBox.appendChild(modeToggle);
    const plot = doc.createElement("div");
    plot.className = "plot";
    scatterBox.appendChild(plot);
    const pick = (patternId: string): void => this.onOpenDashboard(patternId);
    if (this.store.scatterMode === "projected") {
      const svg = renderScatter(plot, iteration.candidates, {
        yaw: this.yaw,
        pitch: this.pitch,
        selected: this.store.selection,
        onPick: pick,
      });
      svg.addEventListener("mousedown", (event) => {
        this.dragging = { x: (event as MouseEvent).clientX, y: (event as MouseEvent).clientY };
      });
      svg.addEventListener("mousemove", (event) => {
        if (!this.dragging) {
          return;
        }
        const mouse = event as MouseEvent;
        this.yaw += (mouse.clientX - this.dragging.x) * 0.01;
        this.pitch += (mouse.clientY - this.dragging.y) * 0.01;
        this.dragging = { x: mouse.clientX, y: mouse.clientY };
        this.store.notify();
      });
      svg.addEventListener("mouseup", () => {
        this.dragging = null;
      });
    } else {
      renderPairPlot(plot, iteration.candidates, {
        selected: this.store.selection,
        onPick: pick,
      });
    }
    this.root.appendChild(scatterBox);

    this.root.appendChild(this.renderTable(doc));
    this.root.appendChild(this.renderControls(doc));
  }

  private renderTable(doc: Document): HTMLElement {
    const iteration = this.store.iteration!;
    const table = doc.createElement("table");
    table.className = "candidates";
    const head = doc.createElement("tr");
    for (const column of ["select", "pattern", "id", ...INTEREST_DIMENSIONS, "front"]) {
      const th = doc.createElement("th");
      th.textContent = column;
      if ((INTEREST_DIMENSIONS as string[]).includes(column)) {
        th.className = "sortable";
        th.dataset.dim = column;
        if (this.sort.dim === column) {
          th.classList.add(this.sort.descending ? "desc" : "asc");
        }
        th.addEventListener("click", () => {
          const dim = column as InterestDimension;
          this.sort = {
            dim,
            descending: this.sort.dim === dim ? !this.sort.descending : true,
          };
          this.store.notify();
        });
      }
      head.appendChild(th);
    }
    table.appendChild(head);

    const latest = this.store.viewedIteration === this.store.latestIndex;
    for (const candidate of this.sortedCandidates()) {
      const row = doc.createElement("tr");
      row.dataset.patternId = candidate.id;
      row.className = candidate.front ? "front" : "dominated";

      const selectCell = doc.createElement("td");
      const checkbox = doc.createElement("input");
      checkbox.type = "checkbox";
      checkbox.checked = this.store.selection.has(candidate.id);
      checkbox.disabled = !latest;
      checkbox.addEventListener("change", () => this.store.toggleSelection(candidate.id));
      selectCell.appendChild(checkbox);
      row.appendChild(selectCell);

      const patternCell = doc.createElement("td");
      patternCell.className = "pattern";
      const open = doc.createElement("a");
      open.href = "#";
      open.textContent = patternSummary(candidate.pattern);
      open.addEventListener("click", (event) => {
        event.preventDefault();
        this.onOpenDashboard(candidate.id);
      });
      patternCell.appendChild(open);
      row.appendChild(patternCell);

      const idCell = doc.createElement("td");
      idCell.className = "id";
      idCell.textContent = shortId(candidate.id);
      idCell.title = candidate.id;
      row.appendChild(idCell);

      for (const dim of INTEREST_DIMENSIONS) {
        const cell = doc.createElement("td");
        cell.className = `dim ${dim}`;
        cell.appendChild(valueSpan(doc, candidate.interest[dim]));
        if (candidate.interest.degenerate.includes(dim)) {
          const flag = doc.createElement("sup");
          flag.className = "degenerate";
          flag.title = "degenerate input";
          flag.textContent = "!";
          cell.appendChild(flag);
        }
        row.appendChild(cell);
      }

      const frontCell = doc.createElement("td");
      frontCell.className = "front-flag";
      frontCell.textContent = candidate.front ? "front" : "";
      row.appendChild(frontCell);
      table.appendChild(row);
    }

    const wrapper = doc.createElement("section");
    wrapper.className = "table-box";
    const summary = doc.createElement("p");
    summary.className = "table-summary";
    summary.textContent =
      `${iteration.candidates.length} candidates, ${iteration.front_ids.length} on the front`;
    wrapper.append(summary, table);
    return wrapper;
  }

  private renderControls(doc: Document): HTMLElement {
    const box = doc.createElement("section");
    box.className = "controls";

    const rules = doc.createElement("fieldset");
    rules.className = "rules";
    const legend = doc.createElement("legend");
    legend.textContent = "extension rules";
    rules.appendChild(legend);
    for (const rule of EXTENSION_RULES) {
      const label = doc.createElement("label");
      const checkbox = doc.createElement("input");
      checkbox.type = "checkbox";
      checkbox.value = rule;
      checkbox.checked = this.store.rules.has(rule);
      checkbox.addEventListener("change", () => {
        if (this.store.rules.has(rule)) {
          this.store.rules.delete(rule);
        } else {
          this.store.rules.add(rule);
        }
        this.store.notify();
      });
      label.append(checkbox, ` ${rule} (${RULE_LABELS[rule]})`);
      rules.appendChild(label);
    }
    box.appendChild(rules);

    const frequency = doc.createElement("label");
    frequency.className = "min-frequency";
    frequency.append("min case frequency ");
    const input = doc.createElement("input");
    input.type = "number";
    input.min = "0";
    input.value = this.store.minCaseFrequency === null ? "" : String(this.store.minCaseFrequency);
    input.addEventListener("change", () => {
      this.store.minCaseFrequency = input.value === "" ? null : Number(input.value);
    });
    frequency.appendChild(input);
    box.appendChild(frequency);

    const submit = doc.createElement("button");
    submit.className = "extend";
    submit.textContent = this.store.pending ? "extending..." : "extend selected";
    submit.disabled = !this.store.canExtend();
    submit.addEventListener("click", () => void this.submitExtension());
    box.appendChild(submit);
    return box;
  }
}
