/** Per-pattern dashboard: DAG, interest values, cohort attribute comparisons,
 * and (for survival-style outcomes) Kaplan-Meier curves with the log-rank p. */

import { renderHistogramOverlay, renderKaplanMeier, renderTwoRingPie } from "./charts.js";
import { renderPatternDag } from "./dagLayout.js";
import { valueSpan } from "./format.js";
import type { DashboardDto } from "./types.js";
import { INTEREST_DIMENSIONS, patternSummary } from "./types.js";

export function renderDashboard(root: HTMLElement, data: DashboardDto): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  root.className = "dashboard";

  const header = doc.createElement("header");
  const title = doc.createElement("h2");
  title.textContent = patternSummary(data.pattern);
  header.appendChild(title);
  const cohorts = doc.createElement("p");
  cohorts.className = "cohorts";
  cohorts.append("cases with pattern ");
  cohorts.appendChild(valueSpan(doc, data.n_in));
  cohorts.append(" / without ");
  cohorts.appendChild(valueSpan(doc, data.n_out));
  header.appendChild(cohorts);
  root.appendChild(header);

  const dag = doc.createElement("section");
  dag.className = "dag-box";
  renderPatternDag(dag, data.pattern);
  root.appendChild(dag);

  const interest = doc.createElement("dl");
  interest.className = "interest";
  for (const dim of INTEREST_DIMENSIONS) {
    const term = doc.createElement("dt");
    term.textContent = dim;
    const value = doc.createElement("dd");
    value.dataset.dim = dim;
    value.appendChild(valueSpan(doc, data.interest[dim], 4));
    if (data.interest.degenerate.includes(dim)) {
      value.append(" (degenerate)");
    }
    interest.append(term, value);
  }
  root.appendChild(interest);

  const medians = doc.createElement("p");
  medians.className = "median-outcome";
  medians.append("median outcome in ");
  medians.appendChild(valueSpan(doc, data.median_outcome_in));
  medians.append(" / out ");
  medians.appendChild(valueSpan(doc, data.median_outcome_out));
  root.appendChild(medians);

  if (data.outcome_classes_in !== null || data.outcome_classes_out !== null) {
    const classBox = doc.createElement("section");
    classBox.className = "outcome-classes";
    renderTwoRingPie(classBox, "outcome", {
      in: data.outcome_classes_in ?? {},
      out: data.outcome_classes_out ?? {},
    });
    root.appendChild(classBox);
  }

  const categorical = doc.createElement("section");
  categorical.className = "categorical-attrs";
  for (const [attribute, proportions] of Object.entries(data.categorical).sort()) {
    renderTwoRingPie(categorical, attribute, proportions);
  }
  root.appendChild(categorical);

  const numeric = doc.createElement("section");
  numeric.className = "numeric-attrs";
  for (const [attribute, histograms] of Object.entries(data.numeric).sort()) {
    renderHistogramOverlay(numeric, attribute, histograms);
  }
  root.appendChild(numeric);

  // Survival panel only exists when the service sent curves (continuous outcome).
  if (data.km_in !== null && data.km_out !== null) {
    const survival = doc.createElement("section");
    survival.className = "survival";
    const heading = doc.createElement("h3");
    heading.textContent = "survival";
    survival.appendChild(heading);
    renderKaplanMeier(survival, data.km_in, data.km_out);
    const test = doc.createElement("p");
    test.className = "log-rank";
    test.append("log-rank statistic ");
    test.appendChild(valueSpan(doc, data.log_rank_stat, 4));
    test.append(", p ");
    const p = valueSpan(doc, data.log_rank_p, 6);
    p.classList.add("p-value");
    test.appendChild(p);
    survival.appendChild(test);
    root.appendChild(survival);
  }
}
