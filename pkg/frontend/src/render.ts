/** DOM and SVG builders. Pure display: values come from API documents. */

import { layeredLayout } from "./layout.js";
import type {
  ComplianceReport,
  DatasetEntry,
  LineageExport,
  ModelEntry,
  ProjectView,
  RecordDoc,
  SearchHit,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function kindBadge(kind: string): HTMLElement {
  return el("span", `badge kind-${kind}`, kind);
}

export function renderBanner(
  container: HTMLElement,
  message: string | null,
  onRetry: () => void,
  onDismiss: () => void,
): void {
  container.replaceChildren();
  if (!message) return;
  const banner = el("div", "banner");
  banner.append(el("span", "banner-text", message));
  const retry = el("button", "banner-retry", "retry");
  retry.addEventListener("click", onRetry);
  const dismiss = el("button", "banner-dismiss", "dismiss");
  dismiss.addEventListener("click", onDismiss);
  banner.append(retry, dismiss);
  container.append(banner);
}

export function renderSearchResults(
  container: HTMLElement,
  hits: SearchHit[] | null,
  onOpenStudy: (ref: string) => void,
  onInspect: (nodeId: string) => void,
): void {
  container.replaceChildren();
  if (hits === null) return;
  if (hits.length === 0) {
    container.append(el("p", "empty-state", "no matches"));
    return;
  }
  const list = el("ul", "results");
  // results render in API order; the console never re-ranks
  for (const hit of hits) {
    const row = el("li", "result");
    row.append(kindBadge(hit.node_kind));
    const label = el("span", "result-name", hit.name || hit.node_id);
    row.append(label);
    if (hit.snippet && hit.snippet !== hit.name) {
      row.append(el("span", "result-snippet", hit.snippet));
    }
    row.append(el("span", "result-score", `score ${hit.score}`));
    if (hit.node_kind === "study") {
      row.classList.add("clickable");
      row.title = "open project view";
      row.addEventListener("click", () => onOpenStudy(hit.node_id));
    } else {
      row.classList.add("clickable");
      row.addEventListener("click", () => onInspect(hit.node_id));
    }
    list.append(row);
  }
  container.append(list);
}

function keyValueTable(entries: Array<[string, string]>): HTMLElement {
  const table = el("table", "kv");
  for (const [key, value] of entries) {
    const row = el("tr");
    row.append(el("td", "kv-key", key), el("td", "kv-value", value));
    table.append(row);
  }
  return table;
}

function renderDatasetCard(entry: DatasetEntry): HTMLElement {
  const card = el("div", "card");
  const d = entry.dataset;
  card.append(el("h3", "card-title", d.name || d.dataset_id));
  const facts: Array<[string, string]> = [
    ["dataset_id", d.dataset_id],
    ["format", d.format ?? ""],
    ["versions", String(entry.version_count)],
  ];
  if (d.created_at) facts.push(["created_at", d.created_at]);
  if (d.location) facts.push(["location", d.location]);
  card.append(keyValueTable(facts.filter(([, v]) => v !== "")));
  if (d.description) card.append(el("p", "card-text", d.description));
  if (d.tags?.length) {
    const tags = el("div", "tags");
    for (const tag of d.tags) tags.append(el("span", "tag", tag));
    card.append(tags);
  }
  const mf = d.metafeatures;
  if (mf) {
    const block = el("div", "metafeatures");
    block.append(el("h4", undefined, "metafeatures"));
    block.append(
      keyValueTable([
        ["rows", String(mf.n_rows ?? 0)],
        ["attributes", String(mf.n_attributes ?? 0)],
      ]),
    );
    if (mf.per_attribute_descriptors?.length) {
      const table = el("table", "grid");
      const head = el("tr");
      for (const h of ["attribute", "type", "missing"]) head.append(el("th", undefined, h));
      table.append(head);
      for (const attr of mf.per_attribute_descriptors) {
        const row = el("tr");
        row.append(
          el("td", undefined, attr.attribute_name),
          el("td", undefined, attr.declared_type ?? ""),
          el("td", undefined, String(attr.missing_fraction ?? 0)),
        );
        table.append(row);
      }
      block.append(table);
    }
    card.append(block);
  }
  return card;
}

function renderModelCard(
  entry: ModelEntry,
  report: ComplianceReport | undefined,
  onAudit: (model: string) => void,
): HTMLElement {
  const card = el("div", "card");
  card.append(el("h3", "card-title", entry.analysis.analysis_id ?? entry.node_id));
  if (entry.analysis.description) card.append(el("p", "card-text", entry.analysis.description));
  const facts: Array<[string, string]> = [];
  if (entry.algorithm) {
    facts.push(["algorithm", entry.algorithm.family
      ? `${entry.algorithm.name} (${entry.algorithm.family})`
      : entry.algorithm.name]);
  }
  if (entry.analysis.performed_by) facts.push(["performed_by", entry.analysis.performed_by]);
  if (entry.analysis.performed_at) facts.push(["performed_at", entry.analysis.performed_at]);
  facts.push(["model", entry.model]);
  card.append(keyValueTable(facts));
  if (entry.parameters.length) {
    const table = el("table", "grid");
    const head = el("tr");
    for (const h of ["parameter", "value", "type"]) head.append(el("th", undefined, h));
    table.append(head);
    for (const p of entry.parameters) {
      const row = el("tr");
      row.append(
        el("td", undefined, p.name),
        el("td", undefined, p.value ?? ""),
        el("td", undefined, p.value_type ?? ""),
      );
      table.append(row);
    }
    card.append(table);
  }
  const perf = Object.entries(entry.performance);
  if (perf.length) {
    card.append(
      keyValueTable(perf.map(([metric, value]) => [metric, String(value)])),
    );
  }
  const auditRow = el("div", "audit-row");
  const button = el("button", "audit-button", "audit compliance");
  button.addEventListener("click", () => onAudit(entry.model));
  auditRow.append(button);
  if (report) {
    auditRow.append(el("span", `verdict verdict-${report.verdict}`, report.verdict));
    if (report.offending_sources.length) {
      auditRow.append(
        el("span", "offending", `offending: ${report.offending_sources.join(", ")}`),
      );
    }
  }
  card.append(auditRow);
  return card;
}

export interface LineageCallbacks {
  onSelect: (nodeId: string) => void;
  offendingNodes: Set<string>;
  selected: string | null;
}

export function renderLineageDag(
  container: HTMLElement,
  bundle: LineageExport | null,
  callbacks: LineageCallbacks,
): void {
  container.replaceChildren();
  if (!bundle || bundle.nodes.length === 0) {
    container.append(el("p", "empty-state", "no lineage recorded"));
    return;
  }
  const layout = layeredLayout(bundle.nodes, bundle.edges);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));
  svg.classList.add("dag");

  for (const edge of bundle.edges) {
    const from = layout.positions.get(edge.from);
    const to = layout.positions.get(edge.to);
    if (!from || !to) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.classList.add("edge", `edge-${edge.kind}`);
    svg.append(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((from.x + to.x) / 2));
    label.setAttribute("y", String((from.y + to.y) / 2 - 4));
    label.classList.add("edge-label");
    label.textContent = edge.split ? `${edge.kind}:${edge.split}` : edge.kind;
    svg.append(label);
  }

  for (const node of bundle.nodes) {
    const point = layout.positions.get(node.node_id);
    if (!point) continue;
    const group = document.createElementNS(SVG_NS, "g");
    group.classList.add("node", `class-${node.node_class}`, `kind-${node.node_kind}`);
    if (node.node_id === callbacks.selected) group.classList.add("selected");
    if (callbacks.offendingNodes.has(node.node_id)) group.classList.add("offending");
    group.setAttribute("data-node-id", node.node_id);
    let shape: SVGElement;
    if (node.node_class === "activity") {
      shape = document.createElementNS(SVG_NS, "rect");
      shape.setAttribute("x", String(point.x - 52));
      shape.setAttribute("y", String(point.y - 16));
      shape.setAttribute("width", "104");
      shape.setAttribute("height", "32");
    } else if (node.node_class === "agent") {
      shape = document.createElementNS(SVG_NS, "polygon");
      const points = [
        [point.x, point.y - 20],
        [point.x + 52, point.y],
        [point.x, point.y + 20],
        [point.x - 52, point.y],
      ];
      shape.setAttribute("points", points.map(([x, y]) => `${x},${y}`).join(" "));
    } else {
      shape = document.createElementNS(SVG_NS, "rect");
      shape.setAttribute("x", String(point.x - 52));
      shape.setAttribute("y", String(point.y - 16));
      shape.setAttribute("width", "104");
      shape.setAttribute("height", "32");
      shape.setAttribute("rx", "14");
    }
    group.append(shape);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(point.x));
    label.setAttribute("y", String(point.y - 22));
    label.classList.add("node-kind");
    label.textContent = node.node_kind;
    group.append(label);
    const idLabel = document.createElementNS(SVG_NS, "text");
    idLabel.setAttribute("x", String(point.x));
    idLabel.setAttribute("y", String(point.y + 4));
    idLabel.classList.add("node-id");
    idLabel.textContent = shortId(node.node_id);
    group.append(idLabel);
    group.addEventListener("click", () => callbacks.onSelect(node.node_id));
    svg.append(group);
  }
  container.append(svg);
}

export function shortId(nodeId: string): string {
  if (nodeId.startsWith("sha256:")) {
    return nodeId.slice(7, 17);
  }
  return nodeId.length > 16 ? nodeId.slice(0, 15) + "…" : nodeId;
}

export interface ProjectCallbacks {
  onAudit: (model: string) => void;
  lineage: LineageCallbacks;
}

export function renderProject(
  container: HTMLElement,
  view: ProjectView | null,
  activeTab: string,
  bundle: LineageExport | null,
  bundleLabel: string,
  reports: Record<string, ComplianceReport>,
  onTab: (tab: "dataset" | "model" | "lineage") => void,
  callbacks: ProjectCallbacks,
): void {
  container.replaceChildren();
  if (!view) return;
  const header = el("div", "project-header");
  header.append(el("h2", undefined, view.study.description || view.study.study_id));
  header.append(el("span", "muted", view.study.study_id));
  container.append(header);

  const tabs = el("div", "tabs");
  for (const tab of ["dataset", "model", "lineage"] as const) {
    const button = el("button", tab === activeTab ? "tab active" : "tab", tab);
    button.addEventListener("click", () => onTab(tab));
    tabs.append(button);
  }
  container.append(tabs);

  const body = el("div", "tab-body");
  if (activeTab === "dataset") {
    if (view.dataset_section.length === 0) {
      body.append(el("p", "empty-state", "no datasets recorded"));
    }
    for (const entry of view.dataset_section) body.append(renderDatasetCard(entry));
  } else if (activeTab === "model") {
    if (view.model_section.length === 0) {
      body.append(el("p", "empty-state", "no models recorded"));
    }
    for (const entry of view.model_section) {
      body.append(renderModelCard(entry, reports[entry.model], callbacks.onAudit));
    }
  } else {
    if (bundleLabel) body.append(el("p", "muted", `showing ${bundleLabel}`));
    const dag = el("div", "dag-container");
    renderLineageDag(dag, bundle, callbacks.lineage);
    body.append(dag);
  }
  container.append(body);
}

export interface DetailCallbacks {
  onExpand: (direction: "upstream" | "downstream", nodeId: string) => void;
  onFocusLineage: (nodeId: string) => void;
}

export function renderRecordDetail(
  container: HTMLElement,
  doc: RecordDoc | null,
  expansion: { direction: string; nodes: string[] } | null,
  callbacks: DetailCallbacks,
): void {
  container.replaceChildren();
  if (!doc) return;
  const panel = el("div", "detail");
  const title = el("h3", undefined, doc.record_type);
  title.append(kindBadge(doc.node_kind));
  panel.append(title);
  panel.append(el("p", "muted mono", doc.node_id));
  const actions = el("div", "detail-actions");
  for (const direction of ["upstream", "downstream"] as const) {
    const button = el("button", undefined, `${direction} nodes`);
    button.addEventListener("click", () => callbacks.onExpand(direction, doc.node_id));
    actions.append(button);
  }
  const focus = el("button", undefined, "focus lineage here");
  focus.addEventListener("click", () => callbacks.onFocusLineage(doc.node_id));
  actions.append(focus);
  panel.append(actions);
  if (expansion) {
    const block = el("div", "expansion");
    block.append(
      el("h4", undefined, `${expansion.direction} (${expansion.nodes.length})`),
    );
    const list = el("ul", "expansion-list");
    for (const nodeId of expansion.nodes) {
      list.append(el("li", "mono", shortId(nodeId)));
    }
    block.append(list);
    panel.append(block);
  }
  const pre = el("pre", "record-json", JSON.stringify(doc.record, null, 2));
  panel.append(pre);
  container.append(panel);
}
