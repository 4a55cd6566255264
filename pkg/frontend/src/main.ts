/** Console entry point: wires state, API client and renderers together.
 *
 * Configuration is the API base URL only: same origin by default, or
 * ?api=http://host:port when the console is served elsewhere.
 */

import { ApiClient, ApiFailure } from "./api.js";
import {
  applyBundle,
  applyCompliance,
  applyFailure,
  applyProject,
  applySearch,
  beginRequest,
  clearError,
  initialState,
  parseApprovedInput,
  selectNode,
  selectTab,
  setApprovedInput,
  type SectionTab,
  type ViewState,
} from "./state.js";
import {
  el,
  renderBanner,
  renderProject,
  renderRecordDetail,
  renderSearchResults,
} from "./render.js";
import type { RecordDoc } from "./types.js";

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? window.location.origin;
}

const api = new ApiClient(apiBase());

let state: ViewState = initialState();
let detail: RecordDoc | null = null;
let expansion: { direction: string; nodes: string[] } | null = null;
let offendingNodes = new Set<string>();
let lastAction: (() => void) | null = null;

const refs = {
  banner: document.getElementById("banner") as HTMLElement,
  health: document.getElementById("health") as HTMLElement,
  searchForm: document.getElementById("search-form") as HTMLFormElement,
  searchInput: document.getElementById("search-input") as HTMLInputElement,
  results: document.getElementById("results") as HTMLElement,
  project: document.getElementById("project") as HTMLElement,
  detail: document.getElementById("detail") as HTMLElement,
  approved: document.getElementById("approved-input") as HTMLInputElement,
};

function update(next: ViewState): void {
  state = next;
  draw();
}

function fail(seq: number, err: unknown, retry: () => void): void {
  const message = err instanceof ApiFailure ? `${err.code}: ${err.message}` : String(err);
  lastAction = retry;
  update(applyFailure(state, seq, message));
}

function runSearch(text: string): void {
  const [next, seq] = beginRequest(state);
  state = next;
  api
    .search({ text })
    .then((hits) => update(applySearch(state, seq, text, hits)))
    .catch((err) => fail(seq, err, () => runSearch(text)));
}

function openProject(ref: string): void {
  const [next, seq] = beginRequest(state);
  state = next;
  api
    .project(ref)
    .then((view) => {
      detail = null;
      expansion = null;
      offendingNodes = new Set();
      update(applyProject(state, seq, view));
    })
    .catch((err) => fail(seq, err, () => openProject(ref)));
}

function focusLineage(nodeRef: string): void {
  const [next, seq] = beginRequest(state);
  state = next;
  api
    .lineage(nodeRef)
    .then((bundle) =>
      update(applyBundle(state, seq, `lineage of ${nodeRef}`, bundle)),
    )
    .catch((err) => fail(seq, err, () => focusLineage(nodeRef)));
}

function inspectNode(nodeId: string): void {
  state = selectNode(state, nodeId);
  api
    .record(nodeId)
    .then((doc) => {
      detail = doc;
      expansion = null;
      draw();
    })
    .catch((err) => fail(state.issuedSeq, err, () => inspectNode(nodeId)));
}

function expand(direction: "upstream" | "downstream", nodeId: string): void {
  api
    .traversal(nodeId, direction)
    .then((doc) => {
      expansion = { direction: doc.direction, nodes: doc.nodes };
      draw();
    })
    .catch((err) => fail(state.issuedSeq, err, () => expand(direction, nodeId)));
}

function runAudit(model: string): void {
  const approved = parseApprovedInput(state.audit.approvedInput);
  api
    .compliance(model, approved)
    .then(async (report) => {
      state = applyCompliance(state, report);
      offendingNodes = await mapOffendingToNodes(report.offending_sources);
      draw();
    })
    .catch((err) => fail(state.issuedSeq, err, () => runAudit(model)));
}

/** Offending sources are reported as source ids; map them onto the DAG's
 * source nodes by asking the records endpoint, never by guessing. */
async function mapOffendingToNodes(offending: string[]): Promise<Set<string>> {
  const wanted = new Set(offending);
  const hits = new Set<string>();
  const sourceNodes = (state.bundle?.nodes ?? []).filter((n) => n.node_kind === "source");
  for (const node of sourceNodes) {
    try {
      const doc = await api.record(node.node_id);
      const sourceId = doc.record?.["source_id"];
      if (typeof sourceId === "string" && wanted.has(sourceId)) {
        hits.add(node.node_id);
      }
    } catch {
      // node without a record; cannot match it to a source id
    }
  }
  return hits;
}

function draw(): void {
  renderBanner(
    refs.banner,
    state.error,
    () => {
      update(clearError(state));
      lastAction?.();
    },
    () => update(clearError(state)),
  );
  renderSearchResults(refs.results, state.results, openProject, inspectNode);
  renderProject(
    refs.project,
    state.project,
    state.activeTab,
    state.bundle,
    state.bundleLabel,
    state.audit.reports,
    (tab: SectionTab) => update(selectTab(state, tab)),
    {
      onAudit: runAudit,
      lineage: {
        onSelect: inspectNode,
        offendingNodes,
        selected: state.selectedNode,
      },
    },
  );
  renderRecordDetail(refs.detail, detail, expansion, {
    onExpand: expand,
    onFocusLineage: focusLineage,
  });
}

refs.searchForm.addEventListener("submit", (event) => {
  event.preventDefault();
  runSearch(refs.searchInput.value);
});

refs.approved.addEventListener("input", () => {
  state = setApprovedInput(state, refs.approved.value);
});

api
  .health()
  .then((doc) => {
    refs.health.textContent = `${doc.records} records`;
  })
  .catch(() => {
    refs.health.textContent = "service unreachable";
  });

api
  .lakeHealth()
  .then((doc) => {
    const badge = el(
      "span",
      doc.swamp_flag ? "health-bad" : "health-good",
      `documentation rate ${doc.documentation_rate}` +
        (doc.swamp_flag ? " (swamp)" : ""),
    );
    refs.health.append(" — ", badge);
  })
  .catch(() => {
    /* health banner already reports unreachable */
  });

draw();
