/** Console view state and its transitions.
 *
 * Transitions are pure (state in, state out) so they are directly
 * testable. In-flight requests carry a sequence number; a response is
 * applied only if it answers the newest request, which is how stale
 * responses get discarded. API failures raise a banner but never wipe
 * what is already on screen.
 */

import type { ComplianceReport, LineageExport, ProjectView, SearchHit } from "./types.js";

export type SectionTab = "dataset" | "model" | "lineage";

export const SECTION_TABS: readonly SectionTab[] = ["dataset", "model", "lineage"];

export interface AuditPanelState {
  approvedInput: string;
  reports: Record<string, ComplianceReport>;
}

export interface ViewState {
  query: string;
  results: SearchHit[] | null;
  project: ProjectView | null;
  bundle: LineageExport | null;
  bundleLabel: string;
  selectedNode: string | null;
  activeTab: SectionTab;
  audit: AuditPanelState;
  error: string | null;
  issuedSeq: number;
  appliedSeq: number;
}

export function initialState(): ViewState {
  return {
    query: "",
    results: null,
    project: null,
    bundle: null,
    bundleLabel: "",
    selectedNode: null,
    activeTab: "dataset",
    audit: { approvedInput: "", reports: {} },
    error: null,
    issuedSeq: 0,
    appliedSeq: 0,
  };
}

export function beginRequest(state: ViewState): [ViewState, number] {
  const seq = state.issuedSeq + 1;
  return [{ ...state, issuedSeq: seq }, seq];
}

function isStale(state: ViewState, seq: number): boolean {
  return seq !== state.issuedSeq || seq <= state.appliedSeq;
}

export function applySearch(
  state: ViewState,
  seq: number,
  query: string,
  hits: SearchHit[],
): ViewState {
  if (isStale(state, seq)) return state;
  // hits stay exactly in API order; rendering never re-ranks them
  return { ...state, appliedSeq: seq, query, results: hits, error: null };
}

export function applyProject(state: ViewState, seq: number, view: ProjectView): ViewState {
  if (isStale(state, seq)) return state;
  return {
    ...state,
    appliedSeq: seq,
    project: view,
    bundle: view.lineage_section,
    bundleLabel: `project ${view.study.study_id}`,
    selectedNode: null,
    activeTab: "dataset",
    audit: { ...state.audit, reports: {} },
    error: null,
  };
}

export function applyBundle(
  state: ViewState,
  seq: number,
  label: string,
  bundle: LineageExport,
): ViewState {
  if (isStale(state, seq)) return state;
  const present = new Set(bundle.nodes.map((n) => n.node_id));
  const selected = state.selectedNode && present.has(state.selectedNode) ? state.selectedNode : null;
  return {
    ...state,
    appliedSeq: seq,
    bundle,
    bundleLabel: label,
    selectedNode: selected,
    activeTab: "lineage",
    error: null,
  };
}

export function applyFailure(state: ViewState, seq: number, message: string): ViewState {
  if (seq !== state.issuedSeq) return state; // a newer request owns the screen
  return { ...state, error: message };
}

export function clearError(state: ViewState): ViewState {
  return { ...state, error: null };
}

export function selectTab(state: ViewState, tab: SectionTab): ViewState {
  if (!SECTION_TABS.includes(tab)) return state;
  return { ...state, activeTab: tab };
}

/** Selection is only valid for members of the loaded bundle. */
export function selectNode(state: ViewState, nodeId: string | null): ViewState {
  if (nodeId === null) return { ...state, selectedNode: null };
  const present = state.bundle?.nodes.some((n) => n.node_id === nodeId) ?? false;
  if (!present) return state;
  return { ...state, selectedNode: nodeId };
}

export function setApprovedInput(state: ViewState, text: string): ViewState {
  return { ...state, audit: { ...state.audit, approvedInput: text } };
}

export function applyCompliance(state: ViewState, report: ComplianceReport): ViewState {
  return {
    ...state,
    audit: { ...state.audit, reports: { ...state.audit.reports, [report.model]: report } },
  };
}

export function parseApprovedInput(text: string): string[] {
  return text
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}
