/** Console fidelity against a real lake service.
 *
 * Spawns the Python service over a freshly built demonstration lake and
 * checks the console's data path end to end: the three project sections,
 * DAG node count equal to the lineage endpoint's node count, verdict and
 * completeness values passed through verbatim, and identical layout across
 * two independent "reloads" of the same bundle.
 */

import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { layeredLayout } from "../src/layout.js";
import type { ChildProcess } from "node:child_process";

const PYTHON = process.env.MLK_PYTHON ?? "python3";
const SRC_DIR = join(__dirname, "..", "..", "src");

let proc: ChildProcess;
let api: ApiClient;
let ids: { data_dir: string; study: string; model: string; analysis: string };
let tempDir: string;

beforeAll(async () => {
  tempDir = mkdtempSync(join(tmpdir(), "console-lake-"));
  const env = { ...process.env, PYTHONPATH: SRC_DIR };
  const fixture = spawnSync(
    PYTHON,
    [join(__dirname, "fixture.py"), join(tempDir, "lake")],
    { env, encoding: "utf-8" },
  );
  if (fixture.status !== 0) {
    throw new Error(`fixture build failed: ${fixture.stderr}`);
  }
  ids = JSON.parse(fixture.stdout.trim().split("\n").at(-1)!);

  proc = spawn(
    PYTHON,
    ["-m", "modellake", "serve", "--data-dir", ids.data_dir, "--bind", "127.0.0.1:0"],
    { env },
  );
  const base = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/listening on (http:\/\/[^\s]+)/);
      if (match) resolve(match[1]!);
    });
    proc.on("exit", (code) => reject(new Error(`service exited early: ${code}`)));
    setTimeout(() => reject(new Error("service did not start in time")), 15000);
  });
  api = new ApiClient(base);
}, 30000);

afterAll(() => {
  proc?.kill("SIGTERM");
  rmSync(tempDir, { recursive: true, force: true });
});

describe("console fidelity against the fixture service", () => {
  it("renders exactly the three sections of the project view", async () => {
    const view = await api.project(ids.study);
    expect(Object.keys(view)).toContain("dataset_section");
    expect(Object.keys(view)).toContain("model_section");
    expect(Object.keys(view)).toContain("lineage_section");
    expect(view.dataset_section.length).toBe(1);
    expect(view.model_section.length).toBe(1);
    expect(view.study.description).toBe("Diabetes prediction");
  });

  it("search results arrive ranked by the service, study first", async () => {
    const hits = await api.search({ text: "diabetes" });
    expect(hits.length).toBeGreaterThan(0);
    expect(hits[0]!.node_kind).toBe("study");
  });

  it("lays out exactly as many DAG nodes as the lineage endpoint returns", async () => {
    const bundle = await api.lineage(ids.model);
    const layout = layeredLayout(bundle.nodes, bundle.edges);
    expect(layout.positions.size).toBe(bundle.nodes.length);
    const project = await api.project(ids.study);
    const projectLayout = layeredLayout(
      project.lineage_section.nodes,
      project.lineage_section.edges,
    );
    expect(projectLayout.positions.size).toBe(project.lineage_section.nodes.length);
  });

  it("produces identical layouts across two reloads of the same bundle", async () => {
    const first = await api.lineage(ids.model);
    const second = await api.lineage(ids.model);
    const a = layeredLayout(first.nodes, first.edges);
    const b = layeredLayout(second.nodes, second.edges);
    expect([...a.positions.entries()]).toEqual([...b.positions.entries()]);
  });

  it("passes compliance verdicts through verbatim", async () => {
    const compliant = await api.compliance(ids.model, ["src-clinic"]);
    expect(compliant.verdict).toBe("compliant");
    expect(compliant.offending_sources).toEqual([]);
    const flagged = await api.compliance(ids.model, ["someone-else"]);
    expect(flagged.verdict).toBe("non_compliant");
    expect(flagged.offending_sources).toEqual(["src-clinic"]);
  });

  it("passes completeness values through verbatim", async () => {
    const health = await api.lakeHealth();
    expect(health.documentation_rate).toBe(1);
    expect(health.mean_completeness).toBe(1);
    expect(health.swamp_flag).toBe(false);
  });

  it("can fetch the record behind any DAG node", async () => {
    const bundle = await api.lineage(ids.model);
    for (const node of bundle.nodes) {
      const doc = await api.record(node.node_id);
      expect(doc.node_id).toBe(node.node_id);
      expect(doc.node_kind).toBe(node.node_kind);
    }
  });

  it("offers upstream and downstream expansion through the service", async () => {
    const upstream = await api.traversal(ids.model, "upstream");
    expect(upstream.direction).toBe("upstream");
    expect(upstream.nodes.length).toBeGreaterThan(0);
    const down = await api.traversal("src-clinic", "downstream");
    expect(down.nodes).toContain(ids.model);
  });
});
