import { describe, expect, it } from "vitest";

import { ApiClient, ApiFailure, compliancePath, searchPath } from "../src/api.js";

function fakeFetch(status: number, body: unknown) {
  const calls: string[] = [];
  const impl = async (url: string) => {
    calls.push(url);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}

describe("url building", () => {
  it("encodes search criteria", () => {
    expect(searchPath({ text: "diabetes cohort", kinds: ["dataset", "study"], limit: 5 })).toBe(
      "/search?text=diabetes+cohort&kind=dataset&kind=study&limit=5",
    );
  });

  it("encodes blob ids in compliance paths (colon included)", () => {
    const path = compliancePath("sha256:abc", ["src-a", "src-b"]);
    expect(path).toBe("/audit/compliance/sha256%3Aabc?approved=src-a%2Csrc-b");
  });

  it("omits the approved query when empty", () => {
    expect(compliancePath("m", [])).toBe("/audit/compliance/m");
  });
});

describe("ApiClient", () => {
  it("returns parsed bodies verbatim", async () => {
    const payload = [{ node_id: "n", node_kind: "study", name: "", snippet: "s", score: 3 }];
    const { impl, calls } = fakeFetch(200, payload);
    const client = new ApiClient("http://lake.local/", impl);
    const hits = await client.search({ text: "s" });
    expect(hits).toEqual(payload);
    expect(calls).toEqual(["http://lake.local/search?text=s"]);
  });

  it("strips trailing slashes from the base url", () => {
    const client = new ApiClient("http://lake.local///");
    expect(client.baseUrl).toBe("http://lake.local");
  });

  it("raises ApiFailure with the service error code", async () => {
    const { impl } = fakeFetch(404, { status: 404, code: "not_found", message: "no such node" });
    const client = new ApiClient("http://lake.local", impl);
    await expect(client.record("ghost")).rejects.toMatchObject({
      status: 404,
      code: "not_found",
      message: "no such node",
    });
  });

  it("wraps network failures as status 0", async () => {
    const client = new ApiClient("http://lake.local", async () => {
      throw new Error("refused");
    });
    const failure = await client.health().catch((err) => err as ApiFailure);
    expect(failure.status).toBe(0);
    expect(failure.code).toBe("unreachable");
  });
});
