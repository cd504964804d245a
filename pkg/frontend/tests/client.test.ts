import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, recordingTransport } from "../src/client.js";
import { FakeBackend } from "./fakeBackend.js";

describe("ApiClient", () => {
  it("unwraps successful responses", async () => {
    const backend = new FakeBackend();
    const client = new ApiClient(backend.transport);
    const problem = await client.getProblem("demo");
    expect(problem.statement).toContain("Add one");
    const session = await client.createSession("demo", "alice");
    expect(session.id).toBe("s1");
    expect(session.phase).toBe("Writing");
  });

  it("maps error bodies to ApiError with code and status", async () => {
    const backend = new FakeBackend();
    const client = new ApiClient(backend.transport);
    await client.createSession("demo", "alice");
    await client.requestHelp("s1");
    const failure = await client
      .requestMerge("s1", "m1", "m2")
      .then(() => null, (e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("merge_locked");
    expect((failure as ApiError).status).toBe(409);
  });

  it("sends arrangements in the server's wire format", async () => {
    const backend = new FakeBackend();
    const client = new ApiClient(backend.transport);
    await client.createSession("demo", "alice");
    await client.requestHelp("s1");
    const resp = await client.submitArrangement("s1", [
      { block_id: "m1", indent: 1 },
      { block_id: "m2", indent: 1 },
    ]);
    expect(resp.result.correct).toBe(true);
    expect(resp.phase).toBe("ParsonsSolved");
  });

  it("records every payload through the recording transport", async () => {
    const backend = new FakeBackend();
    const { transport, recorded } = recordingTransport(backend.transport);
    const client = new ApiClient(transport);
    await client.getProblem("demo");
    await client.createSession("demo", "alice");
    expect(recorded.map((r) => r.path)).toEqual([
      "/api/problems/demo",
      "/api/sessions",
    ]);
    expect(recorded[1]!.body).toMatchObject({ id: "s1" });
  });
});
