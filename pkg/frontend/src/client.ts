/** Typed HTTP client for the tutoring API.
 *
 * The transport is injectable so tests can run against a fake backend,
 * and so the e2e test can record every payload that crosses the wire.
 */

import type {
  AtomExplanation,
  BlockExplanation,
  ClozeGradeResponse,
  CodeAttemptResponse,
  CopySolutionResponse,
  HelpResponse,
  MergeResponse,
  ParsonsAttemptResponse,
  Placement,
  ProblemView,
  SelfExplanationView,
  SessionView,
} from "./types.js";

export interface TransportResponse {
  status: number;
  body: unknown;
}

export type Transport = (
  method: string,
  path: string,
  body?: unknown,
) => Promise<TransportResponse>;

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export function fetchTransport(baseUrl: string): Transport {
  return async (method, path, body) => {
    const resp = await fetch(baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return { status: resp.status, body: await resp.json() };
  };
}

/** Wraps a transport and keeps every response body for later inspection. */
export function recordingTransport(inner: Transport): {
  transport: Transport;
  recorded: { method: string; path: string; body: unknown }[];
} {
  const recorded: { method: string; path: string; body: unknown }[] = [];
  const transport: Transport = async (method, path, body) => {
    const resp = await inner(method, path, body);
    recorded.push({ method, path, body: resp.body });
    return resp;
  };
  return { transport, recorded };
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.transport(method, path, body);
    if (resp.status >= 400) {
      const doc = resp.body as { code?: string; message?: string };
      throw new ApiError(
        doc.code ?? "unknown",
        resp.status,
        doc.message ?? `request failed with status ${resp.status}`,
      );
    }
    return resp.body as T;
  }

  getProblem(problemId: string): Promise<ProblemView> {
    return this.call("GET", `/api/problems/${problemId}`);
  }

  createSession(problemId: string, studentId: string): Promise<SessionView> {
    return this.call("POST", "/api/sessions", {
      problem_id: problemId,
      student_id: studentId,
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.call("GET", `/api/sessions/${sessionId}`);
  }

  submitCode(sessionId: string, code: string): Promise<CodeAttemptResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/code-attempts`, { code });
  }

  requestHelp(sessionId: string): Promise<HelpResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/help`);
  }

  submitArrangement(
    sessionId: string,
    placements: Placement[],
  ): Promise<ParsonsAttemptResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/parsons-attempts`, {
      placements,
    });
  }

  requestMerge(sessionId: string, a: string, b: string): Promise<MergeResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/merges`, { a, b });
  }

  copySolution(sessionId: string): Promise<CopySolutionResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/copy-solution`);
  }

  explainBlock(sessionId: string, blockId: string): Promise<BlockExplanation> {
    return this.call(
      "GET",
      `/api/sessions/${sessionId}/explanations/blocks/${blockId}`,
    );
  }

  explainAtom(
    sessionId: string,
    blockId: string,
    atomIndex: number,
  ): Promise<AtomExplanation> {
    return this.call(
      "GET",
      `/api/sessions/${sessionId}/explanations/blocks/${blockId}/atoms/${atomIndex}`,
    );
  }

  getSelfExplanation(sessionId: string): Promise<SelfExplanationView> {
    return this.call("GET", `/api/sessions/${sessionId}/self-explanation`);
  }

  submitSelfExplanation(
    sessionId: string,
    answers: number[],
  ): Promise<ClozeGradeResponse> {
    return this.call("POST", `/api/sessions/${sessionId}/self-explanation`, {
      answers,
    });
  }
}
