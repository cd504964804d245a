export { ApiClient, ApiError, fetchTransport, recordingTransport } from "./client.js";
export type { Transport, TransportResponse } from "./client.js";
export { PuzzleState, MAX_INDENT, MIN_INDENT } from "./state.js";
export { ScaffoldApp } from "./app.js";
export type * from "./types.js";
