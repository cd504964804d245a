/** In-process stand-in for the tutoring API, honest enough for UI tests:
 * same routes, same JSON shapes, same phase rules, same merge lock.
 *
 * The demo problem is `def f(x): y = x + 1; return y` with the first
 * line already correct in the student's attempt, two movable blocks,
 * and one distractor (`return x`) paired with `m2`.
 */

import type { Transport, TransportResponse } from "../src/client.js";
import type { Placement, PuzzleView } from "../src/types.js";

const SOLVED_CODE = "def f(x):\n    y = x + 1\n    return y\n";

function basePuzzle(): PuzzleView {
  return {
    puzzle_id: "demo-p1",
    problem_id: "demo",
    solution_line_count: 3,
    merges_applied: 0,
    fixed_blocks: [
      { id: "f0", position: 0, lines: [{ text: "def f(x):", indent: 0 }] },
    ],
    tray_blocks: [
      { id: "d3", lines: [{ text: "return x", indent_delta: 0 }] },
      { id: "m2", lines: [{ text: "return y", indent_delta: 0 }] },
      { id: "m1", lines: [{ text: "y = x + 1", indent_delta: 0 }] },
    ],
  };
}

function mergedPuzzle(): PuzzleView {
  return {
    puzzle_id: "demo-p1",
    problem_id: "demo",
    solution_line_count: 3,
    merges_applied: 1,
    fixed_blocks: [
      { id: "f0", position: 0, lines: [{ text: "def f(x):", indent: 0 }] },
    ],
    tray_blocks: [
      {
        id: "m1+m2",
        lines: [
          { text: "y = x + 1", indent_delta: 0 },
          { text: "return y", indent_delta: 0 },
        ],
      },
      { id: "d3", lines: [{ text: "return x", indent_delta: 0 }] },
    ],
  };
}

const CLOZE = {
  template: "The function adds {{0}} to x and then {{1}} the sum.",
  blanks: [
    { options: ["one", "two", "zero"], correct: 0 },
    { options: ["discards", "returns", "prints"], correct: 1 },
  ],
};

export class FakeBackend {
  phase = "Writing";
  failures = 0;
  merges = 0;
  merged = false;
  calls: string[] = [];

  private get mergesAllowed(): number {
    return Math.max(0, this.failures - 2) - this.merges;
  }

  private currentPuzzle(): PuzzleView {
    return this.merged ? mergedPuzzle() : basePuzzle();
  }

  private correctArrangement(placements: Placement[]): boolean {
    const want = this.merged
      ? [{ block_id: "m1+m2", indent: 1 }]
      : [
          { block_id: "m1", indent: 1 },
          { block_id: "m2", indent: 1 },
        ];
    return JSON.stringify(placements) === JSON.stringify(want);
  }

  transport: Transport = async (method, path, body) => {
    this.calls.push(`${method} ${path}`);
    return this.route(method, path, body);
  };

  private ok(body: unknown, status = 200): TransportResponse {
    return { status, body };
  }

  private err(status: number, code: string, message: string): TransportResponse {
    return { status, body: { code, message } };
  }

  private route(method: string, path: string, body: unknown): TransportResponse {
    const payload = body as Record<string, unknown>;
    if (method === "GET" && path === "/api/problems/demo") {
      return this.ok({
        id: "demo",
        statement: "Add one to x and return the result.",
        title: "add one",
        author: "",
      });
    }
    if (method === "POST" && path === "/api/sessions") {
      return this.ok(
        {
          id: "s1",
          problem_id: "demo",
          student_id: payload["student_id"],
          phase: this.phase,
          latest_code: "",
          parsons_failures: 0,
          merges_allowed: 0,
          used_parsons_help: false,
          subgoals: [],
          puzzle: null,
          created: 0,
          updated: 0,
        },
        201,
      );
    }
    if (method === "POST" && path === "/api/sessions/s1/help") {
      if (this.phase !== "Writing") {
        return this.err(409, "invalid_phase", `help not available in ${this.phase}`);
      }
      this.phase = "ParsonsActive";
      this.failures = 0;
      return this.ok({
        puzzle: this.currentPuzzle(),
        subgoals: [
          "Define the function.",
          "Compute the new value.",
          "Store it.",
          "Return it.",
        ],
      });
    }
    if (method === "POST" && path === "/api/sessions/s1/parsons-attempts") {
      if (this.phase !== "ParsonsActive") {
        return this.err(409, "invalid_phase", "no active puzzle");
      }
      const placements = payload["placements"] as Placement[];
      const correct = this.correctArrangement(placements);
      if (correct) {
        this.phase = "ParsonsSolved";
      } else {
        this.failures += 1;
      }
      return this.ok({
        result: {
          correct,
          first_error: correct ? null : { position: 1, kind: "wrong-block" },
          attempt_number: this.failures + (correct ? 1 : 0),
        },
        phase: this.phase,
        merges_allowed: this.mergesAllowed,
      });
    }
    if (method === "POST" && path === "/api/sessions/s1/merges") {
      if (this.mergesAllowed < 1) {
        return this.err(409, "merge_locked", "merging unlocks after 3 failures");
      }
      const a = payload["a"];
      const b = payload["b"];
      if (!((a === "m1" && b === "m2") || (a === "m2" && b === "m1"))) {
        return this.err(422, "not_adjacent", "blocks are not adjacent");
      }
      this.merges += 1;
      this.merged = true;
      return this.ok({ puzzle: this.currentPuzzle(), merges_allowed: this.mergesAllowed });
    }
    if (method === "POST" && path === "/api/sessions/s1/copy-solution") {
      if (this.phase !== "ParsonsSolved") {
        return this.err(409, "invalid_phase", "nothing solved yet");
      }
      this.phase = "Writing";
      return this.ok({ code: SOLVED_CODE, phase: this.phase });
    }
    if (method === "POST" && path === "/api/sessions/s1/code-attempts") {
      if (this.phase !== "Writing") {
        return this.err(409, "invalid_phase", "not writing");
      }
      const passed = payload["code"] === SOLVED_CODE;
      if (passed) this.phase = "SelfExplanation";
      return this.ok({
        result: { passed, per_test: [] },
        phase: this.phase,
        self_explanation: passed
          ? { template: CLOZE.template, blanks: CLOZE.blanks.map((b) => ({ options: b.options })) }
          : null,
      });
    }
    if (method === "GET" && path === "/api/sessions/s1/self-explanation") {
      return this.ok({
        question: {
          template: CLOZE.template,
          blanks: CLOZE.blanks.map((b) => ({ options: b.options })),
        },
        puzzle: this.currentPuzzle(),
      });
    }
    if (method === "POST" && path === "/api/sessions/s1/self-explanation") {
      const answers = payload["answers"] as number[];
      const perBlank = CLOZE.blanks.map((b, i) => answers[i] === b.correct);
      const correct = perBlank.every(Boolean);
      if (correct) this.phase = "Done";
      return this.ok({ correct, per_blank: perBlank, phase: this.phase });
    }
    const block = /^\/api\/sessions\/s1\/explanations\/blocks\/([^/]+)$/.exec(path);
    if (method === "GET" && block) {
      if (this.phase !== "ParsonsSolved") {
        return this.err(409, "invalid_phase", "solve the puzzle first");
      }
      const id = block[1]!;
      return this.ok({
        block_id: id,
        behavior: `assigns or returns in ${id}`,
        purpose: "moves the computation forward",
        distractor_contrast:
          id === "m2"
            ? {
                why_correct: "returns the computed value y",
                why_distractor_wrong: "return x would skip the addition",
              }
            : null,
      });
    }
    const atom = /^\/api\/sessions\/s1\/explanations\/blocks\/([^/]+)\/atoms\/(\d+)$/.exec(
      path,
    );
    if (method === "GET" && atom) {
      if (this.phase !== "ParsonsSolved") {
        return this.err(409, "invalid_phase", "solve the puzzle first");
      }
      return this.ok({
        block_id: atom[1],
        atom_index: Number(atom[2]),
        surface: "a name the program defined",
        execution: "reads the current value",
        purpose: "feeds the next step",
      });
    }
    return this.err(404, "not_found", `${method} ${path}`);
  }
}
