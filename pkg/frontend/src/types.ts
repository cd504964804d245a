/** Wire types for the tutoring API. Mirrors the server's public JSON
 * exactly; tray blocks deliberately carry no ordering or pairing data. */

export interface FixedLine {
  text: string;
  indent: number;
}

export interface TrayLine {
  text: string;
  indent_delta: number;
}

export interface FixedBlockView {
  id: string;
  position: number;
  lines: FixedLine[];
}

export interface TrayBlockView {
  id: string;
  lines: TrayLine[];
}

export interface PuzzleView {
  puzzle_id: string;
  problem_id: string;
  solution_line_count: number;
  merges_applied: number;
  fixed_blocks: FixedBlockView[];
  tray_blocks: TrayBlockView[];
}

export interface SessionView {
  id: string;
  problem_id: string;
  student_id: string;
  phase: string;
  latest_code: string;
  parsons_failures: number;
  merges_allowed: number;
  used_parsons_help: boolean;
  subgoals: string[];
  puzzle: PuzzleView | null;
  created: number;
  updated: number;
}

export interface Placement {
  block_id: string;
  indent: number;
}

export interface FirstError {
  position: number;
  kind: string;
}

export interface GradeResult {
  correct: boolean;
  first_error: FirstError | null;
  attempt_number: number;
}

export interface ParsonsAttemptResponse {
  result: GradeResult;
  phase: string;
  merges_allowed: number;
}

export interface TestOutcome {
  index: number;
  passed: boolean;
  observed: string;
  duration_ms: number;
}

export interface CodeEvalResult {
  passed: boolean;
  per_test: TestOutcome[];
}

export interface ClozeView {
  template: string;
  blanks: { options: string[] }[];
}

export interface CodeAttemptResponse {
  result: CodeEvalResult;
  phase: string;
  self_explanation: ClozeView | null;
}

export interface HelpResponse {
  puzzle: PuzzleView;
  subgoals: string[];
}

export interface MergeResponse {
  puzzle: PuzzleView;
  merges_allowed: number;
}

export interface CopySolutionResponse {
  code: string;
  phase: string;
}

export interface DistractorContrast {
  why_correct: string;
  why_distractor_wrong: string;
}

export interface BlockExplanation {
  block_id: string;
  behavior: string;
  purpose: string;
  distractor_contrast: DistractorContrast | null;
}

export interface AtomExplanation {
  block_id: string;
  atom_index: number;
  surface: string;
  execution: string | null;
  purpose: string;
}

export interface SelfExplanationView {
  question: ClozeView;
  puzzle: PuzzleView | null;
}

export interface ClozeGradeResponse {
  correct: boolean;
  per_blank: boolean[];
  phase: string;
}

export interface ProblemView {
  id: string;
  statement: string;
  title: string;
  author: string;
}
