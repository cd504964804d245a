/** DOM controller for the student workflow.
 *
 * One screen hosts the write-code editor; asking for help pops up the
 * puzzle panel with the subgoal list, tray, answer area, and the merge
 * affordance that unlocks after three failed checks. After solving,
 * hovering a block fetches its explanation and clicking a token fetches
 * the token note, both memoized. Copy-back fills the editor; a passing
 * run swaps the panel to the solved puzzle, stripped of explanations,
 * next to the fill-in-the-blank menus.
 */

import { ApiClient, ApiError } from "./client.js";
import { PuzzleState } from "./state.js";
import type {
  BlockExplanation,
  ClozeView,
  FixedBlockView,
  PuzzleView,
  SessionView,
  TrayBlockView,
} from "./types.js";

const INDENT_PX = 24;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ScaffoldApp {
  private session: SessionView | null = null;
  private state: PuzzleState | null = null;
  private phase = "Writing";
  private failures = 0;
  private mergesAllowed = 0;
  private mergeSelection: string[] = [];
  private mergeMode = false;
  private pending: Promise<void> = Promise.resolve();
  private busy = false;
  private readonly blockExplanations = new Map<string, BlockExplanation>();
  private readonly atomExplanations = new Map<string, string>();
  private cloze: ClozeView | null = null;

  readonly editor = el("textarea", "editor");
  readonly runButton = el("button", "run", "Run tests");
  readonly helpButton = el("button", "help", "Help");
  readonly checkButton = el("button", "check", "Check");
  readonly mergeButton = el("button", "merge", "Combine blocks");
  readonly copyButton = el("button", "copy", "Copy to editor");
  readonly banner = el("div", "banner");
  readonly statement = el("div", "statement");
  readonly subgoalPanel = el("div", "subgoals");
  readonly failureCounter = el("div", "failures");
  readonly answerArea = el("div", "answer");
  readonly trayArea = el("div", "tray");
  readonly puzzlePanel = el("div", "puzzle-panel hidden");
  readonly clozeArea = el("div", "cloze");
  readonly popover = el("div", "popover hidden");

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {
    const editorPanel = el("div", "editor-panel");
    editorPanel.append(this.statement, this.editor, this.runButton, this.helpButton);
    const controls = el("div", "puzzle-controls");
    controls.append(
      this.checkButton,
      this.mergeButton,
      this.copyButton,
      this.failureCounter,
    );
    this.puzzlePanel.append(
      this.subgoalPanel,
      this.answerArea,
      this.trayArea,
      controls,
      this.clozeArea,
    );
    root.append(this.banner, editorPanel, this.puzzlePanel, this.popover);

    this.runButton.onclick = () => this.track(() => this.runTests());
    this.helpButton.onclick = () => this.track(() => this.requestHelp());
    this.checkButton.onclick = () => this.track(() => this.checkArrangement());
    this.mergeButton.onclick = () => this.toggleMergeMode();
    this.copyButton.onclick = () => this.track(() => this.copyBack());
    this.syncControls();
  }

  /** Resolves once no mutation request is in flight. */
  idle(): Promise<void> {
    return this.pending;
  }

  /** Serializes mutations: at most one in-flight request, buttons
   * disabled while it runs. */
  private track(op: () => Promise<void>): void {
    if (this.busy) return;
    this.busy = true;
    this.syncControls();
    this.pending = op()
      .catch((err) => this.showError(err))
      .finally(() => {
        this.busy = false;
        this.syncControls();
      });
  }

  private showError(err: unknown): void {
    if (err instanceof ApiError) {
      this.banner.textContent = `${err.code}: ${err.message}`;
    } else {
      this.banner.textContent = String(err);
    }
    this.banner.classList.add("error");
  }

  private clearBanner(): void {
    this.banner.textContent = "";
    this.banner.classList.remove("error");
  }

  private syncControls(): void {
    const active = this.phase === "ParsonsActive";
    this.runButton.disabled = this.busy || this.phase !== "Writing";
    this.helpButton.disabled = this.busy || this.phase !== "Writing";
    this.checkButton.disabled = this.busy || !active;
    this.mergeButton.disabled = this.busy || !active || this.mergesAllowed < 1;
    this.mergeButton.textContent =
      active && this.mergesAllowed < 1
        ? `Combine blocks (unlocks after 3 failures; ${this.failures} so far)`
        : "Combine blocks";
    this.copyButton.disabled = this.busy || this.phase !== "ParsonsSolved";
    this.failureCounter.textContent = `Failed checks: ${this.failures}`;
  }

  async start(problemId: string, studentId: string): Promise<void> {
    const problem = await this.client.getProblem(problemId);
    this.statement.textContent = problem.statement;
    this.session = await this.client.createSession(problemId, studentId);
    this.phase = this.session.phase;
    this.syncControls();
  }

  private get sessionId(): string {
    if (!this.session) throw new Error("no session");
    return this.session.id;
  }

  private async runTests(): Promise<void> {
    this.clearBanner();
    const resp = await this.client.submitCode(this.sessionId, this.editor.value);
    this.phase = resp.phase;
    if (!resp.result.passed) {
      this.banner.textContent = "Tests failed. Ask for help if you are stuck.";
      return;
    }
    if (resp.phase === "SelfExplanation") {
      await this.enterSelfExplanation();
    } else {
      this.banner.textContent = "All tests passed. Done.";
      this.puzzlePanel.classList.add("hidden");
    }
  }

  private async requestHelp(): Promise<void> {
    this.clearBanner();
    const resp = await this.client.requestHelp(this.sessionId);
    this.phase = "ParsonsActive";
    this.failures = 0;
    this.mergesAllowed = 0;
    this.renderSubgoals(resp.subgoals);
    this.adoptPuzzle(resp.puzzle);
    this.puzzlePanel.classList.remove("hidden");
  }

  private renderSubgoals(items: string[]): void {
    this.subgoalPanel.replaceChildren();
    this.subgoalPanel.classList.remove("collapsed");
    const list = el("ol");
    for (const item of items) list.append(el("li", "subgoal", item));
    this.subgoalPanel.append(list);
  }

  private adoptPuzzle(puzzle: PuzzleView): void {
    this.state = new PuzzleState(puzzle);
    this.mergeSelection = [];
    this.mergeMode = false;
    this.renderPuzzle();
  }

  private blockById(id: string): TrayBlockView {
    const found = this.state!.puzzle.tray_blocks.find((b) => b.id === id);
    if (!found) throw new Error(`unknown tray block ${id}`);
    return found;
  }

  private renderFixedBlock(block: FixedBlockView): HTMLElement {
    const node = el("div", "block fixed");
    node.dataset.blockId = block.id;
    node.draggable = false;
    for (const line of block.lines) {
      const lineNode = el("div", "line", line.text);
      lineNode.style.marginLeft = `${line.indent * INDENT_PX}px`;
      node.append(lineNode);
    }
    this.wireExplanations(node, block.id);
    return node;
  }

  private renderMovableLines(node: HTMLElement, block: TrayBlockView, indent: number): void {
    for (const line of block.lines) {
      const lineNode = el("div", "line", line.text);
      lineNode.style.marginLeft = `${(indent + line.indent_delta) * INDENT_PX}px`;
      node.append(lineNode);
    }
  }

  private renderPuzzle(): void {
    const state = this.state!;
    state.check();
    this.answerArea.replaceChildren();
    this.trayArea.replaceChildren();
    const solved = this.phase !== "ParsonsActive";

    // Interleave fixed blocks with placed ones by estimated position:
    // each placed block is assumed to fill as many solution slots as it
    // has lines. The server is the authority; this is presentational.
    const fixedQueue = [...state.puzzle.fixed_blocks].sort(
      (a, b) => a.position - b.position,
    );
    let consumed = 0;
    const flushFixed = () => {
      while (fixedQueue.length > 0 && fixedQueue[0]!.position <= consumed) {
        const block = fixedQueue.shift()!;
        this.answerArea.append(this.renderFixedBlock(block));
        consumed += block.lines.length;
      }
    };
    flushFixed();
    for (const placed of state.answer) {
      const block = this.blockById(placed.blockId);
      this.answerArea.append(this.renderPlacedBlock(block, placed.indent, solved));
      consumed += block.lines.length;
      flushFixed();
    }
    while (fixedQueue.length > 0) {
      const block = fixedQueue.shift()!;
      this.answerArea.append(this.renderFixedBlock(block));
    }

    if (!solved) {
      for (const id of state.tray) {
        this.trayArea.append(this.renderTrayBlock(this.blockById(id)));
      }
    }
    this.syncControls();
  }

  private renderPlacedBlock(
    block: TrayBlockView,
    indent: number,
    solved: boolean,
  ): HTMLElement {
    const node = el("div", "block placed");
    node.dataset.blockId = block.id;
    this.renderMovableLines(node, block, indent);
    if (solved) {
      node.draggable = false;
      this.wireExplanations(node, block.id);
      return node;
    }
    node.draggable = true;
    const controls = el("span", "controls");
    const button = (label: string, cls: string, fn: () => void) => {
      const b = el("button", cls, label);
      b.onclick = (ev) => {
        ev.stopPropagation();
        fn();
        this.renderPuzzle();
      };
      controls.append(b);
    };
    button("up", "move-up", () => this.state!.shift(block.id, -1));
    button("down", "move-down", () => this.state!.shift(block.id, 1));
    button("out", "to-tray", () => this.state!.remove(block.id));
    button("<", "indent-less", () => this.state!.stepIndent(block.id, -1));
    button(">", "indent-more", () => this.state!.stepIndent(block.id, 1));
    node.append(controls);
    node.onclick = () => {
      if (this.mergeMode) this.selectForMerge(block.id);
    };
    return node;
  }

  private renderTrayBlock(block: TrayBlockView): HTMLElement {
    const node = el("div", "block tray-block");
    node.dataset.blockId = block.id;
    node.draggable = true;
    this.renderMovableLines(node, block, 0);
    node.onclick = () => {
      if (this.mergeMode) return;
      this.state!.place(block.id);
      this.renderPuzzle();
    };
    return node;
  }

  private async checkArrangement(): Promise<void> {
    this.clearBanner();
    const resp = await this.client.submitArrangement(
      this.sessionId,
      this.state!.toArrangement(),
    );
    this.phase = resp.phase;
    this.mergesAllowed = resp.merges_allowed;
    if (resp.result.correct) {
      this.subgoalPanel.classList.add("collapsed");
      this.banner.textContent = "Solved. Hover a block for an explanation.";
      this.renderPuzzle();
      return;
    }
    this.failures = resp.result.attempt_number;
    const err = resp.result.first_error;
    this.banner.textContent = err
      ? `Not yet: ${err.kind} at position ${err.position + 1}`
      : "Not yet.";
    this.syncControls();
  }

  private toggleMergeMode(): void {
    if (this.mergeButton.disabled) return;
    this.mergeMode = !this.mergeMode;
    this.mergeSelection = [];
    this.mergeButton.classList.toggle("selecting", this.mergeMode);
    this.banner.textContent = this.mergeMode
      ? "Select two adjacent blocks in the answer area to combine."
      : "";
  }

  private selectForMerge(blockId: string): void {
    if (this.mergeSelection.includes(blockId)) return;
    this.mergeSelection.push(blockId);
    if (this.mergeSelection.length < 2) return;
    const [a, b] = this.mergeSelection as [string, string];
    this.mergeSelection = [];
    this.mergeMode = false;
    this.mergeButton.classList.remove("selecting");
    this.track(async () => {
      const resp = await this.client.requestMerge(this.sessionId, a, b);
      this.mergesAllowed = resp.merges_allowed;
      this.adoptPuzzle(resp.puzzle);
      this.banner.textContent = "Blocks combined. The tray was reshuffled.";
    });
  }

  /** Installs the post-solve hover and token-click explanations. */
  private wireExplanations(node: HTMLElement, blockId: string): void {
    if (this.phase !== "ParsonsSolved") return;
    node.onmouseenter = () => this.track(() => this.showBlockExplanation(blockId));
    node.onclick = () => this.track(() => this.showAtomExplanation(blockId, 0));
  }

  private async showBlockExplanation(blockId: string): Promise<void> {
    let exp = this.blockExplanations.get(blockId);
    if (!exp) {
      exp = await this.client.explainBlock(this.sessionId, blockId);
      this.blockExplanations.set(blockId, exp);
    }
    this.popover.replaceChildren(
      el("div", "behavior", exp.behavior),
      el("div", "purpose", exp.purpose),
    );
    if (exp.distractor_contrast) {
      const contrast = el("div", "contrast");
      contrast.append(
        el("div", "why-correct", exp.distractor_contrast.why_correct),
        el("div", "why-wrong", exp.distractor_contrast.why_distractor_wrong),
      );
      this.popover.append(contrast);
    }
    this.popover.classList.remove("hidden");
  }

  private async showAtomExplanation(blockId: string, atomIndex: number): Promise<void> {
    const key = `${blockId}#${atomIndex}`;
    let text = this.atomExplanations.get(key);
    if (text === undefined) {
      const exp = await this.client.explainAtom(this.sessionId, blockId, atomIndex);
      text = [exp.surface, exp.execution ?? "", exp.purpose]
        .filter((s) => s)
        .join(" ");
      this.atomExplanations.set(key, text);
    }
    this.popover.replaceChildren(el("div", "atom-note", text));
    this.popover.classList.remove("hidden");
  }

  private async copyBack(): Promise<void> {
    const resp = await this.client.copySolution(this.sessionId);
    this.editor.value = resp.code;
    this.phase = resp.phase;
    this.puzzlePanel.classList.add("hidden");
    this.popover.classList.add("hidden");
    this.banner.textContent = "Solution copied. Run the tests.";
  }

  private async enterSelfExplanation(): Promise<void> {
    const view = await this.client.getSelfExplanation(this.sessionId);
    this.cloze = view.question;
    if (view.puzzle) {
      // The solved puzzle reappears without explanations: re-adopt it in
      // a non-interactive phase so no hover or click handlers attach.
      this.state = new PuzzleState(view.puzzle);
      for (const block of view.puzzle.tray_blocks) this.state.place(block.id);
      this.renderPuzzle();
    }
    this.renderCloze();
    this.puzzlePanel.classList.remove("hidden");
    this.banner.textContent = "Fill in the blanks to finish.";
  }

  private renderCloze(): void {
    const cloze = this.cloze!;
    this.clozeArea.replaceChildren();
    const parts = cloze.template.split(/(\{\{\d+\}\})/);
    const paragraph = el("p", "cloze-text");
    for (const part of parts) {
      const marker = /^\{\{(\d+)\}\}$/.exec(part);
      if (!marker) {
        paragraph.append(document.createTextNode(part));
        continue;
      }
      const index = Number(marker[1]);
      const select = el("select", "blank");
      select.dataset.blank = String(index);
      for (const [i, option] of cloze.blanks[index]!.options.entries()) {
        const opt = el("option", undefined, option);
        opt.value = String(i);
        select.append(opt);
      }
      paragraph.append(select);
    }
    this.clozeArea.append(paragraph);
    const submit = el("button", "submit-cloze", "Submit");
    submit.onclick = () => this.track(() => this.submitCloze());
    this.clozeArea.append(submit);
  }

  private async submitCloze(): Promise<void> {
    const selects = Array.from(
      this.clozeArea.querySelectorAll<HTMLSelectElement>("select.blank"),
    ).sort((a, b) => Number(a.dataset.blank) - Number(b.dataset.blank));
    const answers = selects.map((s) => Number(s.value));
    const grade = await this.client.submitSelfExplanation(this.sessionId, answers);
    this.phase = grade.phase;
    for (const [i, select] of selects.entries()) {
      select.classList.toggle("blank-correct", grade.per_blank[i] === true);
      select.classList.toggle("blank-incorrect", grade.per_blank[i] !== true);
    }
    this.banner.textContent = grade.correct
      ? "All blanks correct. Session complete."
      : "Some blanks are wrong; the incorrect ones are marked.";
  }

  currentPhase(): string {
    return this.phase;
  }
}
