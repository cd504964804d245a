/** Local drag state for a puzzle: which blocks sit in the tray, which
 * sit in the answer area and at what indent. Fixed blocks belong to
 * neither list; they render inline and never move.
 *
 * The same arrangement rules the server enforces are mirrored here so
 * the UI can never send a request the server would reject as malformed:
 * no duplicate placements, no unknown ids, no fixed ids, indents 0-4.
 */

import type { Placement, PuzzleView } from "./types.js";

export const MIN_INDENT = 0;
export const MAX_INDENT = 4;

export interface PlacedBlock {
  blockId: string;
  indent: number;
}

export class PuzzleState {
  tray: string[];
  answer: PlacedBlock[] = [];
  private readonly trayIds: Set<string>;
  private readonly fixedIds: Set<string>;

  constructor(readonly puzzle: PuzzleView) {
    this.tray = puzzle.tray_blocks.map((b) => b.id);
    this.trayIds = new Set(this.tray);
    this.fixedIds = new Set(puzzle.fixed_blocks.map((b) => b.id));
    if (this.trayIds.size !== this.tray.length) {
      throw new Error("duplicate tray block ids");
    }
  }

  isFixed(blockId: string): boolean {
    return this.fixedIds.has(blockId);
  }

  private requireDraggable(blockId: string): void {
    if (this.fixedIds.has(blockId)) {
      throw new Error(`block ${blockId} is fixed and cannot move`);
    }
    if (!this.trayIds.has(blockId)) {
      throw new Error(`unknown block ${blockId}`);
    }
  }

  /** Move a tray block to the answer area, by default at the end. The
   * initial indent is 0; the student adjusts it with the stepper. */
  place(blockId: string, index?: number): void {
    this.requireDraggable(blockId);
    const at = this.tray.indexOf(blockId);
    if (at < 0) throw new Error(`block ${blockId} is not in the tray`);
    this.tray.splice(at, 1);
    const placed: PlacedBlock = { blockId, indent: 0 };
    const target = index === undefined ? this.answer.length : index;
    this.answer.splice(target, 0, placed);
  }

  /** Return an answer-area block to the tray. */
  remove(blockId: string): void {
    const at = this.answer.findIndex((p) => p.blockId === blockId);
    if (at < 0) throw new Error(`block ${blockId} is not placed`);
    this.answer.splice(at, 1);
    this.tray.push(blockId);
  }

  /** Move a placed block up (-1) or down (+1) within the answer area. */
  shift(blockId: string, delta: -1 | 1): void {
    const at = this.answer.findIndex((p) => p.blockId === blockId);
    if (at < 0) throw new Error(`block ${blockId} is not placed`);
    const to = at + delta;
    if (to < 0 || to >= this.answer.length) return;
    const [placed] = this.answer.splice(at, 1);
    this.answer.splice(to, 0, placed!);
  }

  /** Step a placed block's indent, clamped to the allowed range. */
  stepIndent(blockId: string, delta: -1 | 1): void {
    const placed = this.answer.find((p) => p.blockId === blockId);
    if (!placed) throw new Error(`block ${blockId} is not placed`);
    placed.indent = Math.min(
      MAX_INDENT,
      Math.max(MIN_INDENT, placed.indent + delta),
    );
  }

  toArrangement(): Placement[] {
    const seen = new Set<string>();
    for (const p of this.answer) {
      if (seen.has(p.blockId)) throw new Error(`duplicate ${p.blockId}`);
      seen.add(p.blockId);
      if (p.indent < MIN_INDENT || p.indent > MAX_INDENT) {
        throw new Error(`indent out of range on ${p.blockId}`);
      }
    }
    return this.answer.map((p) => ({ block_id: p.blockId, indent: p.indent }));
  }

  /** Every non-fixed block is in exactly one of tray or answer. */
  check(): void {
    const inTray = new Set(this.tray);
    const inAnswer = new Set(this.answer.map((p) => p.blockId));
    for (const id of inTray) {
      if (inAnswer.has(id)) throw new Error(`${id} is in both lists`);
    }
    for (const id of this.trayIds) {
      if (!inTray.has(id) && !inAnswer.has(id)) {
        throw new Error(`${id} is in neither list`);
      }
    }
    for (const id of inAnswer) {
      if (this.fixedIds.has(id)) throw new Error(`fixed ${id} was placed`);
    }
  }
}
