// View model for one pending decision card. DOM-free so the shaping
// logic is unit testable; app.ts turns cards into elements.

import { segments, Segment } from "./highlight.js";
import type { PendingRequest } from "./types.js";

export interface CardContext {
  sentenceId: string;
  label: string;
  segments: Segment[];
}

export interface CardAction {
  label: string;
  choice: unknown;
}

export interface Card {
  id: string;
  kind: string;
  target: string;
  title: string;
  suggestion: string;
  evidence: string;
  actions: CardAction[];
  contexts: CardContext[];
}

const KIND_TITLES: Record<string, (target: string) => string> = {
  alias_merge: (t) => `Merge "${t.split("|").join('" and "')}"?`,
  owner: (t) => `Which component owns "${t}"?`,
  direction: (t) => `Data direction for ${t}`,
  type_override: (t) => `Requirement type for ${t}`,
  composition: (t) => `Composition step ${t}`,
};

export function suggestedLabel(suggested: unknown): string {
  if (typeof suggested === "string") {
    return suggested;
  }
  return JSON.stringify(suggested);
}

export function evidenceLine(req: PendingRequest): string {
  const ev = req.evidence ?? {};
  if (typeof ev.score === "number") {
    return `similarity ${ev.score.toFixed(4)}`;
  }
  if (ev.votes && typeof ev.votes === "object") {
    const votes = ev.votes as Record<string, number>;
    const parts = Object.keys(votes)
      .sort()
      .map((name) => `${name}: ${votes[name]}`);
    return `mention votes ${parts.join(", ")}`;
  }
  if (typeof ev.rule === "string") {
    return `rule ${ev.rule}`;
  }
  if (Array.isArray(ev.producers)) {
    return `also produced by ${ev.producers.join(", ")}`;
  }
  if (typeof ev.exchange === "string" && typeof ev.process === "string") {
    return `split: ${ev.exchange} / ${ev.process}`;
  }
  if (typeof ev.exchange === "number" && typeof ev.process === "number") {
    return `verb affinity exchange=${ev.exchange.toFixed(3)} process=${ev.process.toFixed(3)}`;
  }
  return "";
}

export function buildCard(req: PendingRequest): Card {
  const title = KIND_TITLES[req.kind]
    ? KIND_TITLES[req.kind](req.target)
    : `${req.kind}: ${req.target}`;
  const actions: CardAction[] = [
    { label: `Accept: ${suggestedLabel(req.suggested)}`, choice: req.suggested },
  ];
  if (req.kind === "alias_merge") {
    actions.push({ label: "Keep separate", choice: "reject" });
  }
  return {
    id: req.request_id,
    kind: req.kind,
    target: req.target,
    title,
    suggestion: suggestedLabel(req.suggested),
    evidence: evidenceLine(req),
    actions,
    contexts: (req.context ?? []).map((c) => ({
      sentenceId: c.sentence_id,
      label: c.label,
      segments: segments(c.text, c.highlights),
    })),
  };
}
