import { describe, expect, it } from "vitest";

import { buildCard, evidenceLine, suggestedLabel } from "../src/decisions.js";
import type { PendingRequest } from "../src/types.js";

// captured from a live cold-start session on the bundled corpus
const carCard: PendingRequest = {
  request_id: "alias:car|e-car",
  kind: "alias_merge",
  target: "car|e-car",
  suggested: "accept",
  evidence: { kind: "string_distance", pair: "car|e-car", score: 0.9167 },
  context: [
    {
      sentence_id: "s4",
      label: "car",
      highlights: [[6, 9]],
      text: "Every car needs to continuously monitor its energy level (battery).",
    },
    {
      sentence_id: "s1",
      label: "e-car",
      highlights: [[46, 52]],
      text: "The main objective of this system is to allow e-cars to coordinate with parking stations and have an adequately up-to-date view of the availability of parking spaces at each time point.",
    },
  ],
};

describe("evidenceLine", () => {
  it("formats similarity scores", () => {
    expect(evidenceLine(carCard)).toBe("similarity 0.9167");
  });

  it("formats owner vote tallies sorted by name", () => {
    const line = evidenceLine({
      request_id: "owner:energy level",
      kind: "owner",
      target: "energy level",
      suggested: "Car",
      evidence: { votes: { "E-Car": 1, Car: 1 } },
    });
    expect(line).toBe("mention votes Car: 1, E-Car: 1");
  });

  it("formats rules, producers and refinement splits", () => {
    const base = { request_id: "x", kind: "direction", target: "t" };
    expect(
      evidenceLine({ ...base, suggested: "out", evidence: { rule: "no-output" } }),
    ).toBe("rule no-output");
    expect(
      evidenceLine({ ...base, suggested: "in", evidence: { producers: ["2"] } }),
    ).toBe("also produced by 2");
    expect(
      evidenceLine({
        ...base,
        kind: "composition",
        suggested: "accept",
        evidence: { exchange: "P::a -> E::?", process: "E::a -> E::p" },
      }),
    ).toBe("split: P::a -> E::? / E::a -> E::p");
    expect(
      evidenceLine({
        ...base,
        kind: "type_override",
        suggested: "Process",
        evidence: { exchange: 0, process: 0 },
      }),
    ).toBe("verb affinity exchange=0.000 process=0.000");
    expect(evidenceLine({ ...base, suggested: "in" })).toBe("");
  });
});

describe("suggestedLabel", () => {
  it("passes strings through and serializes objects", () => {
    expect(suggestedLabel("accept")).toBe("accept");
    expect(suggestedLabel({ param: "E::?", direction: "out" })).toBe(
      '{"param":"E::?","direction":"out"}',
    );
  });
});

describe("buildCard", () => {
  it("shapes the merge card with both excerpts highlighted", () => {
    const card = buildCard(carCard);
    expect(card.id).toBe("alias:car|e-car");
    expect(card.title).toBe('Merge "car" and "e-car"?');
    expect(card.suggestion).toBe("accept");
    expect(card.actions.map((a) => a.label)).toEqual([
      "Accept: accept",
      "Keep separate",
    ]);
    expect(card.actions[1].choice).toBe("reject");
    expect(card.contexts).toHaveLength(2);
    const [car, ecar] = card.contexts;
    expect(car.sentenceId).toBe("s4");
    expect(car.segments.filter((s) => s.marked).map((s) => s.text)).toEqual(
      ["car"],
    );
    expect(
      ecar.segments.filter((s) => s.marked).map((s) => s.text),
    ).toEqual(["e-cars"]);
  });

  it("gives non-merge kinds a single accept action", () => {
    const card = buildCard({
      request_id: "direction:1(d):E-Car::plan",
      kind: "direction",
      target: "1(d):E-Car::plan",
      suggested: "in",
      evidence: { rule: "S2" },
    });
    expect(card.title).toBe("Data direction for 1(d):E-Car::plan");
    expect(card.actions).toHaveLength(1);
    expect(card.actions[0].choice).toBe("in");
    expect(card.contexts).toEqual([]);
  });

  it("falls back to kind and target for unknown kinds", () => {
    const card = buildCard({
      request_id: "z",
      kind: "mystery",
      target: "t",
      suggested: "x",
    });
    expect(card.title).toBe("mystery: t");
  });
});
