import { describe, expect, it } from "vitest";

import { segments } from "../src/highlight.js";

describe("segments", () => {
  it("splits around one span", () => {
    expect(segments("Every car needs", [[6, 9]])).toEqual([
      { text: "Every ", marked: false },
      { text: "car", marked: true },
      { text: " needs", marked: false },
    ]);
  });

  it("returns one plain segment without highlights", () => {
    expect(segments("plain", [])).toEqual([
      { text: "plain", marked: false },
    ]);
  });

  it("handles a span covering the whole text", () => {
    expect(segments("all", [[0, 3]])).toEqual([
      { text: "all", marked: true },
    ]);
  });

  it("merges overlapping and adjacent spans", () => {
    expect(segments("abcdefgh", [[1, 4], [3, 6], [6, 7]])).toEqual([
      { text: "a", marked: false },
      { text: "bcdefg", marked: true },
      { text: "h", marked: false },
    ]);
  });

  it("sorts spans before segmenting", () => {
    expect(segments("abcdef", [[4, 5], [0, 1]])).toEqual([
      { text: "a", marked: true },
      { text: "bcd", marked: false },
      { text: "e", marked: true },
      { text: "f", marked: false },
    ]);
  });

  it("clips out-of-range spans and drops empty ones", () => {
    expect(segments("short", [[-5, 2], [3, 99], [4, 4]])).toEqual([
      { text: "sh", marked: true },
      { text: "o", marked: false },
      { text: "rt", marked: true },
    ]);
    expect(segments("", [[0, 4]])).toEqual([]);
  });
});
