// Turns a sentence plus highlight offsets into alternating plain and
// marked segments, tolerating out-of-range or overlapping spans.

export interface Segment {
  text: string;
  marked: boolean;
}

function normalize(
  text: string,
  highlights: Array<[number, number]>,
): Array<[number, number]> {
  const clipped = highlights
    .map(([s, e]): [number, number] => [
      Math.max(0, Math.min(s, text.length)),
      Math.max(0, Math.min(e, text.length)),
    ])
    .filter(([s, e]) => e > s)
    .sort((a, b) => a[0] - b[0]);
  const merged: Array<[number, number]> = [];
  for (const span of clipped) {
    const last = merged[merged.length - 1];
    if (last && span[0] <= last[1]) {
      last[1] = Math.max(last[1], span[1]);
    } else {
      merged.push([span[0], span[1]]);
    }
  }
  return merged;
}

export function segments(
  text: string,
  highlights: Array<[number, number]>,
): Segment[] {
  const out: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of normalize(text, highlights)) {
    if (start > cursor) {
      out.push({ text: text.slice(cursor, start), marked: false });
    }
    out.push({ text: text.slice(start, end), marked: true });
    cursor = end;
  }
  if (cursor < text.length) {
    out.push({ text: text.slice(cursor), marked: false });
  }
  return out;
}
