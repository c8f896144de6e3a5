/** Client-side input validation: invalid values never reach the network. */

/**
 * Parse a rating control's raw value. Accepts exactly the integers 1–5
 * (as numbers, or as strings of a single digit 1–5, with surrounding
 * whitespace tolerated); everything else — 0, 6, negatives, fractions
 * like 3.5, empty input, non-numeric text — yields null.
 */
export function parseRating(raw: unknown): number | null {
  if (typeof raw === "number") {
    return Number.isInteger(raw) && raw >= 1 && raw <= 5 ? raw : null;
  }
  if (typeof raw === "string") {
    const trimmed = raw.trim();
    if (!/^[1-5]$/.test(trimmed)) {
      return null;
    }
    return Number(trimmed);
  }
  return null;
}

/** A required free-text field: non-empty after trimming, or null. */
export function parseRequiredText(raw: unknown): string | null {
  if (typeof raw !== "string") {
    return null;
  }
  const trimmed = raw.trim();
  return trimmed.length > 0 ? trimmed : null;
}
