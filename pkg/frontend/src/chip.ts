/** Bits badge shown on the output chip, e.g. "2.6 bits".
 *
 * Mirrors the server's display rule: one decimal, rounding half away
 * from zero, negative values keep their sign, exact zero is unsigned.
 * The value itself always comes from an API response.
 */
export function chipRating(infoacc: number): string {
  const scaled = Math.floor(Math.abs(infoacc) * 10 + 0.5) / 10;
  const value = scaled === 0 ? 0 : Math.sign(infoacc) * scaled;
  return `${value.toFixed(1)} bits`;
}

export const PLACEHOLDER_RATING = "0.0 bits";
