/** Gateway color names mapped to screen colors, one-to-one and exact:
 * the board must show precisely the color each tile reports. */

export const COLOR_CSS: Record<string, string> = {
  white: "#ffffff",
  red: "#e53935",
  orange: "#fb8c00",
  yellow: "#fdd835",
  green: "#43a047",
  cyan: "#00acc1",
  blue: "#1e88e5",
  purple: "#8e24aa",
  magenta: "#d81b60",
};

export function cssForColor(name: string): string {
  const css = COLOR_CSS[name];
  if (css === undefined) {
    throw new Error(`gateway reported unknown color ${JSON.stringify(name)}`);
  }
  return css;
}
