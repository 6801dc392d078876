/** Minimal SVG assembly: a drawing surface with data-space scaling. */

export interface Box {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export class Plot {
  readonly width: number;
  readonly height: number;
  private readonly margin = 46;
  private readonly box: Box;
  private parts: string[] = [];

  constructor(box: Box, width = 720, height = 480) {
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) {
      throw new Error(`degenerate plot box ${JSON.stringify(box)}`);
    }
    this.box = box;
    this.width = width;
    this.height = height;
  }

  sx(x: number): number {
    const w = this.width - 2 * this.margin;
    return this.margin + ((x - this.box.x0) / (this.box.x1 - this.box.x0)) * w;
  }

  sy(y: number): number {
    const h = this.height - 2 * this.margin;
    return this.height - this.margin - ((y - this.box.y0) / (this.box.y1 - this.box.y0)) * h;
  }

  line(x0: number, y0: number, x1: number, y1: number, style: string, attrs = ""): void {
    this.parts.push(
      `<line x1="${this.sx(x0).toFixed(2)}" y1="${this.sy(y0).toFixed(2)}" ` +
        `x2="${this.sx(x1).toFixed(2)}" y2="${this.sy(y1).toFixed(2)}" ${style} ${attrs}/>`
    );
  }

  polyline(points: Array<[number, number]>, style: string, attrs = ""): void {
    const pts = points.map(([x, y]) => `${this.sx(x).toFixed(2)},${this.sy(y).toFixed(2)}`).join(" ");
    this.parts.push(`<polyline fill="none" points="${pts}" ${style} ${attrs}/>`);
  }

  circle(x: number, y: number, r: number, style: string, attrs = ""): void {
    this.parts.push(
      `<circle cx="${this.sx(x).toFixed(2)}" cy="${this.sy(y).toFixed(2)}" r="${r}" ${style} ${attrs}/>`
    );
  }

  text(x: number, y: number, s: string, anchor = "middle", size = 11): void {
    this.parts.push(
      `<text x="${this.sx(x).toFixed(2)}" y="${this.sy(y).toFixed(2)}" ` +
        `text-anchor="${anchor}" font-size="${size}" font-family="sans-serif">${esc(s)}</text>`
    );
  }

  rawText(px: number, py: number, s: string, anchor = "middle", size = 12): void {
    this.parts.push(
      `<text x="${px.toFixed(2)}" y="${py.toFixed(2)}" text-anchor="${anchor}" ` +
        `font-size="${size}" font-family="sans-serif">${esc(s)}</text>`
    );
  }

  axes(xLabel: string, yLabel: string, ticks = 5): void {
    const { x0, x1, y0, y1 } = this.box;
    const frame = `stroke="#222" stroke-width="1"`;
    this.line(x0, y0, x1, y0, frame);
    this.line(x0, y0, x0, y1, frame);
    for (let i = 0; i <= ticks; i++) {
      const x = x0 + ((x1 - x0) * i) / ticks;
      const y = y0 + ((y1 - y0) * i) / ticks;
      this.rawText(this.sx(x), this.height - this.margin + 16, trim(x));
      this.rawText(this.margin - 6, this.sy(y) + 4, trim(y), "end");
    }
    this.rawText(this.width / 2, this.height - 10, xLabel);
    this.parts.push(
      `<text x="12" y="${this.height / 2}" text-anchor="middle" font-size="12" ` +
        `font-family="sans-serif" transform="rotate(-90 12 ${this.height / 2})">${esc(yLabel)}</text>`
    );
  }

  render(title: string): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="100%" height="100%" fill="white"/>\n` +
      `<text x="${this.width / 2}" y="20" text-anchor="middle" font-size="14" ` +
      `font-family="sans-serif">${esc(title)}</text>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function trim(v: number): string {
  const s = v.toPrecision(3);
  return String(Number(s));
}
