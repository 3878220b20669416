import { Scale } from './scale.js'

export interface Panel {
  x0: number
  y0: number
  width: number
  height: number
  xScale: Scale
  yScale: Scale
}

const fmt = (v: number): string => {
  if (v === 0) return '0'
  const a = Math.abs(v)
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(4)))
  return v.toExponential(1)
}

export class Svg {
  private parts: string[] = []
  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    )
  }

  raw(s: string): void {
    this.parts.push(s)
  }

  text(x: number, y: number, s: string, opts: { anchor?: string; size?: number; rotate?: number } = {}): void {
    const anchor = opts.anchor ?? 'middle'
    const size = opts.size ?? 12
    const transform = opts.rotate ? ` transform="rotate(${opts.rotate} ${x} ${y})"` : ''
    this.parts.push(
      `<text x="${x}" y="${y}" text-anchor="${anchor}" font-size="${size}"${transform}>${escapeXml(s)}</text>`,
    )
  }

  polyline(pts: Array<[number, number]>, color: string, width = 1.5, dash = ''): void {
    const d = pts
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y))
      .map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`)
      .join(' ')
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : ''
    this.parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`)
  }

  line(x1: number, y1: number, x2: number, y2: number, color = '#888', width = 1, dash = ''): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : ''
    this.parts.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" y2="${y2.toFixed(2)}" ` +
        `stroke="${color}" stroke-width="${width}"${dashAttr}/>`,
    )
  }

  circle(x: number, y: number, r: number, color: string): void {
    this.parts.push(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${color}"/>`)
  }

  axes(panel: Panel, xLabel: string, yLabel: string, title = '', logY = false): void {
    const { x0, y0, width, height, xScale, yScale } = panel
    this.line(x0, y0 + height, x0 + width, y0 + height, '#222')
    this.line(x0, y0, x0, y0 + height, '#222')
    for (const t of xScale.ticks()) {
      const px = xScale(t)
      this.line(px, y0 + height, px, y0 + height + 4, '#222')
      this.text(px, y0 + height + 16, fmt(t), { size: 10 })
    }
    for (const t of yScale.ticks()) {
      const py = yScale(t)
      this.line(x0 - 4, py, x0, py, '#222')
      this.text(x0 - 7, py + 3, logY ? `1e${Math.round(Math.log10(t))}` : fmt(t), { anchor: 'end', size: 10 })
    }
    this.text(x0 + width / 2, y0 + height + 32, xLabel, { size: 12 })
    this.text(x0 - 46, y0 + height / 2, yLabel, { size: 12, rotate: -90 })
    if (title) this.text(x0 + width / 2, y0 - 8, title, { size: 13 })
  }

  curve(panel: Panel, xs: number[], ys: number[], color: string, width = 1.5, dash = ''): void {
    const pts: Array<[number, number]> = []
    for (let i = 0; i < xs.length; i++) pts.push([panel.xScale(xs[i]), panel.yScale(ys[i])])
    this.polyline(pts, color, width, dash)
  }

  render(): string {
    return this.parts.join('\n') + '\n</svg>\n'
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}
