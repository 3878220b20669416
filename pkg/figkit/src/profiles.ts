import { Table, column, requireColumns } from './csv.js'
import { Panel, Svg } from './svg.js'
import { extent, linearScale } from './scale.js'

export const PROFILE_COLUMNS = ['xi', 'v', 'u', 'w', 'dv', 'ddv']

interface Annotations {
  xiMid: number
  xiInfl: number
}

function crossing(xs: number[], ys: number[], target: number): number {
  for (let i = 0; i + 1 < ys.length; i++) {
    if ((ys[i] - target) * (ys[i + 1] - target) <= 0 && ys[i] !== ys[i + 1]) {
      const t = (target - ys[i]) / (ys[i + 1] - ys[i])
      return xs[i] + t * (xs[i + 1] - xs[i])
    }
  }
  return NaN
}

export function annotations(table: Table): Annotations {
  const xi = column(table, 'xi')
  const v = column(table, 'v')
  const dv = column(table, 'dv')
  const [vLo, vHi] = extent(v)
  const xiMid = crossing(xi, v, 0.5 * (vLo + vHi))
  let best = 0
  for (let i = 1; i < dv.length; i++) if (dv[i] > dv[best]) best = i
  return { xiMid, xiInfl: xi[best] }
}

function drawProfilePanel(svg: Svg, panel: Panel, table: Table, title: string): void {
  const xi = column(table, 'xi')
  const v = column(table, 'v')
  svg.axes(panel, 'wave coordinate', 'specific volume', title)
  svg.curve(panel, xi, v, '#1f66ad', 1.8)
  const ann = annotations(table)
  if (Number.isFinite(ann.xiMid)) {
    const px = panel.xScale(ann.xiMid)
    svg.line(px, panel.y0, px, panel.y0 + panel.height, '#999', 1, '4 3')
    svg.text(px, panel.y0 + 12, 'midpoint', { size: 10 })
  }
  if (Number.isFinite(ann.xiInfl)) {
    const px = panel.xScale(ann.xiInfl)
    svg.line(px, panel.y0, px, panel.y0 + panel.height, '#c23b22', 1, '2 3')
    svg.text(px, panel.y0 + 24, 'inflection', { size: 10 })
  }
}

/** Render one or two profile panels (v against the wave coordinate). */
export function renderProfiles(tables: Table[], titles: string[]): string {
  for (const t of tables) requireColumns(t, PROFILE_COLUMNS)
  const nPanels = tables.length
  const panelW = 380
  const panelH = 300
  const margin = { left: 70, right: 25, top: 40, bottom: 50 }
  const width = nPanels * (panelW + margin.left + margin.right)
  const svg = new Svg(width, panelH + margin.top + margin.bottom)
  tables.forEach((table, i) => {
    const xi = column(table, 'xi')
    const v = column(table, 'v')
    const x0 = i * (panelW + margin.left + margin.right) + margin.left
    const [vLo, vHi] = extent(v)
    const pad = 0.06 * (vHi - vLo)
    const panel: Panel = {
      x0,
      y0: margin.top,
      width: panelW,
      height: panelH,
      xScale: linearScale(extent(xi), [x0, x0 + panelW]),
      yScale: linearScale([vLo - pad, vHi + pad], [margin.top + panelH, margin.top]),
    }
    drawProfilePanel(svg, panel, table, titles[i] ?? '')
  })
  return svg.render()
}
