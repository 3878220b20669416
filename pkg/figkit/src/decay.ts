import { Table, column, requireColumns } from './csv.js'
import { Panel, Svg } from './svg.js'
import { extent, linearScale, logScale, positiveExtent } from './scale.js'
import { loglogFit } from './fit.js'

export const DECAY_SERIES = ['rel_entropy_weighted', 'g', 'sup_perturbation']
const COLORS = ['#1f66ad', '#c23b22', '#2a9d5c', '#9456c4']

/** Diagnostics series: log-scale decay curves plus X(t)/t on a linear axis. */
export function renderDecay(table: Table): string {
  requireColumns(table, ['t', 'X', 'Xdot', ...DECAY_SERIES])
  const t = column(table, 't')
  const series = DECAY_SERIES.map((name) => column(table, name))
  series.push(column(table, 'Xdot').map(Math.abs))
  const names = [...DECAY_SERIES, '|Xdot|']

  const panelW = 430
  const panelH = 320
  const margin = { left: 75, right: 25, top: 40, bottom: 55 }
  const width = 2 * (panelW + margin.left + margin.right)
  const svg = new Svg(width, panelH + margin.top + margin.bottom)

  const allPos = ([] as number[]).concat(...series)
  const left: Panel = {
    x0: margin.left,
    y0: margin.top,
    width: panelW,
    height: panelH,
    xScale: linearScale(extent(t), [margin.left, margin.left + panelW]),
    yScale: logScale(positiveExtent(allPos), [margin.top + panelH, margin.top]),
  }
  svg.axes(left, 'time', 'decay functionals', 'perturbation decay', true)
  series.forEach((ys, i) => {
    svg.curve(left, t, ys, COLORS[i % COLORS.length])
    svg.text(margin.left + panelW - 8, margin.top + 16 + 14 * i, names[i], { anchor: 'end', size: 11 })
    svg.line(margin.left + panelW - 70, margin.top + 12 + 14 * i, margin.left + panelW - 58, margin.top + 12 + 14 * i, COLORS[i % COLORS.length], 2)
  })

  const xOverT = t.map((tt, i) => (tt > 0 ? column(table, 'X')[i] / tt : 0))
  const x0r = panelW + margin.left + margin.right + margin.left
  const right: Panel = {
    x0: x0r,
    y0: margin.top,
    width: panelW,
    height: panelH,
    xScale: linearScale(extent(t), [x0r, x0r + panelW]),
    yScale: linearScale(extent(xOverT), [margin.top + panelH, margin.top]),
  }
  svg.axes(right, 'time', 'shift / time', 'shift sublinearity')
  svg.curve(right, t, xOverT, COLORS[0])
  return svg.render()
}

/** Sweep aggregate: log-log residual scaling with the fitted slope annotated. */
export function renderScaling(table: Table, xName: string, yNames: string[]): string {
  requireColumns(table, [xName, ...yNames])
  const xs = column(table, xName)
  const panelW = 430
  const panelH = 320
  const margin = { left: 75, right: 25, top: 40, bottom: 55 }
  const svg = new Svg(panelW + margin.left + margin.right, panelH + margin.top + margin.bottom)
  const allY = ([] as number[]).concat(...yNames.map((n) => column(table, n)))
  const panel: Panel = {
    x0: margin.left,
    y0: margin.top,
    width: panelW,
    height: panelH,
    xScale: logScale(positiveExtent(xs), [margin.left, margin.left + panelW]),
    yScale: logScale(positiveExtent(allY), [margin.top + panelH, margin.top]),
  }
  svg.axes(panel, xName, 'residual / rate', 'scaling law', true)
  yNames.forEach((name, i) => {
    const ys = column(table, name)
    const fit = loglogFit(xs, ys)
    xs.forEach((x, k) => svg.circle(panel.xScale(x), panel.yScale(ys[k]), 3, COLORS[i % COLORS.length]))
    const xFit = positiveExtent(xs)
    const yFit = xFit.map((x) => Math.exp(fit.intercept + fit.slope * Math.log(x)))
    svg.curve(panel, xFit as unknown as number[], yFit, COLORS[i % COLORS.length], 1, '4 3')
    svg.text(margin.left + 10, margin.top + 16 + 14 * i, `${name}: slope ${fit.slope.toFixed(3)}`, {
      anchor: 'start',
      size: 11,
    })
  })
  return svg.render()
}

export function isSweepTable(table: Table): boolean {
  return table.columns.includes('value') && table.columns.includes('param')
}
