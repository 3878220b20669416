export interface Scale {
  (value: number): number
  ticks(): number[]
  domain: [number, number]
  range: [number, number]
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain
  const [r0, r1] = range
  const span = d1 - d0 || 1
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale
  fn.domain = domain
  fn.range = range
  fn.ticks = () => niceTicks(d0, d1, 6)
  return fn
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.max(domain[0], Number.MIN_VALUE)
  const hi = Math.max(domain[1], lo * 10)
  const l0 = Math.log10(lo)
  const l1 = Math.log10(hi)
  const [r0, r1] = range
  const span = l1 - l0 || 1
  const fn = ((v: number) => r0 + ((Math.log10(Math.max(v, Number.MIN_VALUE)) - l0) / span) * (r1 - r0)) as Scale
  fn.domain = [lo, hi]
  fn.range = range
  fn.ticks = () => {
    const out: number[] = []
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(e >= 0 ? 10 ** e : 1 / 10 ** -e) // exact decades; `10 ** -e` may misround
    }
    return out.length >= 2 ? out : [lo, hi]
  }
  return fn
}

export function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo]
  const rawStep = (hi - lo) / count
  const mag = 10 ** Math.floor(Math.log10(rawStep))
  const norm = rawStep / mag
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag
  const start = Math.ceil(lo / step) * step
  const out: number[] = []
  for (let v = start; v <= hi + 1e-12 * step; v += step) out.push(Number(v.toPrecision(12)))
  return out
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (!Number.isFinite(v)) continue
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (!Number.isFinite(lo)) return [0, 1]
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi]
}

export function positiveExtent(values: number[]): [number, number] {
  const pos = values.filter((v) => Number.isFinite(v) && v > 0)
  if (pos.length === 0) return [1e-16, 1]
  return extent(pos) as [number, number]
}
