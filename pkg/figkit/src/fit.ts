export interface Fit {
  slope: number
  intercept: number
}

export function linearFit(xs: number[], ys: number[]): Fit {
  const n = xs.length
  if (n < 2) throw new Error('fit needs at least two points')
  let sx = 0
  let sy = 0
  let sxx = 0
  let sxy = 0
  for (let i = 0; i < n; i++) {
    sx += xs[i]
    sy += ys[i]
    sxx += xs[i] * xs[i]
    sxy += xs[i] * ys[i]
  }
  const slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
  return { slope, intercept: (sy - slope * sx) / n }
}

export function loglogFit(xs: number[], ys: number[]): Fit {
  const pairs = xs.map((x, i) => [x, ys[i]]).filter(([x, y]) => x > 0 && y > 0)
  if (pairs.length < 2) throw new Error('log-log fit needs at least two positive points')
  return linearFit(
    pairs.map(([x]) => Math.log(x)),
    pairs.map(([, y]) => Math.log(y)),
  )
}
