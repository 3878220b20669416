// Usage: node dist/plotDecay.js <diagnostics.csv|sweep.csv> <out.svg>
import { writeFileSync } from 'fs'
import { readCsv } from './csv.js'
import { isSweepTable, renderDecay, renderScaling } from './decay.js'

export function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error('usage: plot-decay <diagnostics.csv | sweep.csv> <out.svg>')
    return 1
  }
  const [input, out] = argv
  try {
    const table = readCsv(input)
    if (isSweepTable(table)) {
      const candidates = ['tail_rate_left', 'tail_rate_right', 'diffusion_residual_right'].filter((c) =>
        table.columns.includes(c),
      )
      writeFileSync(out, renderScaling(table, 'delta_s', candidates))
    } else {
      writeFileSync(out, renderDecay(table))
    }
  } catch (err) {
    console.error(`plot-decay failed: ${(err as Error).message}`)
    return 1
  }
  console.log(out)
  return 0
}

if (process.argv[1] && process.argv[1].endsWith('plotDecay.js')) {
  process.exit(main(process.argv.slice(2)))
}
