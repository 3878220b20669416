// Usage: node dist/plotProfiles.js <weak.csv> [strong.csv] <out.svg>
import { writeFileSync } from 'fs'
import { readCsv } from './csv.js'
import { renderProfiles } from './profiles.js'

export function main(argv: string[]): number {
  if (argv.length < 2 || argv.length > 3) {
    console.error('usage: plot-profiles <profile.csv> [second_profile.csv] <out.svg>')
    return 1
  }
  const out = argv[argv.length - 1]
  const inputs = argv.slice(0, -1)
  try {
    const tables = inputs.map(readCsv)
    const titles = inputs.length === 2 ? ['weak shock', 'strong shock'] : ['shock profile']
    writeFileSync(out, renderProfiles(tables, titles))
  } catch (err) {
    console.error(`plot-profiles failed: ${(err as Error).message}`)
    return 1
  }
  console.log(out)
  return 0
}

if (process.argv[1] && process.argv[1].endsWith('plotProfiles.js')) {
  process.exit(main(process.argv.slice(2)))
}
