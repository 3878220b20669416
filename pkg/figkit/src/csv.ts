import { readFileSync } from 'fs'

export interface Table {
  columns: string[]
  rows: string[][]
}

export class CsvFormatError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0)
  if (lines.length < 2) {
    throw new CsvFormatError('CSV needs a header row and at least one data row')
  }
  const columns = lines[0].split(',').map((c) => c.trim())
  const rows: string[][] = []
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(',')
    if (parts.length !== columns.length) {
      throw new CsvFormatError(`row ${i} has ${parts.length} fields, expected ${columns.length}`)
    }
    rows.push(parts)
  }
  return { columns, rows }
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, 'utf8'))
}

export function rawColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name)
  if (idx < 0) {
    throw new CsvFormatError(`missing column '${name}' (have: ${table.columns.join(', ')})`)
  }
  return table.rows.map((r) => r[idx])
}

export function column(table: Table, name: string): number[] {
  return rawColumn(table, name).map((s, i) => {
    const x = Number(s)
    if (Number.isNaN(x) && s.trim().toLowerCase() !== 'nan') {
      throw new CsvFormatError(`column '${name}' row ${i} is not numeric: '${s}'`)
    }
    return x
  })
}

export function requireColumns(table: Table, names: string[]): void {
  for (const n of names) {
    if (!table.columns.includes(n)) {
      throw new CsvFormatError(`missing column '${n}' (have: ${table.columns.join(', ')})`)
    }
  }
}
