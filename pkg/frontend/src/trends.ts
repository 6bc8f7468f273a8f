// Trend table for one type: year columns, percentage cells straight from
// the API payload (tooltips show the raw value), entity labels link to the
// infobox view.

import { ApiClient, ApiError, PanelGuard, TrendTable } from './api.js'
import { clear, el, errorBanner } from './dom.js'

export class TrendsView {
  private guard = new PanelGuard()
  current: { typeId: string; from: number; to: number } | null = null

  constructor(
    private api: ApiClient,
    private container: HTMLElement,
    private onEntity: (entityId: string) => void,
  ) {}

  async show(typeId: string, from: number, to: number): Promise<void> {
    this.current = { typeId, from, to }
    const ticket = this.guard.begin()
    clear(this.container)
    this.container.append(el('p', { class: 'loading', text: `loading trends for ${typeId}...` }))
    try {
      const { data, version } = await this.api.get<TrendTable>(
        `/types/${encodeURIComponent(typeId)}/trends?from=${from}&to=${to}`,
      )
      if (!this.guard.shouldRender(ticket, version)) return
      this.render(data)
    } catch (err) {
      clear(this.container)
      this.container.append(
        errorBanner(err instanceof ApiError ? err.message : 'failed to load trends', () => {
          void this.show(typeId, from, to)
        }),
      )
    }
  }

  private render(table: TrendTable): void {
    clear(this.container)
    this.container.append(el('h2', { text: `Trends for ${table.type}` }))
    if (table.rows.length === 0) {
      this.container.append(el('p', { class: 'empty', text: 'no entities with dated evidence in this range' }))
      return
    }
    const head = el('tr', {}, [el('th', { text: 'entity' })])
    for (const year of table.years) {
      head.append(el('th', { text: String(year) }))
    }
    head.append(el('th', { text: 'total' }))
    const body = el('tbody')
    for (const row of table.rows) {
      const tr = el('tr', { 'data-entity': row.id })
      const link = el('button', { class: 'entity-link', text: row.label })
      link.addEventListener('click', () => this.onEntity(row.id))
      tr.append(el('td', {}, [link]))
      for (const year of table.years) {
        const value = row.cells[String(year)] ?? 0
        const cell = el('td', {
          class: value > 0 ? 'cell filled' : 'cell',
          title: `${value}%`,
          text: value > 0 ? `${value}%` : '·',
        })
        tr.append(cell)
      }
      tr.append(el('td', { class: 'total', text: String(row.total) }))
      body.append(tr)
    }
    const tableEl = el('table', { class: 'trend-table' }, [el('thead', {}, [head]), body])
    this.container.append(tableEl)
  }
}
