// Infobox for one entity. Induced facts carry sentence evidence which opens
// in a drawer; facts imported from the background KB show a KB badge
// instead. A 404 renders a not-found panel.

import { ApiClient, ApiError, Infobox, InfoboxObject, PanelGuard } from './api.js'
import { clear, el, errorBanner } from './dom.js'

export class InfoboxView {
  private guard = new PanelGuard()

  constructor(private api: ApiClient, private container: HTMLElement) {}

  async show(entityId: string): Promise<void> {
    const ticket = this.guard.begin()
    clear(this.container)
    this.container.append(el('p', { class: 'loading', text: `loading infobox for ${entityId}...` }))
    try {
      const { data, version } = await this.api.get<Infobox>(
        `/entities/${encodeURIComponent(entityId)}/infobox`,
      )
      if (!this.guard.shouldRender(ticket, version)) return
      this.render(data)
    } catch (err) {
      clear(this.container)
      if (err instanceof ApiError && err.status === 404) {
        this.container.append(
          el('div', { class: 'not-found' }, [
            el('h2', { text: 'Entity not found' }),
            el('p', { text: `No entity with id ${entityId} is present in the graph.` }),
          ]),
        )
        return
      }
      this.container.append(
        errorBanner(err instanceof ApiError ? err.message : 'failed to load infobox', () => {
          void this.show(entityId)
        }),
      )
    }
  }

  private render(box: Infobox): void {
    clear(this.container)
    this.container.append(
      el('h2', { text: box.label }),
      el('p', { class: 'entity-meta', text: `${box.id} · types: ${box.types.join(', ')}` }),
    )
    const drawer = el('aside', { class: 'evidence-drawer', hidden: 'hidden' })
    if (box.rows.length === 0) {
      this.container.append(el('p', { class: 'empty', text: 'no facts for this entity yet' }))
      this.container.append(drawer)
      return
    }
    const list = el('dl', { class: 'infobox' })
    for (const row of box.rows) {
      list.append(el('dt', { text: row.label }))
      for (const object of row.objects) {
        list.append(this.renderObject(row.label, object, drawer))
      }
    }
    this.container.append(list, drawer)
  }

  private renderObject(relationLabel: string, object: InfoboxObject, drawer: HTMLElement): HTMLElement {
    const dd = el('dd', { class: 'fact', 'data-object': object.id })
    const evidence = object.provenance.filter((p) => p.kind === 'evidence')
    const fromBackground = object.provenance.some((p) => p.kind === 'background')
    dd.append(el('span', { class: 'object-label', text: object.label }))
    if (evidence.length > 0) {
      const button = el('button', {
        class: 'evidence-button',
        text: `${evidence.length} evidence`,
      })
      button.addEventListener('click', () => {
        clear(drawer)
        drawer.hidden = false
        drawer.append(el('h3', { text: `Evidence: ${relationLabel} ${object.label}` }))
        for (const record of evidence) {
          drawer.append(
            el('figure', { class: 'evidence-record' }, [
              el('blockquote', { text: record.sentence ?? '' }),
              el('figcaption', {
                text: `${record.doc ?? ''} · confidence ${record.confidence ?? ''}`,
              }),
            ]),
          )
        }
        const close = el('button', { class: 'close-drawer', text: 'Close' })
        close.addEventListener('click', () => {
          drawer.hidden = true
        })
        drawer.append(close)
      })
      dd.append(button)
    }
    if (fromBackground) {
      dd.append(el('span', { class: 'kb-badge', title: 'from the background knowledge base', text: 'KB' }))
    }
    return dd
  }
}
