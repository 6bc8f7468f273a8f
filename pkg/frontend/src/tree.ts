// Expandable type tree. Children load lazily: the first expansion of a node
// issues exactly one /types/{id}/children request; collapsing and
// re-expanding only toggles visibility. Counts and ordering come straight
// from the API payload.

import { ApiClient, ApiError, PanelGuard, TypeStats } from './api.js'
import { clear, el, errorBanner } from './dom.js'

export class TypeTreeView {
  private loaded = new Set<string>()
  private guard = new PanelGuard()

  constructor(
    private api: ApiClient,
    private container: HTMLElement,
    private onSelect: (typeId: string) => void,
  ) {}

  async load(): Promise<void> {
    const ticket = this.guard.begin()
    clear(this.container)
    this.loaded.clear()
    try {
      const { data, version } = await this.api.get<TypeStats[]>('/types')
      if (!this.guard.shouldRender(ticket, version)) return
      clear(this.container)
      const list = el('ul', { class: 'type-tree' })
      for (const stats of data) {
        list.append(this.renderNode(stats))
      }
      this.container.append(list)
    } catch (err) {
      clear(this.container)
      this.container.append(
        errorBanner(err instanceof ApiError ? err.message : 'failed to load types', () => {
          void this.load()
        }),
      )
    }
  }

  private renderNode(stats: TypeStats): HTMLElement {
    const item = el('li', { class: 'type-node', 'data-type': stats.id })
    const expand = el('button', { class: 'expand', 'aria-expanded': 'false', text: '▸' })
    const label = el('button', { class: 'type-label', text: stats.label })
    label.addEventListener('click', () => this.onSelect(stats.id))
    const counts = el('span', {
      class: 'counts',
      text: `${stats.direct} direct / ${stats.transitive} transitive`,
    })
    const childContainer = el('ul', { class: 'children', hidden: 'hidden' })
    expand.addEventListener('click', () => {
      void this.toggle(stats.id, expand, childContainer)
    })
    item.append(expand, label, counts, childContainer)
    return item
  }

  private async toggle(typeId: string, expand: HTMLButtonElement, childContainer: HTMLElement): Promise<void> {
    if (this.loaded.has(typeId)) {
      const nowHidden = !childContainer.hidden
      childContainer.hidden = nowHidden
      expand.setAttribute('aria-expanded', String(!nowHidden))
      return
    }
    try {
      const { data } = await this.api.get<TypeStats[]>(`/types/${encodeURIComponent(typeId)}/children`)
      this.loaded.add(typeId)
      clear(childContainer)
      if (data.length === 0) {
        childContainer.append(el('li', { class: 'leaf-note', text: 'no subtypes' }))
      }
      for (const child of data) {
        childContainer.append(this.renderNode(child))
      }
      childContainer.hidden = false
      expand.setAttribute('aria-expanded', 'true')
    } catch (err) {
      clear(childContainer)
      childContainer.hidden = false
      childContainer.append(
        errorBanner(err instanceof ApiError ? err.message : 'failed to load subtypes', () => {
          void this.toggle(typeId, expand, childContainer)
        }),
      )
    }
  }
}
