// Recommendation cards with grouped-entity explanations and thumbs
// up/down feedback. Cards render in API payload order; the only number the
// view computes itself is the explanation-sum sanity badge. Feedback posts
// optimistically and keeps the draft when the server rejects it.

import { ApiClient, ApiError, FeedbackDraft, PanelGuard, Recommendation } from './api.js'
import { clear, el, errorBanner, toast } from './dom.js'

export class RecommendationsView {
  private guard = new PanelGuard()
  private user = ''
  private category = ''

  constructor(private api: ApiClient, private container: HTMLElement) {}

  async load(user: string, category: string, k?: number): Promise<void> {
    this.user = user
    this.category = category
    const ticket = this.guard.begin()
    clear(this.container)
    this.container.append(el('p', { class: 'loading', text: `ranking ${category} for ${user}...` }))
    const query = new URLSearchParams({ user, category })
    if (k !== undefined) {
      query.set('k', String(k))
    }
    try {
      const { data, version } = await this.api.get<Recommendation[]>(`/recommendations?${query}`)
      if (!this.guard.shouldRender(ticket, version)) return
      this.render(data)
    } catch (err) {
      clear(this.container)
      this.container.append(
        errorBanner(err instanceof ApiError ? err.message : 'failed to load recommendations', () => {
          void this.load(user, category, k)
        }),
      )
    }
  }

  private render(recommendations: Recommendation[]): void {
    clear(this.container)
    if (recommendations.length === 0) {
      this.container.append(el('p', { class: 'empty', text: 'nothing to recommend' }))
      return
    }
    const list = el('ol', { class: 'rec-list' })
    for (const rec of recommendations) {
      list.append(this.renderCard(rec))
    }
    this.container.append(list)
  }

  private renderCard(rec: Recommendation): HTMLElement {
    const card = el('li', { class: 'rec-card', 'data-rank': String(rec.rank), 'data-item': rec.item })
    const header = el('header', {}, [
      el('span', { class: 'rank', text: `#${rec.rank}` }),
      el('span', { class: 'item', text: rec.item }),
      el('span', { class: 'score', text: `score ${rec.score.toFixed(4)}` }),
    ])
    // sanity badge: the API's explanation total should equal the score
    const consistent = Math.abs(rec.explanation.total - rec.score) < 1e-6
    header.append(
      el('span', {
        class: consistent ? 'sanity ok' : 'sanity warn',
        title: `explanation total ${rec.explanation.total}`,
        text: consistent ? '✓' : '⚠',
      }),
    )
    card.append(header)

    const explanation = el('div', { class: 'explanation' })
    for (const group of rec.explanation.groups) {
      explanation.append(el('h4', { class: 'group-type', text: group.type }))
      const entities = el('ul', { class: 'group-entities' })
      for (const entity of group.entities) {
        entities.append(
          el('li', {}, [
            el('span', { class: 'entity-label', text: entity.label }),
            el('span', { class: 'entity-weight', text: entity.weight.toFixed(4) }),
          ]),
        )
      }
      explanation.append(entities)
    }
    card.append(explanation)
    card.append(this.renderFeedback(rec))
    return card
  }

  private renderFeedback(rec: Recommendation): HTMLElement {
    const controls = el('div', { class: 'feedback' })
    const up = el('button', { class: 'thumb up', title: 'relevant', text: '\u{1F44D}' })
    const down = el('button', { class: 'thumb down', title: 'not relevant', text: '\u{1F44E}' })
    const comment = el('input', { class: 'comment', placeholder: 'optional comment' }) as HTMLInputElement
    const status = el('span', { class: 'feedback-status', text: '' })
    const send = async (verdict: 'up' | 'down') => {
      const draft: FeedbackDraft = {
        user: this.user,
        item: rec.item,
        verdict,
        category: this.category,
        rank: rec.rank,
      }
      if (comment.value.trim()) {
        draft.comment = comment.value.trim()
      }
      status.textContent = 'sending...'
      up.disabled = down.disabled = true
      try {
        const { data } = await this.api.postFeedback(draft)
        status.textContent = `recorded #${data.id}`
        comment.value = ''
      } catch {
        // keep the draft (comment stays) so the user can retry
        status.textContent = ''
        up.disabled = down.disabled = false
        toast(this.container, 'feedback failed to send; your draft is kept')
      }
    }
    up.addEventListener('click', () => void send('up'))
    down.addEventListener('click', () => void send('down'))
    controls.append(up, down, comment, status)
    return controls
  }
}
