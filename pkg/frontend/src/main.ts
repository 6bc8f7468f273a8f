// App shell: one-time token entry (kept in session scope), panel
// navigation, and wiring between the views (type -> trends -> infobox).

import { ApiClient, StatusInfo } from './api.js'
import { clear, el } from './dom.js'
import { InfoboxView } from './infobox.js'
import { RecommendationsView } from './recommend.js'
import { TrendsView } from './trends.js'
import { TypeTreeView } from './tree.js'

const TOKEN_KEY = 'kgforge-token'

function panel(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing panel #${id}`)
  return node
}

function showPanel(name: string): void {
  for (const section of document.querySelectorAll<HTMLElement>('main > section')) {
    section.hidden = section.id !== `${name}-panel`
  }
  location.hash = `#/${name}`
}

function boot(token: string): void {
  const api = new ApiClient(token)
  const versionChip = document.getElementById('version-chip')
  const updateChip = () => {
    if (versionChip) versionChip.textContent = `graph v${api.latestVersion}`
  }

  const infoboxView = new InfoboxView(api, panel('infobox-panel'))
  const trendsView = new TrendsView(api, panel('trends-panel'), (entityId) => {
    showPanel('infobox')
    void infoboxView.show(entityId).then(updateChip)
  })
  const treeView = new TypeTreeView(api, panel('tree-panel'), (typeId) => {
    showPanel('trends')
    void trendsView.show(typeId, 2002, 2021).then(updateChip)
  })
  const recsView = new RecommendationsView(api, panel('recs-panel'))

  const recsForm = document.getElementById('recs-form') as HTMLFormElement | null
  if (recsForm) {
    recsForm.addEventListener('submit', (event) => {
      event.preventDefault()
      const user = (document.getElementById('recs-user') as HTMLInputElement).value.trim()
      const category = (document.getElementById('recs-category') as HTMLSelectElement).value
      if (user) {
        showPanel('recs')
        void recsView.load(user, category).then(updateChip)
      }
    })
  }

  for (const button of document.querySelectorAll<HTMLButtonElement>('nav [data-panel]')) {
    button.addEventListener('click', () => {
      const name = button.dataset.panel as string
      showPanel(name)
      if (name === 'tree') void treeView.load().then(updateChip)
    })
  }

  void api.get<StatusInfo>('/status').then(({ data }) => {
    updateChip()
    const select = document.getElementById('recs-category') as HTMLSelectElement | null
    if (select) {
      clear(select)
      for (const category of data.categories) {
        select.append(el('option', { value: category, text: category }))
      }
    }
  })

  showPanel('tree')
  void treeView.load().then(updateChip)
}

function init(): void {
  const stored = sessionStorage.getItem(TOKEN_KEY)
  const login = document.getElementById('login-panel')
  const form = document.getElementById('login-form') as HTMLFormElement | null
  if (stored) {
    if (login) login.hidden = true
    boot(stored)
    return
  }
  if (form && login) {
    login.hidden = false
    form.addEventListener('submit', (event) => {
      event.preventDefault()
      const input = document.getElementById('token-input') as HTMLInputElement
      const token = input.value.trim()
      if (token) {
        sessionStorage.setItem(TOKEN_KEY, token)
        login.hidden = true
        boot(token)
      }
    })
  }
}

document.addEventListener('DOMContentLoaded', init)
