// Small DOM helpers shared by the views.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') {
      node.className = value
    } else if (key === 'text') {
      node.textContent = value
    } else {
      node.setAttribute(key, value)
    }
  }
  for (const child of children) {
    node.append(child)
  }
  return node
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild)
  }
}

// Inline banner with a retry button, used whenever an API call fails.
export function errorBanner(message: string, retry: () => void): HTMLElement {
  const button = el('button', { class: 'retry', text: 'Retry' })
  button.addEventListener('click', retry)
  return el('div', { class: 'error-banner', role: 'alert' }, [
    el('span', { text: message }),
    button,
  ])
}

export function toast(container: HTMLElement, message: string): void {
  const note = el('div', { class: 'toast', role: 'status', text: message })
  container.append(note)
  setTimeout(() => note.remove(), 4000)
}
