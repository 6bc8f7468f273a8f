// Typed client for the kgforge service API. Every response carries an
// X-Graph-Version header; the client tracks the newest version seen so
// panels can discard stale responses after a reload.

export interface TypeStats {
  id: string
  label: string
  direct: number
  transitive: number
  statements: number
}

export interface TrendRow {
  id: string
  label: string
  cells: Record<string, number>
  total: number
}

export interface TrendTable {
  type: string
  years: number[]
  rows: TrendRow[]
}

export interface ProvenanceRecord {
  kind: 'evidence' | 'background'
  sentence?: string
  doc?: string
  confidence?: number
}

export interface InfoboxObject {
  id: string
  label: string
  provenance: ProvenanceRecord[]
}

export interface InfoboxRow {
  relation: string
  label: string
  objects: InfoboxObject[]
}

export interface Infobox {
  id: string
  label: string
  types: string[]
  rows: InfoboxRow[]
}

export interface WeightedFeature {
  feature: string
  weight: number
}

export interface ExplanationGroup {
  type: string
  entities: { label: string; weight: number }[]
}

export interface Explanation {
  total: number
  top: Record<string, WeightedFeature[]>
  groups: ExplanationGroup[]
}

export interface Recommendation {
  item: string
  type: string
  score: number
  rank: number
  explanation: Explanation
}

export interface StatusInfo {
  version: number
  triples: number
  entities: number
  features: number
  categories: string[]
}

export interface FeedbackDraft {
  user: string
  item: string
  verdict: 'up' | 'down'
  comment?: string
  category?: string
  rank?: number
}

export interface Versioned<T> {
  data: T
  version: number
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message)
  }
}

export class ApiClient {
  latestVersion = 0

  constructor(private token: string, private base: string = '') {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return { Authorization: `Bearer ${this.token}`, ...extra }
  }

  private track(res: Response): number {
    const raw = res.headers.get('X-Graph-Version')
    const version = raw ? parseInt(raw, 10) : 0
    if (version > this.latestVersion) {
      this.latestVersion = version
    }
    return version
  }

  async get<T>(path: string): Promise<Versioned<T>> {
    const res = await fetch(this.base + path, { headers: this.headers() })
    const version = this.track(res)
    if (!res.ok) {
      let detail = `request failed (${res.status})`
      try {
        const body = await res.json()
        if (body && typeof body.error === 'string') {
          detail = body.error
        }
      } catch {
        // keep the generic message
      }
      throw new ApiError(res.status, detail)
    }
    return { data: (await res.json()) as T, version }
  }

  async postFeedback(draft: FeedbackDraft): Promise<Versioned<{ id: number }>> {
    const res = await fetch(this.base + '/feedback', {
      method: 'POST',
      headers: this.headers({ 'Content-Type': 'application/json' }),
      body: JSON.stringify(draft),
    })
    const version = this.track(res)
    if (!res.ok) {
      throw new ApiError(res.status, `feedback rejected (${res.status})`)
    }
    return { data: (await res.json()) as { id: number }, version }
  }
}

// Guards a panel against out-of-order rendering: a response is dropped when
// a newer request has started since, or when its graph version is older
// than one the panel already rendered.
export class PanelGuard {
  private seq = 0
  private renderedVersion = -1

  begin(): number {
    return ++this.seq
  }

  shouldRender(ticket: number, version: number): boolean {
    if (ticket !== this.seq) return false
    if (version < this.renderedVersion) return false
    this.renderedVersion = version
    return true
  }
}
