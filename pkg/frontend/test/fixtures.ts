// Payloads captured verbatim from the service running over the bundled
// fixture corpus, so the view tests exercise real response shapes.

import type { Infobox, Recommendation, TrendTable, TypeStats } from '../src/api.js'

export const TOP_TYPES: TypeStats[] = [
  { direct: 4, id: 'Q151885', label: 'concept', statements: 20, transitive: 23 },
  { direct: 9, id: 'Q11862829', label: 'academic discipline', statements: 16, transitive: 9 },
  { direct: 2, id: 'Q3249551', label: 'process', statements: 5, transitive: 4 },
]

export const CONCEPT_CHILDREN: TypeStats[] = [
  { direct: 9, id: 'Q11862829', label: 'academic discipline', statements: 16, transitive: 9 },
  { direct: 2, id: 'Q3249551', label: 'process', statements: 5, transitive: 4 },
  { direct: 1, id: 'Q317623', label: 'standard', statements: 3, transitive: 3 },
  { direct: 1, id: 'Q7397', label: 'software', statements: 1, transitive: 3 },
]

export const LINKED_DATA_INFOBOX: Infobox = {
  id: 'Q515701',
  label: 'Linked Data',
  types: ['Q11862829'],
  rows: [
    {
      label: 'part of',
      relation: 'P361',
      objects: [
        {
          id: 'Q309901',
          label: 'Open Data',
          provenance: [
            {
              confidence: 0.85,
              doc: 'urn:kg:paper/iswc2009-lod-cloud#abstract',
              kind: 'evidence',
              sentence: 'Linked Data is part of the Open Data movement.',
            },
            {
              confidence: 0.85,
              doc: 'urn:kg:recognition/open-science-award#description',
              kind: 'evidence',
              sentence: 'Linked Data is part of Open Data according to community charters.',
            },
          ],
        },
        {
          id: 'Q54837',
          label: 'Semantic Web',
          provenance: [
            {
              confidence: 0.85,
              doc: 'urn:kg:paper/iswc2021-kg-trends#abstract',
              kind: 'evidence',
              sentence: 'Linked Data remains part of the Semantic Web.',
            },
            {
              confidence: 0.85,
              doc: 'urn:kg:project/lod-analytics#description',
              kind: 'evidence',
              sentence: 'We analyze how Linked Data is part of the Semantic Web across communities.',
            },
          ],
        },
      ],
    },
    {
      label: 'based on',
      relation: 'P144',
      objects: [{ id: 'Q54872', label: 'RDF', provenance: [{ kind: 'background' }] }],
    },
  ],
}

export const TRENDS: TrendTable = {
  type: 'Q11862829',
  years: [2009, 2010, 2011, 2012, 2013, 2014, 2015, 2016, 2017, 2018, 2019, 2020, 2021],
  rows: [
    {
      id: 'Q54837',
      label: 'Semantic Web',
      total: 5,
      cells: {
        '2009': 0.0, '2010': 0.0, '2011': 20.0, '2012': 0.0, '2013': 0.0, '2014': 0.0,
        '2015': 0.0, '2016': 0.0, '2017': 0.0, '2018': 0.0, '2019': 0.0, '2020': 20.0, '2021': 60.0,
      },
    },
    {
      id: 'Q515701',
      label: 'Linked Data',
      total: 4,
      cells: {
        '2009': 25.0, '2010': 0.0, '2011': 0.0, '2012': 0.0, '2013': 0.0, '2014': 25.0,
        '2015': 0.0, '2016': 0.0, '2017': 0.0, '2018': 0.0, '2019': 0.0, '2020': 0.0, '2021': 50.0,
      },
    },
  ],
}

export const RECOMMENDATIONS: Recommendation[] = [
  {
    item: 'urn:kg:paper/iswc2009-lod-cloud',
    rank: 1,
    score: 0.26126275458335796,
    type: 'http://schema.org/ScholarlyArticle',
    explanation: {
      total: 0.2612627545833579,
      top: {
        bow: [
          { feature: 'data', weight: 0.08555327043792603 },
          { feature: 'linked', weight: 0.04622619384347965 },
          { feature: 'part', weight: 0.02566598113137781 },
        ],
        entity: [
          { feature: 'Open Data:concept', weight: 0.019088776756990614 },
          { feature: 'Linked Data:academic discipline', weight: 0.014546945257037187 },
        ],
        frame: [{ feature: 'academic discipline,part of,concept', weight: 0.019088776756990614 }],
      },
      groups: [
        { type: 'concept', entities: [{ label: 'Open Data', weight: 0.019088776756990614 }] },
        { type: 'academic discipline', entities: [{ label: 'Linked Data', weight: 0.014546945257037187 }] },
      ],
    },
  },
  {
    item: 'urn:kg:paper/iswc2021-kg-trends',
    rank: 2,
    score: 0.21748749323834413,
    type: 'http://schema.org/ScholarlyArticle',
    explanation: {
      total: 0.21748749323834413,
      top: {
        bow: [
          { feature: 'linked', weight: 0.0367093890854499 },
          { feature: 'data', weight: 0.03397000738015053 },
          { feature: 'metadata', weight: 0.026287543311163116 },
        ],
        entity: [
          { feature: 'metadata:concept', weight: 0.026287543311163116 },
          { feature: 'Semantic Web:academic discipline', weight: 0.013588002952060212 },
          { feature: 'Linked Data:academic discipline', weight: 0.011552096961594035 },
        ],
      },
      groups: [
        { type: 'concept', entities: [{ label: 'metadata', weight: 0.026287543311163116 }] },
        {
          type: 'academic discipline',
          entities: [
            { label: 'Semantic Web', weight: 0.013588002952060212 },
            { label: 'Linked Data', weight: 0.011552096961594035 },
          ],
        },
      ],
    },
  },
]

export function jsonResponse(payload: unknown, version = 1, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json', 'X-Graph-Version': String(version) },
  })
}
