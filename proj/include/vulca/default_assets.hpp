#pragma once

namespace vulca {

// Built-in copies of the shipped config assets. assets/taxonomy.json and
// assets/profiles.json carry the same content; a test pins them equal so the
// two cannot drift.

// Note on the one name collision: "Theoretical Construction" exists both as
// an evaluative stance and as a supplementary analytical dimension. Canonical
// names must be unique, so the supplementary one carries an explicit
// "(Supplementary)" qualifier; profile rules that score it by the zero-shot
// classifier target the qualified name.
inline constexpr const char* kDefaultTaxonomyJson = R"json({
  "version": "default-v1",
  "notes": [
    "Canonical layout: 10 evaluative-stance, 17 feature-focus, 11 argumentative-quality, 5 profile-alignment, 4 supplementary dimensions (47 total).",
    "'Theoretical Construction (Supplementary)' is qualified to keep canonical names unique; the unqualified name is the evaluative stance."
  ],
  "dimensions": {
    "evaluative_stance": [
      ["Historical Research", ""],
      ["Aesthetic Appreciation", ""],
      ["Socio-cultural Interpretation", ""],
      ["Comparative Analysis", ""],
      ["Theoretical Construction", ""],
      ["Critical Inquiry", ""],
      ["High Praise", ""],
      ["Objective Description", ""],
      ["Mild Criticism", ""],
      ["Strong Negation", ""]
    ],
    "feature_focus": [
      ["Use of Color", ""],
      ["Brushwork Technique", ""],
      ["Texture Strokes (Chunfa)", "chunfa"],
      ["Line Quality", ""],
      ["Ink Application", ""],
      ["Layout and Structure", ""],
      ["Spatial Representation", ""],
      ["Artistic Conception", "yijing"],
      ["Emotional Expression", ""],
      ["Subject Matter", ""],
      ["Genre", ""],
      ["Symbolism", ""],
      ["Historical Context", ""],
      ["Artist Biography", ""],
      ["Style/School", ""],
      ["Technique Inheritance & Innovation", ""],
      ["Cross-cultural Influence", ""]
    ],
    "argumentative_quality": [
      ["Profound Insight", ""],
      ["Strong Argumentation", ""],
      ["Clear Logic", ""],
      ["Detailed Analysis", ""],
      ["Classical Citations", ""],
      ["Objective Viewpoint", ""],
      ["Superficial Treatment", ""],
      ["Overly General Content", ""],
      ["Lacks Examples", ""],
      ["Logical Gaps", ""],
      ["Subjective/Biased View", ""]
    ],
    "profile_alignment": [
      ["Comprehensive Analyst Score", ""],
      ["Historically Focused Critic Score", ""],
      ["Technique & Style Focused Critic Score", ""],
      ["Theory & Comparison Focused Critic Score", ""],
      ["General Descriptive Profile Score", ""]
    ],
    "supplementary": [
      ["Stylistic Analysis", ""],
      ["Cross-cultural Comparison", ""],
      ["Theoretical Construction (Supplementary)", ""],
      ["Overall Coherence Score", ""]
    ]
  }
})json";

// The five expert profiles. "Only-of" stance requirements (General
// Descriptive accepts any of four stances) are encoded as flexible rules
// with min_flexible_to_pass 1, which keeps the schema to a single optional
// required stance per profile.
inline constexpr const char* kDefaultProfilesJson = R"json({
  "version": "default-v1",
  "profiles": [
    {
      "name": "Comprehensive Analyst",
      "required_stance": null,
      "flexible_rules": [
        {"label": "Use of Color", "min": 0.6, "kind": "feature"},
        {"label": "Brushwork Technique", "min": 0.6, "kind": "feature"},
        {"label": "Texture Strokes (Chunfa)", "min": 0.6, "kind": "feature"},
        {"label": "Line Quality", "min": 0.6, "kind": "feature"},
        {"label": "Ink Application", "min": 0.6, "kind": "feature"},
        {"label": "Layout and Structure", "min": 0.6, "kind": "feature"},
        {"label": "Spatial Representation", "min": 0.6, "kind": "feature"},
        {"label": "Artistic Conception", "min": 0.6, "kind": "feature"},
        {"label": "Emotional Expression", "min": 0.6, "kind": "feature"},
        {"label": "Subject Matter", "min": 0.6, "kind": "feature"},
        {"label": "Genre", "min": 0.6, "kind": "feature"},
        {"label": "Symbolism", "min": 0.6, "kind": "feature"},
        {"label": "Historical Context", "min": 0.6, "kind": "feature"},
        {"label": "Artist Biography", "min": 0.6, "kind": "feature"},
        {"label": "Style/School", "min": 0.6, "kind": "feature"},
        {"label": "Technique Inheritance & Innovation", "min": 0.6, "kind": "feature"},
        {"label": "Cross-cultural Influence", "min": 0.6, "kind": "feature"}
      ],
      "min_flexible_to_pass": 10,
      "pooled_clause": null
    },
    {
      "name": "Historically Focused Critic",
      "required_stance": null,
      "flexible_rules": [
        {"label": "Historical Context", "min": 0.5, "kind": "feature"},
        {"label": "Artist Biography", "min": 0.4, "kind": "feature"},
        {"label": "Style/School", "min": 0.4, "kind": "feature"},
        {"label": "Classical Citations", "min": 0.25, "kind": "quality"}
      ],
      "min_flexible_to_pass": 2,
      "pooled_clause": null
    },
    {
      "name": "Technique & Style Focused Critic",
      "required_stance": {"label": "Aesthetic Appreciation", "min": 0.4, "kind": "stance"},
      "flexible_rules": [
        {"label": "Technique Inheritance & Innovation", "min": 0.3, "kind": "feature"},
        {"label": "Artistic Conception", "min": 0.2, "kind": "feature"}
      ],
      "min_flexible_to_pass": 2,
      "pooled_clause": null
    },
    {
      "name": "Theory & Comparison Focused Critic",
      "required_stance": null,
      "flexible_rules": [
        {"label": "Stylistic Analysis", "min": 0.3, "kind": "feature"},
        {"label": "Cross-cultural Comparison", "min": 0.4, "kind": "feature"},
        {"label": "Theoretical Construction (Supplementary)", "min": 0.3, "kind": "feature"},
        {"label": "Layout and Structure", "min": 0.5, "kind": "feature"},
        {"label": "Symbolism", "min": 0.5, "kind": "feature"}
      ],
      "min_flexible_to_pass": 3,
      "pooled_clause": null
    },
    {
      "name": "General Descriptive Profile",
      "required_stance": null,
      "flexible_rules": [
        {"label": "Objective Description", "min": 0.15, "kind": "stance"},
        {"label": "Socio-cultural Interpretation", "min": 0.15, "kind": "stance"},
        {"label": "Aesthetic Appreciation", "min": 0.15, "kind": "stance"},
        {"label": "Historical Research", "min": 0.15, "kind": "stance"}
      ],
      "min_flexible_to_pass": 1,
      "pooled_clause": {
        "pool": ["Historical Context", "Symbolism", "Use of Color"],
        "min_count": 3,
        "min_avg": 0.2
      }
    }
  ]
})json";

}  // namespace vulca
