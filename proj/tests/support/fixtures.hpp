#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tokext/tokenizer.hpp"

namespace tokext::support {

inline const std::string kMarker(kDefaultMarker);

// Word-level tokenizer for the A/B/C fixture: ids 0..2 are ▁A ▁B ▁C, so the
// language-model vocabulary is the first three ids. No specials, no bytes.
inline TokenizerModel abc_tokenizer() {
  ModelParts parts;
  parts.byte_fallback = false;
  const std::vector<std::string> forms{kMarker + "A", kMarker + "B", kMarker + "C", kMarker,
                                       "A", "B", "C"};
  for (std::size_t i = 0; i < forms.size(); ++i) {
    parts.vocab.push_back({forms[i], static_cast<TokenId>(i), TokenKind::kNormal});
  }
  parts.merges = {{kMarker, "A", 0}, {kMarker, "B", 1}, {kMarker, "C", 2}};
  return TokenizerModel::create(std::move(parts));
}

// Builds a byte-fallback model with default specials from normal forms and
// merges given in rank order.
inline TokenizerModel make_model(const std::vector<std::string>& normals,
                                 const std::vector<std::pair<std::string, std::string>>& merges) {
  ModelParts parts = make_base_parts(default_specials());
  for (const auto& form : normals) {
    parts.vocab.push_back({form, static_cast<TokenId>(parts.vocab.size()), TokenKind::kNormal});
  }
  for (const auto& [l, r] : merges) parts.merges.push_back({l, r, parts.merges.size()});
  return TokenizerModel::create(std::move(parts));
}

}  // namespace tokext::support
