#include "tokext/tokenizer_io.hpp"

#include <nlohmann/json.hpp>

#include "tokext/error.hpp"
#include "tokext/io.hpp"

namespace tokext {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kInvalidModel, "tokenizer file: " + what);
}

const ordered_json& require(const ordered_json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

std::string serialize_tokenizer(const TokenizerModel& model) {
  const ModelParts& parts = model.parts();
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kTokenizerFormatVersion) + ",\n";
  out += "  \"marker\": " + ordered_json(parts.marker).dump() + ",\n";
  out += std::string("  \"byte_fallback\": ") + (parts.byte_fallback ? "true" : "false") +
         ",\n";
  if (parts.extended) out += "  \"extended\": true,\n";
  out += "  \"specials\": " + ordered_json(parts.specials).dump() + ",\n";

  out += "  \"vocab\": [";
  for (std::size_t i = 0; i < parts.vocab.size(); ++i) {
    const TokenEntry& e = parts.vocab[i];
    ordered_json entry;
    entry["form"] = e.form;
    entry["id"] = e.id;
    entry["kind"] = std::string(to_string(e.kind));
    out += i == 0 ? "\n    " : ",\n    ";
    out += entry.dump();
  }
  out += parts.vocab.empty() ? "],\n" : "\n  ],\n";

  out += "  \"merges\": [";
  for (std::size_t i = 0; i < parts.merges.size(); ++i) {
    out += i == 0 ? "\n    " : ",\n    ";
    out += ordered_json::array({parts.merges[i].left, parts.merges[i].right}).dump();
  }
  out += parts.merges.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

TokenizerModel parse_tokenizer(std::string_view document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("tokenizer file: ") + e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");

  const auto& version = require(doc, "format_version");
  if (!version.is_number_integer()) malformed("format_version must be an integer");
  if (version.get<long long>() != kTokenizerFormatVersion) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "tokenizer format_version " + version.dump() + " is not supported");
  }

  ModelParts parts;
  try {
    parts.marker = require(doc, "marker").get<std::string>();
    parts.byte_fallback = require(doc, "byte_fallback").get<bool>();
    if (const auto it = doc.find("extended"); it != doc.end()) {
      parts.extended = it->get<bool>();
    }
    parts.specials = require(doc, "specials").get<std::vector<std::string>>();

    const auto& vocab = require(doc, "vocab");
    if (!vocab.is_array()) malformed("vocab must be an array");
    parts.vocab.reserve(vocab.size());
    for (const auto& item : vocab) {
      TokenEntry e;
      e.form = require(item, "form").get<std::string>();
      e.id = require(item, "id").get<TokenId>();
      const auto kind = parse_token_kind(require(item, "kind").get<std::string>());
      if (!kind) malformed("unknown kind for form '" + e.form + "'");
      e.kind = *kind;
      parts.vocab.push_back(std::move(e));
    }

    const auto& merges = require(doc, "merges");
    if (!merges.is_array()) malformed("merges must be an array");
    parts.merges.reserve(merges.size());
    for (const auto& item : merges) {
      if (!item.is_array() || item.size() != 2) {
        malformed("merge " + std::to_string(parts.merges.size()) +
                  " must be a [left, right] pair");
      }
      parts.merges.push_back(
          {item[0].get<std::string>(), item[1].get<std::string>(), parts.merges.size()});
    }
  } catch (const nlohmann::json::type_error& e) {
    malformed(e.what());
  }
  return TokenizerModel::create(std::move(parts));
}

TokenizerModel load_tokenizer(const std::filesystem::path& path) {
  try {
    return parse_tokenizer(io::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_tokenizer(const TokenizerModel& model, const std::filesystem::path& path) {
  io::write_file(path, serialize_tokenizer(model));
}

}  // namespace tokext
