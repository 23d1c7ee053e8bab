// Copyright 2026 The vecdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// VectorDocument: the JSON/CSV exchange format of the command-line tool.

#ifndef VECDIFF_DOCUMENT_HPP
#define VECDIFF_DOCUMENT_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vecdiff/errors.hpp"
#include "vecdiff/kron.hpp"

namespace vecdiff {

inline constexpr std::string_view kSchemaVersion = "1";

enum class DocKind { Deriv, Hermite, Symmetrizer, Moments, Cumulants, Taylor, Index };

inline constexpr std::array<std::pair<DocKind, std::string_view>, 7> kDocKindNames{{
    {DocKind::Deriv, "deriv"},
    {DocKind::Hermite, "hermite"},
    {DocKind::Symmetrizer, "symmetrizer"},
    {DocKind::Moments, "moments"},
    {DocKind::Cumulants, "cumulants"},
    {DocKind::Taylor, "taylor"},
    {DocKind::Index, "index"},
}};

inline std::string_view to_string(DocKind k) {
  for (const auto& [kind, name] : kDocKindNames)
    if (kind == k) return name;
  return "?";
}

inline DocKind parse_doc_kind(std::string_view s) {
  for (const auto& [kind, name] : kDocKindNames)
    if (name == s) return kind;
  throw UnknownKind("unknown document kind '" + std::string(s) + "'");
}

struct Dims {
  std::size_t d = 1;
  std::size_t p = 1;
  std::size_t r = 0;
  bool operator==(const Dims&) const = default;
};

struct VectorDocument {
  std::string schema_version{kSchemaVersion};
  DocKind kind = DocKind::Deriv;
  Dims dims;
  std::optional<Vec> point;
  Vec data;
  nlohmann::json meta = nlohmann::json::object();

  bool operator==(const VectorDocument&) const = default;

  /// Expected data length for kind and dims.
  ///   deriv: p d^r   hermite, symmetrizer: d^r   taylor: p
  ///   moments, cumulants: d + d^2 + ... + d^r (orders concatenated)
  ///   index: r + 1 (position followed by the r indices)
  /// A symmetrizer document with meta.form == "triplets" holds (row, col, value)
  /// triples instead.
  std::size_t expected_length() const {
    switch (kind) {
      case DocKind::Deriv:
        return checked_mul(dims.p, checked_pow(dims.d, dims.r));
      case DocKind::Hermite:
      case DocKind::Symmetrizer:
        return checked_pow(dims.d, dims.r);
      case DocKind::Moments:
      case DocKind::Cumulants: {
        std::size_t n = 0;
        for (std::size_t l = 1; l <= dims.r; ++l) n += checked_pow(dims.d, l);
        return n;
      }
      case DocKind::Taylor:
        return dims.p;
      case DocKind::Index:
        return dims.r + 1;
    }
    return 0;
  }

  bool is_triplets() const {
    return kind == DocKind::Symmetrizer && meta.is_object() && meta.contains("form") &&
           meta["form"] == "triplets";
  }

  void validate() const {
    if (schema_version != kSchemaVersion)
      throw ParseError("unsupported schema_version '" + schema_version + "'");
    if (dims.d == 0 || dims.p == 0) throw ShapeError("dims.d and dims.p must be positive");
    if (!meta.is_object()) throw ParseError("meta must be an object");
    if (is_triplets()) {
      if (data.size() % 3 != 0) throw ShapeError("triplet data length is not a multiple of 3");
    } else if (data.size() != expected_length()) {
      throw ShapeError("kind " + std::string(to_string(kind)) + " with d=" +
                       std::to_string(dims.d) + " p=" + std::to_string(dims.p) +
                       " r=" + std::to_string(dims.r) + " needs " +
                       std::to_string(expected_length()) + " values, got " +
                       std::to_string(data.size()));
    }
    if (point && point->size() != dims.d && kind != DocKind::Moments && kind != DocKind::Cumulants)
      throw ShapeError("point length is not d");
    for (double v : data)
      if (!std::isfinite(v)) throw DomainError("document holds a non-finite value");
  }

  /// Order-l slice of a moments/cumulants document.
  Vec order_slice(std::size_t l) const {
    if (kind != DocKind::Moments && kind != DocKind::Cumulants)
      throw ShapeError("order slices exist only for moment and cumulant documents");
    if (l == 0 || l > dims.r) throw MissingOrder("order " + std::to_string(l) + " not in document");
    std::size_t offset = 0;
    for (std::size_t k = 1; k < l; ++k) offset += checked_pow(dims.d, k);
    const std::size_t n = checked_pow(dims.d, l);
    return Vec(data.begin() + static_cast<std::ptrdiff_t>(offset),
               data.begin() + static_cast<std::ptrdiff_t>(offset + n));
  }
};

inline nlohmann::json to_json(const VectorDocument& doc) {
  nlohmann::json j;
  j["schema_version"] = doc.schema_version;
  j["kind"] = std::string(to_string(doc.kind));
  j["dims"] = {{"d", doc.dims.d}, {"p", doc.dims.p}, {"r", doc.dims.r}};
  if (doc.point) j["point"] = *doc.point;
  j["data"] = doc.data;
  j["meta"] = doc.meta;
  return j;
}

namespace detail {

inline std::size_t json_size(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("dims.") + key + " missing");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ParseError(std::string("dims.") + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

inline Vec json_numbers(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw ParseError(std::string(key) + " must be an array of numbers");
  Vec out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(key) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

inline VectorDocument from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("document must be a JSON object");
  VectorDocument doc;
  if (!j.contains("schema_version") || !j["schema_version"].is_string())
    throw ParseError("schema_version missing");
  doc.schema_version = j["schema_version"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("kind missing");
  try {
    doc.kind = parse_doc_kind(j["kind"].get<std::string>());
  } catch (const UnknownKind& e) {
    throw ParseError(e.what());
  }
  if (!j.contains("dims") || !j["dims"].is_object()) throw ParseError("dims missing");
  const auto& dims = j["dims"];
  doc.dims = {detail::json_size(dims, "d"), detail::json_size(dims, "p"), detail::json_size(dims, "r")};
  if (j.contains("point") && !j["point"].is_null()) doc.point = detail::json_numbers(j["point"], "point");
  if (!j.contains("data")) throw ParseError("data missing");
  doc.data = detail::json_numbers(j["data"], "data");
  if (j.contains("meta")) doc.meta = j["meta"];
  doc.validate();
  return doc;
}

/// Pretty JSON. Numbers are printed in shortest round-trip form, so
/// parse(print(doc)) reproduces every double bit for bit.
inline std::string print_json(const VectorDocument& doc) {
  doc.validate();
  return to_json(doc).dump(2) + "\n";
}

/// One comma-separated row of doc.data; triplet documents print one triple per row.
inline std::string print_csv(const VectorDocument& doc) {
  doc.validate();
  std::ostringstream os;
  os.precision(17);
  const std::size_t width = doc.is_triplets() ? 3 : doc.data.size();
  for (std::size_t i = 0; i < doc.data.size(); ++i) {
    os << doc.data[i];
    os << ((width == 0 || (i + 1) % width == 0) ? '\n' : ',');
  }
  if (doc.data.empty()) os << '\n';
  return os.str();
}

/// Numbers of a raw CSV row (or several rows, concatenated). Blank lines and
/// lines starting with '#' are skipped.
inline Vec parse_csv_numbers(std::string_view text) {
  Vec out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw ParseError("empty CSV cell");
      const std::string token = cell.substr(b, e - b + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + token + "'");
      }
      if (used != token.size()) throw ParseError("not a number: '" + token + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw ParseError("no numbers in CSV input");
  return out;
}

/// Parsed input: a full document, or bare numbers from CSV.
struct ParsedInput {
  std::optional<VectorDocument> document;
  Vec numbers;
};

/// Accepts a VectorDocument (JSON object), a bare JSON array, or CSV text.
inline ParsedInput parse_input(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw ParseError("empty input");
  if (text[first] == '{' || text[first] == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_array()) return {std::nullopt, detail::json_numbers(j, "input")};
    VectorDocument doc = from_json(j);
    Vec numbers = doc.data;
    return {std::move(doc), std::move(numbers)};
  }
  return {std::nullopt, parse_csv_numbers(text)};
}

inline VectorDocument parse_document(std::string_view text) {
  ParsedInput in = parse_input(text);
  if (!in.document) throw ParseError("expected a JSON document");
  return std::move(*in.document);
}

}  // namespace vecdiff

#endif  // VECDIFF_DOCUMENT_HPP
