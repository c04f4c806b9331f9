#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pnred/fixtures.hpp"

namespace pnred {

// Parse or validation failure; path is a JSON-pointer-like location such as
// /algebroids/toda/anchor/2/1.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct AlgebroidEntry {
  LieAlgebroid algebroid;
  std::map<std::string, Bivector> bivectors;
  std::map<std::string, TwoForm> two_forms;
  std::map<std::string, Endomorphism> endomorphisms;
  std::map<std::string, Expr> functions;
};

struct EpimorphismEntry {
  std::string source;
  std::string target;
  EpimorphismSpec spec;
};

struct LeafEntry {
  std::string algebroid;
  std::string bivector;
  std::string endomorphism;  // empty means the identity
  LeafSpec leaf;
};

struct SpecDocument {
  std::map<std::string, AlgebroidEntry> algebroids;
  std::map<std::string, EpimorphismEntry> epimorphisms;
  std::map<std::string, LeafEntry> leaves;

  const AlgebroidEntry& algebroid(const std::string& name) const;
};

// Accepted shapes: {"algebroids": {...}, "epimorphisms": {...}, "leaves": {...}}
// or a single algebroid object at the top level (named by its optional
// "name" field, default "main"). An algebroid may carry a nested
// "epimorphism" block whose source is that algebroid.
SpecDocument parse_spec(const nlohmann::json& doc);
SpecDocument parse_spec_text(const std::string& text);
SpecDocument load_spec_file(const std::string& path);

// Canonical form: keys sorted, canonical expression strings, only a < b
// entries for antisymmetric data, omitted zeros.
nlohmann::json to_json(const SpecDocument& doc);
std::string serialize(const SpecDocument& doc);

// Builtin documents: "toda:N" and "aff1".
SpecDocument builtin_spec(const std::string& name);
SpecDocument export_toda(const TodaFixture& toda);
SpecDocument export_semidirect(const SemidirectFixture& fx);

}  // namespace pnred
