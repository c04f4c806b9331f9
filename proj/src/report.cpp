#include "pnred/report.hpp"

#include <cstdio>
#include <sstream>

namespace pnred {

void Report::add(std::string name, const Verdict& v, double seconds, bool ill) {
  checks.push_back({std::move(name), v.ok, v.witness, seconds, ill});
}

bool Report::ok() const {
  for (const auto& c : checks) {
    if (!c.ok) return false;
  }
  return true;
}

bool Report::ill_conditioned() const {
  for (const auto& c : checks) {
    if (c.ill_conditioned) return true;
  }
  return false;
}

int Report::exit_code() const {
  if (ill_conditioned()) return kExitIllConditioned;
  return ok() ? kExitPass : kExitFail;
}

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json out;
  out["command"] = report.command;
  out["version"] = kVersion;
  out["inputs_digest"] = report.inputs_digest;
  out["tolerance"] = report.tolerance;
  out["seed"] = report.seed ? nlohmann::json(*report.seed) : nlohmann::json(nullptr);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j;
    j["name"] = c.name;
    j["ok"] = c.ok;
    j["witness"] = c.witness;
    j["seconds"] = c.seconds;
    j["ill_conditioned"] = c.ill_conditioned;
    checks.push_back(j);
  }
  out["checks"] = checks;
  out["ok"] = report.ok();
  out["exit_code"] = report.exit_code();
  out["data"] = report.data;
  return out;
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  out << "pnred " << kVersion << " " << report.command << "\n";
  out << "inputs " << report.inputs_digest << "  tolerance " << report.tolerance;
  if (report.seed) out << "  seed " << *report.seed;
  out << "\n";
  for (const auto& c : report.checks) {
    out << (c.ok ? "PASS " : "FAIL ") << c.name;
    if (c.ill_conditioned) out << " [ill-conditioned]";
    char t[32];
    std::snprintf(t, sizeof t, " (%.3fs)", c.seconds);
    out << t;
    if (!c.witness.empty()) out << "\n    " << c.witness;
    out << "\n";
  }
  for (const auto& [key, value] : report.data.items()) out << key << ": " << value.dump() << "\n";
  out << (report.ok() ? "all checks passed" : "some checks failed") << " (exit " << report.exit_code() << ")\n";
  return out.str();
}

}  // namespace pnred
