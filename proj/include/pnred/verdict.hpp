#pragma once

#include <string>
#include <utility>

namespace pnred {

// Outcome of a symbolic or numeric check. A failing verdict carries a
// human-readable witness (the first nonzero residual found).
struct Verdict {
  bool ok = true;
  std::string witness;

  static Verdict pass() { return {}; }
  static Verdict fail(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const { return ok; }
};

inline Verdict both(const Verdict& a, const Verdict& b) { return a.ok ? b : a; }

}  // namespace pnred
