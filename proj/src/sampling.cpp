#include "pnred/sampling.hpp"

#include <random>

namespace pnred {

Box default_box(const std::vector<std::string>& vars,
                const std::map<std::string, std::pair<double, double>>& overrides) {
  Box out;
  for (const auto& v : vars) {
    auto it = overrides.find(v);
    if (it != overrides.end()) {
      out.push_back(it->second);
    } else if (v.rfind("mu", 0) == 0) {
      out.emplace_back(-2.0, 2.0);
    } else if (v.rfind("a", 0) == 0) {
      out.emplace_back(0.5, 2.0);
    } else {
      out.emplace_back(-1.0, 1.0);
    }
  }
  return out;
}

std::vector<std::vector<double>> sample_box(const Box& box, int count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<double> x;
    x.reserve(box.size());
    for (const auto& [lo, hi] : box) {
      double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      x.push_back(lo + (hi - lo) * u);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace pnred
