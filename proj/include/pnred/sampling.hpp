#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pnred {

// Closed interval per base coordinate.
using Box = std::vector<std::pair<double, double>>;

// Default ranges by coordinate name, chosen away from the singular loci of
// the builtin fixtures: a* in [0.5, 2], mu* in [-2, 2], everything else
// (q*, p*, b*, ...) in [-1, 1]. Entries of `overrides` replace defaults.
Box default_box(const std::vector<std::string>& vars,
                const std::map<std::string, std::pair<double, double>>& overrides = {});

// Uniform points from mt19937_64, mapped through the top 53 bits so the
// stream is identical on every platform.
std::vector<std::vector<double>> sample_box(const Box& box, int count, std::uint64_t seed);

}  // namespace pnred
