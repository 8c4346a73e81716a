#include "quadsim/layout.hpp"

#include <algorithm>
#include <unordered_set>

#include "quadsim/errors.hpp"

namespace quadsim {

bool ModeLayout::has(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

int ModeLayout::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw ConfigError("unknown mode label '" + label + "'");
  }
  return static_cast<int>(it - labels.begin());
}

ModeLayout ModeLayout::of(std::vector<std::string> labels) {
  if (labels.empty()) {
    throw ConfigError("mode layout must contain at least one mode");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) {
      throw ConfigError("mode labels must be nonempty");
    }
    if (!seen.insert(label).second) {
      throw ConfigError("duplicate mode label '" + label + "'");
    }
  }
  return ModeLayout{std::move(labels)};
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

Partition Partition::against_rest(const ModeLayout& layout,
                                  std::vector<std::string> side_a) {
  Partition p;
  p.side_a = std::move(side_a);
  for (const auto& label : layout.labels) {
    if (std::find(p.side_a.begin(), p.side_a.end(), label) ==
        p.side_a.end()) {
      p.side_b.push_back(label);
    }
  }
  p.validate(layout);
  return p;
}

void Partition::validate(const ModeLayout& layout) const {
  if (side_a.empty() || side_b.empty()) {
    throw ConfigError("both sides of a partition must be nonempty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : side_a) {
    layout.index_of(label);
    if (!seen.insert(label).second) {
      throw ConfigError("mode '" + label + "' listed twice in partition");
    }
  }
  for (const auto& label : side_b) {
    layout.index_of(label);
    if (!seen.insert(label).second) {
      throw ConfigError("mode '" + label + "' listed twice in partition");
    }
  }
  if (static_cast<int>(seen.size()) != layout.n_modes()) {
    throw ConfigError("partition does not cover every mode");
  }
}

}  // namespace quadsim
