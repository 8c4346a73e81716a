#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace quadsim {

// Ordered set of bosonic modes. Quadratures are stored interleaved,
// (x_1, p_1, x_2, p_2, ...), dimensionless with hbar = 1, and the vacuum
// covariance normalized to the identity.
struct ModeLayout {
  std::vector<std::string> labels;

  int n_modes() const { return static_cast<int>(labels.size()); }
  int dim() const { return 2 * n_modes(); }
  bool has(const std::string& label) const;
  // Mode position of `label`; throws ConfigError on unknown labels.
  int index_of(const std::string& label) const;
  static int x_index(int mode) { return 2 * mode; }
  static int p_index(int mode) { return 2 * mode + 1; }

  // Validates that labels are nonempty and unique.
  static ModeLayout of(std::vector<std::string> labels);
};

// Block-diagonal symplectic form: 2x2 blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

// Bipartition of a layout into two complementary nonempty sides.
struct Partition {
  std::vector<std::string> side_a;
  std::vector<std::string> side_b;

  // side_a against everything else in `layout` (in layout order).
  static Partition against_rest(const ModeLayout& layout,
                                std::vector<std::string> side_a);
  // Throws ConfigError unless the two sides are disjoint, nonempty, and
  // together cover the layout exactly.
  void validate(const ModeLayout& layout) const;
};

}  // namespace quadsim
