#pragma once

#include <optional>
#include <string>

#include "somor/model.hpp"

namespace somor {

/// Reads a real Matrix Market file (coordinate or array; general, symmetric
/// or skew-symmetric). Parse errors carry the offending line number.
MatrixXd read_matrix_market(const std::string& path);

/// Writes `A` in array format with shortest round-trip numbers.
void write_matrix_market(const std::string& path, const MatrixXd& A);

struct LinearSystemPaths {
  std::string M, K, B;
  std::optional<std::string> D, C;
};

/// Missing D means zero damping; missing C means C = Bᵀ.
LinearSecondOrderSystem load_linear_system(const LinearSystemPaths& paths);

}  // namespace somor
