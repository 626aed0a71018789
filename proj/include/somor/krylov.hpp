#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "somor/basis.hpp"
#include "somor/model.hpp"

namespace somor {

/// Tangential interpolation data. Input side (σ_i, r_i), optional output
/// side (μ_i, l_i).
struct InterpolationData {
  VectorXcd sigma;
  MatrixXcd R;  // m×r
  VectorXcd mu;
  MatrixXcd L;  // p×r

  static InterpolationData real_input(const std::vector<double>& shifts, const MatrixXd& R);

  /// diag(σ) and R as real matrices; throws UnsupportedError for complex data.
  MatrixXd S_v_real() const;
  MatrixXd R_real() const;
  bool input_is_real() const;
  void validate(Eigen::Index m, Eigen::Index p) const;
};

/// K_σ = K + σD + σ²M and D_σ = D + 2σM with a reusable factorization.
class ShiftedOperator {
 public:
  ShiftedOperator(const LinearSecondOrderSystem& sys, cplx sigma, bool transposed = false);

  cplx sigma() const { return sigma_; }
  const MatrixXcd& K_sigma() const { return K_sigma_; }
  const MatrixXcd& D_sigma() const { return D_sigma_; }
  /// K_σ⁻¹ rhs, or K_σ⁻ᵀ rhs when transposed.
  MatrixXcd solve(const MatrixXcd& rhs) const { return lu_.solve(rhs); }

 private:
  cplx sigma_;
  MatrixXcd K_sigma_, D_sigma_;
  ComplexFactorization lu_;
};

/// Factorizations keyed by shift; read-mostly, insertion is exclusive.
class ShiftCache {
 public:
  explicit ShiftCache(const LinearSecondOrderSystem& sys) : sys_(sys) {}
  std::shared_ptr<const ShiftedOperator> get(cplx sigma, bool transposed = false);
  std::size_t size() const;

 private:
  const LinearSecondOrderSystem& sys_;
  mutable std::shared_mutex mutex_;
  std::map<std::tuple<double, double, bool>, std::shared_ptr<const ShiftedOperator>> ops_;
};

enum class Side { input, output };

/// span{K_σi⁻¹ B r_i} (input) or span{K_μi⁻ᵀ Cᵀ l_i} (output). Complex shifts
/// contribute Re and Im of one solve; a conjugate partner that follows is
/// skipped.
OrthonormalBasis tangential_basis(const LinearSecondOrderSystem& sys, const InterpolationData& data,
                                  Side side = Side::input);

/// V_0 = K_σ⁻¹ B, V_i = K_σ⁻¹ M V_{i−1}, i < order.
OrthonormalBasis block_multimoment_basis(const LinearSecondOrderSystem& sys, cplx sigma, int order);

/// Second-order Krylov subspace K_r(−K_σ⁻¹D_σ, −K_σ⁻¹M, K_σ⁻¹ B b) via the
/// two-sequence SOAR recurrence. `direction` selects the input combination
/// b (defaults to the first input).
OrthonormalBasis soar_basis(const LinearSecondOrderSystem& sys, cplx sigma, int order,
                            std::optional<VectorXd> direction = std::nullopt,
                            unsigned seed = 12345);

/// i-th moment of G at σ along r_dir, a p-vector (Taylor coefficient of G(s) r_dir in s−σ).
VectorXcd compute_moment(const LinearSecondOrderSystem& sys, cplx sigma, int i, const VectorXcd& r_dir);

/// ‖M V S² + D V S + K V − B R‖_F / ‖B R‖_F for real shifts.
double sylvester_residual(const LinearSecondOrderSystem& sys, const MatrixXd& V,
                          const InterpolationData& data);
/// Same, evaluated on the raw solutions stored in a tangential basis.
double sylvester_residual(const LinearSecondOrderSystem& sys, const OrthonormalBasis& basis,
                          const InterpolationData& data);

struct InterpolationErrors {
  std::vector<double> input;   // ‖G(σ_i)r_i − G_r(σ_i)r_i‖ / ‖G(σ_i)r_i‖
  std::vector<double> output;  // ‖l_iᵀG(μ_i) − l_iᵀG_r(μ_i)‖ / ‖l_iᵀG(μ_i)‖
  double max() const;
};

InterpolationErrors verify_interpolation(const LinearSecondOrderSystem& fom,
                                         const LinearSecondOrderSystem& rom,
                                         const InterpolationData& data);

}  // namespace somor
