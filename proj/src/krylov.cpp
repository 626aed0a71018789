#include "somor/krylov.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace somor {

namespace {

std::string shift_label(cplx s) {
  std::ostringstream os;
  os.precision(6);
  os << "sigma=" << s.real();
  if (s.imag() != 0.0) os << (s.imag() > 0 ? "+" : "") << s.imag() << "i";
  return os.str();
}

bool is_real(cplx s) { return s.imag() == 0.0; }

// Appends realified columns of X to (raw, provenance).
void append_realified(MatrixXd& raw, std::vector<std::string>& prov, const MatrixXcd& X,
                      bool keep_imag, const std::string& label) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const bool has_imag = keep_imag && X.col(j).imag().norm() > 0.0;
    const Eigen::Index add = has_imag ? 2 : 1;
    raw.conservativeResize(X.rows(), raw.cols() + add);
    raw.col(raw.cols() - add) = X.col(j).real();
    prov.push_back(label + " col=" + std::to_string(j) + (has_imag ? " re" : ""));
    if (has_imag) {
      raw.col(raw.cols() - 1) = X.col(j).imag();
      prov.push_back(label + " col=" + std::to_string(j) + " im");
    }
  }
}

// Least-squares Rayleigh fit of D; true when D is (numerically) αM + βK.
bool proportional_damping(const LinearSecondOrderSystem& sys) {
  const double nd = sys.D.norm();
  if (nd == 0.0) return true;
  MatrixXd A(sys.n() * sys.n(), 2);
  A.col(0) = Eigen::Map<const VectorXd>(sys.M.data(), sys.M.size());
  A.col(1) = Eigen::Map<const VectorXd>(sys.K.data(), sys.K.size());
  Eigen::Map<const VectorXd> d(sys.D.data(), sys.D.size());
  VectorXd coef = A.colPivHouseholderQr().solve(d);
  return (A * coef - d).norm() <= 1e-10 * nd;
}

}  // namespace

InterpolationData InterpolationData::real_input(const std::vector<double>& shifts, const MatrixXd& R) {
  InterpolationData d;
  d.sigma.resize(static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t i = 0; i < shifts.size(); ++i) d.sigma(static_cast<Eigen::Index>(i)) = shifts[i];
  d.R = R.cast<cplx>();
  return d;
}

bool InterpolationData::input_is_real() const {
  return sigma.imag().cwiseAbs().maxCoeff() == 0.0 && R.imag().cwiseAbs().maxCoeff() == 0.0;
}

MatrixXd InterpolationData::S_v_real() const {
  if (!input_is_real()) throw UnsupportedError("complex interpolation data has no real S_v");
  return sigma.real().asDiagonal();
}

MatrixXd InterpolationData::R_real() const {
  if (!input_is_real()) throw UnsupportedError("complex interpolation data has no real R");
  return R.real();
}

void InterpolationData::validate(Eigen::Index m, Eigen::Index p) const {
  if (R.cols() != sigma.size()) throw ArgumentError("R must have one column per input shift");
  if (sigma.size() && R.rows() != m) throw ArgumentError("input directions must have length m");
  if (L.cols() != mu.size()) throw ArgumentError("L must have one column per output shift");
  if (mu.size() && L.rows() != p) throw ArgumentError("output directions must have length p");
  for (Eigen::Index i = 0; i < R.cols(); ++i) {
    if (R.col(i).norm() == 0.0) throw ArgumentError("input direction " + std::to_string(i) + " is zero");
  }
  for (Eigen::Index i = 0; i < L.cols(); ++i) {
    if (L.col(i).norm() == 0.0) throw ArgumentError("output direction " + std::to_string(i) + " is zero");
  }
}

ShiftedOperator::ShiftedOperator(const LinearSecondOrderSystem& sys, cplx sigma, bool transposed)
    : sigma_(sigma),
      K_sigma_(shifted_stiffness(sys, sigma)),
      D_sigma_(sys.D.cast<cplx>() + (2.0 * sigma) * sys.M.cast<cplx>()) {
  try {
    lu_ = transposed ? ComplexFactorization(K_sigma_.transpose(), "K_sigma^T")
                     : ComplexFactorization(K_sigma_, "K_sigma");
  } catch (const SingularityError&) {
    throw SingularityError("shift " + shift_label(sigma) +
                           " is (numerically) a quadratic eigenvalue: K_sigma is singular");
  }
}

std::shared_ptr<const ShiftedOperator> ShiftCache::get(cplx sigma, bool transposed) {
  const auto key = std::make_tuple(sigma.real(), sigma.imag(), transposed);
  {
    std::shared_lock lock(mutex_);
    auto it = ops_.find(key);
    if (it != ops_.end()) return it->second;
  }
  auto op = std::make_shared<const ShiftedOperator>(sys_, sigma, transposed);
  std::unique_lock lock(mutex_);
  return ops_.emplace(key, std::move(op)).first->second;
}

std::size_t ShiftCache::size() const {
  std::shared_lock lock(mutex_);
  return ops_.size();
}

OrthonormalBasis tangential_basis(const LinearSecondOrderSystem& sys, const InterpolationData& data,
                                  Side side) {
  data.validate(sys.m(), sys.p());
  const bool input = side == Side::input;
  const VectorXcd& shifts = input ? data.sigma : data.mu;
  const MatrixXcd& dirs = input ? data.R : data.L;
  if (shifts.size() == 0) throw ArgumentError("tangential_basis: no shifts on the requested side");

  ShiftCache cache(sys);
  const MatrixXcd rhs_op = input ? MatrixXcd(sys.B.cast<cplx>()) : MatrixXcd(sys.C.transpose().cast<cplx>());
  MatrixXd raw(sys.n(), 0);
  std::vector<std::string> prov;
  std::vector<std::string> notes;
  for (Eigen::Index i = 0; i < shifts.size(); ++i) {
    const cplx s = shifts(i);
    bool partner = false;
    if (!is_real(s)) {
      for (Eigen::Index j = 0; j < i; ++j) {
        if (shifts(j) == std::conj(s) && (dirs.col(j) - dirs.col(i).conjugate()).norm() == 0.0) {
          partner = true;
        }
      }
    }
    if (partner) {
      notes.push_back("skipped conjugate partner " + shift_label(s));
      continue;
    }
    auto op = cache.get(s, !input);
    MatrixXcd v = op->solve(rhs_op * dirs.col(i));
    append_realified(raw, prov, v, true, shift_label(s) + " dir=" + std::to_string(i));
  }
  auto basis = orthonormalize_columns(raw, prov, input ? "tangential-input" : "tangential-output");
  basis.deflation.insert(basis.deflation.end(), notes.begin(), notes.end());
  if (basis.rank() < raw.cols()) {
    basis.warnings.push_back("rank collapse: " + std::to_string(basis.rank()) + " of " +
                             std::to_string(raw.cols()) + " directions retained");
  }
  return basis;
}

OrthonormalBasis block_multimoment_basis(const LinearSecondOrderSystem& sys, cplx sigma, int order) {
  if (order < 1) throw ArgumentError("block_multimoment_basis: order must be at least 1");
  ShiftedOperator op(sys, sigma);
  MatrixXd raw(sys.n(), 0);
  std::vector<std::string> prov;
  OrthonormalBasis basis;
  basis.method = "block-multimoment";
  basis.V.resize(sys.n(), 0);
  if (!proportional_damping(sys)) {
    basis.warnings.push_back("damping is not proportional; first-order Krylov theory assumes D = aM + bK");
  }
  MatrixXcd block = op.solve(sys.B.cast<cplx>());
  const MatrixXcd Mc = sys.M.cast<cplx>();
  int achieved = 0;
  for (int i = 0; i < order; ++i) {
    if (i > 0) block = op.solve(Mc * block);
    const double scale = block.norm();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      basis.warnings.push_back("breakdown at order " + std::to_string(i) + "; achieved order " +
                               std::to_string(achieved));
      break;
    }
    const Eigen::Index before = raw.cols();
    append_realified(raw, prov, block, !is_real(sigma), shift_label(sigma) + " order=" + std::to_string(i));
    for (Eigen::Index j = before; j < raw.cols(); ++j) {
      if (!gram_schmidt_append(basis.V, raw.col(j))) {
        basis.deflation.push_back("dropped " + prov[static_cast<std::size_t>(j)]);
      }
    }
    ++achieved;
  }
  basis.raw = std::move(raw);
  basis.raw_provenance = std::move(prov);
  return basis;
}

OrthonormalBasis soar_basis(const LinearSecondOrderSystem& sys, cplx sigma, int order,
                            std::optional<VectorXd> direction, unsigned seed) {
  if (order < 1) throw ArgumentError("soar_basis: order must be at least 1");
  VectorXd b = direction ? *direction : VectorXd::Unit(sys.m(), 0);
  if (b.size() != sys.m() || b.norm() == 0.0) throw ArgumentError("soar_basis: invalid input direction");
  ShiftedOperator op(sys, sigma);
  const auto n = sys.n();
  const MatrixXcd Mc = sys.M.cast<cplx>();

  OrthonormalBasis basis;
  basis.method = "soar";
  if (!direction && sys.m() > 1) basis.warnings.push_back("multi-input system: using the first input");

  auto apply_A = [&](const VectorXcd& x) -> VectorXcd { return -op.solve(op.D_sigma() * x); };
  auto apply_B = [&](const VectorXcd& x) -> VectorXcd { return -op.solve(Mc * x); };

  // Q holds the primary sequence, P the auxiliary one. A deflated step keeps a
  // zero primary vector and carries the auxiliary remainder forward.
  std::vector<VectorXcd> Q, P;
  VectorXcd u = op.solve((sys.B * b).cast<cplx>());
  Q.push_back(u / u.norm());
  P.push_back(VectorXcd::Zero(n));
  Eigen::Index kept = 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int max_steps = 2 * order + 8;
  for (int j = 1; j < max_steps && kept < order && kept < n; ++j) {
    VectorXcd r = apply_A(Q.back()) + apply_B(P.back());
    VectorXcd s = Q.back();
    const double r_norm0 = r.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < Q.size(); ++i) {
        if (Q[i].squaredNorm() == 0.0) continue;
        const cplx t = Q[i].dot(r);
        r -= t * Q[i];
        s -= t * P[i];
      }
    }
    double nr = r.norm();
    if (!(nr > 1e-12 * r_norm0)) {
      if (s.norm() > 1e-12) {
        basis.deflation.push_back("deflation at step " + std::to_string(j));
        Q.push_back(VectorXcd::Zero(n));
        P.push_back(s);
        continue;
      }
      basis.deflation.push_back("breakdown at step " + std::to_string(j) + "; restarted with a random vector");
      r = VectorXcd::NullaryExpr(n, [&]() { return cplx(gauss(rng), 0.0); });
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : Q) {
          if (q.squaredNorm() > 0.0) r -= q.dot(r) * q;
        }
      }
      s = VectorXcd::Zero(n);
      nr = r.norm();
    }
    Q.push_back(r / nr);
    P.push_back(s / nr);
    ++kept;
  }
  std::erase_if(Q, [](const VectorXcd& q) { return q.squaredNorm() == 0.0; });
  MatrixXcd Qm(n, static_cast<Eigen::Index>(Q.size()));
  for (std::size_t i = 0; i < Q.size(); ++i) Qm.col(static_cast<Eigen::Index>(i)) = Q[i];
  MatrixXd raw(n, 0);
  std::vector<std::string> prov;
  append_realified(raw, prov, Qm, !is_real(sigma), shift_label(sigma) + " soar");
  auto ortho = orthonormalize_columns(raw, prov, "soar");
  ortho.warnings.insert(ortho.warnings.begin(), basis.warnings.begin(), basis.warnings.end());
  ortho.deflation.insert(ortho.deflation.begin(), basis.deflation.begin(), basis.deflation.end());
  return ortho;
}

VectorXcd compute_moment(const LinearSecondOrderSystem& sys, cplx sigma, int i, const VectorXcd& r_dir) {
  if (i < 0) throw ArgumentError("moment index must be nonnegative");
  if (r_dir.size() != sys.m()) throw ArgumentError("direction must have length m");
  ShiftedOperator op(sys, sigma);
  const MatrixXcd Mc = sys.M.cast<cplx>();
  VectorXcd top = op.solve(sys.B.cast<cplx>() * r_dir);
  VectorXcd bottom = VectorXcd::Zero(sys.n());
  for (int k = 0; k < i; ++k) {
    VectorXcd next = op.solve(op.D_sigma() * top + Mc * bottom);
    bottom = -top;
    top = std::move(next);
  }
  const double sign = (i % 2 == 0) ? 1.0 : -1.0;
  return sign * (sys.C.cast<cplx>() * top);
}

double sylvester_residual(const LinearSecondOrderSystem& sys, const MatrixXd& V,
                          const InterpolationData& data) {
  const MatrixXd S = data.S_v_real();
  const MatrixXd R = data.R_real();
  if (V.rows() != sys.n() || V.cols() != S.rows()) {
    throw ArgumentError("sylvester_residual: V must be n x r with r = number of shifts");
  }
  const MatrixXd BR = sys.B * R;
  const MatrixXd res = sys.M * V * S * S + sys.D * V * S + sys.K * V - BR;
  return res.norm() / BR.norm();
}

double sylvester_residual(const LinearSecondOrderSystem& sys, const OrthonormalBasis& basis,
                          const InterpolationData& data) {
  if (basis.method != "tangential-input" || basis.raw.cols() != data.sigma.size()) {
    throw UnsupportedError("basis carries no raw tangential solutions matching the interpolation data");
  }
  return sylvester_residual(sys, basis.raw, data);
}

double InterpolationErrors::max() const {
  double m = 0.0;
  for (double e : input) m = std::max(m, e);
  for (double e : output) m = std::max(m, e);
  return m;
}

InterpolationErrors verify_interpolation(const LinearSecondOrderSystem& fom,
                                         const LinearSecondOrderSystem& rom,
                                         const InterpolationData& data) {
  data.validate(fom.m(), fom.p());
  InterpolationErrors out;
  for (Eigen::Index i = 0; i < data.sigma.size(); ++i) {
    const VectorXcd g = transfer_function(fom, data.sigma(i)) * data.R.col(i);
    const VectorXcd gr = transfer_function(rom, data.sigma(i)) * data.R.col(i);
    out.input.push_back((g - gr).norm() / g.norm());
  }
  for (Eigen::Index i = 0; i < data.mu.size(); ++i) {
    const VectorXcd g = data.L.col(i).transpose() * transfer_function(fom, data.mu(i));
    const VectorXcd gr = data.L.col(i).transpose() * transfer_function(rom, data.mu(i));
    out.output.push_back((g - gr).norm() / g.norm());
  }
  return out;
}

}  // namespace somor
