#include "lgae/liegroup.hpp"

#include "lgae/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace lgae::liegroup {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 200;
constexpr int kMaxSquareRoots = 64;
constexpr int kMaxNewtonIterations = 100;

double norm1(const Matrix& a) {
  return a.cols() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": matrix is not square");
  }
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": non-finite entry");
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

bool is_upper_triangular(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = j + 1; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Principal square root of an upper-triangular matrix with positive diagonal
// via the column recurrence R_ij = (T_ij - sum_k R_ik R_kj) / (R_ii + R_jj).
Matrix sqrt_upper_triangular(const Matrix& t) {
  const Index n = t.rows();
  Matrix r = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    r(j, j) = std::sqrt(t(j, j));
    for (Index i = j - 1; i >= 0; --i) {
      double s = t(i, j);
      for (Index k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      r(i, j) = s / (r(i, i) + r(j, j));
    }
  }
  return r;
}

// Denman-Beavers Newton iteration for a general matrix.
Matrix sqrt_newton(const Matrix& a) {
  const Index n = a.rows();
  Matrix y = a;
  Matrix z = Matrix::Identity(n, n);
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    Eigen::PartialPivLU<Matrix> lu_y(y);
    Eigen::PartialPivLU<Matrix> lu_z(z);
    Matrix y_next = 0.5 * (y + lu_z.inverse());
    Matrix z_next = 0.5 * (z + lu_y.inverse());
    if (!y_next.allFinite()) break;
    const double delta = norm1(y_next - y);
    y = std::move(y_next);
    z = std::move(z_next);
    if (delta <= 4.0 * kEps * norm1(y)) return y;
  }
  throw Error(ErrorCode::NonConvergent, "matrix square root iteration did not converge");
}

}  // namespace

// ---------------------------------------------------------------------------
// Types

Utdat::Utdat(Matrix U, Vector mu) : U_(std::move(U)), mu_(std::move(mu)) {
  require_square(U_, "Utdat");
  require_same_dim(U_.rows(), mu_.size(), "Utdat");
  if (U_.rows() == 0) throw Error(ErrorCode::InvalidArgument, "Utdat: empty dimension");
  if (!is_upper_triangular(U_)) {
    throw Error(ErrorCode::InvalidArgument, "Utdat: U has nonzero entries below the diagonal");
  }
  for (Index i = 0; i < U_.rows(); ++i) {
    if (!(U_(i, i) > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "Utdat: diagonal of U must be strictly positive");
    }
  }
}

Utdat Utdat::identity(Index n) { return {Matrix::Identity(n, n), Vector::Zero(n)}; }

Utdat Utdat::from_embedded(const Matrix& G) {
  require_square(G, "Utdat::from_embedded");
  const Index n = G.rows() - 1;
  Matrix U = G.topLeftCorner(n, n).triangularView<Eigen::Upper>();
  return {std::move(U), G.col(n).head(n)};
}

Matrix Utdat::embedded() const {
  const Index n = dim();
  Matrix G = Matrix::Zero(n + 1, n + 1);
  G.topLeftCorner(n, n) = U_;
  G.col(n).head(n) = mu_;
  G(n, n) = 1.0;
  return G;
}

TangentMatrix::TangentMatrix(Matrix M, Vector t) : M_(std::move(M)), t_(std::move(t)) {
  require_square(M_, "TangentMatrix");
  require_same_dim(M_.rows(), t_.size(), "TangentMatrix");
  if (!is_upper_triangular(M_)) {
    throw Error(ErrorCode::InvalidArgument,
                "TangentMatrix: M has nonzero entries below the diagonal");
  }
}

TangentMatrix TangentMatrix::zero(Index n) { return {Matrix::Zero(n, n), Vector::Zero(n)}; }

TangentMatrix TangentMatrix::from_embedded(const Matrix& g) {
  require_square(g, "TangentMatrix::from_embedded");
  const Index n = g.rows() - 1;
  Matrix M = g.topLeftCorner(n, n).triangularView<Eigen::Upper>();
  return {std::move(M), g.col(n).head(n)};
}

Matrix TangentMatrix::embedded() const {
  const Index n = dim();
  Matrix g = Matrix::Zero(n + 1, n + 1);
  g.topLeftCorner(n, n) = M_;
  g.col(n).head(n) = t_;
  return g;
}

double TangentMatrix::norm() const {
  return std::sqrt(M_.squaredNorm() + t_.squaredNorm());
}

DiagGaussian::DiagGaussian(Vector mu, Vector sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  require_same_dim(mu_.size(), sigma_.size(), "DiagGaussian");
  for (Index k = 0; k < sigma_.size(); ++k) {
    if (!(sigma_[k] > 0.0) || !std::isfinite(sigma_[k])) {
      throw Error(ErrorCode::InvalidArgument, "DiagGaussian: sigma must be positive and finite");
    }
  }
}

Utdat DiagGaussian::to_utdat() const { return {sigma_.asDiagonal().toDenseMatrix(), mu_}; }

TangentMatrix TangentDiag::to_tangent() const {
  require_same_dim(phi.size(), theta.size(), "TangentDiag");
  return {phi.asDiagonal().toDenseMatrix(), theta};
}

// ---------------------------------------------------------------------------
// Gaussian <-> UTDAT

Utdat utdat_from_gaussian(const Vector& mu, const Matrix& covariance) {
  require_square(covariance, "utdat_from_gaussian");
  require_same_dim(covariance.rows(), mu.size(), "utdat_from_gaussian");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument, "utdat_from_gaussian: covariance is not symmetric");
  }
  // Upper factor through the reversal permutation J: if J S J = L L^T then
  // S = (J L J)(J L J)^T and J L J is upper triangular.
  const Matrix flipped = covariance.reverse();
  Eigen::LLT<Matrix> llt(flipped);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPositiveDefinite, "utdat_from_gaussian: non-positive pivot");
  }
  Matrix lower = llt.matrixL();
  Matrix U = lower.reverse();
  for (Index i = 0; i < U.rows(); ++i) {
    if (!(U(i, i) > 0.0)) {
      throw Error(ErrorCode::NonPositiveDefinite, "utdat_from_gaussian: non-positive pivot");
    }
  }
  return {std::move(U), mu};
}

GaussianParams gaussian_from_utdat(const Utdat& g) {
  return {g.mu(), g.U() * g.U().transpose()};
}

// ---------------------------------------------------------------------------
// Group operations

Utdat group_mul(const Utdat& a, const Utdat& b) {
  require_same_dim(a.dim(), b.dim(), "group_mul");
  Matrix U = (a.U().triangularView<Eigen::Upper>() * b.U()).eval();
  U.triangularView<Eigen::StrictlyLower>().setZero();
  return {std::move(U), a.U() * b.mu() + a.mu()};
}

Utdat group_inv(const Utdat& g) {
  const Index n = g.dim();
  Matrix Uinv = g.U().triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  Uinv.triangularView<Eigen::StrictlyLower>().setZero();
  Vector mu = -(Uinv * g.mu());
  return {std::move(Uinv), std::move(mu)};
}

// ---------------------------------------------------------------------------
// Matrix kernels

Matrix matrix_exp(const Matrix& a) {
  require_square(a, "matrix_exp");
  require_finite(a, "matrix_exp");
  const Index n = a.rows();
  const double norm = norm1(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a * std::ldexp(1.0, -squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (norm1(term) <= kEps * norm1(result)) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

Matrix matrix_log(const Matrix& a) {
  require_square(a, "matrix_log");
  require_finite(a, "matrix_log");
  const Index n = a.rows();
  const bool upper = is_upper_triangular(a);
  if (upper) {
    for (Index i = 0; i < n; ++i) {
      if (!(a(i, i) > 0.0)) {
        throw Error(ErrorCode::NonConvergent,
                    "matrix_log: diagonal must be positive for a principal logarithm");
      }
    }
  }

  const Matrix identity = Matrix::Identity(n, n);
  Matrix x = a;
  int roots = 0;
  while (norm1(x - identity) >= 0.25) {
    if (++roots > kMaxSquareRoots) {
      throw Error(ErrorCode::NonConvergent, "matrix_log: inverse scaling did not converge");
    }
    x = upper ? sqrt_upper_triangular(x) : sqrt_newton(x);
  }

  const Matrix h = x - identity;
  Matrix result = Matrix::Zero(n, n);
  Matrix power = identity;
  for (int t = 1; t <= kMaxSeriesTerms; ++t) {
    power = (power * h).eval();
    const double sign = (t % 2 == 1) ? 1.0 : -1.0;
    Matrix term = power * (sign / static_cast<double>(t));
    result += term;
    if (norm1(term) <= kEps * norm1(result)) break;
  }
  return result * std::ldexp(1.0, roots);
}

// ---------------------------------------------------------------------------
// Mappings

TangentMatrix log_map(const Utdat& g, const Utdat& base) {
  require_same_dim(g.dim(), base.dim(), "log_map");
  return TangentMatrix::from_embedded(matrix_log(group_mul(group_inv(base), g).embedded()));
}

Utdat exp_map(const TangentMatrix& g, const Utdat& base) {
  require_same_dim(g.dim(), base.dim(), "exp_map");
  return group_mul(base, Utdat::from_embedded(matrix_exp(g.embedded())));
}

double geodesic_distance(const Utdat& a, const Utdat& b) {
  require_same_dim(a.dim(), b.dim(), "geodesic_distance");
  return log_map(b, a).norm();
}

// ---------------------------------------------------------------------------
// Diagonal closed forms

double expm1_ratio(double x) {
  if (std::abs(x) < 1e-3) {
    // 1 + x/2 + x^2/6 + x^3/24 + x^4/120
    return 1.0 + x * (1.0 / 2 + x * (1.0 / 6 + x * (1.0 / 24 + x * (1.0 / 120))));
  }
  return std::expm1(x) / x;
}

double expm1_ratio_derivative(double x) {
  if (std::abs(x) < 0.1) {
    // sum_{n>=1} n x^(n-1) / (n+1)!
    double factorial = 2.0;  // (n+1)! at n = 1
    double power = 1.0;
    double sum = 0.0;
    for (int n = 1; n <= 14; ++n) {
      sum += n * power / factorial;
      power *= x;
      factorial *= (n + 2);
    }
    return sum;
  }
  return (x * std::exp(x) - std::expm1(x)) / (x * x);
}

double log1p_ratio(double x) {
  if (std::abs(x) < 1e-3) {
    return 1.0 + x * (-1.0 / 2 + x * (1.0 / 3 + x * (-1.0 / 4 + x * (1.0 / 5))));
  }
  return std::log1p(x) / x;
}

TangentDiag diag_log_map(const DiagGaussian& q) {
  const Index k = q.dim();
  TangentDiag t{Vector(k), Vector(k)};
  for (Index i = 0; i < k; ++i) {
    const double sigma = q.sigma()[i];
    t.phi[i] = std::log(sigma);
    t.theta[i] = q.mu()[i] * log1p_ratio(sigma - 1.0);
  }
  return t;
}

DiagGaussian diag_exp_map(const TangentDiag& t) {
  require_same_dim(t.phi.size(), t.theta.size(), "diag_exp_map");
  const Index k = t.dim();
  Vector mu(k);
  Vector sigma(k);
  for (Index i = 0; i < k; ++i) {
    sigma[i] = std::exp(t.phi[i]);
    mu[i] = t.theta[i] * expm1_ratio(t.phi[i]);
  }
  return {std::move(mu), std::move(sigma)};
}

DiagExpJacobian diag_exp_map_jacobian(const TangentDiag& t) {
  require_same_dim(t.phi.size(), t.theta.size(), "diag_exp_map_jacobian");
  const Index k = t.dim();
  DiagExpJacobian jac{Vector(k), Vector(k), Vector(k)};
  for (Index i = 0; i < k; ++i) {
    const double phi = t.phi[i];
    jac.dsigma_dphi[i] = std::exp(phi);
    jac.dmu_dtheta[i] = expm1_ratio(phi);
    jac.dmu_dphi[i] = t.theta[i] * expm1_ratio_derivative(phi);
  }
  return jac;
}

double intrinsic_loss(std::span<const TangentDiag> batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "intrinsic_loss: empty batch");
  const Index k = batch.front().dim();
  double total = 0.0;
  for (const auto& t : batch) {
    require_same_dim(t.phi.size(), k, "intrinsic_loss");
    require_same_dim(t.theta.size(), k, "intrinsic_loss");
    total += t.phi.squaredNorm() + t.theta.squaredNorm();
  }
  return total / static_cast<double>(batch.size());
}

Vector sample_latent(const Utdat& g, const Vector& v) {
  require_same_dim(g.dim(), v.size(), "sample_latent");
  return g.U().triangularView<Eigen::Upper>() * v + g.mu();
}

IntrinsicMeanResult intrinsic_mean(std::span<const Utdat> points, double tol, int max_iter) {
  if (points.empty()) throw Error(ErrorCode::EmptyBatch, "intrinsic_mean: no points");
  const Index n = points.front().dim();
  for (const auto& p : points) require_same_dim(p.dim(), n, "intrinsic_mean");

  IntrinsicMeanResult result{points.front(), false, 0, 0.0};
  const double count = static_cast<double>(points.size());
  for (int it = 0; it <= max_iter; ++it) {
    Matrix mean = Matrix::Zero(n + 1, n + 1);
    for (const auto& p : points) mean += log_map(p, result.mean).embedded();
    mean /= count;
    result.residual = mean.norm();
    result.iterations = it;
    if (result.residual < tol) {
      result.converged = true;
      return result;
    }
    if (it == max_iter) break;
    result.mean = exp_map(TangentMatrix::from_embedded(mean), result.mean);
  }
  return result;
}

std::ostream& operator<<(std::ostream& os, const Utdat& g) {
  const auto flags = os.flags();
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << g.embedded();
  os.precision(precision);
  os.flags(flags);
  return os;
}

std::ostream& operator<<(std::ostream& os, const TangentMatrix& g) {
  const auto flags = os.flags();
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << g.embedded();
  os.precision(precision);
  os.flags(flags);
  return os;
}

}  // namespace lgae::liegroup
