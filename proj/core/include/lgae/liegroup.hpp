#pragma once

// Geometry of the Lie group of upper-triangular positive-definite affine
// transforms (UTDATs). A UTDAT
//
//     G = [ U  mu ]
//         [ 0   1 ]
//
// with U upper triangular and diag(U) > 0 represents the Gaussian
// N(mu, U U^T). Its Lie algebra consists of matrices of the same block shape
// with an unrestricted upper-triangular block and a zero bottom row.

#include <Eigen/Core>

#include <iosfwd>
#include <span>
#include <vector>

namespace lgae::liegroup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Utdat {
 public:
  /// Throws InvalidArgument unless U is square upper triangular with a
  /// strictly positive diagonal and mu has matching length.
  Utdat(Matrix U, Vector mu);

  static Utdat identity(Index n);

  /// Reads the blocks of an (n+1)x(n+1) embedded matrix. Entries below the
  /// diagonal of the U block are discarded.
  static Utdat from_embedded(const Matrix& G);

  [[nodiscard]] Index dim() const noexcept { return mu_.size(); }
  [[nodiscard]] const Matrix& U() const noexcept { return U_; }
  [[nodiscard]] const Vector& mu() const noexcept { return mu_; }

  [[nodiscard]] Matrix embedded() const;

 private:
  Matrix U_;
  Vector mu_;
};

/// Element of the Lie algebra: upper-triangular M plus translation t.
class TangentMatrix {
 public:
  TangentMatrix(Matrix M, Vector t);

  static TangentMatrix zero(Index n);
  static TangentMatrix from_embedded(const Matrix& g);

  [[nodiscard]] Index dim() const noexcept { return t_.size(); }
  [[nodiscard]] const Matrix& M() const noexcept { return M_; }
  [[nodiscard]] const Vector& t() const noexcept { return t_; }

  [[nodiscard]] Matrix embedded() const;
  [[nodiscard]] double norm() const;

 private:
  Matrix M_;
  Vector t_;
};

/// Diagonal Gaussian N(mu, diag(sigma^2)).
class DiagGaussian {
 public:
  DiagGaussian(Vector mu, Vector sigma);

  [[nodiscard]] Index dim() const noexcept { return mu_.size(); }
  [[nodiscard]] const Vector& mu() const noexcept { return mu_; }
  [[nodiscard]] const Vector& sigma() const noexcept { return sigma_; }

  [[nodiscard]] Utdat to_utdat() const;

 private:
  Vector mu_;
  Vector sigma_;
};

/// Lie-algebra coordinates of a diagonal Gaussian at the identity:
/// phi on the diagonal, theta in the translation column.
struct TangentDiag {
  Vector phi;
  Vector theta;

  [[nodiscard]] Index dim() const noexcept { return phi.size(); }
  [[nodiscard]] TangentMatrix to_tangent() const;
};

struct GaussianParams {
  Vector mu;
  Matrix covariance;
};

Utdat utdat_from_gaussian(const Vector& mu, const Matrix& covariance);
GaussianParams gaussian_from_utdat(const Utdat& g);

Utdat group_mul(const Utdat& a, const Utdat& b);
Utdat group_inv(const Utdat& g);

inline Utdat operator*(const Utdat& a, const Utdat& b) { return group_mul(a, b); }

/// Scaling and squaring with a truncated Taylor series.
Matrix matrix_exp(const Matrix& a);

/// Principal logarithm by inverse scaling and squaring followed by the
/// series log(I + H) = sum (-1)^(t-1) H^t / t. Throws NonConvergent when the
/// square-root stage cannot bring the input near the identity.
Matrix matrix_log(const Matrix& a);

/// log(base^-1 g), the coordinates of g in the tangent space at base.
TangentMatrix log_map(const Utdat& g, const Utdat& base);

/// base * exp(g).
Utdat exp_map(const TangentMatrix& g, const Utdat& base);

/// ||log(a^-1 b)||_F
double geodesic_distance(const Utdat& a, const Utdat& b);

// Closed forms for diagonal Gaussians.

/// (e^x - 1) / x, continuous through x = 0.
double expm1_ratio(double x);
/// d/dx of expm1_ratio.
double expm1_ratio_derivative(double x);
/// log(1 + x) / x, continuous through x = 0.
double log1p_ratio(double x);

TangentDiag diag_log_map(const DiagGaussian& q);
DiagGaussian diag_exp_map(const TangentDiag& t);

struct DiagExpJacobian {
  Vector dsigma_dphi;
  Vector dmu_dphi;
  Vector dmu_dtheta;
};

DiagExpJacobian diag_exp_map_jacobian(const TangentDiag& t);

/// Mean over the batch of sum_k (phi_k^2 + theta_k^2), i.e. the mean squared
/// geodesic distance of each encoded Gaussian to the standard Gaussian.
double intrinsic_loss(std::span<const TangentDiag> batch);

/// z = U v + mu.
Vector sample_latent(const Utdat& g, const Vector& v);

struct IntrinsicMeanResult {
  Utdat mean;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // Frobenius norm of the last tangent mean
};

IntrinsicMeanResult intrinsic_mean(std::span<const Utdat> points, double tol = 1e-12,
                                   int max_iter = 100);

std::ostream& operator<<(std::ostream& os, const Utdat& g);
std::ostream& operator<<(std::ostream& os, const TangentMatrix& g);

}  // namespace lgae::liegroup
