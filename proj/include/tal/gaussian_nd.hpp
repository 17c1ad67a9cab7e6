#pragma once

#include <vector>

#include "tal/certificate.hpp"
#include "tal/common.hpp"

namespace tal {

/// Small dense square matrix (dimensions up to 16), row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
  static Matrix identity(int n);

  int dim() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix scaled(double s) const;

  double trace() const;
  double frobenius_sq() const;  // squared Hilbert-Schmidt norm
  bool symmetric(double tol = 1e-12) const;
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition for symmetric matrices; plenty accurate
/// at these dimensions and free of external dependencies.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-14);

/// Validates symmetry and positive-definiteness (smallest eigenvalue above
/// 1e-12 times the largest); throws NotSpd otherwise.
SymmetricEigen check_spd(const Matrix& a);

Matrix spd_sqrt(const Matrix& a);
Matrix spd_inverse(const Matrix& a);
double spd_logdet(const Matrix& a);
double max_eigenvalue_sym(const Matrix& a);

/// Gaussian measure N(mean, cov) on R^n with SPD covariance.
struct GaussianNd {
  std::vector<double> mean;
  Matrix cov;

  GaussianNd(std::vector<double> mean_in, Matrix cov_in);
  int dim() const { return cov.dim(); }
  GaussianNd translated(const std::vector<double>& a) const;
};

/// W2^2 = |a1 - a2|^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}).
double bures_w2_squared(const GaussianNd& g1, const GaussianNd& g2);
double bures_w2(const GaussianNd& g1, const GaussianNd& g2);

/// Ent_{gamma_n}(N(a, S)) = (tr S + |a|^2 - n - logdet S) / 2.
double gauss_rel_entropy(const GaussianNd& g);

/// logdet((1-t)A + tB) - (1-t) logdet A - t logdet B
///   - t(1-t)/2 * |A - B|_HS^2 / max(lambda_A^2, lambda_B^2); always >= 0
/// up to roundoff.
double logdet_gap(const Matrix& a, const Matrix& b, double t);

/// The closed-form equality family: mu = N(a, A), nu = N(0, A^{-1}) make the
/// symmetrized transport inequality an identity. Also checks the barycenter
/// form against nu centered at b.
Certificate equality_case(const Matrix& a_matrix, const std::vector<double>& a_center,
                          Tolerances tol = {},
                          const std::vector<double>* nu_center = nullptr);

/// Translation identities for the squared distance and the relative entropy,
/// plus invariance of the barycenter-corrected functional under joint shifts.
Certificate translation_check(const GaussianNd& mu, const GaussianNd& nu,
                              const std::vector<double>& a, Tolerances tol = {});

/// Closed-form symmetrized inequality with the barycenter correction:
/// W2^2/2 <= Ent(mu) + Ent(nu) - <bary mu, bary nu>.
Certificate gauss_ssti(const GaussianNd& mu, const GaussianNd& nu, Tolerances tol = {});

/// Closed-form centered variant requiring bary(nu) = 0.
Certificate gauss_sti2(const GaussianNd& mu, const GaussianNd& nu, Tolerances tol = {});

/// Certificate wrapper around logdet_gap.
Certificate logdet_certificate(const Matrix& a, const Matrix& b, double t, Tolerances tol = {});

}  // namespace tal
