#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flexpath/core/errors.hpp"

namespace flexpath::basis {

enum class BasisKind { kFourier, kShiftedSine, kCustom };
enum class Selection {
  kLowestFrequency,   // rows 0..K-1 of the Fourier matrix (LFB)
  kHighestFrequency,  // rows L+1-K..L (HFB)
  kFirstK,            // rows 0..K-1 of any basis (used for shifted-sine, SSB)
};
enum class FitMode { kLeastSquares, kTruncation };

std::string to_string(BasisKind kind);
std::string to_string(Selection selection);
BasisKind basis_kind_from_string(const std::string& name);
Selection selection_from_string(const std::string& name);

/// (L+1) x (L+1) basis-path matrix; row l is basis path p_l.
struct BasisMatrix {
  Eigen::MatrixXd entries;
  BasisKind kind = BasisKind::kCustom;

  std::size_t l() const { return static_cast<std::size_t>(entries.rows()) - 1; }
};

/// Row 0 all ones; row l, column m = sin(pi * l * m / (2L)).
BasisMatrix fourier_basis(std::size_t l);

/// Row l = sin(2*pi*(m - l)/L) on m in [0, b1(l)] U [l, b2(l)], zero elsewhere,
/// b1 = max(0, l - L/2 - 1), b2 = min(L/2 + l, L). Requires even L >= 2.
BasisMatrix shifted_sine_basis(std::size_t l);

BasisMatrix custom_basis(Eigen::MatrixXd entries);

/// 2-norm condition number (inf for singular matrices).
double condition_number(const Eigen::MatrixXd& m);

/// Coefficients C (rows = sub-paths) with C * P = Q.
struct PathCoeffs {
  Eigen::MatrixXd entries;
};

/// C = Q P^{-1}. Throws DecompositionError when cond(P) >= 1e12.
PathCoeffs decompose(const Eigen::MatrixXd& waypoint_matrix, const BasisMatrix& basis);

/// coeffs * basis_rows.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& basis_rows);

/// Indices of the K rows a selection rule keeps, in increasing order.
std::vector<std::size_t> select_rows(std::size_t l, std::size_t k, Selection selection);

struct CompressedBasis {
  Eigen::MatrixXd rows;  // K x (L+1), the selected basis paths
  std::vector<std::size_t> selected_indices;
  Eigen::MatrixXd coeffs;  // dims x K

  std::size_t k() const { return selected_indices.size(); }
  /// K / (L+1).
  double compression_ratio() const { return static_cast<double>(k()) / static_cast<double>(rows.cols()); }
  Eigen::MatrixXd reconstruct() const { return coeffs * rows; }
};

/// Fit Q with K selected basis paths. Least-squares refit by default;
/// truncation keeps the matching columns of the full decomposition.
CompressedBasis compress(const Eigen::MatrixXd& waypoint_matrix, const BasisMatrix& basis, std::size_t k,
                         Selection selection, FitMode mode = FitMode::kLeastSquares);

/// Least-squares fit min |C R - Q|_F subject to C R[:, j] = Q[:, j] exactly
/// for every j in `pinned_columns`. Throws CompressionError when the pinned
/// columns cannot be matched by any C.
Eigen::MatrixXd fit_pinned(const Eigen::MatrixXd& waypoint_matrix, const Eigen::MatrixXd& rows,
                           const std::vector<std::size_t>& pinned_columns);

/// Relative Frobenius error |Q - Q_hat|_F / |Q|_F.
double relative_path_error(const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_hat);

}  // namespace flexpath::basis
