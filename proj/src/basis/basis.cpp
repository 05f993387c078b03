#include "flexpath/basis/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace flexpath::basis {

namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::kFourier: return "fourier";
    case BasisKind::kShiftedSine: return "shifted-sine";
    case BasisKind::kCustom: return "custom";
  }
  return "unknown";
}

std::string to_string(Selection selection) {
  switch (selection) {
    case Selection::kLowestFrequency: return "lfb";
    case Selection::kHighestFrequency: return "hfb";
    case Selection::kFirstK: return "first-k";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "fourier") return BasisKind::kFourier;
  if (name == "shifted-sine" || name == "shifted_sine") return BasisKind::kShiftedSine;
  if (name == "custom") return BasisKind::kCustom;
  throw ConfigError("unknown basis kind '" + name + "'");
}

Selection selection_from_string(const std::string& name) {
  if (name == "lfb" || name == "lowest") return Selection::kLowestFrequency;
  if (name == "hfb" || name == "highest") return Selection::kHighestFrequency;
  if (name == "first-k" || name == "ssb" || name == "first_k") return Selection::kFirstK;
  throw ConfigError("unknown basis selection '" + name + "'");
}

BasisMatrix fourier_basis(std::size_t l) {
  if (l < 1) throw Error("Fourier basis needs L >= 1");
  const auto n = static_cast<Eigen::Index>(l + 1);
  BasisMatrix out{Eigen::MatrixXd::Ones(n, n), BasisKind::kFourier};
  const double ld = static_cast<double>(l);
  for (Eigen::Index row = 1; row < n; ++row) {
    for (Eigen::Index col = 0; col < n; ++col) {
      out.entries(row, col) = std::sin(std::numbers::pi * static_cast<double>(row * col) / (2.0 * ld));
    }
  }
  return out;
}

BasisMatrix shifted_sine_basis(std::size_t l) {
  if (l < 2 || l % 2 != 0) throw Error("shifted-sine basis needs an even L >= 2");
  const auto n = static_cast<Eigen::Index>(l + 1);
  const auto half = static_cast<Eigen::Index>(l / 2);
  const auto last = static_cast<Eigen::Index>(l);
  const double ld = static_cast<double>(l);
  BasisMatrix out{Eigen::MatrixXd::Zero(n, n), BasisKind::kShiftedSine};
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Index b1 = std::max<Eigen::Index>(0, row - half - 1);
    const Eigen::Index b2 = std::min(half + row, last);
    auto value = [&](Eigen::Index col) { return std::sin(2.0 * std::numbers::pi * static_cast<double>(col - row) / ld); };
    for (Eigen::Index col = 0; col <= b1; ++col) out.entries(row, col) = value(col);
    for (Eigen::Index col = row; col <= b2; ++col) out.entries(row, col) = value(col);
  }
  return out;
}

BasisMatrix custom_basis(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 2) throw Error("basis matrix must be square with L >= 1");
  if (!entries.allFinite()) throw Error("basis matrix has non-finite entries");
  return {std::move(entries), BasisKind::kCustom};
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

PathCoeffs decompose(const Eigen::MatrixXd& waypoint_matrix, const BasisMatrix& basis) {
  if (waypoint_matrix.cols() != basis.entries.cols()) {
    throw DimensionError("waypoint matrix needs one column per basis column");
  }
  const double cond = condition_number(basis.entries);
  if (!(cond < kMaxCondition)) {
    std::ostringstream os;
    os << to_string(basis.kind) << " basis with L=" << basis.l() << " is singular or ill-conditioned (cond=" << cond
       << ")";
    throw DecompositionError(os.str());
  }
  // C P = Q  <=>  P^T C^T = Q^T, refined with residuals in extended precision
  using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::MatrixXd pt = basis.entries.transpose();
  const auto lu = pt.partialPivLu();
  const Eigen::MatrixXd qt = waypoint_matrix.transpose();
  Eigen::MatrixXd ct = lu.solve(qt);
  const LongMatrix pt_l = pt.cast<long double>();
  const LongMatrix qt_l = qt.cast<long double>();
  for (int it = 0; it < 5; ++it) {
    const Eigen::MatrixXd r = (qt_l - pt_l * ct.cast<long double>()).cast<double>();
    if (r.norm() <= 1e-14 * qt.norm()) break;
    ct += lu.solve(r);
  }
  return {ct.transpose()};
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& basis_rows) {
  if (coeffs.cols() != basis_rows.rows()) throw DimensionError("coefficient columns must match basis rows");
  return coeffs * basis_rows;
}

std::vector<std::size_t> select_rows(std::size_t l, std::size_t k, Selection selection) {
  if (k < 1 || k > l + 1) throw CompressionError("K must satisfy 1 <= K <= L+1");
  std::vector<std::size_t> out(k);
  const std::size_t first = selection == Selection::kHighestFrequency ? l + 1 - k : 0;
  for (std::size_t i = 0; i < k; ++i) out[i] = first + i;
  return out;
}

CompressedBasis compress(const Eigen::MatrixXd& waypoint_matrix, const BasisMatrix& basis, std::size_t k,
                         Selection selection, FitMode mode) {
  if (waypoint_matrix.cols() != basis.entries.cols()) {
    throw DimensionError("waypoint matrix needs one column per basis column");
  }
  CompressedBasis out;
  out.selected_indices = select_rows(basis.l(), k, selection);
  out.rows.resize(static_cast<Eigen::Index>(k), basis.entries.cols());
  for (std::size_t i = 0; i < k; ++i) out.rows.row(static_cast<Eigen::Index>(i)) = basis.entries.row(static_cast<Eigen::Index>(out.selected_indices[i]));

  if (mode == FitMode::kTruncation) {
    const PathCoeffs full = decompose(waypoint_matrix, basis);
    out.coeffs.resize(waypoint_matrix.rows(), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      out.coeffs.col(static_cast<Eigen::Index>(i)) = full.entries.col(static_cast<Eigen::Index>(out.selected_indices[i]));
    }
    return out;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(out.rows.transpose());
  if (qr.rank() < static_cast<Eigen::Index>(k)) {
    std::ostringstream os;
    os << "selected " << to_string(basis.kind) << " rows are rank-deficient (rank " << qr.rank() << " < K=" << k << ")";
    throw CompressionError(os.str());
  }
  out.coeffs = qr.solve(waypoint_matrix.transpose()).transpose();
  return out;
}

Eigen::MatrixXd fit_pinned(const Eigen::MatrixXd& waypoint_matrix, const Eigen::MatrixXd& rows,
                           const std::vector<std::size_t>& pinned_columns) {
  const Eigen::Index k = rows.rows();
  const Eigen::Index dims = waypoint_matrix.rows();
  if (pinned_columns.empty()) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rows.transpose());
    return cod.solve(waypoint_matrix.transpose()).transpose();
  }
  const auto p = static_cast<Eigen::Index>(pinned_columns.size());
  Eigen::MatrixXd e(k, p);   // constraint: C * e = targets
  Eigen::MatrixXd targets(dims, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    e.col(i) = rows.col(static_cast<Eigen::Index>(pinned_columns[static_cast<std::size_t>(i)]));
    targets.col(i) = waypoint_matrix.col(static_cast<Eigen::Index>(pinned_columns[static_cast<std::size_t>(i)]));
  }
  // Particular solution of e^T c = target (per dimension), then least squares in the null space of e^T.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(e.transpose());
  Eigen::MatrixXd c0 = cod.solve(targets.transpose());  // K x dims
  const double scale = std::max(1.0, targets.cwiseAbs().maxCoeff());
  if ((e.transpose() * c0 - targets.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw CompressionError("pinned waypoints are not representable by the selected basis paths");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e.transpose());
  const Eigen::MatrixXd null = lu.kernel();
  Eigen::MatrixXd c = c0;
  if (lu.rank() < k && null.cols() > 0) {
    const Eigen::MatrixXd a = rows.transpose() * null;  // (L+1) x nullity
    const Eigen::MatrixXd resid = waypoint_matrix.transpose() - rows.transpose() * c0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> ls(a);
    c += null * ls.solve(resid);
  }
  return c.transpose();
}

double relative_path_error(const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_hat) {
  const double ref = q.norm();
  const double err = (q - q_hat).norm();
  return ref > 0.0 ? err / ref : err;
}

}  // namespace flexpath::basis
