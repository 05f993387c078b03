#include "flexpath/conic/cone_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexpath::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// J-norm sqrt(u0^2 - |u1|^2), computed as sqrt((u0 - |u1|)(u0 + |u1|)) for accuracy near the boundary.
double j_norm(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const double tail = u.tail(u.size() - 1).norm();
  return std::sqrt(std::max((u(0) - tail) * (u(0) + tail), 0.0));
}

// Smallest positive root of a t^2 + 2 b t + c = 0 with c > 0; +inf if none.
double first_exit(double a, double b, double c) {
  if (std::abs(a) < 1e-300) return b < 0.0 ? -c / (2.0 * b) : kInf;
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -(b + std::copysign(sq, b));
  double best = kInf;
  if (q != 0.0) {
    const double r1 = q / a;
    const double r2 = c / q;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
  }
  return best;
}

}  // namespace

NtScaling compute_scaling(const ConeDims& dims, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  NtScaling w;
  const Eigen::Index l = dims.nonneg;
  w.lambda.resize(s.size());
  w.d = (s.head(l).array() / z.head(l).array()).sqrt();
  w.lambda.head(l) = (s.head(l).array() * z.head(l).array()).sqrt();
  Eigen::Index off = l;
  w.soc.reserve(dims.soc.size());
  for (const Eigen::Index k : dims.soc) {
    const auto sk = s.segment(off, k);
    const auto zk = z.segment(off, k);
    const double sn = j_norm(sk);
    const double zn = j_norm(zk);
    const Eigen::VectorXd sb = sk / sn;
    const Eigen::VectorXd zb = zk / zn;
    const double gamma = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 0.0));
    Eigen::VectorXd wb(k);
    wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    wb.tail(k - 1) = (sb.tail(k - 1) - zb.tail(k - 1)) / (2.0 * gamma);
    NtScaling::SocBlock block;
    block.beta = std::sqrt(sn / zn);
    block.v = wb;
    block.v(0) += 1.0;
    block.v /= std::sqrt(2.0 * (wb(0) + 1.0));
    w.soc.push_back(std::move(block));
    off += k;
  }
  w.lambda.tail(s.size() - l) = apply_w(dims, w, z).tail(s.size() - l);
  return w;
}

Eigen::VectorXd apply_w(const ConeDims& dims, const NtScaling& w, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  const Eigen::Index l = dims.nonneg;
  out.head(l) = w.d.array() * x.head(l).array();
  Eigen::Index off = l;
  for (std::size_t i = 0; i < dims.soc.size(); ++i) {
    const Eigen::Index k = dims.soc[i];
    const auto& b = w.soc[i];
    const auto xk = x.segment(off, k);
    const double vx = b.v.dot(xk);
    auto ok = out.segment(off, k);
    ok = 2.0 * vx * b.v;
    ok(0) -= xk(0);
    ok.tail(k - 1) += xk.tail(k - 1);
    ok *= b.beta;
    off += k;
  }
  return out;
}

Eigen::VectorXd apply_w_inv(const ConeDims& dims, const NtScaling& w, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  const Eigen::Index l = dims.nonneg;
  out.head(l) = x.head(l).array() / w.d.array();
  Eigen::Index off = l;
  for (std::size_t i = 0; i < dims.soc.size(); ++i) {
    const Eigen::Index k = dims.soc[i];
    const auto& b = w.soc[i];
    const auto xk = x.segment(off, k);
    // W^{-1} = (1/beta) (2 J v v' J - J)
    Eigen::VectorXd jv = b.v;
    jv.tail(k - 1) = -jv.tail(k - 1);
    const double jvx = jv.dot(xk);
    auto ok = out.segment(off, k);
    ok = 2.0 * jvx * jv;
    ok(0) -= xk(0);
    ok.tail(k - 1) += xk.tail(k - 1);
    ok /= b.beta;
    off += k;
  }
  return out;
}

Eigen::MatrixXd soc_w_squared(const NtScaling::SocBlock& block) {
  const Eigen::Index k = block.v.size();
  Eigen::MatrixXd w = 2.0 * block.v * block.v.transpose();
  w(0, 0) -= 1.0;
  for (Eigen::Index i = 1; i < k; ++i) w(i, i) += 1.0;
  w *= block.beta;
  return w * w;
}

Eigen::VectorXd jordan_product(const ConeDims& dims, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(x.size());
  const Eigen::Index l = dims.nonneg;
  out.head(l) = x.head(l).array() * y.head(l).array();
  Eigen::Index off = l;
  for (const Eigen::Index k : dims.soc) {
    const auto xk = x.segment(off, k);
    const auto yk = y.segment(off, k);
    out(off) = xk.dot(yk);
    out.segment(off + 1, k - 1) = xk(0) * yk.tail(k - 1) + yk(0) * xk.tail(k - 1);
    off += k;
  }
  return out;
}

Eigen::VectorXd jordan_divide(const ConeDims& dims, const Eigen::VectorXd& lambda, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(y.size());
  const Eigen::Index l = dims.nonneg;
  out.head(l) = y.head(l).array() / lambda.head(l).array();
  Eigen::Index off = l;
  for (const Eigen::Index k : dims.soc) {
    const auto lk = lambda.segment(off, k);
    const auto yk = y.segment(off, k);
    const double det = lk(0) * lk(0) - lk.tail(k - 1).squaredNorm();
    const double u0 = (lk(0) * yk(0) - lk.tail(k - 1).dot(yk.tail(k - 1))) / det;
    out(off) = u0;
    out.segment(off + 1, k - 1) = (yk.tail(k - 1) - u0 * lk.tail(k - 1)) / lk(0);
    off += k;
  }
  return out;
}

Eigen::VectorXd cone_identity(const ConeDims& dims) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dims.total());
  e.head(dims.nonneg).setOnes();
  Eigen::Index off = dims.nonneg;
  for (const Eigen::Index k : dims.soc) {
    e(off) = 1.0;
    off += k;
  }
  return e;
}

double max_step(const ConeDims& dims, const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
  double step = kInf;
  for (Eigen::Index i = 0; i < dims.nonneg; ++i) {
    if (d(i) < 0.0) step = std::min(step, -x(i) / d(i));
  }
  Eigen::Index off = dims.nonneg;
  for (const Eigen::Index k : dims.soc) {
    const auto xk = x.segment(off, k);
    const auto dk = d.segment(off, k);
    const double a = dk(0) * dk(0) - dk.tail(k - 1).squaredNorm();
    const double b = xk(0) * dk(0) - xk.tail(k - 1).dot(dk.tail(k - 1));
    const double c = std::max(xk(0) * xk(0) - xk.tail(k - 1).squaredNorm(), 0.0);
    double t = first_exit(a, b, c);
    // The head coordinate must also stay nonnegative.
    if (dk(0) < 0.0) t = std::min(t, -xk(0) / dk(0));
    step = std::min(step, t);
    off += k;
  }
  return step;
}

double min_shift(const ConeDims& dims, const Eigen::VectorXd& x) {
  double shift = -kInf;
  for (Eigen::Index i = 0; i < dims.nonneg; ++i) shift = std::max(shift, -x(i));
  Eigen::Index off = dims.nonneg;
  for (const Eigen::Index k : dims.soc) {
    shift = std::max(shift, x.segment(off + 1, k - 1).norm() - x(off));
    off += k;
  }
  return shift;
}

}  // namespace flexpath::conic
