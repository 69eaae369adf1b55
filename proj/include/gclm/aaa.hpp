#pragma once

// Greedy AAA barycentric rational approximation of real samples, with poles from
// the arrowhead pencil and Froissart-doublet cleanup.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/fft.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

struct RationalApprox {
  std::vector<double> support_points;
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<cplx> poles;
  std::vector<cplx> residues;
  double max_error = 0.0;
  bool converged = true;

  std::size_t degree() const { return support_points.empty() ? 0 : support_points.size() - 1; }

  cplx operator()(cplx z) const {
    cplx num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < support_points.size(); ++j) {
      const cplx d = z - support_points[j];
      if (d == cplx(0.0)) return values[j];
      num += weights[j] * values[j] / d;
      den += weights[j] / d;
    }
    return num / den;
  }
};

struct AaaOptions {
  double tol = 1e-12;
  int max_degree = 100;
  double froissart_rel = 1e-13;
};

namespace detail {

// Weights = right singular vector of the smallest singular value of the Loewner matrix.
inline Eigen::VectorXd aaa_weights(std::span<const double> x, std::span<const double> f,
                                   const std::vector<std::size_t>& support,
                                   const std::vector<char>& is_support) {
  const std::size_t m = support.size();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!is_support[i]) rows.push_back(i);
  Eigen::MatrixXd L(std::max<std::size_t>(rows.size(), 1), m);
  L.setZero();
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < m; ++j)
      L(r, j) = (f[rows[r]] - f[support[j]]) / (x[rows[r]] - x[support[j]]);
  if (rows.size() < m) {
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(m, m);
    sq.topRows(L.rows()) = L;
    L = sq;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  return svd.matrixV().col(m - 1);
}

inline void aaa_poles(RationalApprox& r) {
  const std::size_t m = r.support_points.size();
  r.poles.clear();
  r.residues.clear();
  if (m < 2) return;
  // Zeros of sum_j w_j/(z - z_j): reflect w onto e_m, then a Schur complement leaves
  // an ordinary (m-1)x(m-1) eigenproblem.
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::VectorXd w(mi), z(mi);
  for (Eigen::Index j = 0; j < mi; ++j) {
    w(j) = r.weights[static_cast<std::size_t>(j)];
    z(j) = r.support_points[static_cast<std::size_t>(j)];
  }
  Eigen::VectorXd v = w / w.norm();
  v(mi - 1) += v(mi - 1) >= 0.0 ? 1.0 : -1.0;
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(mi, mi) - 2.0 * v * v.transpose() / v.squaredNorm();
  const Eigen::MatrixXd M = H * z.asDiagonal() * H;
  const Eigen::VectorXd g = H * Eigen::VectorXd::Ones(mi);
  const double gm = g(mi - 1);
  if (std::abs(gm) < 1e-14 * g.norm()) return;
  const Eigen::MatrixXd S = M.topLeftCorner(mi - 1, mi - 1) -
                            g.head(mi - 1) * M.row(mi - 1).head(mi - 1) / gm;
  Eigen::EigenSolver<Eigen::MatrixXd> es(S, false);
  if (es.info() != Eigen::Success) return;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx p = es.eigenvalues()(i);
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
    cplx num = 0.0, dden = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const cplx d = p - r.support_points[j];
      num += r.weights[j] * r.values[j] / d;
      dden -= r.weights[j] / (d * d);
    }
    r.poles.push_back(p);
    r.residues.push_back(num / dden);
  }
}

inline double aaa_error(const RationalApprox& r, std::span<const double> x, std::span<const double> f) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(r(x[i]) - f[i]));
  return e;
}

}  // namespace detail

inline RationalApprox aaa_approximate(std::span<const double> x, std::span<const double> f,
                                      const AaaOptions& opt = {}) {
  if (x.size() != f.size()) throw Error(ErrorCode::InvalidArgument, "aaa: x and f sizes differ");
  if (x.size() < 8) throw Error(ErrorCode::InvalidArgument, "aaa: need at least 8 samples");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(f[i]))
      throw Error(ErrorCode::InvalidArgument, "aaa: samples must be finite");
  {
    std::vector<double> sx(x.begin(), x.end());
    std::sort(sx.begin(), sx.end());
    if (std::adjacent_find(sx.begin(), sx.end()) != sx.end())
      throw Error(ErrorCode::InvalidArgument, "aaa: sample points must be distinct");
  }
  const std::size_t M = x.size();
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  const double target = opt.tol * fmax;

  std::vector<std::size_t> support;
  std::vector<char> is_support(M, 0);
  std::vector<double> R(M, std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(M));
  RationalApprox best;
  best.max_error = std::numeric_limits<double>::infinity();
  const std::size_t m_cap = std::min<std::size_t>(static_cast<std::size_t>(opt.max_degree) + 1, M - 1);

  auto build = [&](const Eigen::VectorXd& w) {
    RationalApprox r;
    for (std::size_t j = 0; j < support.size(); ++j) {
      r.support_points.push_back(x[support[j]]);
      r.values.push_back(f[support[j]]);
      r.weights.push_back(w(static_cast<Eigen::Index>(j)));
    }
    return r;
  };

  bool converged = false;
  while (support.size() < m_cap) {
    std::size_t jmax = 0;
    double emax = -1.0;
    for (std::size_t i = 0; i < M; ++i) {
      if (is_support[i]) continue;
      const double e = std::abs(f[i] - R[i]);
      if (e > emax) {
        emax = e;
        jmax = i;
      }
    }
    support.push_back(jmax);
    is_support[jmax] = 1;
    const Eigen::VectorXd w = detail::aaa_weights(x, f, support, is_support);
    RationalApprox r = build(w);
    double err = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      R[i] = is_support[i] ? f[i] : r(x[i]).real();
      err = std::max(err, std::abs(R[i] - f[i]));
    }
    r.max_error = err;
    if (err < best.max_error) best = r;
    if (err <= target) {
      best = r;
      converged = true;
      break;
    }
  }
  detail::aaa_poles(best);

  // Froissart cleanup: drop the support point nearest each tiny-residue pole, refit weights
  const double ftol = opt.froissart_rel * fmax;
  std::vector<std::size_t> spurious;
  for (std::size_t i = 0; i < best.poles.size(); ++i)
    if (std::abs(best.residues[i]) < ftol) spurious.push_back(i);
  if (!spurious.empty()) {
    support.clear();
    std::fill(is_support.begin(), is_support.end(), 0);
    std::vector<char> drop(best.support_points.size(), 0);
    for (std::size_t i : spurious) {
      std::size_t k = 0;
      for (std::size_t j = 1; j < best.support_points.size(); ++j)
        if (std::abs(best.poles[i] - best.support_points[j]) <
            std::abs(best.poles[i] - best.support_points[k]))
          k = j;
      drop[k] = 1;
    }
    for (std::size_t j = 0; j < best.support_points.size(); ++j) {
      if (drop[j]) continue;
      const auto it = std::find(x.begin(), x.end(), best.support_points[j]);
      const auto idx = static_cast<std::size_t>(it - x.begin());
      support.push_back(idx);
      is_support[idx] = 1;
    }
    if (!support.empty()) {
      RationalApprox r = build(detail::aaa_weights(x, f, support, is_support));
      r.max_error = detail::aaa_error(r, x, f);
      detail::aaa_poles(r);
      best = std::move(r);
    }
  }
  best.converged = converged;
  return best;
}

// AAA on the physical-space grid values of a field: x on the circle, x = tan(q/2) on
// the line (q = -pi dropped).
inline RationalApprox aaa_of_field(const SpectralField& f, const AaaOptions& opt = {}) {
  const auto v = f.values();
  std::vector<double> xs, fs;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double g = f.grid_point(j);
    if (f.domain() == Domain::CompactifiedLine) {
      if (j == 0) continue;
      xs.push_back(std::tan(0.5 * g));
    } else {
      xs.push_back(g);
    }
    fs.push_back(v[j]);
  }
  return aaa_approximate(xs, fs, opt);
}

}  // namespace gclm
