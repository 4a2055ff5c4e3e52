#include <limits>

#include "lpm/energy.hpp"
#include "lpm/kernels.hpp"

namespace lpm::kernels::omp {

void support_values(const Mat& vertices, const Mat& directions, Vec& out) {
  const Eigen::Index nd = directions.cols();
  const Eigen::Index nv = vertices.cols();
  out.resize(nd);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < nd; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < nv; ++k) best = std::max(best, vertices.col(k).dot(directions.col(j)));
    out[j] = best;
  }
}

void profile_terms(const EnergyProfile& profile, const Vec& gaps, ProfileTerms& out) {
  const Eigen::Index n = gaps.size();
  out.value.resize(n);
  out.d1.resize(n);
  out.d2.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    out.value[i] = profile.value(gaps[i]);
    out.d1[i] = profile.d1(gaps[i]);
    out.d2[i] = profile.d2(gaps[i]);
  }
}

void project_tangent(const Mat& hessian, const Mat& q, double gamma, Mat& out) {
  const Eigen::Index n = hessian.rows();
  const Eigen::Index k = q.cols();
  // W = Q^T H (k x n), C = W Q (k x k); fused update column by column.
  const Mat w = q.transpose() * hessian;
  const Mat c = w * q;
  const Mat qc = q * c;  // n x k
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = hessian(i, j);
      for (Eigen::Index a = 0; a < k; ++a)
        v += -q(i, a) * w(a, j) - w(a, i) * q(j, a) + qc(i, a) * q(j, a) + gamma * q(i, a) * q(j, a);
      out(i, j) = v;
    }
  }
}

}  // namespace lpm::kernels::omp
