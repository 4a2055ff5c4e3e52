#include <atomic>
#include <limits>

#include "lpm/energy.hpp"
#include "lpm/kernels.hpp"

namespace lpm::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::OpenMP};
}

Backend default_backend() { return g_backend.load(); }
void set_default_backend(Backend b) { g_backend.store(b); }

namespace serial {

void support_values(const Mat& vertices, const Mat& directions, Vec& out) {
  const Eigen::Index nd = directions.cols();
  out.resize(nd);
  for (Eigen::Index j = 0; j < nd; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < vertices.cols(); ++k)
      best = std::max(best, vertices.col(k).dot(directions.col(j)));
    out[j] = best;
  }
}

void profile_terms(const EnergyProfile& profile, const Vec& gaps, ProfileTerms& out) {
  const Eigen::Index n = gaps.size();
  out.value.resize(n);
  out.d1.resize(n);
  out.d2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.value[i] = profile.value(gaps[i]);
    out.d1[i] = profile.d1(gaps[i]);
    out.d2[i] = profile.d2(gaps[i]);
  }
}

void project_tangent(const Mat& hessian, const Mat& q, double gamma, Mat& out) {
  const Eigen::Index n = hessian.rows();
  const Mat qqt = q * q.transpose();
  const Mat p = Mat::Identity(n, n) - qqt;
  out = p * hessian * p + gamma * qqt;
}

}  // namespace serial
}  // namespace lpm::kernels
