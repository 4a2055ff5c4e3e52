#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the dispatching
// wrappers pick one by Backend. Kernels only write disjoint output slots, so
// the OpenMP results do not depend on the thread count.

#include "lpm/types.hpp"

namespace lpm {
class EnergyProfile;
}

namespace lpm::kernels {

enum class Backend { Serial, OpenMP };

Backend default_backend();
void set_default_backend(Backend b);

/// Per-atom values of the energy profile at gaps g: phi, phi', phi''.
struct ProfileTerms {
  Vec value, d1, d2;
};

namespace serial {
/// out[j] = max_k <vertices.col(k), directions.col(j)>.
void support_values(const Mat& vertices, const Mat& directions, Vec& out);
void profile_terms(const EnergyProfile& profile, const Vec& gaps, ProfileTerms& out);
/// P H P + gamma Q Q^T with P = I - Q Q^T (Q has orthonormal columns).
void project_tangent(const Mat& hessian, const Mat& q, double gamma, Mat& out);
}  // namespace serial

namespace omp {
void support_values(const Mat& vertices, const Mat& directions, Vec& out);
void profile_terms(const EnergyProfile& profile, const Vec& gaps, ProfileTerms& out);
void project_tangent(const Mat& hessian, const Mat& q, double gamma, Mat& out);
}  // namespace omp

inline void support_values(const Mat& vertices, const Mat& directions, Vec& out,
                           Backend b = default_backend()) {
  b == Backend::Serial ? serial::support_values(vertices, directions, out)
                       : omp::support_values(vertices, directions, out);
}

inline void profile_terms(const EnergyProfile& profile, const Vec& gaps, ProfileTerms& out,
                          Backend b = default_backend()) {
  b == Backend::Serial ? serial::profile_terms(profile, gaps, out) : omp::profile_terms(profile, gaps, out);
}

inline void project_tangent(const Mat& hessian, const Mat& q, double gamma, Mat& out,
                            Backend b = default_backend()) {
  b == Backend::Serial ? serial::project_tangent(hessian, q, gamma, out)
                       : omp::project_tangent(hessian, q, gamma, out);
}

}  // namespace lpm::kernels
