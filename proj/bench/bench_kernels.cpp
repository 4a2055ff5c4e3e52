#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "lpm/energy.hpp"
#include "lpm/kernels.hpp"
#include "lpm/solver.hpp"

using namespace lpm;
namespace k = lpm::kernels;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  return Mat::NullaryExpr(r, c, [&](Eigen::Index, Eigen::Index) { return g(rng); });
}

k::Backend backend(const benchmark::State& s) { return s.range(1) ? k::Backend::OpenMP : k::Backend::Serial; }

void BM_SupportValues(benchmark::State& state) {
  const Mat verts = random_mat(3, state.range(0), 1);
  const Mat dirs = random_mat(3, 4000, 2);
  Vec out;
  for (auto _ : state) {
    k::support_values(verts, dirs, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ProfileTerms(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> w(1e-3, 3.0);
  Vec gaps(state.range(0));
  for (auto& g : gaps) g = w(rng);
  const EnergyProfile f = build_profile(0.5, 3, 0.05);
  k::ProfileTerms out;
  for (auto _ : state) {
    k::profile_terms(f, gaps, out, backend(state));
    benchmark::DoNotOptimize(out.d2.data());
  }
}

void BM_ProjectTangent(benchmark::State& state) {
  const auto n = state.range(0);
  Mat h = random_mat(n, n, 4);
  h = h + h.transpose().eval();
  const Eigen::HouseholderQR<Mat> qr(random_mat(n, 4, 5));
  const Mat q = qr.householderQ() * Mat::Identity(n, 4);
  Mat out;
  for (auto _ : state) {
    k::project_tangent(h, q, 1.0, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_SolveDisk(benchmark::State& state) {
  k::set_default_backend(backend(state));
  const auto g = std::make_shared<const DirectionGrid>(build_grid(2, static_cast<int>(state.range(0))));
  const SphericalMeasure mu = density_measure([](const Vec& u) { return 1.0 + 0.3 * u[0]; }, g);
  for (auto _ : state) benchmark::DoNotOptimize(solve(mu, 0.5).report.residual_l1);
  k::set_default_backend(k::Backend::OpenMP);
}

}  // namespace

BENCHMARK(BM_SupportValues)->ArgsProduct({{64, 512}, {0, 1}});
BENCHMARK(BM_ProfileTerms)->ArgsProduct({{10000, 200000}, {0, 1}});
BENCHMARK(BM_ProjectTangent)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveDisk)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
