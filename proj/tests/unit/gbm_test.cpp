#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "quadrature.hpp"
#include "wickwz/errors.hpp"
#include "wickwz/gbm.hpp"
#include "wickwz/malliavin.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/rng.hpp"
#include "wickwz/solver.hpp"

using namespace wickwz;

namespace {

PartitionPtr uniform4() { return make_uniform_partition(4, 1.0); }

bool throws_with(Errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_SUITE("gbm") {

TEST_CASE("config validation") {
  auto p = uniform4();
  CHECK(throws_with(Errc::out_of_range, [&] { make_gbm_config(p, 1.0, 0.3); }));
  CHECK(throws_with(Errc::config_error, [&] { make_gbm_config(p, 0.0, 0.25); }));
}

TEST_CASE("restart value and the zero path") {
  auto p = uniform4();
  const auto cfg = make_gbm_config(p, 2.0, 0.5);
  const auto ps = PathSample::sample(p, 32, 77);
  const double b_half = ps.value_at_time(0.5);
  CHECK(gbm_wz(ps, cfg, 0.5) == doctest::Approx(2.0 * std::exp(b_half - 0.25)).epsilon(1e-13));

  const auto zero = PathSample::zero_path(p, 32);
  for (double t : {0.5, 0.75, 0.90625}) {
    const double norm = 0.5 + KernelSlice::plain(p, 0.5, t).norm_sq();
    CHECK(gbm_wz(zero, cfg, t) == doctest::Approx(2.0 * std::exp(-0.5 * norm)).epsilon(1e-13));
  }
  CHECK(throws_with(Errc::out_of_range, [&] { gbm_wz(ps, cfg, 0.25); }));
}

TEST_CASE("closed form equals the solver on every path and time") {
  auto p = uniform4();
  for (double s : {0.0, 0.5}) {
    const auto cfg = make_gbm_config(p, 1.5, s);
    const ModelSpec spec = gbm_model(cfg);
    for (uint64_t seed : {5u, 6u, 7u}) {
      const auto ps = PathSample::sample(p, 32, seed);
      for (double t : {s, s + 0.125, 0.75, 0.96875, 1.0}) {
        const double wz = gbm_wz(ps, cfg, t);
        const double solver = reconstruct_x(ps, spec, t);
        CHECK(wz == doctest::Approx(solver).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gbm_exact basics and the martingale mean") {
  auto p = uniform4();
  const auto zero = PathSample::zero_path(p, 8);
  CHECK(gbm_exact(zero, 1.7, 0.0) == doctest::Approx(1.7));
  CHECK(gbm_exact(zero, 1.7, 0.75) == doctest::Approx(1.7 * std::exp(-0.375)).epsilon(1e-14));

  const std::size_t n = 20000;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = gbm_exact(PathSample::sample(p, 8, derive_seed(808, i)), 1.0, 1.0);
  CHECK(std::fabs(pairwise_mean(vals) - 1.0) <= 3.5 * standard_error(vals));
}

TEST_CASE("xi: sawtooth values against the defining integral") {
  auto p = uniform4();
  CHECK(xi_pi(*p, 0.0, 0.375) == doctest::Approx(0.5).epsilon(1e-14));
  for (double tk : {0.0, 0.25, 0.5, 0.75})
    CHECK(xi_pi(*p, 0.0, tk) == doctest::Approx(0.0));

  // Quadrature oracle of integral (1_{[0,s)} + K_{s,t}) d/dt K_t du.
  CounterRng rng(99);
  for (double s : {0.0, 0.25}) {
    for (int i = 0; i < 25; ++i) {
      const double t = s + (1.0 - s - 1e-6) * rng.next_uniform();
      const auto slice = KernelSlice::plain(p, s, t);
      const auto ind = KernelSlice::plain(p, 0.0, s);
      const double oracle = testing::simpson_integral(
          [&](double u) {
            return (ind.value(u) + slice.value(u)) * kernel_dt(*p, t, u);
          },
          p->points(), 20000);
      CHECK(std::fabs(oracle - xi_pi(*p, s, t)) <= 1e-12);
    }
  }
  CHECK(throws_with(Errc::out_of_range, [&] { xi_pi(*p, 0.1, 0.5); }));
}

TEST_CASE("xi interval averages are exactly one half") {
  auto p = make_partition({0.0, 0.2, 0.3, 0.7, 1.0});
  for (std::size_t k = 0; k < p->n(); ++k) CHECK(xi_interval_average(*p, 0.0, k) == 0.5);
}

TEST_CASE("operator comparison: sawtooth range and running averages") {
  auto p = uniform4();
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(static_cast<double>(i) / 1000.0);
  const auto rep = fp_operator_compare(*p, 0.0, grid);
  CHECK(rep.sup_deviation == 0.5);
  CHECK(rep.sup_deviation_grid >= 0.49);
  CHECK(rep.sup_deviation_grid <= 0.5);
  REQUIRE(rep.breakpoint_running_avgs.size() == 4);
  for (double avg : rep.breakpoint_running_avgs) CHECK(avg == doctest::Approx(0.5).epsilon(1e-14));

  // Mesh independence: a finer partition has the same sup deviation.
  auto q = make_uniform_partition(64, 1.0);
  std::vector<double> grid_q;
  for (int i = 0; i < 4096; ++i) grid_q.push_back(static_cast<double>(i) / 4096.0);
  const auto rep_q = fp_operator_compare(*q, 0.0, grid_q);
  CHECK(rep_q.sup_deviation == 0.5);
  CHECK(rep_q.sup_deviation_grid >= 0.49);
}

TEST_CASE("log of the solution is Gaussian with the closed-form moments") {
  auto p = uniform4();
  const auto cfg = make_gbm_config(p, 1.0, 0.5);
  const double t = 0.875;
  const double var = 0.5 + KernelSlice::plain(p, 0.5, t).norm_sq();

  const std::size_t n = 20000;
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i)
    logs[i] = std::log(gbm_wz(PathSample::sample(p, 16, derive_seed(515, i)), cfg, t));
  const double mean = pairwise_mean(logs);
  const double sample_var = sample_variance(logs);
  CHECK(std::fabs(mean + 0.5 * var) <= 3.5 * std::sqrt(var / static_cast<double>(n)));
  CHECK(std::fabs(sample_var - var) <=
        3.5 * var * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("deta on the example contracts the kernel against eta_r") {
  auto p = uniform4();
  const auto cfg = make_gbm_config(p, 1.0, 0.0);
  const ModelSpec spec = gbm_model(cfg);
  const auto ps = PathSample::sample(p, 32, 1212);
  for (double r : {0.1875, 0.5625}) {
    const double expected = gbm_wz(ps, cfg, r) * xi_pi(*p, 0.0, r);
    CHECK(deta_x(ps, spec, r, 1e-4) == doctest::Approx(expected).epsilon(1e-6));
  }
}

}  // TEST_SUITE
