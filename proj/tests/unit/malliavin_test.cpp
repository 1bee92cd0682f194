#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

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

TEST_SUITE("malliavin") {

TEST_CASE("zero drift, lognormal data: D_h X = |h|^2 X exactly") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::lognormal_exp(0.7, h), 0.0};
  for (uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto ps = PathSample::sample(p, 32, seed);
    for (double t : {0.125, 0.375, 0.5, 1.0}) {
      const double d = dhx_closed(ps, spec, h, t);
      const double x = reconstruct_x(ps, spec, t);
      CHECK(d == doctest::Approx(h.norm_sq() * x).epsilon(1e-10));
      CHECK(d > 0.0);  // product of positive factors
    }
  }
}

TEST_CASE("deterministic data degenerates the closed form") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  const auto ps = PathSample::sample(p, 32, 6);
  CHECK(throws_with(Errc::degenerate_init, [&] { dhx_closed(ps, spec, h, 0.5); }));
}

TEST_CASE("sigma weights other than 1 are rejected, not guessed") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::zero(), std::vector<double>(4, 2.0),
                       InitialCondition::lognormal_exp(1.0, h), 0.0};
  const auto ps = PathSample::sample(p, 32, 6);
  CHECK(throws_with(Errc::sigma_unsupported, [&] { dhx_closed(ps, spec, h, 0.5); }));
}

TEST_CASE("central differences recover the lognormal derivative at O(eps^2)") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::lognormal_exp(1.1, h), 0.0};
  const auto ps = PathSample::sample(p, 32, 17);
  for (double t : {0.375, 1.0}) {
    const double exact = h.norm_sq() * reconstruct_x(ps, spec, t);
    const double fd = dhx_fd(ps, spec, h, t, 1e-4);
    CHECK(std::fabs(fd - exact) / std::fabs(exact) <= 1e-7);
  }
}

TEST_CASE("closed form vs central differences across drifts") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const std::vector<Drift> drifts = {Drift::linear(0.8), Drift::tanh_logistic(1.0, 1.0),
                                     Drift::sin_drift(0.7, 1.3)};
  for (const Drift& drift : drifts) {
    const ModelSpec spec{drift, {}, InitialCondition::lognormal_exp(1.0, h), 0.0};
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const auto ps = PathSample::sample(p, 32, derive_seed(555, seed));
      for (double t : {0.375, 0.75}) {
        const double closed = dhx_closed(ps, spec, h, t);
        double err_est = 0.0;
        const double fd = dhx_fd(ps, spec, h, t, 1e-4, &err_est);
        CHECK(std::fabs(closed - fd) / std::fabs(closed) <= 1e-5);
        CHECK(err_est >= 0.0);
      }
    }
  }
}

TEST_CASE("FD error drops fourfold when the step halves") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::tanh_logistic(1.2, 1.1), {},
                       InitialCondition::lognormal_exp(1.0, h), 0.0};
  const auto ps = PathSample::sample(p, 32, 404);
  const double ref = dhx_closed(ps, spec, h, 0.625);
  const double e1 = std::fabs(dhx_fd(ps, spec, h, 0.625, 2e-2) - ref);
  const double e2 = std::fabs(dhx_fd(ps, spec, h, 0.625, 1e-2) - ref);
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("FD-order slope is about 2") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::tanh_logistic(1.2, 1.1), {},
                       InitialCondition::lognormal_exp(1.0, h), 0.0};
  const auto ps = PathSample::sample(p, 32, 2024);
  const double ref = dhx_closed(ps, spec, h, 0.625);
  std::vector<double> log_eps, log_err;
  for (double eps : {3e-2, 1e-2, 3e-3, 1e-3}) {
    const double err = std::fabs(dhx_fd(ps, spec, h, 0.625, eps) - ref);
    REQUIRE(err > 0.0);
    log_eps.push_back(std::log(eps));
    log_err.push_back(std::log(err));
  }
  const double slope = least_squares(log_eps, log_err).slope;
  CHECK(slope >= 1.7);
  CHECK(slope <= 2.3);
}

TEST_CASE("inadmissible directions still have shift derivatives") {
  auto p = uniform4();
  const Direction ones = Direction::from_cell_values(p, 1, {1.0, 1.0, 1.0, 1.0});
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  const auto ps = PathSample::sample(p, 32, 8);
  // X_t = x0 E(K_{0,t}); shifting by the constant direction moves the
  // exponent by eps <K, 1> = eps * t for breakpoint t.
  const double fd = dhx_fd(ps, spec, ones, 0.5, 1e-5);
  const double x = reconstruct_x(ps, spec, 0.5);
  CHECK(fd == doctest::Approx(0.5 * x).epsilon(1e-6));
}

TEST_CASE("deta_x on the worked example equals X_r xi(r)") {
  auto p = uniform4();
  const auto cfg = make_gbm_config(p, 1.0, 0.0);
  const ModelSpec spec = gbm_model(cfg);
  for (uint64_t seed : {31u, 32u}) {
    const auto ps = PathSample::sample(p, 32, seed);
    for (double r : {0.375, 0.625, 0.90625}) {
      const double d = deta_x(ps, spec, r, 1e-4);
      const double expected = gbm_wz(ps, cfg, r) * xi_pi(*p, 0.0, r);
      CHECK(d == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(std::fabs(deta_x(ps, spec, 0.0, 1e-4)) <= 1e-12);  // xi(t_0) = 0
  }
  const auto ps = PathSample::sample(p, 32, 31);
  CHECK(throws_with(Errc::bad_step, [&] { deta_x(ps, spec, 0.375, 0.0); }));
}

TEST_CASE("inverse moment: zeroth moment, lognormal oracle, degeneracy flag") {
  // Small horizon keeps q|h + K| moderate so the plain-mean comparison
  // against the lognormal formula has statistical power.
  auto p = make_uniform_partition(4, 0.2);
  const Direction h = make_haar_direction(p);
  const double y0 = 1.0;
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::lognormal_exp(y0, h), 0.0};
  EnsembleOptions opt;
  opt.grid = {0.075, 0.2};
  opt.record_dhx = true;
  auto run = run_ensemble(p, 16, spec, 20000, 31337, opt);

  const auto zeroth = inverse_moment(run, 0.075, 0.0, 0.01);
  CHECK(zeroth.estimate == 1.0);

  const double q = 5.0;
  const auto est = inverse_moment(run, 0.075, q, 0.0);
  const auto kappa = KernelSlice::plain(p, 0.0, 0.075);
  const double gsq = h.norm_sq() + kappa.norm_sq();  // <h, kappa> = 0
  const double closed =
      std::pow(h.norm_sq() * y0, -q) * std::exp(0.5 * q * (q + 1.0) * gsq);
  CHECK(est.nondegenerate);
  CHECK(est.min_abs_derivative > 0.0);
  CHECK(std::fabs(est.estimate - closed) <= 3.0 * est.se);

  run.dhx[2 * 5] = 0.0;  // inject a hard zero in the t = 0.075 column of path 5
  const auto degenerate = inverse_moment(run, 0.075, q, 0.0);
  CHECK_FALSE(degenerate.nondegenerate);
  CHECK(degenerate.min_abs_derivative == 0.0);

  run.dhx.clear();
  CHECK(throws_with(Errc::no_derivatives, [&] { inverse_moment(run, 0.075, q, 0.0); }));
}

TEST_CASE("derivative equation residual: worked example, eps = 1e-3") {
  auto p = uniform4();
  const auto cfg = make_gbm_config(p, 1.0, 0.0);
  const ModelSpec spec = gbm_model(cfg);
  const auto ps = PathSample::sample(p, 16, 91);
  const Direction eta = deriv_kernel_direction(p, 0.3);
  const auto rep = dx_equation_residual(ps, spec, eta, {0.25, 0.5, 0.75, 1.0}, 1e-3);
  CHECK(rep.max_abs_residual <= 1e-4);
}

TEST_CASE("derivative equation residual: Haar kills the source term") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::tanh_logistic(0.8, 1.0), {},
                       InitialCondition::lognormal_exp(1.0, h), 0.0};
  const auto ps = PathSample::sample(p, 16, 92);
  const auto rep = dx_equation_residual(ps, spec, h, {0.5, 1.0}, 1e-3);
  CHECK(rep.max_abs_residual <= 1e-4);
}

TEST_CASE("derivative equation residual: zero path, flat data, Haar direction") {
  auto p = uniform4();
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  const auto ps = PathSample::zero_path(p, 16);
  const Direction h = make_haar_direction(p);
  const auto rep = dx_equation_residual(ps, spec, h, {0.5, 1.0}, 1e-3);
  for (const auto& row : rep.rows) {
    CHECK(row.lhs == 0.0);
    CHECK(std::fabs(row.rhs) <= 1e-15);
  }
}

}  // TEST_SUITE
