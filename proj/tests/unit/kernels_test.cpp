#include <doctest.h>

#include <cmath>

#include "quadrature.hpp"
#include "wickwz/errors.hpp"
#include "wickwz/kernels.hpp"
#include "wickwz/rng.hpp"

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

TEST_SUITE("kernels") {

TEST_CASE("make_partition validates and computes the mesh") {
  auto p = make_partition({0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(p->n() == 4);
  CHECK(p->mesh() == doctest::Approx(0.25));

  auto q = make_partition({0.0, 0.1, 0.5, 1.0});
  CHECK(q->mesh() == doctest::Approx(0.5));

  CHECK(throws_with(Errc::not_sorted, [] { make_partition({0.0, 1.0, 0.5}); }));
  CHECK(throws_with(Errc::wrong_endpoints, [] { make_partition({0.1, 0.5, 1.0}); }));
  CHECK(throws_with(Errc::too_few_points, [] { make_partition({0.0}); }));
}

TEST_CASE("locate uses the right-open convention with tolerance") {
  auto p = uniform4();
  CHECK(p->locate(0.25) == 1);
  CHECK(p->locate(0.25 - 1e-13) == 1);
  CHECK(p->locate(0.25 - 1e-9) == 0);
  CHECK(p->locate(1.0) == 3);  // T belongs to the last interval's closure
  CHECK(p->locate(0.0) == 0);
  CHECK(throws_with(Errc::out_of_range, [&] { p->locate(1.5); }));
}

TEST_CASE("kernel_value matches the displayed formula") {
  auto p = uniform4();
  const double t = 0.375;
  CHECK(kernel_value(*p, t, 0.1) == doctest::Approx(1.0));
  CHECK(kernel_value(*p, t, 0.3) == doctest::Approx(0.5));
  CHECK(kernel_value(*p, t, 0.6) == doctest::Approx(0.0));
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.99}) {
    CHECK(kernel_value(*p, 1.0, u) == doctest::Approx(1.0));
    CHECK(kernel_value(*p, 0.0, u) == doctest::Approx(0.0));
  }
  CHECK(throws_with(Errc::out_of_range, [&] { kernel_value(*p, 0.5, 1.2); }));
}

TEST_CASE("kernel_value stays in [0,1] everywhere") {
  auto p = make_partition({0.0, 0.1, 0.35, 0.6, 1.0});
  CounterRng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double t = rng.next_uniform();
    const double u = rng.next_uniform();
    const double v = kernel_value(*p, t, u);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("kernel_dt is the scaled indicator") {
  auto p = uniform4();
  const double t = 0.375;
  CHECK(kernel_dt(*p, t, 0.3) == doctest::Approx(4.0));
  CHECK(kernel_dt(*p, t, 0.1) == doctest::Approx(0.0));
  CHECK(kernel_dt(*p, t, 0.8) == doctest::Approx(0.0));
  CHECK(throws_with(Errc::out_of_range, [&] { kernel_dt(*p, 1.0, 0.5); }));
}

TEST_CASE("inner products: frozen values and the quadrature oracle") {
  auto p = uniform4();
  const auto a = KernelSlice::plain(p, 0.0, 0.375);
  const auto b = KernelSlice::plain(p, 0.0, 0.625);
  // Frozen expected values (piecewise-constant slices on the 4 cells):
  // coefficients of a are (1, 0.5, 0, 0), of b (1, 1, 0.5, 0).
  CHECK(inner_product(a, a) == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK(inner_product(a, b) == doctest::Approx(0.375).epsilon(1e-14));

  const auto zero = KernelSlice::plain(p, 0.4, 0.4);
  CHECK(inner_product(a, zero) == 0.0);
  CHECK(zero.is_zero());

  // Oracle agreement on the frozen pairs.
  const auto fa = [&](double u) { return a.value(u); };
  const auto fb = [&](double u) { return b.value(u); };
  const double oracle_aa = testing::simpson_inner(fa, fa, p->points());
  const double oracle_ab = testing::simpson_inner(fa, fb, p->points());
  CHECK(std::fabs(oracle_aa - 0.3125) <= 1e-10);
  CHECK(std::fabs(oracle_ab - 0.375) <= 1e-10);
}

TEST_CASE("inner products agree with quadrature on random sigma-weighted slices") {
  auto p = make_partition({0.0, 0.15, 0.4, 0.55, 0.8, 1.0});
  CounterRng rng(123);
  for (int i = 0; i < 100; ++i) {
    double s1 = rng.next_uniform(), t1 = rng.next_uniform();
    double s2 = rng.next_uniform(), t2 = rng.next_uniform();
    if (s1 > t1) std::swap(s1, t1);
    if (s2 > t2) std::swap(s2, t2);
    std::vector<double> w1(p->n()), w2(p->n());
    for (auto& w : w1) w = 4.0 * rng.next_uniform() - 2.0;
    for (auto& w : w2) w = 4.0 * rng.next_uniform() - 2.0;
    const auto a = weighted_kernel(p, s1, t1, w1);
    const auto b = weighted_kernel(p, s2, t2, w2);
    const double exact = inner_product(a, b);
    const double oracle = testing::simpson_inner([&](double u) { return a.value(u); },
                                                 [&](double u) { return b.value(u); },
                                                 p->points(), 20000);
    CHECK(std::fabs(exact - oracle) <= 1e-10);
    CHECK(inner_product(a, b) == inner_product(b, a));
    CHECK(std::fabs(exact) <= std::sqrt(a.norm_sq() * b.norm_sq()) + 1e-12);
  }
}

TEST_CASE("inner_product rejects partition mismatches") {
  auto p = uniform4();
  auto q = make_uniform_partition(5, 1.0);
  const auto a = KernelSlice::plain(p, 0.0, 0.5);
  const auto b = KernelSlice::plain(q, 0.0, 0.5);
  CHECK(throws_with(Errc::partition_mismatch, [&] { inner_product(a, b); }));
}

TEST_CASE("weighted_kernel: unit, zero and scaled weights") {
  auto p = uniform4();
  const auto plain = KernelSlice::plain(p, 0.1, 0.7);
  const auto unit = weighted_kernel(p, 0.1, 0.7, std::vector<double>(4, 1.0));
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(plain.coefficient(k) == doctest::Approx(unit.coefficient(k)));

  const auto zero = weighted_kernel(p, 0.1, 0.7, std::vector<double>(4, 0.0));
  CHECK(zero.is_zero());

  const auto two = weighted_kernel(p, 0.0, 0.375, std::vector<double>(4, 2.0));
  CHECK(inner_product(two, two) == doctest::Approx(4.0 * 0.3125).epsilon(1e-14));

  CHECK(throws_with(Errc::dimension_mismatch,
                    [&] { weighted_kernel(p, 0.0, 0.5, {1.0, 2.0}); }));
}

TEST_CASE("Haar direction: norm, admissibility and exact orthogonality") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  CHECK(h.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.admissible());
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::fabs(h.interval_mean(k)) <= 1e-15);

  CounterRng rng(7);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.next_uniform();
    const auto slice = KernelSlice::plain(p, 0.0, t);
    CHECK(std::fabs(inner(h, slice)) <= 1e-12);
    const double oracle = testing::simpson_inner(
        [&](double u) { return h.step()->value(u); },
        [&](double u) { return slice.value(u); },
        testing::merge_breaks(h.step()->breaks(), p->points()), 20000);
    CHECK(std::fabs(oracle) <= 1e-12);
  }
}

TEST_CASE("check_direction: Haar passes, constants and corrupted Haar fail") {
  auto p = uniform4();
  const auto ok = check_direction(*p, make_haar_direction(p));
  CHECK(ok.admissible);
  CHECK(ok.max_abs_residual <= 1e-12);

  const Direction ones = Direction::from_cell_values(p, 1, {1.0, 1.0, 1.0, 1.0});
  const auto bad = check_direction(*p, ones);
  CHECK_FALSE(bad.admissible);
  for (double m : bad.interval_means) CHECK(m == doctest::Approx(1.0));

  // Haar on all but subinterval 2, +1 there.
  std::vector<double> vals = {1, -1, 1, -1, 1, 1, 1, -1};
  const Direction corrupt = Direction::from_cell_values(p, 2, vals);
  const auto rep = check_direction(*p, corrupt);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.worst_interval == 2);
}

TEST_CASE("Haar orthogonality to d/dr K_r on a dense r grid") {
  for (auto p : {uniform4(), make_partition({0.0, 0.2, 0.3, 0.7, 1.0})}) {
    const Direction h = make_haar_direction(p);
    for (std::size_t i = 0; i < 10000; ++i) {
      const double r = (static_cast<double>(i) + 0.5) / 10000.0;
      const Direction eta = deriv_kernel_direction(p, r);
      CHECK(std::fabs(inner(eta, h)) <= 1e-12);
    }
  }
}

TEST_CASE("indicator direction") {
  auto p = uniform4();
  const Direction ind = indicator_direction(p, 0.5);
  CHECK(ind.norm_sq() == doctest::Approx(0.5));
  CHECK_FALSE(ind.admissible());
  CHECK(std::fabs(inner(ind, make_haar_direction(p))) <= 1e-15);
  CHECK(throws_with(Errc::out_of_range, [&] { indicator_direction(p, 0.3); }));
  CHECK(throws_with(Errc::config_error, [&] { indicator_direction(p, 0.0); }));
}

TEST_CASE("step function integral and inner product are exact") {
  StepFunction f({0.0, 0.25, 0.5, 1.0}, {2.0, -1.0, 0.5});
  CHECK(f.integral_to(0.25) == doctest::Approx(0.5));
  CHECK(f.integral_to(0.375) == doctest::Approx(0.5 - 0.125));
  CHECK(f.integral_to(1.0) == doctest::Approx(0.5 - 0.25 + 0.25));
  CHECK(f.norm_sq() == doctest::Approx(4.0 * 0.25 + 1.0 * 0.25 + 0.25 * 0.5));

  StepFunction g({0.0, 0.5, 1.0}, {1.0, 3.0});
  // integral = 2*0.25 - 1*0.25 + 3*(0.5*0.5)
  CHECK(f.inner(g) == doctest::Approx(0.5 - 0.25 + 0.75));
}

}  // TEST_SUITE
