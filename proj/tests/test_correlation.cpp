// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include <cmath>

#include <doctest.h>

#include "maa/correlation.hpp"
#include "oracles.hpp"

using namespace maa;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kPiSq = 9.869604401089358618834490999876;
}

TEST_CASE("spatial_correlation is J0 of 2 pi d") {
  CHECK(correlation::spatial_correlation(0.0) == doctest::Approx(1.0));
  // J0(pi) and J0(2 pi), 30-digit references
  CHECK(correlation::spatial_correlation(0.5) ==
        doctest::Approx(-0.3042421776440939).epsilon(1e-13));
  CHECK(correlation::spatial_correlation(1.0) ==
        doctest::Approx(0.2202769085399345).epsilon(1e-13));
}

TEST_CASE("pair_distance combines translation and element offset") {
  CHECK(correlation::pair_distance(0.0, 0.25, 3, 1) == doctest::Approx(0.5));
  CHECK(correlation::pair_distance(0.3, 0.25, 2, 2) == doctest::Approx(0.3));
  CHECK(correlation::pair_distance(0.3, 0.4, 0, 1) ==
        doctest::Approx(std::hypot(0.3, 0.4)));
  CHECK(correlation::pair_distance(-0.3, 0.4, 1, 0) ==
        doctest::Approx(std::hypot(0.3, 0.4)));  // sign of the shift is irrelevant
}

TEST_CASE("channel_params mean branch SNR") {
  correlation::channel_params p{2.0, 3.0, 4.0};  // beta, symbol energy, noise var
  CHECK(p.mean_branch_snr() == doctest::Approx(1.5));
  CHECK(correlation::channel_params{}.mean_branch_snr() == doctest::Approx(1.0));
}

TEST_CASE("geometry and parameter validation") {
  CHECK_THROWS(correlation::validate(correlation::array_geometry{0, 0.5, 1.0}));
  CHECK_THROWS(correlation::validate(correlation::array_geometry{2, -0.1, 1.0}));
  CHECK_THROWS(correlation::validate(correlation::array_geometry{2, 0.0, 1.0}));
  CHECK_THROWS(correlation::validate(correlation::array_geometry{2, 0.5, -1.0}));
  CHECK_NOTHROW(correlation::validate(correlation::array_geometry{1, 0.0, 0.0}));
  CHECK_THROWS(correlation::validate(correlation::channel_params{0.0, 1.0, 1.0}));
  CHECK_THROWS(correlation::validate(correlation::channel_params{1.0, -1.0, 1.0}));
  CHECK_THROWS(correlation::validate(correlation::channel_params{1.0, 1.0, 0.0}));
  CHECK_NOTHROW(correlation::validate(correlation::channel_params{}));
}

TEST_CASE("build_sigma: structure and frozen entries") {
  const correlation::array_geometry g{3, 0.5, 1.0};
  const arma::mat s = correlation::build_sigma(g);
  REQUIRE(s.n_rows == 3);
  // Toeplitz, symmetric, unit diagonal
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(s(1, 2)).epsilon(1e-15));
  CHECK(s(0, 1) == doctest::Approx(s(1, 0)).epsilon(1e-15));
  // lag 1 at half-wavelength spacing: J0(pi); lag 2: J0(2 pi)
  CHECK(s(0, 1) == doctest::Approx(-0.3042421776440939).epsilon(1e-13));
  CHECK(s(0, 2) == doctest::Approx(0.2202769085399345).epsilon(1e-13));
}

TEST_CASE("build_sigma agrees with the recurrence oracle for several spacings") {
  for (double delta : {0.1, 0.25, 0.3827398747810062, 0.5}) {
    const correlation::array_geometry g{5, delta, 1.0};
    const arma::mat s = correlation::build_sigma(g);
    for (unsigned r = 0; r < 5; ++r) {
      for (unsigned c = 0; c < 5; ++c) {
        const double d = delta * (r > c ? r - c : c - r);
        CHECK(std::fabs(s(r, c) - oracles::bessel_j(0, 2.0 * kPi * d)) < 1e-11);
      }
    }
  }
}

TEST_CASE("build_b_matrix: diagonal is pi^2, off-diagonals match references") {
  struct row { double delta; unsigned lag; double value; };
  // pi * J1(2 pi k delta) / (k delta), 30-digit references
  const row table[] = {
      {0.25, 1, 7.122921574337686},   {0.25, 2, 1.788290942464898},
      {0.25, 3, -1.179805889274796},  {0.5, 1, 1.788290942464898},
      {0.5, 2, -0.6672193962387343},  {0.5, 3, 0.3701323914886493},
      {0.1, 1, 9.390504954055558},    {0.1, 2, 8.045472838826484},
      {0.1, 3, 6.089168888531736},    {0.1, 4, 3.878174162333961},
      {0.1, 5, 1.788290942464898},
  };
  for (double delta : {0.1, 0.25, 0.5}) {
    const correlation::array_geometry g{6, delta, 1.0};
    const arma::mat b = correlation::build_b_matrix(g);
    for (unsigned i = 0; i < 6; ++i) {
      CHECK(b(i, i) == doctest::Approx(kPiSq).epsilon(1e-14));
    }
    CHECK(arma::abs(b - b.t()).max() < 1e-15);
    for (const auto& r : table) {
      if (r.delta != delta) continue;
      CHECK(b(0, r.lag) == doctest::Approx(r.value).epsilon(1e-13));
    }
  }
}

TEST_CASE("single-element builders degenerate cleanly") {
  const correlation::array_geometry g{1, 0.0, 1.0};
  CHECK(correlation::build_sigma(g)(0, 0) == doctest::Approx(1.0));
  CHECK(correlation::build_b_matrix(g)(0, 0) == doctest::Approx(kPiSq).epsilon(1e-14));
}

TEST_CASE("cross_covariance: tau = 0 reduces to sigma, entries match references") {
  const correlation::array_geometry g{4, 0.25, 1.0};
  const arma::mat at0 = correlation::cross_covariance(g, 0.0);
  CHECK(arma::abs(at0 - correlation::build_sigma(g)).max() < 1e-15);

  const arma::mat c = correlation::cross_covariance(g, 0.25);
  // J0(2 pi hypot(0.25, 0.25)), 30-digit reference
  CHECK(c(0, 1) == doctest::Approx(0.098474940761694393).epsilon(1e-13));
  CHECK(c(1, 0) == doctest::Approx(c(0, 1)).epsilon(1e-15));

  const correlation::array_geometry g2{2, 0.5, 1.0};
  const arma::mat c2 = correlation::cross_covariance(g2, 0.1);
  // J0(2 pi hypot(0.1, 0.5))
  CHECK(c2(0, 1) == doctest::Approx(-0.32118056671845601).epsilon(1e-13));
  CHECK(std::fabs(correlation::cross_covariance(g2, -0.1)(0, 1) - c2(0, 1)) < 1e-15);
}

TEST_CASE("position_grid") {
  SUBCASE("single point sits at the origin") {
    const arma::vec g = correlation::position_grid(0.0, 1);
    REQUIRE(g.n_elem == 1);
    CHECK(g(0) == 0.0);
    CHECK(correlation::position_grid(1.0, 1)(0) == 0.0);
  }
  SUBCASE("uniform spacing across the span") {
    const arma::vec g = correlation::position_grid(2.0, 5);
    REQUIRE(g.n_elem == 5);
    CHECK(g(0) == doctest::Approx(0.0));
    CHECK(g(4) == doctest::Approx(2.0));
    CHECK(g(1) == doctest::Approx(0.5));
  }
  SUBCASE("degenerate span with multiple points is rejected") {
    CHECK_THROWS_AS(correlation::position_grid(0.0, 4), std::invalid_argument);
  }
}

TEST_CASE("grid_covariance matches brute force on a uniform grid") {
  const correlation::array_geometry g{2, 0.25, 1.0};
  const arma::vec grid = correlation::position_grid(1.0, 9);
  const arma::mat c = correlation::grid_covariance(g, grid);
  REQUIRE(c.n_rows == 18);
  for (std::size_t k = 0; k < 9; ++k) {
    for (std::size_t l = 0; l < 9; ++l) {
      for (unsigned i = 0; i < 2; ++i) {
        for (unsigned j = 0; j < 2; ++j) {
          const double d = std::hypot(grid(k) - grid(l),
                                      0.25 * (i > j ? i - j : j - i));
          const double ref = oracles::bessel_j(0, 2.0 * kPi * d);
          CHECK(std::fabs(c(k * 2 + i, l * 2 + j) - ref) < 1e-11);
        }
      }
    }
  }
  CHECK(arma::abs(c - c.t()).max() < 1e-15);
}

TEST_CASE("grid_covariance: non-uniform grid takes the generic path, same answer") {
  const correlation::array_geometry g{2, 0.25, 1.0};
  arma::vec grid = {0.0, 0.1, 0.35, 0.6, 1.0};
  const arma::mat c = correlation::grid_covariance(g, grid);
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t l = 0; l < 5; ++l) {
      for (unsigned i = 0; i < 2; ++i) {
        for (unsigned j = 0; j < 2; ++j) {
          const double d = std::hypot(grid(k) - grid(l),
                                      0.25 * (i > j ? i - j : j - i));
          CHECK(std::fabs(c(k * 2 + i, l * 2 + j) - oracles::bessel_j(0, 2.0 * kPi * d)) <
                1e-11);
        }
      }
    }
  }
}

TEST_CASE("grid_covariance input validation") {
  const correlation::array_geometry g{2, 0.25, 1.0};
  CHECK_THROWS(correlation::grid_covariance(g, arma::vec{}));
  CHECK_THROWS(correlation::grid_covariance(g, arma::vec{0.0, 0.0}));
  CHECK_THROWS(correlation::grid_covariance(g, arma::vec{0.5, 0.2}));
}
