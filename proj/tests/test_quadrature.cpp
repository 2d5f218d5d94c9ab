#include "doctest.h"

#include <cmath>

#include "homokinetics/quadrature.hpp"

using namespace homokinetics;

TEST_CASE("Gauss-Legendre integrates polynomials exactly")
{
  auto r = gauss_legendre(6, 0, 2);
  for (int p = 0; p <= 11; ++p)
    CHECK(r.integrate([&](double x) { return std::pow(x, p); }) ==
          doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-13));
}

TEST_CASE("generalised Gauss-Laguerre moments")
{
  for (double alpha : {-0.5, 0.0, 0.5, 1.5}) {
    auto r = gauss_laguerre(8, alpha);
    for (int p = 0; p <= 15; ++p)
      CHECK(r.integrate([&](double x) { return std::pow(x, p); }) ==
            doctest::Approx(std::tgamma(p + alpha + 1)).epsilon(1e-11));
  }
}

TEST_CASE("Gauss-Hermite moments")
{
  auto r = gauss_hermite(7);
  for (int p = 0; p <= 13; ++p) {
    const double exact = p % 2 ? 0.0 : std::tgamma((p + 1) / 2.0);
    CHECK(r.integrate([&](double x) { return std::pow(x, p); }) == doctest::Approx(exact).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("periodic trapezoid is exact for trigonometric polynomials")
{
  auto r = periodic_trapezoid(9);
  CHECK(r.integrate([](double x) { return std::pow(std::cos(x), 8); }) ==
        doctest::Approx(2 * M_PI * 35.0 / 128.0).epsilon(1e-13));
  CHECK(r.integrate([](double x) { return std::sin(3 * x) * std::cos(5 * x); }) == doctest::Approx(0).scale(1));
}
