#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <random>

#include "idbandit/special_functions.hpp"

using namespace idbandit;

TEST_CASE("digamma against boost") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> log_x(std::log(1e-6), std::log(1e8));
  for (int i = 0; i < 5000; ++i) {
    const double x = std::exp(log_x(gen));
    const double want = boost::math::digamma(x);
    CHECK(std::abs(digamma(x) - want) <= 1e-14 * std::max(1.0, std::abs(want)));
  }
  for (double x : {0.5, 1.0, 1.5, 2.0, 3.0, 6.0, 10.0, 1e3})
    CHECK(std::abs(digamma(x) - boost::math::digamma(x)) < 1e-14);
  CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-15));
}

TEST_CASE("log_beta against boost") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 500.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(gen), b = u(gen);
    const double want = std::log(boost::math::beta(a, b));
    if (std::isfinite(want)) CHECK(log_beta(a, b) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("beta entropy by quadrature") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {2, 5}, {7.5, 3.25}, {30, 40}, {1.5, 1.5}}) {
    boost::math::beta_distribution<double> dist(a, b);
    auto integrand = [&](double t) {
      const double p = boost::math::pdf(dist, t);
      return p > 0 ? -p * std::log(p) : 0.0;
    };
    const double want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-13);
    CHECK(beta_entropy(a, b) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(beta_entropy(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("expected logs under Beta by quadrature") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {2, 5}, {9, 2}, {40, 31}}) {
    boost::math::beta_distribution<double> dist(a, b);
    auto lt = [&](double t) { return boost::math::pdf(dist, t) * std::log(t); };
    auto l1t = [&](double t) { return boost::math::pdf(dist, t) * std::log1p(-t); };
    // tanh-sinh copes with the logarithmic endpoint singularities
    boost::math::quadrature::tanh_sinh<double> q;
    const auto m = beta_log_moments(a, b);
    CHECK(m.log_theta == doctest::Approx(q.integrate(lt, 0.0, 1.0)).epsilon(1e-9));
    CHECK(m.log_one_minus_theta == doctest::Approx(q.integrate(l1t, 0.0, 1.0)).epsilon(1e-9));
  }
}
