#include <doctest.h>

#include <algorithm>

#include "lrdn/error.hpp"
#include "lrdn/wiener.hpp"
#include "support.hpp"

using namespace lrdn;

namespace {

double row_error(const PolyMatrix& est, const PolyMatrix& exact, Index row) {
  double e = 0.0;
  for (int k = 0; k <= std::max(est.degree(), exact.degree()); ++k) {
    e = std::max(e, (est.coeff_or_zero(k).row(row) - exact.coeff_or_zero(k).row(row)).cwiseAbs().maxCoeff());
  }
  return e;
}

double autocorr(const VectorXd& r, Index lag) {
  const VectorXd c = r.array() - r.mean();
  const Index n = c.size();
  return c.head(n - lag).dot(c.tail(n - lag)) / c.squaredNorm();
}

}  // namespace

TEST_CASE("design layouts") {
  const auto h = h_design(2, 1);
  CHECK(h.size() == 4);
  CHECK(h.front() == Regressor{0, 0});
  const auto s = s_design(3, 1, 2);
  CHECK(s.size() == 8);
  CHECK(std::find(s.begin(), s.end(), Regressor{1, 0}) == s.end());
  CHECK(std::find(s.begin(), s.end(), Regressor{1, 1}) != s.end());
  CHECK(std::find(s.begin(), s.end(), Regressor{0, 0}) != s.end());
}

TEST_CASE("exact filters") {
  const auto white = exact_filters(test::make_model(PolyMatrix(1, 2), PolyMatrix(2, 2)));
  CHECK(white.s.is_zero());
  CHECK(white.d == VectorXd::Ones(2));

  const auto ar = exact_filters(test::ar1(0.3, 2, 0.5));
  CHECK(ar.s.coeff(1)(0, 0) == doctest::Approx(0.3));
  CHECK(ar.s.coeff(0)(0, 0) == 0.0);
  CHECK(max_abs_diff(ar.h, test::ar1(0.3, 2, 0.5).g_ml) == 0.0);

  PolyMatrix g_l(2, 2, 1);
  g_l.coeff(1)(0, 1) = 0.5;
  const auto one = exact_filters(test::make_model(PolyMatrix(0, 2), g_l));
  CHECK(max_abs_diff(one.s, g_l) < 1e-15);

  CHECK_THROWS_AS(exact_filters(test::ar1(1.2)), Error);
}

TEST_CASE("exact S from the spectral factor") {
  CHECK(exact_s_via_factor(PolyMatrix::identity(3)).is_zero());
  const auto w = reduced_form(test::ar1(0.5)).w_factor;
  const PolyMatrix s = exact_s_via_factor(w);
  CHECK(s.coeff(1)(0, 0) == doctest::Approx(0.5));
  for (int k = 2; k <= s.degree(); ++k) CHECK(std::abs(s.coeff(k)(0, 0)) < 1e-12);

  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorConfig c = test::small_config(seed);
    c.include_lag0_offdiag = true;
    const auto model = random_model(c);
    const PolyMatrix via_factor = exact_s_via_factor(reduced_form(model).w_factor);
    CHECK(max_abs_diff(via_factor, exact_filters(model).s) < 1e-8);
  }
}

TEST_CASE("H estimation recovers a noiseless relation") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto model = random_model(test::small_config(seed));
    const auto ts = simulate(model, 2000, 500, seed);
    const auto est = estimate_h(ts, {.order = model.g_ml.degree()});
    CHECK(est.block == Block::M);
    CHECK(est.effective_samples() == 2000 - model.g_ml.degree());
    for (Index i = 0; i < model.m; ++i) {
      CHECK(std::sqrt(est.rss(i) / static_cast<double>(est.effective_samples())) < 1e-8);
    }
    CHECK(max_abs_diff(est.coeffs, model.g_ml) < 1e-6);
  }

  PolyMatrix g_l(2, 2, 1);
  g_l.coeff(1)(0, 0) = 0.5;
  const auto zero = estimate_h(simulate(test::make_model(PolyMatrix(2, 2), g_l), 500, 10, 1), {.order = 2});
  for (const auto& c : zero.coeffs.coeffs()) CHECK(c.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("H estimation with too small an order leaves a residual") {
  PolyMatrix g_ml(1, 1, 3);
  g_ml.coeff(3)(0, 0) = 0.8;
  const auto ts = simulate(test::make_model(g_ml, test::ar1(0.4).g_l), 2000, 100, 3);
  const auto est = estimate_h(ts, {.order = 1});
  CHECK(std::sqrt(est.rss(0) / static_cast<double>(est.effective_samples())) > 0.1);
}

TEST_CASE("S estimation: white noise and AR(1)") {
  VectorXd sigma(3);
  sigma << 2.0, 0.5, 1.0;
  const auto white = simulate(test::make_model(PolyMatrix(0, 3), PolyMatrix(3, 3), sigma), 20000, 0, 4);
  const auto s = estimate_s(white, {.order = 2});
  CHECK(s.coeffs.coeffs().size() == 3);
  double worst = 0.0;
  for (const auto& c : s.coeffs.coeffs()) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  CHECK(worst < 4.0 * std::sqrt(2.0 / 0.5) / std::sqrt(20000.0));
  for (Index i = 0; i < 3; ++i) CHECK(s.residual_variance(i) == doctest::Approx(sigma(i)).epsilon(0.05));

  const auto ar = estimate_s(simulate(test::ar1(0.5), 5000, 500, 6), {.order = 4});
  CHECK(ar.coeffs.coeff(1)(0, 0) == doctest::Approx(0.5).epsilon(0.1));
  for (int k = 2; k <= 4; ++k) CHECK(std::abs(ar.coeffs.coeff(k)(0, 0)) < 0.05);
}

TEST_CASE("S estimation matches the exact filter at long horizons") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto model = random_model(test::small_config(seed));
    const auto est = estimate_s(simulate(model, 20000, 500, seed), {.order = model.g_l.degree()});
    CHECK(max_abs_diff(est.coeffs, exact_filters(model).s) < 0.05);
  }
}

TEST_CASE("input errors") {
  const auto ts = simulate(test::ar1(0.5, 1, 1.0), 12, 10, 1);
  CHECK_THROWS_WITH_AS(estimate_s(ts, {.order = 8}), doctest::Contains("InsufficientData"), Error);
  CHECK_THROWS_AS(estimate_h(simulate(test::ar1(0.5), 100, 10, 1)), Error);

  // Two identical y_l channels make the H design singular.
  auto dup = simulate(test::make_model(PolyMatrix(1, 2), PolyMatrix(2, 2)), 300, 0, 2);
  dup.data.col(2) = dup.data.col(1);
  CHECK_THROWS_WITH_AS(estimate_h(dup, {.order = 1}), doctest::Contains("RankDeficientDesign"), Error);
  CHECK_NOTHROW(estimate_h(dup, {.order = 1, .ridge = 1e-3}));
}

TEST_CASE("property: structural zero, orthogonality and whiteness") {
  int channels = 0;
  int white = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig c = test::small_config(seed);
    c.include_lag0_offdiag = seed % 2 == 0;
    const auto model = random_model(c);
    const auto ts = simulate(model, 3000, 500, seed);
    const int p = model.g_l.degree();
    const auto est = estimate_s(ts, {.order = p});
    CHECK(est.coeffs.coeff(0).diagonal().isZero(0.0));

    for (Index i = 0; i < est.rows(); ++i) {
      const VectorXd r = est.residuals.col(i);
      const MatrixXd x = lag_design(ts.y_l(), est.design[static_cast<std::size_t>(i)], p);
      for (Index k = 0; k < x.cols(); ++k) CHECK(std::abs(x.col(k).dot(r)) < 1e-8 * x.col(k).norm() * r.norm() + 1e-12);

      const double bound = 3.0 / std::sqrt(static_cast<double>(r.size()));
      bool ok = true;
      for (Index lag = 1; lag <= 10; ++lag) ok = ok && std::abs(autocorr(r, lag)) <= bound;
      ++channels;
      white += ok ? 1 : 0;
    }
  }
  CHECK(white >= 0.95 * channels);
}

TEST_CASE("property: residual variance converges to d^2 sigma") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratorConfig c = test::small_config(seed);
    c.sigma_l = (VectorXd(3) << 0.5, 1.0, 3.0).finished();
    const auto model = random_model(c);
    const auto est = estimate_s(simulate(model, 20000, 500, seed), {.order = model.g_l.degree()});
    const VectorXd d = exact_filters(model).d;
    for (Index i = 0; i < 3; ++i) {
      CHECK(est.residual_variance(i) == doctest::Approx(d(i) * d(i) * model.sigma_l(i)).epsilon(0.1));
    }
  }
}

TEST_CASE("property: estimates converge as T grows") {
  int channels = 0;
  int decreasing = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto model = random_model(test::small_config(seed));
    const PolyMatrix exact = exact_filters(model).s;
    const int p = model.g_l.degree();
    std::vector<PolyMatrix> fits;
    for (Index T : {2000, 8000, 32000}) fits.push_back(estimate_s(simulate(model, T, 500, seed * 7 + T), {.order = p}).coeffs);
    for (Index i = 0; i < model.l; ++i) {
      const double e0 = row_error(fits[0], exact, i);
      const double e1 = row_error(fits[1], exact, i);
      const double e2 = row_error(fits[2], exact, i);
      ++channels;
      decreasing += (e1 < e0 && e2 < e1) ? 1 : 0;
    }
  }
  CHECK(decreasing >= 0.9 * channels);
}

TEST_CASE("serial and parallel fits agree bit for bit") {
  GeneratorConfig c;
  c.pinned_noise = {4};
  const auto model = random_model(c);
  const auto ts = simulate(model, 1000, 500, 2);
  const auto a = estimate_s(ts, {.order = 3}, Exec::Serial);
  const auto b = estimate_s(ts, {.order = 3}, Exec::Parallel);
  CHECK(max_abs_diff(a.coeffs, b.coeffs) == 0.0);
  CHECK(a.residuals == b.residuals);
  const auto ha = estimate_h(ts, {.order = 2}, Exec::Serial);
  const auto hb = estimate_h(ts, {.order = 2}, Exec::Parallel);
  CHECK(max_abs_diff(ha.coeffs, hb.coeffs) == 0.0);
}
