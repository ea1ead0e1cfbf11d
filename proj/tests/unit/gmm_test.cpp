#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "battlemix/error.hpp"
#include "battlemix/gmm.hpp"

using namespace battlemix;

namespace {

// Multivariate normal density by Gaussian elimination (determinant and solve),
// deliberately sharing nothing with the library's Cholesky path.
double normal_density(std::span<const double> x, std::span<const double> mu, const Matrix& cov) {
  const std::size_t n = mu.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = cov(i, j);
    a[i][n] = x[i] - mu[i];
  }
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> sol(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = a[i][n];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * sol[k];
    sol[i] = s / a[i][i];
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) quad += (x[i] - mu[i]) * sol[i];
  return std::exp(-0.5 * quad) / std::sqrt(std::pow(2.0 * std::numbers::pi, static_cast<double>(n)) * det);
}

double loglik_oracle(const Matrix& data, const GmmModel& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double p = 0.0;
    for (std::size_t k = 0; k < m.K(); ++k) p += m.weights[k] * normal_density(data.row(i), m.means.row(k), m.covariances[k]);
    total += std::log(p);
  }
  return total;
}

Matrix random_spd(std::size_t n, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> nd;
  Matrix b(n, n);
  for (auto& v : b.data()) v = nd(gen) * scale;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? 0.2 * scale : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(i, k) * b(j, k);
      a(i, j) = s;
    }
  }
  return a;
}

GmmModel random_model(std::size_t K, std::size_t N, std::mt19937_64& gen) {
  GmmModel m;
  m.structure = CovarianceType::Full;
  std::uniform_real_distribution<double> u(0.2, 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    m.weights.push_back(u(gen));
    total += m.weights.back();
  }
  for (auto& w : m.weights) w /= total;
  m.means = Matrix(K, N);
  for (auto& v : m.means.data()) v = u(gen) * 4.0;
  for (std::size_t k = 0; k < K; ++k) m.covariances.push_back(random_spd(N, gen, 0.7));
  return m;
}

GmmModel spherical_pair(double separation) {
  GmmModel m;
  m.structure = CovarianceType::Spherical;
  m.weights = {0.5, 0.5};
  m.means = Matrix::from_rows({{0.0, 0.0}, {separation, 0.0}});
  m.covariances = {Matrix::identity(2), Matrix::identity(2)};
  return m;
}

Matrix planted_pair(std::size_t M, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.05);
  Matrix d(M, 3);
  for (std::size_t i = 0; i < M; ++i) {
    const bool second = i % 2 == 1;
    d(i, 0) = (second ? 0.8 : 0.1) + nd(gen);
    d(i, 1) = (second ? 0.1 : 0.7) + nd(gen);
    d(i, 2) = 0.2 + nd(gen);
  }
  return d;
}

}  // namespace

TEST_SUITE("gmm") {
  TEST_CASE("density at the mean of a 2-D standard normal") {
    GmmModel m;
    m.structure = CovarianceType::Spherical;
    m.weights = {1.0};
    m.means = Matrix::from_rows({{0.3, 0.4}});
    m.covariances = {Matrix::identity(2)};
    CHECK(log_likelihood(Matrix::from_rows({{0.3, 0.4}}), m) == doctest::Approx(-std::log(2.0 * std::numbers::pi)));
  }

  TEST_CASE("log-likelihood matches the naive density oracle and doubles on duplicated data") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = random_model(3, 4, gen);
      Matrix data(50, 4);
      for (auto& v : data.data()) v = u(gen);
      const double ll = log_likelihood(data, m);
      CHECK(std::abs(ll - loglik_oracle(data, m)) < 1e-9);
      Matrix twice(100, 4);
      for (std::size_t i = 0; i < 100; ++i) std::ranges::copy(data.row(i % 50), twice.row(i).begin());
      CHECK(log_likelihood(twice, m) == doctest::Approx(2.0 * ll).epsilon(1e-14));
      const double single = std::exp(log_likelihood(Matrix::from_rows({{1.0, 2.0, 0.5, 3.0}}), m));
      double direct = 0.0;
      const std::vector<double> x{1.0, 2.0, 0.5, 3.0};
      for (std::size_t k = 0; k < 3; ++k) direct += m.weights[k] * normal_density(x, m.means.row(k), m.covariances[k]);
      CHECK(std::abs(single - direct) <= 1e-9 * direct);
    }
    CHECK_THROWS_AS(log_likelihood(Matrix(2, 3), random_model(2, 4, gen)), Error);
  }

  TEST_CASE("e_step: symmetry, dominance, single component") {
    const auto m = spherical_pair(2.0);
    auto r = e_step(Matrix::from_rows({{1.0, 0.7}}), m);
    CHECK(r(0, 0) == doctest::Approx(0.5));
    CHECK(r(0, 1) == doctest::Approx(0.5));
    r = e_step(Matrix::from_rows({{0.0, 0.0}}), spherical_pair(100.0));
    CHECK(r(0, 0) == doctest::Approx(1.0));
    CHECK(r(0, 1) < 1e-20);
    GmmModel one = spherical_pair(0.0);
    one.weights = {1.0};
    one.means = Matrix::from_rows({{0.0, 0.0}});
    one.covariances.resize(1);
    r = e_step(Matrix::from_rows({{1, 2}, {3, 4}, {-5, 6}}), one);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r(i, 0) == 1.0);
  }

  TEST_CASE("posterior equals the e_step row and handles basis checks") {
    std::mt19937_64 gen(2);
    const auto m = random_model(4, 3, gen);
    const std::vector<double> x{1.0, 2.0, 3.0};
    const auto p = posterior(m, x);
    const auto r = e_step(Matrix::from_rows({x}), m);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(p[k] - r(0, k)) < 1e-12);
    const auto dom = spherical_pair(100.0);
    CHECK(argmax(posterior(dom, std::vector<double>{100.0, 0.0})) == 1);
    const auto mid = posterior(spherical_pair(2.0), std::vector<double>{1.0, -3.0});
    CHECK(mid[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(posterior(m, std::vector<double>{1.0}), Error);

    GmmModel based = dom;
    based.basis = {"A", "B"};
    based.race = Race::Zerg;
    CompositionVector u{Race::Terran, Scope::Military, {0.5, 0.5}, 2};
    try {
      posterior(based, u);
      FAIL("expected BasisMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BasisMismatch);
    }
    u.race = Race::Zerg;
    CHECK(posterior(based, u).size() == 2);
  }

  TEST_CASE("m_step closed forms") {
    const auto data = Matrix::from_rows({{0, 0}, {2, 0}, {1, 3}, {10, 10}, {12, 12}, {14, 11}});
    const double floor = 1e-6;

    SUBCASE("uniform responsibilities, one component: sample mean and biased covariance") {
      const Matrix resp(6, 1, 1.0);
      const auto m = m_step(data, resp, CovarianceType::Full, floor);
      std::vector<double> mean;
      const auto cov = covariance(data, &mean);
      CHECK(m.weights == std::vector<double>{1.0});
      for (std::size_t j = 0; j < 2; ++j) CHECK(m.means(0, j) == doctest::Approx(mean[j]));
      CHECK(m.covariances[0](0, 0) == doctest::Approx(cov(0, 0) + floor));
      CHECK(m.covariances[0](0, 1) == doctest::Approx(cov(0, 1)));
    }

    Matrix hard(6, 2, 0.0);
    for (std::size_t i = 0; i < 6; ++i) hard(i, i < 3 ? 0 : 1) = 1.0;

    SUBCASE("hard assignments: per-cluster statistics") {
      const auto m = m_step(data, hard, CovarianceType::Diagonal, floor);
      CHECK(m.weights[0] == doctest::Approx(0.5));
      CHECK(m.means(0, 0) == doctest::Approx(1.0));
      CHECK(m.means(0, 1) == doctest::Approx(1.0));
      CHECK(m.means(1, 0) == doctest::Approx(12.0));
      CHECK(m.means(1, 1) == doctest::Approx(11.0));
      CHECK(m.covariances[0](0, 0) == doctest::Approx(2.0 / 3.0 + floor));
      CHECK(m.covariances[1](1, 1) == doctest::Approx(2.0 / 3.0 + floor));
      CHECK(m.covariances[1](0, 1) == 0.0);
      const auto s = m_step(data, hard, CovarianceType::Spherical, floor);
      CHECK(s.covariances[0](1, 1) == doctest::Approx((2.0 / 3.0 + 6.0 / 3.0) / 2.0 + floor));
    }

    SUBCASE("tied: pooled within-cluster scatter") {
      // Cluster A deviations (-1,-1),(1,-1),(0,2); cluster B (-2,-1),(0,1),(2,0).
      const auto m = m_step(data, hard, CovarianceType::Tied, floor);
      CHECK(m.covariances[0](0, 0) == doctest::Approx(10.0 / 6.0 + floor));
      CHECK(m.covariances[0](1, 1) == doctest::Approx(8.0 / 6.0 + floor));
      CHECK(m.covariances[0](0, 1) == doctest::Approx(2.0 / 6.0));
      CHECK(m.covariances[1] == m.covariances[0]);
    }

    SUBCASE("empty component is degenerate") {
      Matrix resp(6, 2, 0.0);
      for (std::size_t i = 0; i < 6; ++i) resp(i, 0) = 1.0;
      try {
        m_step(data, resp, CovarianceType::Full, floor);
        FAIL("expected DegenerateComponent");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateComponent);
      }
    }
  }

  TEST_CASE("fit: exact fit when M equals K") {
    const auto data = Matrix::from_rows({{0, 0}, {5, 1}, {2, 9}});
    const auto m = fit(data, 3, CovarianceType::Diagonal, 4);
    for (std::size_t i = 0; i < 3; ++i) {
      bool found = false;
      for (std::size_t k = 0; k < 3; ++k) {
        found = found || (std::abs(m.means(k, 0) - data(i, 0)) < 1e-6 && std::abs(m.means(k, 1) - data(i, 1)) < 1e-6);
      }
      CHECK(found);
    }
    CHECK_THROWS_AS(fit(data, 4, CovarianceType::Full, 0), Error);
    CHECK_THROWS_AS(fit(data, 0, CovarianceType::Full, 0), Error);
  }

  TEST_CASE("fit: identical points are handled by the floor") {
    const Matrix data(20, 3, 0.25);
    const auto m = fit(data, 2, CovarianceType::Full, 0);
    CHECK(std::isfinite(m.train_log_likelihood));
  }

  TEST_CASE("fit: two planted clusters, best of 20 seeds") {
    const auto data = planted_pair(400, 5);
    GmmModel best;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = fit(data, 2, CovarianceType::Diagonal, seed);
      if (m.train_log_likelihood > best_ll) {
        best_ll = m.train_log_likelihood;
        best = m;
      }
    }
    const std::size_t first = best.means(0, 0) < best.means(1, 0) ? 0 : 1;
    const double planted[2][3] = {{0.1, 0.7, 0.2}, {0.8, 0.1, 0.2}};
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(best.means(first, j) - planted[0][j]) < 0.05);
      CHECK(std::abs(best.means(1 - first, j) - planted[1][j]) < 0.05);
    }
  }

  TEST_CASE("property: EM trace non-decreasing, rows and weights on the simplex, floors hold") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 8; ++trial) {
      Matrix data(120, 3);
      for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) data(i, j) = nd(gen) + 3.0 * static_cast<double>(i % 3 == j);
      }
      for (const auto structure : kAllCovarianceTypes) {
        FitTrace trace;
        const auto m = fit(data, 3, structure, static_cast<std::uint64_t>(trial), {}, &trace);
        for (std::size_t t = 1; t < trace.log_likelihood.size(); ++t) {
          CHECK(trace.log_likelihood[t] >= trace.log_likelihood[t - 1] - 1e-8);
        }
        double wsum = 0.0;
        for (const double w : m.weights) wsum += w;
        CHECK(std::abs(wsum - 1.0) < 1e-9);
        const auto r = e_step(data, m);
        for (std::size_t i = 0; i < r.rows(); ++i) {
          double s = 0.0;
          for (std::size_t k = 0; k < r.cols(); ++k) {
            CHECK(r(i, k) >= 0.0);
            s += r(i, k);
          }
          CHECK(std::abs(s - 1.0) < 1e-9);
        }
        for (const auto& c : m.covariances) {
          for (std::size_t j = 0; j < 3; ++j) CHECK(c(j, j) >= 1e-6);
        }
        CHECK(m.train_log_likelihood == doctest::Approx(log_likelihood(data, m)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("property: seed determinism is bit-exact") {
    const auto data = planted_pair(200, 9);
    for (const auto structure : kAllCovarianceTypes) {
      FitTrace ta, tb;
      const auto a = fit(data, 3, structure, 17, {}, &ta);
      const auto b = fit(data, 3, structure, 17, {}, &tb);
      CHECK(a == b);
      CHECK(ta.log_likelihood == tb.log_likelihood);
    }
  }

  TEST_CASE("free parameters and BIC arithmetic") {
    CHECK(free_parameters(CovarianceType::Spherical, 1, 3) == 4);
    CHECK(bic(-50.0, 4, 100) == doctest::Approx(100.0 + 4.0 * std::log(100.0)));
    CHECK(free_parameters(CovarianceType::Spherical, 2, 3) == 9);
    CHECK(free_parameters(CovarianceType::Tied, 2, 3) == 13);
    CHECK(free_parameters(CovarianceType::Diagonal, 2, 3) == 13);
    CHECK(free_parameters(CovarianceType::Full, 2, 3) == 19);
    CHECK(bic(-10.0, 9, 200) > bic(-10.0, 9, 100));
    CHECK(bic(-10.0, free_parameters(CovarianceType::Full, 3, 4), 100) >
          bic(-10.0, free_parameters(CovarianceType::Diagonal, 3, 4), 100));
  }

  TEST_CASE("select_model: singleton grid equals a plain fit; structure order does not matter") {
    const auto data = planted_pair(150, 3);
    SelectionOptions opts;
    opts.k_range = {2};
    opts.structures = {CovarianceType::Tied};
    opts.seeds = {6};
    auto sel = select_model(data, opts);
    auto plain = fit(data, 2, CovarianceType::Tied, 6);
    CHECK(sel.best == plain);
    CHECK(sel.candidates.size() == 1);

    opts.k_range = {1, 2, 3};
    opts.structures = {CovarianceType::Full, CovarianceType::Diagonal, CovarianceType::Tied, CovarianceType::Spherical};
    opts.seeds = {0, 1};
    const auto reversed = select_model(data, opts);
    std::ranges::reverse(opts.structures);
    const auto forward = select_model(data, opts);
    CHECK(reversed.best == forward.best);
    CHECK(forward.candidates.size() == 24);
    double best_bic = std::numeric_limits<double>::infinity();
    for (const auto& c : forward.candidates) {
      if (c.ok) best_bic = std::min(best_bic, c.bic);
    }
    CHECK(forward.best.bic_score == best_bic);
    opts.threads = 1;
    CHECK(select_model(data, opts).best == forward.best);
  }

  TEST_CASE("model file round-trip") {
    const auto data = planted_pair(100, 1);
    for (const auto structure : kAllCovarianceTypes) {
      auto m = fit(data, 2, structure, 0);
      m.basis = {"Alpha", "Beta", "Gamma"};
      m.race = Race::Zerg;
      m.scope = Scope::WithStatic;
      const auto text = write_model(m);
      CHECK(parse_model(text) == m);
      CHECK(write_model(parse_model(text)) == text);
    }
    CHECK_THROWS_AS(parse_model("GMM;v2;Zerg;m;full;1;1\n"), Error);
    CHECK_THROWS_AS(parse_model(""), Error);
  }
}
