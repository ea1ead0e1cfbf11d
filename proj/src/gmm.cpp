#include "battlemix/gmm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "battlemix/error.hpp"
#include "battlemix/rng.hpp"
#include "battlemix/simd/kernels.hpp"

namespace battlemix {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

bool is_diagonal_form(CovarianceType t) {
  return t == CovarianceType::Spherical || t == CovarianceType::Diagonal;
}

/// Per-component pieces of log N(x; μ, Σ) prepared once per E-step.
class DensityEvaluator {
 public:
  explicit DensityEvaluator(const GmmModel& model) : model_(model), k_(simd::kernels()) {
    const std::size_t n = model.N();
    const bool diag = is_diagonal_form(model.structure);
    log_norm_.resize(model.K());
    log_weight_.resize(model.K());
    for (std::size_t c = 0; c < model.K(); ++c) {
      const Matrix& cov = model.covariances[c];
      log_weight_[c] = std::log(model.weights[c]);
      double log_det = 0.0;
      if (diag) {
        std::vector<double> inv(n);
        for (std::size_t d = 0; d < n; ++d) {
          if (!(cov(d, d) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "non-positive variance");
          inv[d] = 1.0 / cov(d, d);
          log_det += std::log(cov(d, d));
        }
        inv_var_.push_back(std::move(inv));
      } else {
        Matrix l = cholesky(cov);
        for (std::size_t d = 0; d < n; ++d) log_det += 2.0 * std::log(l(d, d));
        chol_.push_back(std::move(l));
      }
      log_norm_[c] = -0.5 * (static_cast<double>(n) * kLog2Pi + log_det);
    }
    scratch_.resize(n);
  }

  /// log N(x; μ_c, Σ_c)
  double log_density(std::span<const double> x, std::size_t c) {
    const std::size_t n = model_.N();
    const double* mu = model_.means.row(c).data();
    double q;
    if (is_diagonal_form(model_.structure)) {
      q = k_.weighted_sq_dist(x.data(), mu, inv_var_[c].data(), n);
    } else {
      for (std::size_t d = 0; d < n; ++d) scratch_[d] = x[d] - mu[d];
      forward_substitute(chol_[c], scratch_);
      q = k_.dot(scratch_.data(), scratch_.data(), n);
    }
    return log_norm_[c] - 0.5 * q;
  }

  /// log p_c + log N(x; μ_c, Σ_c) for every c, and their log-sum-exp.
  double joint(std::span<const double> x, std::span<double> out) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model_.K(); ++c) {
      out[c] = log_weight_[c] + log_density(x, c);
      mx = std::max(mx, out[c]);
    }
    if (!std::isfinite(mx)) throw Error(ErrorCode::Internal, "mixture density underflow");
    double s = 0.0;
    for (std::size_t c = 0; c < model_.K(); ++c) s += std::exp(out[c] - mx);
    return mx + std::log(s);
  }

 private:
  const GmmModel& model_;
  const simd::Kernels& k_;
  std::vector<double> log_norm_;
  std::vector<double> log_weight_;
  std::vector<std::vector<double>> inv_var_;
  std::vector<Matrix> chol_;
  std::vector<double> scratch_;
};

void check_dims(const Matrix& data, const GmmModel& model) {
  if (data.cols() != model.N()) {
    throw Error(ErrorCode::DimensionMismatch, "data has " + std::to_string(data.cols()) +
                                                  " columns, model expects " +
                                                  std::to_string(model.N()));
  }
}

/// Covariance for `structure` from a full scatter matrix, floor on the diagonal.
Matrix shape_covariance(const Matrix& scatter, CovarianceType structure, double floor) {
  const std::size_t n = scatter.rows();
  Matrix out(n, n);
  switch (structure) {
    case CovarianceType::Spherical: {
      double v = 0.0;
      for (std::size_t d = 0; d < n; ++d) v += scatter(d, d);
      v /= static_cast<double>(n);
      for (std::size_t d = 0; d < n; ++d) out(d, d) = v + floor;
      break;
    }
    case CovarianceType::Diagonal:
      for (std::size_t d = 0; d < n; ++d) out(d, d) = scatter(d, d) + floor;
      break;
    case CovarianceType::Tied:
    case CovarianceType::Full:
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) out(a, b) = 0.5 * (scatter(a, b) + scatter(b, a));
        out(a, a) += floor;
      }
      break;
  }
  return out;
}

/// Column-major copy of the data, so per-dimension loops run over all points at once.
struct Columns {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> v;

  explicit Columns(const Matrix& data) : m(data.rows()), n(data.cols()), v(m * n) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t d = 0; d < n; ++d) v[d * m + i] = data(i, d);
    }
  }
  const double* col(std::size_t d) const { return v.data() + d * m; }
};

/// z = L⁻¹(x − shift) for every point, stored column-major in `z`.
void whiten(const Columns& x, const Matrix& l, const double* shift, std::vector<double>& z) {
  const auto& k = simd::kernels();
  const std::size_t m = x.m;
  z.resize(x.n * m);
  for (std::size_t a = 0; a < x.n; ++a) {
    double* za = z.data() + a * m;
    const double* xa = x.col(a);
    const double s = shift ? shift[a] : 0.0;
    for (std::size_t i = 0; i < m; ++i) za[i] = xa[i] - s;
    for (std::size_t b = 0; b < a; ++b) k.axpy(-l(a, b), z.data() + b * m, za, m);
    const double inv = 1.0 / l(a, a);
    for (std::size_t i = 0; i < m; ++i) za[i] *= inv;
  }
}

double log_det_from_cholesky(const Matrix& l) {
  double s = 0.0;
  for (std::size_t d = 0; d < l.rows(); ++d) s += 2.0 * std::log(l(d, d));
  return s;
}

/// log p_c + log N(x_i; μ_c, Σ_c), one row per component and one column per point.
Matrix joint_log_densities(const Columns& x, const GmmModel& model) {
  const auto& k = simd::kernels();
  const std::size_t kk = model.K();
  const std::size_t n = x.n;
  const std::size_t m = x.m;
  const double base = -0.5 * static_cast<double>(n) * kLog2Pi;
  Matrix out(kk, m);
  std::vector<double> z;

  const auto fill = [&](std::size_t c, double log_det) {
    const double v = std::log(model.weights[c]) + base - 0.5 * log_det;
    auto row = out.row(c);
    std::fill(row.begin(), row.end(), v);
    return row.data();
  };

  if (is_diagonal_form(model.structure)) {
    for (std::size_t c = 0; c < kk; ++c) {
      const Matrix& cov = model.covariances[c];
      double log_det = 0.0;
      for (std::size_t d = 0; d < n; ++d) {
        if (!(cov(d, d) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "non-positive variance");
        log_det += std::log(cov(d, d));
      }
      double* row = fill(c, log_det);
      const double* mu = model.means.row(c).data();
      for (std::size_t d = 0; d < n; ++d) k.shifted_sq_acc(-0.5 / cov(d, d), x.col(d), mu[d], row, m);
    }
    return out;
  }

  const bool shared =
      model.structure == CovarianceType::Tied &&
      std::all_of(model.covariances.begin(), model.covariances.end(),
                  [&](const Matrix& c) { return c == model.covariances.front(); });
  if (shared) {
    const Matrix l = cholesky(model.covariances.front());
    const double log_det = log_det_from_cholesky(l);
    whiten(x, l, nullptr, z);
    std::vector<double> nu(n);
    for (std::size_t c = 0; c < kk; ++c) {
      const auto mu = model.means.row(c);
      std::copy(mu.begin(), mu.end(), nu.begin());
      forward_substitute(l, nu);
      double* row = fill(c, log_det);
      for (std::size_t a = 0; a < n; ++a) k.shifted_sq_acc(-0.5, z.data() + a * m, nu[a], row, m);
    }
    return out;
  }

  for (std::size_t c = 0; c < kk; ++c) {
    const Matrix l = cholesky(model.covariances[c]);
    whiten(x, l, model.means.row(c).data(), z);
    double* row = fill(c, log_det_from_cholesky(l));
    for (std::size_t a = 0; a < n; ++a) k.shifted_sq_acc(-0.5, z.data() + a * m, 0.0, row, m);
  }
  return out;
}

Responsibilities e_step_impl(const Columns& x, const GmmModel& model, double* log_likelihood_out) {
  const Matrix j = joint_log_densities(x, model);
  const std::size_t kk = model.K();
  Responsibilities r(x.m, kk);
  double total = 0.0;
  for (std::size_t i = 0; i < x.m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kk; ++c) mx = std::max(mx, j(c, i));
    if (!std::isfinite(mx)) throw Error(ErrorCode::Internal, "mixture density underflow");
    double s = 0.0;
    for (std::size_t c = 0; c < kk; ++c) s += std::exp(j(c, i) - mx);
    const double lse = mx + std::log(s);
    total += lse;
    for (std::size_t c = 0; c < kk; ++c) r(i, c) = std::exp(j(c, i) - lse);
  }
  if (log_likelihood_out) *log_likelihood_out = total;
  return r;
}

struct MStepResult {
  GmmModel model;
  std::vector<std::size_t> degenerate;
};

MStepResult m_step_impl(const Columns& x, const Responsibilities& resp, CovarianceType structure,
                        double floor, double min_weight) {
  const std::size_t m = x.m;
  const std::size_t n = x.n;
  const std::size_t kk = resp.cols();
  if (resp.rows() != m) throw Error(ErrorCode::DimensionMismatch, "responsibilities row count");
  const auto& k = simd::kernels();

  MStepResult res;
  GmmModel& g = res.model;
  g.structure = structure;
  g.weights.assign(kk, 0.0);
  g.means = Matrix(kk, n);
  g.covariances.assign(kk, Matrix(n, n));

  const bool need_full = structure == CovarianceType::Full || structure == CovarianceType::Tied;
  Matrix pooled(n, n);
  std::vector<double> rc(m);
  std::vector<double> dev(n * m);
  for (std::size_t c = 0; c < kk; ++c) {
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      rc[i] = resp(i, c);
      mass += rc[i];
    }
    g.weights[c] = mass / static_cast<double>(m);
    if (mass < min_weight) {
      res.degenerate.push_back(c);
      continue;
    }
    auto mu = g.means.row(c);
    for (std::size_t d = 0; d < n; ++d) {
      mu[d] = k.dot(rc.data(), x.col(d), m) / mass;
      const double* xd = x.col(d);
      double* dd = dev.data() + d * m;
      for (std::size_t i = 0; i < m; ++i) dd[i] = xd[i] - mu[d];
    }
    Matrix scatter(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      const double* da = dev.data() + a * m;
      for (std::size_t b = a; b < (need_full ? n : a + 1); ++b) {
        const double v = k.weighted_dot(da, dev.data() + b * m, rc.data(), m);
        scatter(a, b) = v;
        scatter(b, a) = v;
      }
    }
    if (structure == CovarianceType::Tied) {
      k.axpy(1.0, scatter.data().data(), pooled.data().data(), n * n);
    } else {
      for (auto& v : scatter.data()) v /= mass;
      g.covariances[c] = shape_covariance(scatter, structure, floor);
    }
  }
  if (structure == CovarianceType::Tied) {
    for (auto& v : pooled.data()) v /= static_cast<double>(m);
    const Matrix shared = shape_covariance(pooled, structure, floor);
    for (auto& cov : g.covariances) cov = shared;
  }
  return res;
}

Matrix initial_scatter(const Matrix& data) { return covariance(data); }

}  // namespace

std::string_view to_string(CovarianceType type) {
  switch (type) {
    case CovarianceType::Spherical: return "spherical";
    case CovarianceType::Tied: return "tied";
    case CovarianceType::Diagonal: return "diagonal";
    case CovarianceType::Full: return "full";
  }
  return "?";
}

std::optional<CovarianceType> parse_covariance_type(std::string_view s) {
  for (const auto t : kAllCovarianceTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

Responsibilities e_step(const Matrix& data, const GmmModel& model, double* log_likelihood_out) {
  check_dims(data, model);
  return e_step_impl(Columns(data), model, log_likelihood_out);
}

double log_likelihood(const Matrix& data, const GmmModel& model) {
  check_dims(data, model);
  const Columns x(data);
  const Matrix j = joint_log_densities(x, model);
  double total = 0.0;
  for (std::size_t i = 0; i < x.m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.K(); ++c) mx = std::max(mx, j(c, i));
    if (!std::isfinite(mx)) throw Error(ErrorCode::Internal, "mixture density underflow");
    double s = 0.0;
    for (std::size_t c = 0; c < model.K(); ++c) s += std::exp(j(c, i) - mx);
    total += mx + std::log(s);
  }
  return total;
}

GmmModel m_step(const Matrix& data, const Responsibilities& resp, CovarianceType structure,
                double reg_floor, double min_component_weight) {
  auto res = m_step_impl(Columns(data), resp, structure, reg_floor, min_component_weight);
  if (!res.degenerate.empty()) {
    throw Error(ErrorCode::DegenerateComponent,
                "component " + std::to_string(res.degenerate.front()) + " has no responsibility mass");
  }
  return std::move(res.model);
}

GmmModel fit(const Matrix& data, std::size_t K, CovarianceType structure, std::uint64_t seed,
             const FitOptions& options, FitTrace* trace) {
  const std::size_t m = data.rows();
  const std::size_t n = data.cols();
  if (K == 0) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "data has no columns");
  if (m < K) {
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(m) + " points cannot support " + std::to_string(K) + " components");
  }
  FitTrace local;
  FitTrace& tr = trace ? *trace : local;
  tr = FitTrace{};

  const Matrix scatter0 = initial_scatter(data);
  const Matrix cov0 = shape_covariance(scatter0, structure, options.reg_floor);

  GmmModel model;
  model.structure = structure;
  model.weights.assign(K, 1.0 / static_cast<double>(K));
  model.means = Matrix(K, n);
  model.covariances.assign(K, cov0);
  {
    Rng rng(seed);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t c = 0; c < K; ++c) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(c), static_cast<std::int64_t>(m - 1)));
      std::swap(idx[c], idx[j]);
      std::ranges::copy(data.row(idx[c]), model.means.row(c).begin());
    }
  }

  const Columns cols(data);
  std::vector<bool> reseeded(K, false);
  double ll = 0.0;
  Responsibilities resp = e_step_impl(cols, model, &ll);
  tr.log_likelihood.push_back(ll);

  for (int it = 0; it < options.max_iter; ++it) {
    auto step = m_step_impl(cols, resp, structure, options.reg_floor, options.min_component_weight);
    if (!step.degenerate.empty()) {
      // Re-seed each empty component at the point the current model explains worst.
      DensityEvaluator eval(model);
      std::vector<double> scratch(K);
      std::size_t worst = 0;
      double worst_ll = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double v = eval.joint(data.row(i), scratch);
        if (v < worst_ll) {
          worst_ll = v;
          worst = i;
        }
      }
      for (const std::size_t c : step.degenerate) {
        if (reseeded[c]) {
          throw Error(ErrorCode::DegenerateComponent,
                      "component " + std::to_string(c) + " collapsed again after re-seeding");
        }
        reseeded[c] = true;
        tr.reseeded.push_back(c);
        std::ranges::copy(data.row(worst), step.model.means.row(c).begin());
        if (structure != CovarianceType::Tied) step.model.covariances[c] = cov0;
        step.model.weights[c] = 1.0 / static_cast<double>(m);
      }
      const double total = std::accumulate(step.model.weights.begin(), step.model.weights.end(), 0.0);
      for (auto& w : step.model.weights) w /= total;
    }
    model = std::move(step.model);
    double next_ll = 0.0;
    resp = e_step_impl(cols, model, &next_ll);
    tr.log_likelihood.push_back(next_ll);
    const double delta = std::abs(next_ll - ll);
    ll = next_ll;
    if (delta < options.tol) {
      tr.converged = true;
      break;
    }
  }
  model.train_log_likelihood = ll;
  model.bic_score = bic(ll, free_parameters(structure, K, n), m);
  return model;
}

std::size_t free_parameters(CovarianceType structure, std::size_t K, std::size_t N) {
  std::size_t cov = 0;
  switch (structure) {
    case CovarianceType::Spherical: cov = K; break;
    case CovarianceType::Tied: cov = N * (N + 1) / 2; break;
    case CovarianceType::Diagonal: cov = K * N; break;
    case CovarianceType::Full: cov = K * N * (N + 1) / 2; break;
  }
  return (K - 1) + K * N + cov;
}

double bic(double log_likelihood, std::size_t free_params, std::size_t M) {
  return -2.0 * log_likelihood + static_cast<double>(free_params) * std::log(static_cast<double>(M));
}

double bic(const GmmModel& model, std::size_t M) {
  return bic(model.train_log_likelihood, free_parameters(model.structure, model.K(), model.N()), M);
}

Selection select_model(const Matrix& data, const SelectionOptions& options) {
  if (options.k_range.empty() || options.structures.empty() || options.seeds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty model search grid");
  }
  std::vector<std::size_t> ks = options.k_range;
  std::ranges::sort(ks);
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<CovarianceType> structures;
  for (const auto t : kAllCovarianceTypes) {
    if (std::ranges::find(options.structures, t) != options.structures.end()) structures.push_back(t);
  }
  if (data.rows() < ks.back()) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(data.rows()) + " points cannot support K=" +
                                             std::to_string(ks.back()));
  }

  Selection sel;
  for (const auto k : ks) {
    for (const auto t : structures) {
      for (const auto s : options.seeds) {
        SelectionCandidate c;
        c.K = k;
        c.structure = t;
        c.seed = s;
        sel.candidates.push_back(std::move(c));
      }
    }
  }
  const std::size_t total = sel.candidates.size();
  std::vector<GmmModel> models(total);
  std::vector<std::exception_ptr> errors(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      auto& cand = sel.candidates[i];
      try {
        models[i] = fit(data, cand.K, cand.structure, cand.seed, options.fit);
        cand.ok = true;
        cand.log_likelihood = models[i].train_log_likelihood;
        cand.bic = models[i].bic_score;
      } catch (const Error& e) {
        errors[i] = std::current_exception();
        cand.error = e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < total; ++i) {
    if (!sel.candidates[i].ok) continue;
    if (!best || sel.candidates[i].bic < sel.candidates[*best].bic) best = i;
  }
  if (!best) {
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    throw Error(ErrorCode::Internal, "model search produced no candidate");
  }
  sel.best = std::move(models[*best]);
  return sel;
}

std::vector<double> posterior(const GmmModel& model, std::span<const double> u) {
  if (u.size() != model.N()) {
    throw Error(ErrorCode::DimensionMismatch, "vector has " + std::to_string(u.size()) +
                                                  " entries, model expects " +
                                                  std::to_string(model.N()));
  }
  DensityEvaluator eval(model);
  std::vector<double> p(model.K());
  const double lse = eval.joint(u, p);
  for (auto& v : p) v = std::exp(v - lse);
  return p;
}

std::vector<double> posterior(const GmmModel& model, const CompositionVector& u) {
  if (!model.basis.empty() && (u.race != model.race || u.scope != model.scope)) {
    throw Error(ErrorCode::BasisMismatch,
                std::string(to_string(u.race)) + "/" + std::string(to_string(u.scope)) +
                    " vector against a " + std::string(to_string(model.race)) + "/" +
                    std::string(to_string(model.scope)) + " model");
  }
  return posterior(model, std::span<const double>(u.u));
}

std::size_t argmax(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, "argmax of an empty vector");
  return static_cast<std::size_t>(std::ranges::max_element(p) - p.begin());
}

Matrix composition_matrix(std::span<const CompositionVector> vectors) {
  if (vectors.empty()) return {};
  const auto& first = vectors.front();
  Matrix m(vectors.size(), first.u.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (v.u.size() != first.u.size()) throw Error(ErrorCode::DimensionMismatch, "ragged compositions");
    if (v.race != first.race || v.scope != first.scope) {
      throw Error(ErrorCode::BasisMismatch, "compositions mix races or scopes");
    }
    std::ranges::copy(v.u, m.row(i).begin());
  }
  return m;
}

}  // namespace battlemix
