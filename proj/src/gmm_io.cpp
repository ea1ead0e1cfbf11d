#include <cmath>
#include <string>
#include <vector>

#include "battlemix/error.hpp"
#include "battlemix/gmm.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedLine, "model: " + reason, line);
}

void append_upper(std::string& out, const Matrix& cov) {
  for (std::size_t a = 0; a < cov.rows(); ++a) {
    for (std::size_t b = a; b < cov.cols(); ++b) out += ";" + text::format_double(cov(a, b));
  }
}

Matrix read_upper(const std::vector<double>& v, std::size_t n) {
  Matrix cov(n, n);
  std::size_t i = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      cov(a, b) = v[i];
      cov(b, a) = v[i];
      ++i;
    }
  }
  return cov;
}

std::size_t cov_fields(CovarianceType t, std::size_t n) {
  switch (t) {
    case CovarianceType::Spherical: return 1;
    case CovarianceType::Diagonal: return n;
    case CovarianceType::Full: return n * (n + 1) / 2;
    case CovarianceType::Tied: return 0;
  }
  return 0;
}

std::vector<double> numbers(const std::vector<std::string_view>& f, std::size_t from, std::size_t line) {
  std::vector<double> out;
  for (std::size_t i = from; i < f.size(); ++i) {
    const auto v = text::to_double(f[i]);
    if (!v) bad(line, "not a number: " + std::string(f[i]));
    out.push_back(*v);
  }
  return out;
}

}  // namespace

std::string write_model(const GmmModel& model) {
  const std::size_t n = model.N();
  std::string out = "GMM;v1;" + std::string(to_string(model.race)) + ";" +
                    std::string(to_string(model.scope)) + ";" +
                    std::string(to_string(model.structure)) + ";" + std::to_string(model.K()) +
                    ";" + std::to_string(n) + "\n";
  for (std::size_t d = 0; d < n; ++d) {
    if (d) out += ';';
    out += d < model.basis.size() ? model.basis[d] : "u" + std::to_string(d);
  }
  out += '\n';
  for (std::size_t c = 0; c < model.K(); ++c) {
    out += text::format_double(model.weights[c]);
    for (const double v : model.means.row(c)) out += ";" + text::format_double(v);
    const Matrix& cov = model.covariances[c];
    switch (model.structure) {
      case CovarianceType::Spherical: out += ";" + text::format_double(cov(0, 0)); break;
      case CovarianceType::Diagonal:
        for (std::size_t d = 0; d < n; ++d) out += ";" + text::format_double(cov(d, d));
        break;
      case CovarianceType::Full: append_upper(out, cov); break;
      case CovarianceType::Tied: break;
    }
    out += '\n';
  }
  if (model.structure == CovarianceType::Tied && model.K() > 0) {
    out += "tied";
    append_upper(out, model.covariances.front());
    out += '\n';
  }
  out += text::format_double(model.train_log_likelihood) + ";" + text::format_double(model.bic_score) + "\n";
  return out;
}

GmmModel parse_model(std::string_view content) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  text::for_each_record(content, [&](std::size_t no, std::string_view l) { lines.emplace_back(no, l); });
  if (lines.empty()) bad(0, "empty file");

  GmmModel g;
  const auto h = text::split(lines[0].second, ';');
  const std::size_t hl = lines[0].first;
  if (h.size() != 7 || h[0] != "GMM" || h[1] != "v1") bad(hl, "expected GMM;v1;race;scope;structure;K;N");
  const auto race = parse_race(h[2]);
  if (!race) bad(hl, "bad race");
  g.race = *race;
  g.scope = parse_scope(h[3]);
  const auto structure = parse_covariance_type(h[4]);
  if (!structure) bad(hl, "bad covariance structure");
  g.structure = *structure;
  const auto k = text::to_int(h[5]);
  const auto n = text::to_int(h[6]);
  if (!k || !n || *k <= 0 || *n <= 0) bad(hl, "bad K or N");
  const auto K = static_cast<std::size_t>(*k);
  const auto N = static_cast<std::size_t>(*n);

  const std::size_t expected = 2 + K + (g.structure == CovarianceType::Tied ? 1 : 0) + 1;
  if (lines.size() != expected) {
    bad(lines.back().first, "expected " + std::to_string(expected) + " lines, found " +
                                std::to_string(lines.size()));
  }
  for (const auto b : text::split(lines[1].second, ';')) g.basis.emplace_back(b);
  if (g.basis.size() != N) bad(lines[1].first, "basis length differs from N");

  g.means = Matrix(K, N);
  g.weights.resize(K);
  g.covariances.assign(K, Matrix(N, N));
  const std::size_t cf = cov_fields(g.structure, N);
  for (std::size_t c = 0; c < K; ++c) {
    const auto [no, l] = lines[2 + c];
    const auto v = numbers(text::split(l, ';'), 0, no);
    if (v.size() != 1 + N + cf) bad(no, "component line has " + std::to_string(v.size()) + " fields");
    g.weights[c] = v[0];
    for (std::size_t d = 0; d < N; ++d) g.means(c, d) = v[1 + d];
    Matrix& cov = g.covariances[c];
    switch (g.structure) {
      case CovarianceType::Spherical:
        for (std::size_t d = 0; d < N; ++d) cov(d, d) = v[1 + N];
        break;
      case CovarianceType::Diagonal:
        for (std::size_t d = 0; d < N; ++d) cov(d, d) = v[1 + N + d];
        break;
      case CovarianceType::Full:
        cov = read_upper(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(1 + N), v.end()), N);
        break;
      case CovarianceType::Tied: break;
    }
  }
  std::size_t next = 2 + K;
  if (g.structure == CovarianceType::Tied) {
    const auto [no, l] = lines[next++];
    const auto f = text::split(l, ';');
    if (f.empty() || f[0] != "tied") bad(no, "expected tied covariance line");
    const auto v = numbers(f, 1, no);
    if (v.size() != N * (N + 1) / 2) bad(no, "tied covariance has wrong length");
    const Matrix shared = read_upper(v, N);
    for (auto& cov : g.covariances) cov = shared;
  }
  const auto [fno, fl] = lines[next];
  const auto footer = numbers(text::split(fl, ';'), 0, fno);
  if (footer.size() != 2) bad(fno, "expected logL;BIC");
  g.train_log_likelihood = footer[0];
  g.bic_score = footer[1];

  double total = 0.0;
  for (const double w : g.weights) {
    if (!(w >= 0.0)) bad(0, "negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::MalformedLine, "model: weights do not sum to 1");
  return g;
}

}  // namespace battlemix
