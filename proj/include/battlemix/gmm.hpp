#pragma once

// Gaussian mixtures over composition vectors: EM under four covariance
// structures, BIC model selection, and component posteriors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/composition.hpp"
#include "battlemix/matrix.hpp"

namespace battlemix {

enum class CovarianceType { Spherical, Tied, Diagonal, Full };

inline constexpr std::array<CovarianceType, 4> kAllCovarianceTypes = {
    CovarianceType::Spherical, CovarianceType::Tied, CovarianceType::Diagonal,
    CovarianceType::Full};

std::string_view to_string(CovarianceType type);
std::optional<CovarianceType> parse_covariance_type(std::string_view s);

struct GmmModel {
  CovarianceType structure = CovarianceType::Full;
  std::vector<double> weights;
  Matrix means;                     // K × N
  std::vector<Matrix> covariances;  // K matrices N × N; identical for Tied
  std::vector<std::string> basis;
  Race race = Race::Protoss;
  Scope scope = Scope::Military;
  double train_log_likelihood = 0.0;
  double bic_score = 0.0;

  std::size_t K() const { return weights.size(); }
  std::size_t N() const { return means.cols(); }

  bool operator==(const GmmModel&) const = default;
};

/// M × K, row i = P(C_i = k | u_i).
using Responsibilities = Matrix;

struct FitOptions {
  int max_iter = 200;
  double tol = 1e-6;
  double reg_floor = 1e-6;
  double min_component_weight = 1e-8;
};

struct FitTrace {
  std::vector<double> log_likelihood;  // one entry per E-step, initial model first
  std::vector<std::size_t> reseeded;   // components re-seeded, in order
  bool converged = false;
};

double log_likelihood(const Matrix& data, const GmmModel& model);

/// Responsibilities; also reports the data log-likelihood when asked.
Responsibilities e_step(const Matrix& data, const GmmModel& model, double* log_likelihood_out = nullptr);

/// Weighted maximum-likelihood parameters with the floor added to every
/// covariance diagonal. Throws DegenerateComponent when a component's
/// responsibility mass falls below `min_component_weight`.
GmmModel m_step(const Matrix& data, const Responsibilities& resp, CovarianceType structure,
                double reg_floor = 1e-6, double min_component_weight = 1e-8);

/// EM from K distinct random data points. Deterministic given the seed.
GmmModel fit(const Matrix& data, std::size_t K, CovarianceType structure, std::uint64_t seed,
             const FitOptions& options = {}, FitTrace* trace = nullptr);

std::size_t free_parameters(CovarianceType structure, std::size_t K, std::size_t N);
double bic(double log_likelihood, std::size_t free_params, std::size_t M);
/// −2·logL + q·log M using the model's training log-likelihood.
double bic(const GmmModel& model, std::size_t M);

struct SelectionOptions {
  std::vector<std::size_t> k_range = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::vector<CovarianceType> structures = {kAllCovarianceTypes.begin(), kAllCovarianceTypes.end()};
  std::vector<std::uint64_t> seeds = {0};
  FitOptions fit;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SelectionCandidate {
  std::size_t K = 0;
  CovarianceType structure = CovarianceType::Full;
  std::uint64_t seed = 0;
  bool ok = false;
  double log_likelihood = 0.0;
  double bic = 0.0;
  std::string error;
};

struct Selection {
  GmmModel best;
  std::vector<SelectionCandidate> candidates;  // K ascending, then structure, then seed
};

/// Fits every (K, structure, seed) and keeps the minimum BIC. Ties go to the
/// earliest candidate in (K ascending, Spherical/Tied/Diagonal/Full, seed list)
/// order, whatever order the options list them in. Fits that fail are skipped;
/// if all fail, the first failure is rethrown.
Selection select_model(const Matrix& data, const SelectionOptions& options);

std::vector<double> posterior(const GmmModel& model, std::span<const double> u);
/// Also checks race and scope against the model.
std::vector<double> posterior(const GmmModel& model, const CompositionVector& u);
std::size_t argmax(std::span<const double> p);

/// Stacks composition vectors as rows; they must share race, scope and length.
Matrix composition_matrix(std::span<const CompositionVector> vectors);

/// Model file: `GMM;v1;race;scope;structure;K;N`, basis line, one
/// `weight;mu…;cov…` line per component (Tied: `weight;mu…` plus a trailing
/// `tied;cov…` line), footer `logL;BIC`. Full covariances are written as
/// their upper triangle, row by row.
std::string write_model(const GmmModel& model);
GmmModel parse_model(std::string_view text);

}  // namespace battlemix
