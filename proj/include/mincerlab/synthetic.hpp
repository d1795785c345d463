#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mincerlab/records.hpp"

namespace mincer {

/// Deterministic random stream over mt19937_64 (whose output sequence the
/// C++ standard fully specifies). Uniform, normal and Bernoulli draws are
/// implemented explicitly rather than through std distributions, so that
/// output is bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double u01();
  /// Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p);
  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

/// Deterministic sub-seed for replication `index` of a master seed
/// (SplitMix64 stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct WageParams {
  double intercept = 5.0;
  double education = 0.1610;
  double experience = 0.0258;
  double experience_sq = -0.0002;
  double gender = 0.0912;
  double married = -0.0128;
  double wtime = 0.0010;
  double big_town = 0.1014;
  /// Loading of the unobserved ability factor on log wage. Negative by
  /// default so that OLS understates the schooling coefficient relative to
  /// 2SLS on generated data; -0.218 makes the large-sample OLS-vs-2SLS gap
  /// about 0.0382 (0.1228 vs 0.1610) under the default schooling equation.
  double ability_loading = -0.218;
  double noise_sd = 0.5;
};

struct SchoolingParams {
  double intercept = 12.0;
  double urban = 2.0;
  double ability = 2.0;
  double noise_sd = 2.5;
};

struct PopulationParams {
  double p_male = 0.5;
  double p_married = 0.6;
  double p_urban = 0.55;
  double p_bigtown_given_urban = 0.45;
  int age_min = 16;
  int age_max = 64;
  double hours_mean = 40.0;
  double hours_sd = 4.0;
  double weeks_mean = 46.0;
  double weeks_sd = 6.0;
};

/// Structural parameters of the data-generating process: a wage equation
/// with an unobserved ability factor, a schooling equation shifted by urban
/// residence and ability, and the population marginals.
struct DgpConfig {
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  WageParams wage;
  SchoolingParams schooling;
  PopulationParams population;

  /// Throws SchemaError naming the first offending field.
  void validate() const;
};

/// Parses the key = value config format ('#' starts a comment). Unknown
/// keys and unparsable values raise SchemaError naming the field.
DgpConfig parse_dgp_config(std::istream& in, const std::string& source_name);
DgpConfig load_dgp_config(const std::string& path);

struct SyntheticSample {
  std::vector<PersonRecord> records;
  /// Hidden ability factor per record, exported for oracle computations
  /// only; estimators never see it.
  std::vector<double> ability;
};

/// Draws n records. Ability is standard normal; latent schooling
/// c0 + c_urban*urban + c_ability*A + noise is mapped to the nearest
/// education level; age is uniform on [max(age_min, edu+6), age_max] so
/// potential experience is nonnegative; log wage adds ability_loading*A
/// and Gaussian noise on top of the linear index. Pure function of the
/// config (including its seed).
SyntheticSample generate(const DgpConfig& config);

/// Probability limit of the OLS bias on the schooling coefficient:
/// ability_loading times the schooling coefficient from projecting ability
/// on the full wage design, estimated on a large simulated sample of the
/// schooling side alone (the discretization to levels has no closed form).
double theoretical_ols_bias(const DgpConfig& config, std::size_t sim_rows = 1000000);

enum class Estimator { Ols, TwoSls };

struct MonteCarloSummary {
  std::size_t requested_reps = 0;
  std::size_t completed_reps = 0;
  std::size_t failures = 0;
  double mean = 0.0;  // target coefficient across completed reps
  double sd = 0.0;    // sample standard deviation
  /// Reps where |estimate - planted education coefficient| <= 2 stderrs.
  std::size_t within_2se_count = 0;
  // 2SLS-only counters:
  std::size_t hausman_rejections_5pct = 0;
  std::size_t weak_instrument_count = 0;  // first-stage partial F < 10
  double mean_first_stage_f = 0.0;
};

/// Runs `reps` independent replications of generate + estimate on the base
/// model; per-replication seeds derive from config.seed. Replications run
/// in parallel (threads = 0 means MINCERLAB_THREADS or hardware) but are
/// aggregated in replication order, so results do not depend on the thread
/// count. A failing replication is counted, not fatal.
MonteCarloSummary monte_carlo(const DgpConfig& config, std::size_t reps, Estimator estimator,
                              const std::string& target_label = "EDU", unsigned threads = 0);

/// Thread cap: explicit argument, else MINCERLAB_THREADS, else hardware.
unsigned resolve_thread_count(unsigned requested);

}  // namespace mincer
