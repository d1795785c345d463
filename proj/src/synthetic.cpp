#include "mincerlab/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "mincerlab/errors.hpp"
#include "mincerlab/iv.hpp"
#include "mincerlab/model_spec.hpp"
#include "mincerlab/regression.hpp"

namespace mincer {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Stream index reserved for theoretical_ols_bias so it never collides with
// Monte Carlo replication sub-seeds.
constexpr std::uint64_t kBiasStreamIndex = 0xB1A500000001ull;

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Per-record draw shared by generate() and theoretical_ols_bias(); the wage
// noise is drawn separately so the schooling side can be simulated alone.
struct PersonCore {
  double ability = 0.0;
  bool urban = false;
  bool big_town = false;
  bool male = false;
  bool married = false;
  EducationLevel level = EducationLevel::Primary;
  int edu_years = 0;
  int age = 0;
  double hours = 0.0;
  double weeks = 0.0;
  std::optional<HigherEdField> he_field;

  double experience() const {
    return potential_experience(age, edu_years);
  }
};

PersonCore draw_person_core(Rng& rng, const DgpConfig& cfg) {
  PersonCore c;
  c.ability = rng.normal();
  c.urban = rng.bernoulli(cfg.population.p_urban);
  c.big_town = c.urban && rng.bernoulli(cfg.population.p_bigtown_given_urban);
  c.male = rng.bernoulli(cfg.population.p_male);
  c.married = rng.bernoulli(cfg.population.p_married);

  const double latent = cfg.schooling.intercept + cfg.schooling.urban * (c.urban ? 1.0 : 0.0) +
                        cfg.schooling.ability * c.ability +
                        cfg.schooling.noise_sd * rng.normal();
  c.level = nearest_level_for_years(latent);
  c.edu_years = education_years(c.level);
  if (is_higher_education(c.level)) {
    c.he_field = kHigherEdFields[static_cast<std::size_t>(rng.uniform_int(0, 5))];
  }

  const int age_lo = std::max(cfg.population.age_min, c.edu_years + 6);
  c.age = rng.uniform_int(age_lo, cfg.population.age_max);

  c.hours = clamp(cfg.population.hours_mean + cfg.population.hours_sd * rng.normal(), 1.0, 168.0);
  c.weeks = clamp(cfg.population.weeks_mean + cfg.population.weeks_sd * rng.normal(), 1.0, 52.0);
  return c;
}

double wage_index(const PersonCore& c, const WageParams& w) {
  const double exp = c.experience();
  return w.intercept + w.education * c.edu_years + w.experience * exp +
         w.experience_sq * exp * exp + w.gender * (c.male ? 1.0 : 0.0) +
         w.married * (c.married ? 1.0 : 0.0) + w.wtime * work_time(c.hours, c.weeks) +
         w.big_town * (c.big_town ? 1.0 : 0.0);
}

// Base design row (intercept, EDU, EXP, EXP2, GENDER, MARRIED, WTIME, BIG_TOWN).
void base_row(const PersonCore& c, double* x) {
  const double exp = c.experience();
  x[0] = 1.0;
  x[1] = static_cast<double>(c.edu_years);
  x[2] = exp;
  x[3] = exp * exp;
  x[4] = c.male ? 1.0 : 0.0;
  x[5] = c.married ? 1.0 : 0.0;
  x[6] = work_time(c.hours, c.weeks);
  x[7] = c.big_town ? 1.0 : 0.0;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw SchemaError("config field '" + field + "': " + why);
}

void check_probability(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) bad_field(field, "must be a probability in [0, 1]");
}

void check_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) bad_field(field, "must be finite");
}

void check_sd(double v, const std::string& field) {
  if (!(v >= 0.0) || !std::isfinite(v)) bad_field(field, "must be a nonnegative real");
}

}  // namespace

double Rng::u01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1;
  do {
    u1 = u01();
  } while (u1 <= 0.0);
  const double u2 = u01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

bool Rng::bernoulli(double p) { return u01() < p; }

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
  const double draw = std::floor(u01() * span);
  const double capped = std::min(draw, span - 1.0);
  return lo + static_cast<int>(capped);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void DgpConfig::validate() const {
  check_finite(wage.intercept, "wage.intercept");
  check_finite(wage.education, "wage.education");
  check_finite(wage.experience, "wage.experience");
  check_finite(wage.experience_sq, "wage.experience_sq");
  check_finite(wage.gender, "wage.gender");
  check_finite(wage.married, "wage.married");
  check_finite(wage.wtime, "wage.wtime");
  check_finite(wage.big_town, "wage.big_town");
  check_finite(wage.ability_loading, "wage.ability_loading");
  check_sd(wage.noise_sd, "wage.noise_sd");
  check_finite(schooling.intercept, "schooling.intercept");
  check_finite(schooling.urban, "schooling.urban");
  check_finite(schooling.ability, "schooling.ability");
  check_sd(schooling.noise_sd, "schooling.noise_sd");
  check_probability(population.p_male, "population.p_male");
  check_probability(population.p_married, "population.p_married");
  check_probability(population.p_urban, "population.p_urban");
  check_probability(population.p_bigtown_given_urban, "population.p_bigtown_given_urban");
  if (population.age_min < 0) bad_field("population.age_min", "must be nonnegative");
  if (population.age_max < population.age_min)
    bad_field("population.age_max", "must be >= population.age_min");
  // The latent schooling clamp tops out at 21 years, so ages up to 27 must exist.
  if (population.age_max < 27)
    bad_field("population.age_max", "must be >= 27 so every education level has valid ages");
  if (!(population.hours_mean >= 1.0 && population.hours_mean <= 168.0))
    bad_field("population.hours_mean", "must lie in [1, 168]");
  check_sd(population.hours_sd, "population.hours_sd");
  if (!(population.weeks_mean >= 1.0 && population.weeks_mean <= 52.0))
    bad_field("population.weeks_mean", "must lie in [1, 52]");
  check_sd(population.weeks_sd, "population.weeks_sd");
}

SyntheticSample generate(const DgpConfig& config) {
  config.validate();
  SyntheticSample out;
  out.records.reserve(config.n);
  out.ability.reserve(config.n);

  Rng rng(config.seed);
  for (std::size_t i = 0; i < config.n; ++i) {
    const PersonCore c = draw_person_core(rng, config);
    const double log_wage = wage_index(c, config.wage) +
                            config.wage.ability_loading * c.ability +
                            config.wage.noise_sd * rng.normal();

    PersonRecord r;
    r.age = c.age;
    r.gender = c.male ? Gender::Male : Gender::Female;
    r.married = c.married;
    r.hours_per_week = c.hours;
    r.weeks_worked = c.weeks;
    r.big_town = c.big_town;
    r.urban = c.urban;
    r.edu_level = c.level;
    r.he_field = c.he_field;
    r.gross_income = std::exp(log_wage);
    r.employed = true;

    out.records.push_back(std::move(r));
    out.ability.push_back(c.ability);
  }
  return out;
}

double theoretical_ols_bias(const DgpConfig& config, std::size_t sim_rows) {
  config.validate();
  if (sim_rows == 0) throw std::invalid_argument("theoretical_ols_bias: sim_rows must be >= 1");

  // Accumulate X^T X and X^T ability over a fresh large draw of the
  // schooling/demographic side; the wage equation plays no role here.
  constexpr std::size_t k = 8;
  Matrix xtx(k, k);
  std::vector<double> xta(k, 0.0);
  double x[k];

  Rng rng(derive_seed(config.seed, kBiasStreamIndex));
  for (std::size_t r = 0; r < sim_rows; ++r) {
    const PersonCore c = draw_person_core(rng, config);
    base_row(c, x);
    for (std::size_t i = 0; i < k; ++i) {
      xta[i] += x[i] * c.ability;
      for (std::size_t j = i; j < k; ++j) xtx(i, j) += x[i] * x[j];
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);

  HouseholderQr qr(xtx);
  if (!qr.full_rank(kRankRelTol))
    throw std::runtime_error("theoretical_ols_bias: degenerate schooling draw (Var(EDU) = 0)");
  const std::vector<double> delta = qr.solve(xta);
  return config.wage.ability_loading * delta[1];  // EDU position in the base design
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MINCERLAB_THREADS")) {
    unsigned v = 0;
    const char* last = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, last, v);
    if (ec == std::errc() && ptr == last && v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

MonteCarloSummary monte_carlo(const DgpConfig& config, std::size_t reps, Estimator estimator,
                              const std::string& target_label, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("monte_carlo: reps must be >= 1");
  config.validate();

  struct RepOutcome {
    bool ok = false;
    double coef = 0.0;
    double se = 0.0;
    double hausman_p = 1.0;
    double first_f = 0.0;
  };
  std::vector<RepOutcome> outcomes(reps);

  auto run_rep = [&](std::size_t r) {
    RepOutcome& o = outcomes[r];
    try {
      DgpConfig rep_cfg = config;
      rep_cfg.seed = derive_seed(config.seed, r + 1);
      const SyntheticSample sample = generate(rep_cfg);
      const BuildResult built = build_design(sample.records, ModelKind::Base);

      if (estimator == Estimator::Ols) {
        const FitResult fit = fit_ols(built.design, built.log_income);
        const std::size_t j = fit.coefficient_index(target_label);
        o.coef = fit.coefficients[j];
        o.se = fit.stderrs[j];
      } else {
        Matrix z(sample.records.size(), 1);
        for (std::size_t i = 0; i < sample.records.size(); ++i)
          z(i, 0) = sample.records[i].urban ? 1.0 : 0.0;
        const DesignMatrix instruments(std::move(z), {"URBAN"});

        const FitResult ols = fit_ols(built.design, built.log_income);
        const IvFitResult iv = fit_2sls(built.design, built.log_income, "EDU", instruments);
        const std::size_t j = iv.second_stage.coefficient_index(target_label);
        o.coef = iv.second_stage.coefficients[j];
        o.se = iv.second_stage.stderrs[j];
        o.hausman_p = hausman_test(ols, iv).p_value;

        const std::size_t endo = built.design.column_index("EDU");
        const DesignMatrix exog = built.design.without_column(endo);
        const FitResult restricted = fit_ols(exog, built.design.column(endo));
        o.first_f = first_stage_partial_f(iv.first_stage, restricted, 1);
      }
      o.ok = true;
    } catch (const std::exception&) {
      o.ok = false;
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), reps));
  if (n_threads <= 1) {
    for (std::size_t r = 0; r < reps; ++r) run_rep(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t r = next.fetch_add(1);
          if (r >= reps) return;
          run_rep(r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Aggregate in replication order so the result is thread-count invariant.
  MonteCarloSummary s;
  s.requested_reps = reps;
  double sum = 0.0;
  double f_sum = 0.0;
  for (const RepOutcome& o : outcomes) {
    if (!o.ok) {
      ++s.failures;
      continue;
    }
    ++s.completed_reps;
    sum += o.coef;
    if (o.se > 0.0 && std::fabs(o.coef - config.wage.education) <= 2.0 * o.se)
      ++s.within_2se_count;
    if (estimator == Estimator::TwoSls) {
      if (o.hausman_p < 0.05) ++s.hausman_rejections_5pct;
      if (o.first_f < kWeakInstrumentF) ++s.weak_instrument_count;
      f_sum += o.first_f;
    }
  }
  if (s.completed_reps > 0) {
    s.mean = sum / static_cast<double>(s.completed_reps);
    double ss = 0.0;
    for (const RepOutcome& o : outcomes) {
      if (o.ok) ss += (o.coef - s.mean) * (o.coef - s.mean);
    }
    s.sd = s.completed_reps > 1
               ? std::sqrt(ss / static_cast<double>(s.completed_reps - 1))
               : 0.0;
    if (estimator == Estimator::TwoSls)
      s.mean_first_stage_f = f_sum / static_cast<double>(s.completed_reps);
  }
  return s;
}

DgpConfig parse_dgp_config(std::istream& in, const std::string& source_name) {
  DgpConfig cfg;

  auto set_field = [&cfg](const std::string& key, const std::string& value,
                          const std::string& where) {
    auto as_double = [&]() {
      double v = 0.0;
      const char* first = value.data();
      const char* last = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last)
        throw SchemaError(where + ": config field '" + key + "': '" + value +
                          "' is not a number");
      return v;
    };
    auto as_u64 = [&]() {
      std::uint64_t v = 0;
      const char* first = value.data();
      const char* last = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last)
        throw SchemaError(where + ": config field '" + key + "': '" + value +
                          "' is not a nonnegative integer");
      return v;
    };

    if (key == "n") cfg.n = static_cast<std::size_t>(as_u64());
    else if (key == "seed") cfg.seed = as_u64();
    else if (key == "wage.intercept") cfg.wage.intercept = as_double();
    else if (key == "wage.education") cfg.wage.education = as_double();
    else if (key == "wage.experience") cfg.wage.experience = as_double();
    else if (key == "wage.experience_sq") cfg.wage.experience_sq = as_double();
    else if (key == "wage.gender") cfg.wage.gender = as_double();
    else if (key == "wage.married") cfg.wage.married = as_double();
    else if (key == "wage.wtime") cfg.wage.wtime = as_double();
    else if (key == "wage.big_town") cfg.wage.big_town = as_double();
    else if (key == "wage.ability_loading") cfg.wage.ability_loading = as_double();
    else if (key == "wage.noise_sd") cfg.wage.noise_sd = as_double();
    else if (key == "schooling.intercept") cfg.schooling.intercept = as_double();
    else if (key == "schooling.urban") cfg.schooling.urban = as_double();
    else if (key == "schooling.ability") cfg.schooling.ability = as_double();
    else if (key == "schooling.noise_sd") cfg.schooling.noise_sd = as_double();
    else if (key == "population.p_male") cfg.population.p_male = as_double();
    else if (key == "population.p_married") cfg.population.p_married = as_double();
    else if (key == "population.p_urban") cfg.population.p_urban = as_double();
    else if (key == "population.p_bigtown_given_urban")
      cfg.population.p_bigtown_given_urban = as_double();
    else if (key == "population.age_min") cfg.population.age_min = static_cast<int>(as_double());
    else if (key == "population.age_max") cfg.population.age_max = static_cast<int>(as_double());
    else if (key == "population.hours_mean") cfg.population.hours_mean = as_double();
    else if (key == "population.hours_sd") cfg.population.hours_sd = as_double();
    else if (key == "population.weeks_mean") cfg.population.weeks_mean = as_double();
    else if (key == "population.weeks_sd") cfg.population.weeks_sd = as_double();
    else throw SchemaError(where + ": unknown config field '" + key + "'");
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);

    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;

    std::ostringstream where;
    where << source_name << ":" << line_no;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw SchemaError(where.str() + ": expected 'key = value', got '" + trimmed + "'");
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) throw SchemaError(where.str() + ": empty config field name");
    set_field(key, value, where.str());
  }

  cfg.validate();
  return cfg;
}

DgpConfig load_dgp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config '" + path + "'");
  return parse_dgp_config(in, path);
}

}  // namespace mincer
