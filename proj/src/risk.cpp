#include "levyspec/risk.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "levyspec/errors.hpp"
#include "levyspec/sampling.hpp"

namespace levyspec {

namespace {

constexpr double kPi = std::numbers::pi;

// Runs body(i) for i in [0, count); results are written by index so the
// schedule never affects them.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

const StableJumpDensity* stable_part(const LevyTriplet& model) {
  if (std::holds_alternative<CustomJumpDensity>(model.jumps)) {
    throw UnsupportedModel("reference law unavailable for custom jump densities");
  }
  return std::get_if<StableJumpDensity>(&model.jumps);
}

// Bias^2 of the cut-off estimator on the Cauchy model with scale Delta.
double cauchy_bias2(double delta_t, double m) { return std::exp(-2.0 * delta_t * m) / (2.0 * kPi * delta_t); }

}  // namespace

double default_u_max(double delta_t) {
  if (!(delta_t > 0.0)) throw DomainError("default_u_max: delta_t must be > 0");
  if (delta_t <= 0.1) return 100.0;
  if (delta_t >= 1.0) return 10.0;
  return std::round(100.0 / delta_t) / 10.0;
}

void ExperimentConfig::validate() const {
  model.validate();
  if (!(delta_t > 0.0)) throw DomainError("config '" + name + "': delta must be > 0");
  if (n_list.empty()) throw DomainError("config '" + name + "': n list is empty");
  for (auto n : n_list) {
    if (n < 2) throw DomainError("config '" + name + "': every n must be >= 2");
  }
  if (trials < 1) throw DomainError("config '" + name + "': trials must be >= 1");
  if (kappa && !(*kappa >= 0.0)) throw DomainError("config '" + name + "': kappa must be >= 0");
  kappa_grid.validate();
  (void)grid();
}

UGrid ExperimentConfig::grid() const {
  const double um = u_max.value_or(default_u_max(delta_t));
  return step ? UGrid::symmetric(um, *step) : UGrid::with_default_step(um);
}

Eigen::ArrayXcd reference_cf(const LevyTriplet& model, double delta_t, const UGrid& grid) {
  model.validate();
  const StableJumpDensity* j = stable_part(model);
  if (!j && model.sigma2 == 0.0) throw DomainError("reference_cf: degenerate law has no density");
  std::optional<StableLaw> law;
  if (j) law = stable_params_of_triplet(*j, delta_t);
  Eigen::ArrayXcd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double u = grid.point(i);
    Complex v = std::exp(Complex(-0.5 * delta_t * model.sigma2 * u * u, model.b * delta_t * u));
    if (law) v *= stable_cf(*law, u);
    out[i] = v;
  }
  return out;
}

double reference_sq_tail(const LevyTriplet& model, double delta_t, double lower) {
  model.validate();
  if (!(lower >= 0.0)) throw DomainError("reference_sq_tail: lower limit must be >= 0");
  const StableJumpDensity* j = stable_part(model);
  const double g2 = delta_t * model.sigma2;
  if (!j) {
    if (g2 == 0.0) throw DomainError("reference_sq_tail: degenerate law has no density");
    return stretched_exp_tail(g2, 2.0, lower);
  }
  const StableLaw law = stable_params_of_triplet(*j, delta_t);
  const double c = 2.0 * std::pow(law.gamma, law.alpha);
  if (g2 == 0.0) return stretched_exp_tail(c, law.alpha, lower);
  auto r = integrate_to_infinity(
      [&](double u) { return std::exp(-g2 * u * u - c * std::pow(u, law.alpha)); }, lower,
      QuadOptions{1e-12, 0.0, 200000});
  if (!r.converged) throw QuadratureError("reference_sq_tail", r.abs_error);
  return r.value;
}

double reference_l2_norm(const LevyTriplet& model, double delta_t) {
  return reference_sq_tail(model, delta_t, 0.0) / kPi;
}

double relative_risk_of_cf(const LevyTriplet& model, double delta_t, const UGrid& grid,
                           const Eigen::ArrayXcd& phi_tilde) {
  const Eigen::ArrayXcd ref = reference_cf(model, delta_t, grid);
  const double inside = plancherel_l2(grid, phi_tilde, ref);
  const double outside = reference_sq_tail(model, delta_t, grid.u_max()) / kPi;
  return (inside + outside) / reference_l2_norm(model, delta_t);
}

std::uint64_t cell_seed(std::uint64_t master_seed, Eigen::Index n, double delta_t) {
  const auto nb = static_cast<std::uint64_t>(n);
  return mix64(master_seed ^ mix64(nb + mix64(std::bit_cast<std::uint64_t>(delta_t))));
}

RiskReport relative_l2_risk(const ExperimentConfig& config) {
  config.validate();
  const UGrid full = config.grid();
  RiskReport report;
  report.name = config.name;
  report.delta_t = config.delta_t;
  report.master_seed = config.master_seed;
  if (const auto* j = std::get_if<StableJumpDensity>(&config.model.jumps)) report.alpha = j->alpha;

  for (const Eigen::Index n : config.n_list) {
    const UGrid g = full.clipped(static_cast<double>(n));
    const Eigen::ArrayXcd ref = reference_cf(config.model, config.delta_t, g);
    const double norm = reference_l2_norm(config.model, config.delta_t);
    const double tail = reference_sq_tail(config.model, config.delta_t, g.u_max()) / kPi;
    const std::uint64_t seed = cell_seed(config.master_seed, n, config.delta_t);

    RiskCell cell;
    cell.n = n;
    cell.trials = config.trials;
    cell.risks.assign(static_cast<std::size_t>(config.trials), 0.0);
    cell.kappas.assign(static_cast<std::size_t>(config.trials), 0.0);
    std::vector<char> fell_back(static_cast<std::size_t>(config.trials), 0);

    parallel_for(config.trials, config.threads, [&](int t) {
      const SeedSpec s{seed, static_cast<std::uint64_t>(t)};
      const IncrementSample sample = sample_increments(config.model, config.delta_t, n, s);
      const ECFGrid e = ecf(sample, g);
      double kappa;
      if (config.kappa) {
        kappa = *config.kappa;
      } else {
        const KappaChoice choice = calibrate_kappa(e, config.kappa_grid);
        kappa = choice.kappa;
        fell_back[static_cast<std::size_t>(t)] = choice.fallback;
      }
      const ECFGrid kept = threshold_cf(e, ThresholdSpec::make(kappa, n));
      cell.risks[static_cast<std::size_t>(t)] = (plancherel_l2(g, kept.values, ref) + tail) / norm;
      cell.kappas[static_cast<std::size_t>(t)] = kappa;
    });

    mean_sd(cell.risks, cell.mean_risk, cell.sd_risk);
    mean_sd(cell.kappas, cell.mean_kappa, cell.sd_kappa);
    cell.fallbacks = static_cast<int>(std::count(fell_back.begin(), fell_back.end(), 1));
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::vector<RiskReport> risk_table(const std::vector<ExperimentConfig>& configs) {
  std::vector<RiskReport> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(relative_l2_risk(c));
  return out;
}

void write_risk_csv(std::ostream& os, const std::vector<RiskReport>& reports) {
  os << "model,alpha,delta,n,mean_risk,sd_risk,mean_kappa,sd_kappa,trials,seed\n" << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& c : r.cells) {
      os << r.name << ',' << r.alpha << ',' << r.delta_t << ',' << c.n << ',' << c.mean_risk << ',' << c.sd_risk
         << ',' << c.mean_kappa << ',' << c.sd_kappa << ',' << c.trials << ',' << r.master_seed << '\n';
    }
  }
}

namespace {

using nlohmann::json;

ExperimentConfig parse_cell(const json& cell, const json& defaults, std::uint64_t default_seed) {
  auto field = [&](const char* key) -> const json* {
    if (cell.contains(key)) return &cell.at(key);
    if (defaults.contains(key)) return &defaults.at(key);
    return nullptr;
  };
  auto number = [&](const char* key, double fallback) {
    const json* v = field(key);
    if (!v) return fallback;
    if (!v->is_number()) throw DomainError(std::string("config field '") + key + "' must be a number");
    return v->get<double>();
  };

  ExperimentConfig c;
  if (const json* m = field("model")) {
    if (!m->is_string()) throw DomainError("config field 'model' must be a string");
    c.name = m->get<std::string>();
  }
  c.model.b = number("b", 0.0);
  c.model.sigma2 = number("sigma2", 0.0);
  if (field("alpha")) {
    StableJumpDensity j{number("P", 0.0), number("Q", 0.0), number("alpha", 1.0)};
    c.model.jumps = j;
  }
  c.delta_t = number("delta", 1.0);
  const json* ns = field("n");
  if (!ns || !ns->is_array()) throw DomainError("config field 'n' must be an array of sample sizes");
  for (const auto& v : *ns) {
    if (!v.is_number_integer()) throw DomainError("config field 'n' must hold integers");
    c.n_list.push_back(v.get<Eigen::Index>());
  }
  c.trials = static_cast<int>(number("trials", 100.0));
  if (field("u_max")) c.u_max = number("u_max", 0.0);
  if (field("step")) c.step = number("step", 0.0);
  if (const json* k = field("kappa")) {
    if (k->is_string()) {
      if (k->get<std::string>() != "auto") throw DomainError("config field 'kappa' must be a number or \"auto\"");
    } else if (k->is_number()) {
      c.kappa = k->get<double>();
    } else {
      throw DomainError("config field 'kappa' must be a number or \"auto\"");
    }
  }
  c.kappa_grid.delta_step = number("kappa_step", c.kappa_grid.delta_step);
  c.kappa_grid.count = static_cast<int>(number("kappa_count", c.kappa_grid.count));
  if (const json* s = field("master_seed")) {
    if (!s->is_number_unsigned()) throw DomainError("config field 'master_seed' must be a non-negative integer");
    c.master_seed = s->get<std::uint64_t>();
  } else {
    c.master_seed = default_seed;
  }
  c.threads = static_cast<int>(number("threads", 0.0));
  return c;
}

}  // namespace

std::vector<ExperimentConfig> parse_experiment_configs(const std::string& json_text, std::uint64_t default_seed) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("cells") || !doc.at("cells").is_array()) {
    throw DomainError("config must be an object with a 'cells' array");
  }
  json defaults = doc;
  defaults.erase("cells");
  std::vector<ExperimentConfig> out;
  for (const auto& cell : doc.at("cells")) {
    if (!cell.is_object()) throw DomainError("each config cell must be an object");
    ExperimentConfig c = parse_cell(cell, defaults, default_seed);
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

LevyTriplet cauchy_triplet() {
  LevyTriplet t;
  t.jumps = StableJumpDensity{1.0 / kPi, 1.0 / kPi, 1.0};
  return t;
}

std::vector<double> default_m_grid(double delta_t, int count) {
  const double um = default_u_max(delta_t);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(um / 20.0 + (um - um / 20.0) * i / std::max(1, count - 1));
  }
  return out;
}

namespace {

struct MiseSamples {
  std::vector<double> values;
  double mean = 0.0;
  double se = 0.0;
};

MiseSamples summarize(std::vector<double> v) {
  MiseSamples s;
  double sd = 0.0;
  mean_sd(v, s.mean, sd);
  s.se = sd / std::sqrt(static_cast<double>(v.size()));
  s.values = std::move(v);
  return s;
}

}  // namespace

BoundReport theorem1_bound_check(double delta_t, Eigen::Index n, const std::vector<double>& m_grid, int trials,
                                 std::uint64_t seed, int threads) {
  if (trials < 1) throw DomainError("theorem1_bound_check: trials must be >= 1");
  if (n < 2) throw DomainError("theorem1_bound_check: n must be >= 2");
  const LevyTriplet model = cauchy_triplet();
  const UGrid g = UGrid::with_default_step(default_u_max(delta_t)).clipped(static_cast<double>(n));
  const Eigen::ArrayXcd ref = reference_cf(model, delta_t, g);

  // Snap each cut-off down to a grid node so the window is exact.
  std::vector<double> ms;
  for (double m : m_grid) {
    if (!(m >= 0.0)) throw DomainError("theorem1_bound_check: cut-offs must be >= 0");
    ms.push_back(std::min(g.u_max(), std::floor(m / g.step() * (1.0 + 1e-12)) * g.step()));
  }

  std::vector<std::vector<double>> mise(ms.size(), std::vector<double>(static_cast<std::size_t>(trials)));
  const std::uint64_t cs = cell_seed(seed, n, delta_t);
  parallel_for(trials, threads, [&](int t) {
    const IncrementSample sample = sample_increments(model, delta_t, n, SeedSpec{cs, static_cast<std::uint64_t>(t)});
    const ECFGrid e = ecf(sample, g);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double inside = ms[i] > 0.0 ? plancherel_l2_window(g, e.values, ref, ms[i]) : 0.0;
      mise[i][static_cast<std::size_t>(t)] = inside + cauchy_bias2(delta_t, ms[i]);
    }
  });

  BoundReport rep;
  rep.passed = true;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const MiseSamples s = summarize(mise[i]);
    BoundRow row;
    row.m = ms[i];
    row.mean_mise = s.mean;
    row.std_error = s.se;
    row.bound = cauchy_bias2(delta_t, ms[i]) + ms[i] / (kPi * static_cast<double>(n));
    row.margin = row.bound + 3.0 * s.se - s.mean;
    row.holds = row.margin >= 0.0;
    rep.passed = rep.passed && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

BoundReport oracle_inequality_check(double delta_t, Eigen::Index n, double kappa, int trials, std::uint64_t seed,
                                    int threads) {
  if (trials < 1) throw DomainError("oracle_inequality_check: trials must be >= 1");
  if (n < 2) throw DomainError("oracle_inequality_check: n must be >= 2");
  if (!(kappa >= 2.0 * std::numbers::sqrt2)) {
    throw DomainError("oracle_inequality_check: kappa must be >= 2 sqrt(2)");
  }
  const LevyTriplet model = cauchy_triplet();
  const UGrid g = UGrid::with_default_step(default_u_max(delta_t)).clipped(static_cast<double>(n));
  const Eigen::ArrayXcd ref = reference_cf(model, delta_t, g);
  const double tail = cauchy_bias2(delta_t, g.u_max());
  const ThresholdSpec spec = ThresholdSpec::make(kappa, n);

  std::vector<double> mise(static_cast<std::size_t>(trials));
  const std::uint64_t cs = cell_seed(seed, n, delta_t);
  parallel_for(trials, threads, [&](int t) {
    const IncrementSample sample = sample_increments(model, delta_t, n, SeedSpec{cs, static_cast<std::uint64_t>(t)});
    const ECFGrid kept = threshold_cf(ecf(sample, g), spec);
    mise[static_cast<std::size_t>(t)] = plancherel_l2(g, kept.values, ref) + tail;
  });
  const MiseSamples s = summarize(mise);

  const double ln = std::log(static_cast<double>(n));
  const double var_factor = 5.0 + std::pow(1.0 + (kappa + 2.0) * std::sqrt(ln), 2.0);
  const double remainder = 64.0 * std::pow(static_cast<double>(n), 1.0 - kappa * kappa / 4.0);
  BoundRow best;
  best.bound = std::numeric_limits<double>::infinity();
  for (double m : default_m_grid(delta_t, 20)) {
    const double rhs = 9.0 * cauchy_bias2(delta_t, m) + m / (kPi * static_cast<double>(n)) * var_factor;
    if (rhs < best.bound) {
      best.bound = rhs;
      best.m = m;
    }
  }
  best.bound += remainder;
  best.mean_mise = s.mean;
  best.std_error = s.se;
  best.margin = best.bound + 3.0 * s.se - s.mean;
  best.holds = best.margin >= 0.0;
  return BoundReport{best.holds, {best}};
}

void write_bound_report(std::ostream& os, const BoundReport& report) {
  os << "m,mean_mise,std_error,bound,margin,holds\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << r.m << ',' << r.mean_mise << ',' << r.std_error << ',' << r.bound << ',' << r.margin << ','
       << (r.holds ? "true" : "false") << '\n';
  }
}

}  // namespace levyspec
