#include "levyspec/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "levyspec/calibration.hpp"
#include "levyspec/csv_io.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/risk.hpp"
#include "levyspec/sampling.hpp"
#include "levyspec/spectral.hpp"

namespace levyspec {

namespace {

struct ModelFlags {
  std::optional<double> alpha;
  double P = 0.0;
  double Q = 0.0;
  double sigma2 = 0.0;
  double b = 0.0;

  LevyTriplet triplet() const {
    LevyTriplet t;
    t.b = b;
    t.sigma2 = sigma2;
    if (alpha) t.jumps = StableJumpDensity{P, Q, *alpha};
    t.validate();
    return t;
  }
};

struct Common {
  std::optional<std::uint64_t> seed;
  bool no_meta = false;
  int threads = 1;
};

// Parameter echo written as '#' lines at the top of every output file.
class Meta {
 public:
  Meta(std::string command, bool no_meta) : command_(std::move(command)), no_meta_(no_meta) {}

  template <class T>
  void add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << std::setprecision(17) << value;
    lines_.push_back(key + "=" + s.str());
  }

  void write(std::ostream& os) const {
    os << "# levyspec " << command_ << '\n';
    if (!no_meta_) {
      const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      std::tm tm{};
      gmtime_r(&now, &tm);
      os << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    }
    for (const auto& l : lines_) os << "# " << l << '\n';
  }

 private:
  std::string command_;
  bool no_meta_;
  std::vector<std::string> lines_;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::optional<std::uint64_t> from_config = {}) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  if (const char* env = std::getenv("LEVYSPEC_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw DomainError("LEVYSPEC_SEED must be a non-negative integer");
    return v;
  }
  return 1;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open output file '" + path + "'");
  body(f);
  if (!f) throw DomainError("failed writing '" + path + "'");
}

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--alpha", m.alpha, "stable index of the jump density (omit for no jumps)")->check(CLI::Range(0.0, 2.0));
  app->add_option("--P", m.P, "jump intensity on x > 0")->check(CLI::NonNegativeNumber);
  app->add_option("--Q", m.Q, "jump intensity on x < 0")->check(CLI::NonNegativeNumber);
  app->add_option("--sigma2", m.sigma2, "Gaussian variance per unit time")->check(CLI::NonNegativeNumber);
  app->add_option("--b", m.b, "drift per unit time");
}

void echo_model(Meta& meta, const ModelFlags& m) {
  if (m.alpha) {
    meta.add("alpha", *m.alpha);
    meta.add("P", m.P);
    meta.add("Q", m.Q);
  }
  meta.add("sigma2", m.sigma2);
  meta.add("b", m.b);
}

Eigen::ArrayXd parse_xgrid(const std::string& spec, const IncrementSample& sample) {
  if (spec.empty()) return default_x_grid(sample);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) return default_x_grid(sample, std::stol(parts[0]));
    if (parts.size() == 3) {
      const double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
      const long count = std::stol(parts[2]);
      if (!(hi > lo) || count < 2) throw DomainError("--xgrid needs lo < hi and count >= 2");
      return Eigen::ArrayXd::LinSpaced(count, lo, hi);
    }
  } catch (const std::logic_error&) {
  }
  throw DomainError("--xgrid must be COUNT or LO:HI:COUNT");
}

struct DataFlags {
  std::string data;
  bool difference = false;
  Eigen::Index n = 1000;
};

IncrementSample load_or_simulate(const DataFlags& d, const ModelFlags& m, double delta_t, std::uint64_t seed,
                                 Meta& meta) {
  if (!d.data.empty()) {
    IncrementSample s;
    s.delta_t = delta_t;
    s.values = read_increments_file(d.data, CsvReadOptions{d.difference});
    s.model = "data";
    meta.add("data", d.data);
    meta.add("difference", d.difference ? "true" : "false");
    meta.add("n", s.n());
    return s;
  }
  if (!m.alpha && m.sigma2 == 0.0) throw DomainError("either --data or a model (--alpha/--sigma2) is required");
  echo_model(meta, m);
  meta.add("n", d.n);
  meta.add("seed", seed);
  return sample_increments(m.triplet(), delta_t, d.n, SeedSpec{seed, 0});
}

UGrid make_grid(std::optional<double> umax, std::optional<double> step, double delta_t) {
  const double um = umax.value_or(default_u_max(delta_t));
  return step ? UGrid::symmetric(um, *step) : UGrid::with_default_step(um);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral density estimation for Levy increments", "levyspec"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads for trial loops (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw i.i.d. increments of a Levy process");
  ModelFlags sample_model;
  double sample_delta = 1.0;
  Eigen::Index sample_n = 1000;
  std::string sample_out;
  add_model_flags(sample_cmd, sample_model);
  sample_cmd->add_option("--delta", sample_delta, "sampling interval")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--n", sample_n, "number of increments")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", common.seed, "master seed");
  sample_cmd->add_option("--out", sample_out, "output CSV (default stdout)");
  sample_cmd->add_flag("--no-meta", common.no_meta, "omit the timestamp line");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "estimate the increment density");
  ModelFlags est_model;
  DataFlags est_data;
  double est_delta = 1.0;
  std::optional<double> est_umax, est_step;
  std::string est_kappa = "auto", est_xgrid, est_out, est_ecf_out;
  KappaGrid est_kgrid;
  bool est_fallback = false;
  est_cmd->add_option("--data", est_data.data, "CSV of increments (or levels with --difference)");
  est_cmd->add_flag("--difference", est_data.difference, "difference the input levels first");
  add_model_flags(est_cmd, est_model);
  est_cmd->add_option("--n", est_data.n, "sample size when simulating")->check(CLI::PositiveNumber);
  est_cmd->add_option("--seed", common.seed, "master seed when simulating");
  est_cmd->add_option("--delta", est_delta, "sampling interval")->required()->check(CLI::PositiveNumber);
  est_cmd->add_option("--umax", est_umax, "frequency domain half-width")->check(CLI::PositiveNumber);
  est_cmd->add_option("--step", est_step, "frequency grid step")->check(CLI::PositiveNumber);
  est_cmd->add_option("--kappa", est_kappa, "threshold constant or 'auto'");
  est_cmd->add_option("--kappa-step", est_kgrid.delta_step, "kappa grid spacing")->check(CLI::PositiveNumber);
  est_cmd->add_option("--kappa-count", est_kgrid.count, "kappa grid size")->check(CLI::Range(3, 1000000));
  est_cmd->add_flag("--fallback", est_fallback, "use kappa = 2 sqrt 2 if calibration does not stabilise");
  est_cmd->add_option("--xgrid", est_xgrid, "COUNT or LO:HI:COUNT (default 512 points, median +- 8 IQR)");
  est_cmd->add_option("--out", est_out, "density CSV (default stdout)");
  est_cmd->add_option("--ecf-out", est_ecf_out, "ECF CSV (default: none unless --out is given)");
  est_cmd->add_flag("--no-meta", common.no_meta, "omit the timestamp line");

  // risk-table
  auto* risk_cmd = app.add_subcommand("risk-table", "Monte-Carlo relative L2 risk over experiment cells");
  std::string risk_config, risk_out;
  std::optional<int> risk_trials;
  risk_cmd->add_option("--config", risk_config, "experiment JSON")->required()->check(CLI::ExistingFile);
  risk_cmd->add_option("--out", risk_out, "output CSV (default stdout)");
  risk_cmd->add_option("--seed", common.seed, "master seed (overrides the config)");
  risk_cmd->add_option("--trials", risk_trials, "override the trial count")->check(CLI::PositiveNumber);
  risk_cmd->add_flag("--no-meta", common.no_meta, "omit the timestamp line");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "select kappa from the Euler characteristic");
  ModelFlags cal_model;
  DataFlags cal_data;
  double cal_delta = 1.0;
  std::optional<double> cal_umax, cal_step;
  KappaGrid cal_kgrid;
  std::string cal_out;
  bool cal_fallback = false;
  cal_cmd->add_option("--data", cal_data.data, "CSV of increments (or levels with --difference)");
  cal_cmd->add_flag("--difference", cal_data.difference, "difference the input levels first");
  add_model_flags(cal_cmd, cal_model);
  cal_cmd->add_option("--n", cal_data.n, "sample size when simulating")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--seed", common.seed, "master seed when simulating");
  cal_cmd->add_option("--delta", cal_delta, "sampling interval")->required()->check(CLI::PositiveNumber);
  cal_cmd->add_option("--umax", cal_umax, "frequency domain half-width")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--step", cal_step, "frequency grid step")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--kappa-step", cal_kgrid.delta_step, "kappa grid spacing")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--kappa-count", cal_kgrid.count, "kappa grid size")->check(CLI::Range(3, 1000000));
  cal_cmd->add_flag("--fallback", cal_fallback, "use kappa = 2 sqrt 2 if calibration does not stabilise");
  cal_cmd->add_option("--out", cal_out, "kappa,chi CSV (default stdout)");
  cal_cmd->add_flag("--no-meta", common.no_meta, "omit the timestamp line");

  // check-bounds
  auto* chk_cmd = app.add_subcommand("check-bounds", "empirical MISE bound checks on the Cauchy model");
  std::string chk_which;
  double chk_delta = 1.0;
  Eigen::Index chk_n = 500;
  int chk_trials = 100;
  double chk_kappa = 2.0 * std::numbers::sqrt2;
  std::string chk_out;
  chk_cmd->add_option("--which", chk_which, "thm1 or thm4")->required()->check(CLI::IsMember({"thm1", "thm4"}));
  chk_cmd->add_option("--delta", chk_delta, "sampling interval")->required()->check(CLI::PositiveNumber);
  chk_cmd->add_option("--n", chk_n, "sample size")->required()->check(CLI::Range(2, 100000000));
  chk_cmd->add_option("--trials", chk_trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  chk_cmd->add_option("--seed", common.seed, "master seed");
  chk_cmd->add_option("--kappa", chk_kappa, "threshold constant for thm4 (>= 2 sqrt 2)");
  chk_cmd->add_option("--out", chk_out, "margin CSV (default stdout)");
  chk_cmd->add_flag("--no-meta", common.no_meta, "omit the timestamp line");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*sample_cmd) {
      const std::uint64_t seed = resolve_seed(common.seed);
      if (!sample_model.alpha && sample_model.sigma2 == 0.0) {
        throw DomainError("sample: give --alpha (with --P/--Q) and/or --sigma2");
      }
      const IncrementSample s = sample_increments(sample_model.triplet(), sample_delta, sample_n, SeedSpec{seed, 0});
      Meta meta("sample", common.no_meta);
      echo_model(meta, sample_model);
      meta.add("delta", sample_delta);
      meta.add("n", sample_n);
      meta.add("seed", seed);
      emit(sample_out, out, [&](std::ostream& os) {
        meta.write(os);
        write_sample_csv(os, s);
      });
      return kExitOk;
    }

    if (*est_cmd) {
      Meta meta("estimate", common.no_meta);
      const std::uint64_t seed = resolve_seed(common.seed);
      const IncrementSample s = load_or_simulate(est_data, est_model, est_delta, seed, meta);
      const UGrid grid = make_grid(est_umax, est_step, est_delta).clipped(static_cast<double>(s.n()));
      const ECFGrid e = ecf(s, grid);
      double kappa = 0.0;
      if (est_kappa == "auto") {
        const KappaChoice choice = calibrate_kappa(e, est_kgrid);
        if (choice.fallback && !est_fallback) throw NoStabilization(choice.chi);
        if (choice.fallback) err << "warning: kappa calibration did not stabilise; using 2 sqrt 2\n";
        kappa = choice.kappa;
        meta.add("kappa_step", est_kgrid.delta_step);
        meta.add("kappa_count", est_kgrid.count);
      } else {
        try {
          std::size_t pos = 0;
          kappa = std::stod(est_kappa, &pos);
          if (pos != est_kappa.size()) throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
          throw DomainError("--kappa must be a number or 'auto'");
        }
      }
      const Eigen::ArrayXd x = parse_xgrid(est_xgrid, s);
      const SpectralEstimate est = adaptive_estimate(s, kappa, grid, x);
      meta.add("delta", est_delta);
      meta.add("umax", grid.u_max());
      meta.add("step", grid.step());
      meta.add("kappa", kappa);
      meta.add("kappa_mode", est_kappa == "auto" ? "auto" : "fixed");
      emit(est_out, out, [&](std::ostream& os) {
        meta.write(os);
        write_estimate_csv(os, est);
      });
      std::string ecf_path = est_ecf_out;
      if (ecf_path.empty() && !est_out.empty() && est_out != "-") {
        const auto dot = est_out.rfind(".csv");
        ecf_path = (dot == std::string::npos ? est_out : est_out.substr(0, dot)) + "_ecf.csv";
      }
      if (!ecf_path.empty()) {
        const ECFGrid kept = threshold_cf(e, ThresholdSpec::make(kappa, s.n()));
        emit(ecf_path, out, [&](std::ostream& os) {
          meta.write(os);
          write_ecf_csv(os, kept);
        });
      }
      // keep a CSV on stdout clean
      std::ostream& summary = est_out.empty() || est_out == "-" ? err : out;
      summary << std::setprecision(17) << "kappa=" << kappa << '\n';
      return kExitOk;
    }

    if (*risk_cmd) {
      std::ifstream in(risk_config);
      std::stringstream buf;
      buf << in.rdbuf();
      std::vector<ExperimentConfig> configs = parse_experiment_configs(buf.str(), resolve_seed({}, {}));
      for (auto& c : configs) {
        if (common.seed) c.master_seed = *common.seed;
        if (risk_trials) c.trials = *risk_trials;
        c.threads = common.threads;
      }
      const std::vector<RiskReport> reports = risk_table(configs);
      int fallbacks = 0;
      for (const auto& r : reports) {
        for (const auto& c : r.cells) fallbacks += c.fallbacks;
      }
      if (fallbacks > 0) err << "warning: " << fallbacks << " trial(s) used the fallback kappa\n";
      Meta meta("risk-table", common.no_meta);
      meta.add("config", risk_config);
      if (common.seed) meta.add("seed", *common.seed);
      if (risk_trials) meta.add("trials", *risk_trials);
      meta.add("fallback_trials", fallbacks);
      emit(risk_out, out, [&](std::ostream& os) {
        meta.write(os);
        write_risk_csv(os, reports);
      });
      return kExitOk;
    }

    if (*cal_cmd) {
      Meta meta("calibrate", common.no_meta);
      const std::uint64_t seed = resolve_seed(common.seed);
      const IncrementSample s = load_or_simulate(cal_data, cal_model, cal_delta, seed, meta);
      const UGrid grid = make_grid(cal_umax, cal_step, cal_delta).clipped(static_cast<double>(s.n()));
      const KappaChoice choice = calibrate_kappa(ecf(s, grid), cal_kgrid);
      if (choice.fallback && !cal_fallback) throw NoStabilization(choice.chi);
      if (choice.fallback) err << "warning: kappa calibration did not stabilise; using 2 sqrt 2\n";
      meta.add("delta", cal_delta);
      meta.add("umax", grid.u_max());
      meta.add("step", grid.step());
      meta.add("kappa_step", cal_kgrid.delta_step);
      meta.add("kappa_count", cal_kgrid.count);
      meta.add("kappa", choice.kappa);
      emit(cal_out, out, [&](std::ostream& os) {
        meta.write(os);
        write_chi_csv(os, cal_kgrid, choice.chi);
      });
      std::ostream& summary = cal_out.empty() || cal_out == "-" ? err : out;
      summary << std::setprecision(17) << "kappa=" << choice.kappa << '\n';
      return kExitOk;
    }

    if (*chk_cmd) {
      const std::uint64_t seed = resolve_seed(common.seed);
      const BoundReport rep = chk_which == "thm1"
                                  ? theorem1_bound_check(chk_delta, chk_n, default_m_grid(chk_delta), chk_trials, seed,
                                                         common.threads)
                                  : oracle_inequality_check(chk_delta, chk_n, chk_kappa, chk_trials, seed,
                                                            common.threads);
      Meta meta("check-bounds", common.no_meta);
      meta.add("which", chk_which);
      meta.add("delta", chk_delta);
      meta.add("n", chk_n);
      meta.add("trials", chk_trials);
      meta.add("seed", seed);
      if (chk_which == "thm4") meta.add("kappa", chk_kappa);
      emit(chk_out, out, [&](std::ostream& os) {
        meta.write(os);
        write_bound_report(os, rep);
      });
      std::ostream& summary = chk_out.empty() || chk_out == "-" ? err : out;
      summary << (rep.passed ? "PASS" : "FAIL") << '\n';
      return rep.passed ? kExitOk : kExitCheckFailed;
    }
  } catch (const NoStabilization& e) {
    err << "error: " << e.what() << " (chi:";
    for (int c : e.chi_sequence()) err << ' ' << c;
    err << "); pass --fallback to use kappa = 2 sqrt 2\n";
    return kExitNoStabilization;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UnsupportedModel& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const QuadratureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace levyspec
