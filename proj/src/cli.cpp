#include "micontrast/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "micontrast/config.hpp"
#include "micontrast/experiments.hpp"
#include "micontrast/objectives.hpp"
#include "micontrast/oracles.hpp"
#include "micontrast/report.hpp"

namespace micontrast::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// String-valued options of one subcommand, resolved against the config file
// and environment after parsing.
struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> flag_options;
  std::string config_path;

  Command& option(const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
    return *this;
  }
  Command& flag(const std::string& key, const std::string& help) {
    flag_options[key] = app->add_flag("--" + key, flags[key], help);
    return *this;
  }
};

class Settings {
 public:
  Settings(const Command& command, KeyValueConfig file)
      : command_(command), file_(std::move(file)) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (auto it = command_.options.find(key);
        it != command_.options.end() && it->second->count() > 0) {
      return command_.values.at(key);
    }
    if (auto v = file_.get(key)) return v;
    if (key == "seed") {
      if (const char* env = std::getenv("MICONTRAST_SEED"); env != nullptr && *env != '\0') {
        return std::string(env);
      }
    }
    return std::nullopt;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw UsageError("missing required option --" + key);
    return *v;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    auto v = raw(key);
    return v ? parse_count(key, *v) : fallback;
  }

  double real(const std::string& key, double fallback) const {
    auto v = raw(key);
    return v ? parse_finite(key, *v) : fallback;
  }

  bool flag(const std::string& key) const {
    if (auto it = command_.flag_options.find(key);
        it != command_.flag_options.end() && it->second->count() > 0) {
      return true;
    }
    if (auto v = file_.get(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") return true;
      if (*v == "false" || *v == "0" || *v == "no") return false;
      throw UsageError("config key '" + key + "' must be true or false");
    }
    return false;
  }

  std::vector<std::string> list(const std::string& key, const std::string& fallback) const {
    const std::string joined = text(key, fallback);
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= joined.size()) {
      const auto comma = joined.find(',', start);
      const auto end = comma == std::string::npos ? joined.size() : comma;
      std::string item = joined.substr(start, end - start);
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) items.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return items;
  }

  std::vector<std::size_t> counts(const std::string& key, const std::string& fallback) const {
    std::vector<std::size_t> out;
    for (const auto& item : list(key, fallback)) out.push_back(parse_count(key, item));
    return out;
  }

  std::vector<double> reals(const std::string& key, const std::string& fallback) const {
    std::vector<double> out;
    for (const auto& item : list(key, fallback)) out.push_back(parse_finite(key, item));
    return out;
  }

  static std::size_t parse_count(const std::string& key, const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
      throw UsageError("--" + key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
  }

  static double parse_finite(const std::string& key, const std::string& text) {
    double v = 0.0;
    try {
      v = parse_real(text);
    } catch (const std::invalid_argument&) {
      throw UsageError("--" + key + ": expected a number, got '" + text + "'");
    }
    if (!std::isfinite(v)) throw UsageError("--" + key + ": value must be finite");
    return v;
  }

 private:
  const Command& command_;
  KeyValueConfig file_;
};

AlphaChoice parse_alpha_choice(const std::string& text) {
  if (text == "auto") return AlphaChoice::minimum();
  return AlphaChoice::fixed(Settings::parse_finite("alpha", text));
}

std::vector<AlphaChoice> alpha_choices(const Settings& s, const std::string& fallback) {
  std::vector<AlphaChoice> out;
  for (const auto& item : s.list("alpha", fallback)) out.push_back(parse_alpha_choice(item));
  if (out.empty()) throw UsageError("--alpha: empty alpha list");
  return out;
}

void check_nonempty(const std::string& key, const auto& values) {
  if (values.empty()) throw UsageError("--" + key + ": empty list");
}

void emit(const CsvTable& table, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    write_csv(out, table);
    return;
  }
  std::ofstream file(*path);
  if (!file) throw std::runtime_error("cannot open output file " + *path);
  write_csv(file, table);
  if (!file) throw std::runtime_error("failed writing " + *path);
}

void emit_svg(const std::string& csv_path, const std::string& svg, std::ostream& err) {
  std::filesystem::path path(csv_path);
  path.replace_extension(".svg");
  std::ofstream file(path);
  if (!file) {
    err << "warning: cannot write " << path.string() << '\n';
    return;
  }
  file << svg;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

std::string count_text(std::size_t v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// estimate

int cmd_estimate(const Settings& s, std::ostream& out, std::ostream& err) {
  StaircaseConfig cfg;
  try {
    cfg.objective.kind = parse_estimator(s.required("objective"));
    cfg.critic = parse_critic_kind(s.text("critic", "joint"));
    cfg.negatives = parse_negative_source(s.text("negatives", "marginal"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.n = s.count("n", cfg.n);
  cfg.m = s.count("m", cfg.m);
  cfg.d = s.count("d", cfg.d);
  cfg.iters_per_level = s.count("iters", cfg.iters_per_level);
  cfg.seed = s.count("seed", 0);
  cfg.lr = s.real("lr", cfg.lr);
  cfg.embed_dim = s.count("embed-dim", cfg.embed_dim);
  cfg.hidden = s.counts("hidden", "256,256");

  if (s.raw("rho") && s.raw("levels")) throw UsageError("--rho and --levels are exclusive");
  if (s.raw("rho")) {
    const double rho = s.real("rho", 0.0);
    if (!(rho >= 0.0 && rho < 1.0)) throw UsageError("--rho must lie in [0, 1)");
    cfg.levels = {gaussian_true_mi(cfg.d, rho)};
  } else {
    cfg.levels = s.reals("levels", "2,4,6,8,10");
    check_nonempty("levels", cfg.levels);
  }

  if (s.raw("alpha") && s.raw("alpha-schedule")) {
    throw UsageError("--alpha and --alpha-schedule are exclusive");
  }
  if (s.raw("alpha-schedule")) {
    const auto parts = s.list("alpha-schedule", "");
    if (parts.size() != 3) throw UsageError("--alpha-schedule expects start,end,steps");
    cfg.schedule = AlphaSchedule{Settings::parse_finite("alpha-schedule", parts[0]),
                                 Settings::parse_finite("alpha-schedule", parts[1]),
                                 Settings::parse_count("alpha-schedule", parts[2])};
    cfg.objective.alpha = cfg.schedule->alpha_start;
  } else {
    const AlphaChoice choice = parse_alpha_choice(s.text("alpha", "1"));
    try {
      cfg.objective.alpha = choice.resolve(cfg.n, cfg.m);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }

  try {
    validate(cfg);
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }
  const auto out_path = s.raw("out");
  const bool svg = s.flag("svg");
  if (svg && !out_path) throw UsageError("--svg needs --out");

  const EstimateTrace trace = run_staircase(cfg);

  CsvTable table;
  table.header = {"iter", "estimate", "smoothed", "true_mi", "alpha", "wall_ms"};
  for (const auto& r : trace.records) {
    table.rows.push_back({count_text(r.iter), format_real(r.estimate), format_real(r.smoothed),
                          format_real(r.true_mi), format_real(r.alpha), format_real(r.wall_ms)});
  }
  emit(table, out_path, out);

  if (svg) {
    PlotSeries raw{"estimate", "#9ecae1", {}};
    PlotSeries smooth{"smoothed", "#08519c", {}};
    PlotSeries truth{"true MI", "#d62728", {}};
    for (const auto& r : trace.records) {
      const double x = static_cast<double>(r.iter);
      raw.points.emplace_back(x, r.estimate);
      smooth.points.emplace_back(x, r.smoothed);
      truth.points.emplace_back(x, r.true_mi);
    }
    const std::string title = std::string(to_string(cfg.objective.kind)) + " estimate, n=" +
                              std::to_string(cfg.n) + " m=" + std::to_string(cfg.m);
    emit_svg(*out_path, render_line_plot(title, "iteration", "nats", {raw, smooth, truth}), err);
  }

  if (trace.aborted) {
    err << "estimate aborted: " << trace.diagnostic << '\n';
    return kRuntimeFailure;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// oracle

BinaryWorld world_from(const Settings& s) {
  BinaryWorld world;
  world.match_logit = s.real("match-logit", 0.0);
  if (s.raw("mismatch-logit")) world.mismatch_logit = s.real("mismatch-logit", 0.0);
  return world;
}

CsvTable oracle_table() {
  CsvTable table;
  table.header = {"n", "m", "alpha", "p", "mean", "variance", "true_mi", "bound_valid"};
  return table;
}

int cmd_binary_oracle(const Settings& s, Estimator kind, std::ostream& out) {
  const auto ps = s.reals("p", "0.5");
  const auto ns = s.counts("n", "3");
  const auto ms = kind == Estimator::MlCpc ? s.counts("m", "3") : std::vector<std::size_t>{0};
  const auto alphas = alpha_choices(s, "1");
  check_nonempty("p", ps);
  check_nonempty("n", ns);
  check_nonempty("m", ms);
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
  }
  BinaryWorld world = world_from(s);

  // Validate every cell before producing output.
  struct Cell {
    std::size_t n, m;
    double alpha, p;
  };
  std::vector<Cell> cells;
  for (std::size_t n : ns) {
    for (std::size_t m_flag : ms) {
      const std::size_t m = kind == Estimator::Cpc ? n : m_flag;
      for (const auto& choice : alphas) {
        double alpha = 0.0;
        try {
          if (kind == Estimator::Cpc && n < 2) throw std::domain_error("binary-cpc needs n >= 2");
          if (n < 1) throw std::domain_error("n must be >= 1");
          alpha = choice.resolve(n, m);
          if (!(alpha > 0.0 && alpha < static_cast<double>(m))) {
            throw std::domain_error("alpha must satisfy 0 < alpha < m");
          }
        } catch (const std::domain_error& e) {
          throw UsageError(e.what());
        }
        for (double p : ps) cells.push_back({n, m, alpha, p});
      }
    }
  }

  CsvTable table = oracle_table();
  for (const auto& c : cells) {
    world.p = c.p;
    const OracleStats stats = kind == Estimator::Cpc
                                  ? binary_cpc_oracle(world, c.n, c.alpha)
                                  : binary_mlcpc_oracle(world, c.n, c.m, c.alpha);
    table.rows.push_back({count_text(c.n), count_text(c.m), format_real(c.alpha),
                          format_real(c.p), format_real(stats.mean), format_real(stats.variance),
                          format_real(binary_true_mi(c.p)),
                          bool_text(bound_valid(ObjectiveSpec{kind, c.alpha}, c.n, c.m))});
  }
  emit(table, s.raw("out"), out);
  return kSuccess;
}

int cmd_exchangeable(const Settings& s, std::ostream& out) {
  const auto ns = s.counts("n", "2");
  const auto ms = s.counts("m", "4");
  const auto alphas = s.reals("alpha", "1");
  check_nonempty("n", ns);
  check_nonempty("m", ms);
  check_nonempty("alpha", alphas);
  const std::size_t trials = s.count("trials", 100000);
  if (trials < 2) throw UsageError("--trials must be >= 2");
  PositiveSampler sampler{};
  try {
    sampler = parse_positive_sampler(s.text("sampler", "lognormal"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (std::size_t n : ns) {
    if (n < 1) throw UsageError("--n must be >= 1");
  }
  for (std::size_t m : ms) {
    for (double alpha : alphas) {
      try {
        exchangeable_bound(m, alpha);
      } catch (const std::domain_error& e) {
        throw UsageError(e.what());
      }
    }
  }

  Rng rng(s.count("seed", 0));
  CsvTable table;
  table.header = {"n", "m", "alpha", "sampler", "trials", "estimate", "std_error", "bound"};
  for (std::size_t n : ns) {
    for (std::size_t m : ms) {
      for (double alpha : alphas) {
        const auto est = exchangeable_bound_mc(rng, n, m, alpha, sampler, trials);
        table.rows.push_back({count_text(n), count_text(m), format_real(alpha),
                              std::string(to_string(sampler)), count_text(trials),
                              format_real(est.estimate), format_real(est.std_error),
                              format_real(exchangeable_bound(m, alpha))});
      }
    }
  }
  emit(table, s.raw("out"), out);
  return kSuccess;
}

int cmd_true_mi(const Settings& s, std::ostream& out) {
  const bool binary = s.raw("p").has_value();
  const bool gaussian = s.raw("rho").has_value();
  if (binary == gaussian) throw UsageError("true-mi needs exactly one of --p or --rho");
  CsvTable table;
  if (binary) {
    const auto ps = s.reals("p", "");
    check_nonempty("p", ps);
    table.header = {"p", "true_mi"};
    for (double p : ps) {
      if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
      table.rows.push_back({format_real(p), format_real(binary_true_mi(p))});
    }
  } else {
    const std::size_t d = s.count("d", 20);
    const auto rhos = s.reals("rho", "");
    check_nonempty("rho", rhos);
    table.header = {"d", "rho", "true_mi"};
    for (double rho : rhos) {
      if (!(rho >= 0.0 && rho < 1.0)) throw UsageError("--rho must lie in [0, 1)");
      table.rows.push_back({count_text(d), format_real(rho), format_real(gaussian_true_mi(d, rho))});
    }
  }
  emit(table, s.raw("out"), out);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_timing(const Settings& s, std::ostream& out) {
  StaircaseConfig cfg;
  cfg.n = s.count("n", 128);
  cfg.m = s.count("m", 128);
  cfg.d = s.count("d", 20);
  cfg.seed = s.count("seed", 0);
  cfg.hidden = s.counts("hidden", "256,256");
  cfg.embed_dim = s.count("embed-dim", cfg.embed_dim);
  try {
    cfg.critic = parse_critic_kind(s.text("critic", "joint"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.levels = {s.real("mi", 2.0)};
  const std::size_t updates = s.count("updates", 200);
  if (updates < 50) throw UsageError("--updates must be >= 50");
  try {
    validate(cfg);
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }

  const TimingResult timing = run_timing_parity(cfg, updates);
  CsvTable table;
  table.header = {"objective", "n", "m", "updates", "ms_per_update", "parity_ratio"};
  const std::string ratio = format_real(timing.parity());
  table.rows.push_back({"cpc", count_text(cfg.n), count_text(cfg.m), count_text(updates),
                        format_real(timing.cpc_ms), ratio});
  table.rows.push_back({"mlcpc", count_text(cfg.n), count_text(cfg.m), count_text(updates),
                        format_real(timing.mlcpc_ms), ratio});
  emit(table, s.raw("out"), out);
  return kSuccess;
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.flag("timing")) return cmd_timing(s, out);

  const double p = s.real("p", 0.5);
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
  const auto ns = s.counts("n", "3,5,9,17");
  const auto ms = s.raw("m") ? s.counts("m", "") : ns;
  check_nonempty("n", ns);
  if (ms.size() != ns.size()) throw UsageError("--n and --m lists must have equal length");
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1 || ms[k] < 2) throw UsageError("sweep sizes need n >= 1 and m >= 2");
    sizes.emplace_back(ns[k], ms[k]);
  }
  const auto alphas = alpha_choices(s, "auto,1");
  const auto out_path = s.raw("out");
  const bool svg = s.flag("svg");
  if (svg && !out_path) throw UsageError("--svg needs --out");

  BinaryWorld critic = world_from(s);
  const SweepResult result = run_bias_variance_sweep(p, sizes, alphas, critic);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  CsvTable table;
  table.header = {"n", "m", "alpha", "objective", "bias", "std"};
  for (const auto& r : result.rows) {
    table.rows.push_back({count_text(r.n), count_text(r.m), format_real(r.alpha),
                          std::string(to_string(r.objective)), format_real(r.bias),
                          format_real(r.std)});
  }
  emit(table, out_path, out);

  if (svg) {
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    std::vector<PlotSeries> series;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (Estimator kind : {Estimator::Cpc, Estimator::MlCpc}) {
        const std::string alpha_label =
            alphas[a].use_min ? "alpha_min" : "alpha=" + format_real(alphas[a].value);
        PlotSeries line{std::string(to_string(kind)) + " " + alpha_label,
                        palette[series.size() % 6], {}};
        for (const auto& r : result.rows) {
          const bool same_alpha = alphas[a].use_min ? r.alpha == alpha_min(r.n, r.m)
                                                    : r.alpha == alphas[a].value;
          if (r.objective == kind && same_alpha) {
            line.points.emplace_back(static_cast<double>(r.m), r.bias);
          }
        }
        if (!line.points.empty()) series.push_back(std::move(line));
      }
    }
    emit_svg(*out_path, render_line_plot("bias vs m", "m", "bias (nats)", series), err);
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive mutual-information estimators: CPC, ML-CPC and re-weighted variants",
               "micontrast"};
  app.require_subcommand(1);

  // Options bind to members of these map nodes, which never move.
  std::map<std::string, Command> commands;
  auto add = [&commands](const std::string& key, CLI::App* sub) -> Command& {
    Command& c = commands[key];
    c.app = sub;
    sub->add_option("--config", c.config_path, "key = value settings file");
    return c;
  };

  auto* estimate = app.add_subcommand("estimate", "Gaussian staircase MI estimation");
  add("estimate", estimate)
      .option("objective", "cpc | mlcpc")
      .option("alpha", "positive weight, or 'auto' for the smallest bound-valid alpha")
      .option("alpha-schedule", "geometric schedule start,end,steps")
      .option("n", "batch size (128)")
      .option("m", "classes per positive (128)")
      .option("d", "dimensions (20)")
      .option("rho", "single level with this correlation")
      .option("levels", "comma-separated true MI levels (2,4,6,8,10)")
      .option("iters", "updates per level (1000)")
      .option("critic", "joint | separable")
      .option("hidden", "hidden widths (256,256)")
      .option("embed-dim", "separable embedding width (32)")
      .option("negatives", "marginal | batch")
      .option("lr", "Adam learning rate (1e-3)")
      .option("seed", "random seed")
      .option("out", "CSV path (stdout when absent)")
      .flag("svg", "also write an SVG plot next to --out");

  auto* oracle = app.add_subcommand("oracle", "exact and Monte-Carlo reference values");
  oracle->require_subcommand(1);
  auto* binary_cpc = oracle->add_subcommand("binary-cpc", "exact CPC statistics, two-point world");
  add("binary-cpc", binary_cpc)
      .option("p", "probability of (1,1), list")
      .option("n", "batch size (= m), list")
      .option("alpha", "weights, list; 'auto' allowed")
      .option("match-logit", "critic log-score of matched pairs (0)")
      .option("mismatch-logit", "critic log-score of mismatched pairs (hard critic if absent)")
      .option("out", "CSV path");
  auto* binary_mlcpc =
      oracle->add_subcommand("binary-mlcpc", "exact ML-CPC statistics, two-point world");
  add("binary-mlcpc", binary_mlcpc)
      .option("p", "probability of (1,1), list")
      .option("n", "batch size, list")
      .option("m", "classes per positive, list")
      .option("alpha", "weights, list; 'auto' allowed")
      .option("match-logit", "critic log-score of matched pairs (0)")
      .option("mismatch-logit", "critic log-score of mismatched pairs (hard critic if absent)")
      .option("out", "CSV path");
  auto* exchangeable =
      oracle->add_subcommand("exchangeable", "Monte-Carlo check of the exchangeable bounds");
  add("exchangeable", exchangeable)
      .option("n", "list")
      .option("m", "list")
      .option("alpha", "list")
      .option("trials", "Monte-Carlo trials (100000)")
      .option("sampler", "lognormal | exponential")
      .option("seed", "random seed")
      .option("out", "CSV path");
  auto* true_mi = oracle->add_subcommand("true-mi", "ground-truth mutual information");
  add("true-mi", true_mi)
      .option("p", "two-point world probability, list")
      .option("d", "Gaussian dimensions (20)")
      .option("rho", "Gaussian correlation, list")
      .option("out", "CSV path");

  auto* sweep = app.add_subcommand("sweep", "exact bias/std sweep, or --timing parity run");
  add("sweep", sweep)
      .option("p", "probability of (1,1) (0.5)")
      .option("n", "batch sizes (3,5,9,17)")
      .option("m", "classes per positive, paired with --n (defaults to --n)")
      .option("alpha", "weights; 'auto' allowed (auto,1)")
      .option("match-logit", "critic log-score of matched pairs (0)")
      .option("mismatch-logit", "critic log-score of mismatched pairs")
      .option("d", "timing: dimensions (20)")
      .option("critic", "timing: joint | separable")
      .option("hidden", "timing: hidden widths (256,256)")
      .option("embed-dim", "timing: separable embedding width (32)")
      .option("mi", "timing: true MI of the sampled task (2)")
      .option("updates", "timing: updates per objective (200)")
      .option("seed", "timing: random seed")
      .option("out", "CSV path")
      .flag("timing", "time CPC against ML-CPC updates")
      .flag("svg", "also write an SVG plot next to --out");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  const Command* active = nullptr;
  std::string name;
  for (auto& [key, command] : commands) {
    if (command.app->parsed()) {
      active = &command;
      name = key;
    }
  }
  if (active == nullptr) {
    err << app.help();
    return kUsageError;
  }

  try {
    KeyValueConfig file;
    if (!active->config_path.empty()) {
      try {
        file = KeyValueConfig::load(active->config_path);
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
    }
    const Settings settings(*active, std::move(file));
    if (name == "estimate") return cmd_estimate(settings, out, err);
    if (name == "binary-cpc") return cmd_binary_oracle(settings, Estimator::Cpc, out);
    if (name == "binary-mlcpc") return cmd_binary_oracle(settings, Estimator::MlCpc, out);
    if (name == "exchangeable") return cmd_exchangeable(settings, out);
    if (name == "true-mi") return cmd_true_mi(settings, out);
    if (name == "sweep") return cmd_sweep(settings, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->app->help();
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace micontrast::cli
