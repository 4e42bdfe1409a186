#include "topostat/studies.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "topostat/errors.hpp"
#include "topostat/persistence.hpp"

namespace topostat {

namespace {

// ----------------------------------------------------------- config text

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

long long parse_ll(const std::string& v, const std::string& key) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InvalidInput("config key '" + key + "': bad integer '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InvalidInput("config key '" + key + "': bad integer '" + v + "'");
  return x;
}

double parse_num(const std::string& v, const std::string& key) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InvalidInput("config key '" + key + "': bad number '" + v + "'");
  return x;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (const auto& part : split(v, ','))
    out.push_back(static_cast<int>(parse_ll(part, key)));
  return out;
}

StudySetting parse_setting(const std::string& item) {
  StudySetting s;
  std::string sizes = item;
  const auto colon = item.find(':');
  if (colon != std::string::npos) {
    s.location = trim(item.substr(0, colon));
    sizes = item.substr(colon + 1);
  }
  s.group_sizes = parse_int_list(sizes, "settings");
  return s;
}

// --------------------------------------------------------------- summaries

void summarize_cell(StudyCell& cell) {
  const auto& p = cell.p_values;
  const double n = static_cast<double>(p.size());
  int rejected = 0;
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.05) ++rejected;
    sum += v;
  }
  cell.rejection_rate = p.empty() ? 0.0 : rejected / n;
  cell.mean_p = p.empty() ? 0.0 : sum / n;
  double ss = 0.0;
  for (double v : p) ss += (v - cell.mean_p) * (v - cell.mean_p);
  cell.sd_p = p.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  mean = v.empty() ? 0.0 : sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

// ----------------------------------------------------------- study engine

// Generator spec for every group of one cell.
std::vector<KeyShapeSpec> cell_group_specs(const StudyConfig& c,
                                           const StudySetting& s,
                                           int percent) {
  const int K = static_cast<int>(s.group_sizes.size());
  const bool pre = s.location != "random";
  std::vector<KeyShapeSpec> specs(static_cast<std::size_t>(K));
  for (int g = 0; g < K; ++g) {
    specs[g].n_points = c.n_points;
    specs[g].percent = static_cast<double>(percent);
  }
  if (c.study == "power") {
    for (int g = 0; g < K; ++g)
      specs[g].variant =
          (c.group1 == "key" || g == K - 1) ? KeyVariant::key
                                            : KeyVariant::box_only;
  } else if (c.study == "noise" || c.study == "timing") {
    const bool two = c.test == "two_sample" && c.study == "noise";
    for (int g = 0; g < K; ++g) {
      if (two && g == 0) {
        specs[g].variant = KeyVariant::key;  // clean reference group
      } else {
        specs[g].variant = KeyVariant::key_noise;
        specs[g].noise_location =
            pre ? (two ? 0 : g % key_geometry::n_noise_locations) : -1;
      }
    }
  } else if (c.study == "hole") {
    for (int g = 0; g < K; ++g) {
      specs[g].variant = KeyVariant::key_quarter;
      // group 1 always keeps the top left quarter; under "pre" the
      // other groups keep fixed distinct quarters, under "random"
      // every sample draws its own
      specs[g].quarter = (g == 0) ? 0 : (pre ? g % 4 : -1);
    }
  } else {
    throw InvalidInput("unknown study '" + c.study + "'");
  }
  return specs;
}

struct RepOutcome {
  double p_value = 1.0;
  double ms = 0.0;
  bool degenerate = false;
};

// Samples all groups, computes H1 diagrams, embeds them over a shared
// domain map, and returns the grouped sample for testing.
GroupedSample build_replicate_sample(const StudyConfig& c,
                                     const std::vector<KeyShapeSpec>& specs,
                                     const StudySetting& s,
                                     std::uint64_t rep_seed) {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<int> labels;
  int sample_idx = 0;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    for (int j = 0; j < s.group_sizes[g]; ++j) {
      Rng rng(derive_seed(rep_seed, static_cast<std::uint64_t>(1 + sample_idx)));
      const auto pts = sample_key_shape(specs[g], rng);
      const auto filt = build_rips(pts, c.max_eps, 2);
      diagrams.push_back(compute_diagram(filt, 1));
      labels.push_back(static_cast<int>(g));
      ++sample_idx;
    }
  }
  const DomainMap map = fit_domain_map(diagrams, c.margin);
  const SpectralBasis basis = make_basis(c.basis_order);
  std::vector<HKEmbedding> embeddings;
  embeddings.reserve(diagrams.size());
  for (const auto& d : diagrams) embeddings.push_back(embed(d, basis, map));
  return make_grouped_sample(embeddings, labels);
}

RepOutcome run_replicate(const StudyConfig& c,
                         const std::vector<KeyShapeSpec>& specs,
                         const StudySetting& s, std::uint64_t rep_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const GroupedSample sample = build_replicate_sample(c, specs, s, rep_seed);
  const std::uint64_t test_seed = derive_seed(rep_seed, 0);
  const TestResult r =
      c.test == "two_sample"
          ? two_sample_test(sample, c.sigma, c.n_steps, c.shuffle_period,
                            test_seed)
          : tanova(sample, c.sigma, c.n_steps, c.shuffle_period, test_seed);
  const auto t1 = std::chrono::steady_clock::now();
  RepOutcome out;
  out.p_value = r.p_value;
  out.degenerate = r.degenerate;
  out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

StudyReport run_grid_study(const StudyConfig& cfg) {
  StudyReport report;
  report.study = cfg.study;
  report.test = cfg.test;
  report.config = cfg;

  struct CellPlan {
    StudySetting setting;
    int percent;
  };
  std::vector<CellPlan> plans;
  for (const auto& s : cfg.settings)
    for (int p : cfg.percents) plans.push_back({s, p});

  report.cells.resize(plans.size());
  std::vector<std::vector<char>> degen(plans.size());
  for (std::size_t ci = 0; ci < plans.size(); ++ci) {
    auto& cell = report.cells[ci];
    cell.location = plans[ci].setting.location;
    cell.group_sizes = plans[ci].setting.group_sizes;
    cell.percent = plans[ci].percent;
    cell.p_values.resize(static_cast<std::size_t>(cfg.n_runs));
    cell.run_ms.resize(static_cast<std::size_t>(cfg.n_runs));
    degen[ci].assign(static_cast<std::size_t>(cfg.n_runs), 0);
  }

  struct Task {
    std::size_t cell;
    int rep;
  };
  std::vector<Task> tasks;
  tasks.reserve(plans.size() * static_cast<std::size_t>(cfg.n_runs));
  for (std::size_t ci = 0; ci < plans.size(); ++ci)
    for (int r = 0; r < cfg.n_runs; ++r) tasks.push_back({ci, r});

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::exception_ptr error;

  auto work = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) break;
      const auto [ci, rep] = tasks[t];
      try {
        const auto specs =
            cell_group_specs(cfg, plans[ci].setting, plans[ci].percent);
        const std::uint64_t cell_seed =
            derive_seed(cfg.seed, static_cast<std::uint64_t>(ci));
        const std::uint64_t rep_seed =
            derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
        const RepOutcome out =
            run_replicate(cfg, specs, plans[ci].setting, rep_seed);
        report.cells[ci].p_values[static_cast<std::size_t>(rep)] = out.p_value;
        report.cells[ci].run_ms[static_cast<std::size_t>(rep)] = out.ms;
        degen[ci][static_cast<std::size_t>(rep)] = out.degenerate ? 1 : 0;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs,
                                             static_cast<int>(tasks.size())));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t ci = 0; ci < plans.size(); ++ci) {
    auto& cell = report.cells[ci];
    cell.n_degenerate = static_cast<int>(
        std::count(degen[ci].begin(), degen[ci].end(), 1));
    summarize_cell(cell);
  }
  return report;
}

}  // namespace

// ------------------------------------------------------------- config API

StudyConfig parse_study_config(const std::string& text) {
  StudyConfig cfg;
  cfg.percents.clear();
  std::vector<int> single_sizes;
  std::string single_location;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(lineno) +
                         ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw InvalidInput("config key '" + key + "' has no value");

    if (key == "study") {
      cfg.study = value;
    } else if (key == "test") {
      cfg.test = value;
    } else if (key == "n_runs") {
      cfg.n_runs = static_cast<int>(parse_ll(value, key));
    } else if (key == "n_points") {
      cfg.n_points = static_cast<int>(parse_ll(value, key));
    } else if (key == "percents") {
      cfg.percents = parse_int_list(value, key);
    } else if (key == "settings") {
      for (const auto& item : split(value, ';'))
        if (!item.empty()) cfg.settings.push_back(parse_setting(item));
    } else if (key == "group_sizes") {
      single_sizes = parse_int_list(value, key);
    } else if (key == "location") {
      single_location = value;
    } else if (key == "sigma") {
      cfg.sigma = parse_num(value, key);
    } else if (key == "basis_order") {
      cfg.basis_order = static_cast<int>(parse_ll(value, key));
    } else if (key == "margin") {
      cfg.margin = parse_num(value, key);
    } else if (key == "n_steps") {
      cfg.n_steps = parse_ll(value, key);
    } else if (key == "shuffle_period") {
      cfg.shuffle_period = parse_ll(value, key);
    } else if (key == "timing_steps") {
      cfg.timing_steps = parse_ll(value, key);
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key);
    } else if (key == "group1") {
      cfg.group1 = value;
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(parse_ll(value, key));
    } else if (key == "max_eps") {
      cfg.max_eps = parse_num(value, key);
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }

  if (!single_sizes.empty() || !single_location.empty()) {
    if (!cfg.settings.empty())
      throw InvalidInput(
          "give either 'settings' or 'group_sizes'/'location', not both");
    if (single_sizes.empty())
      throw InvalidInput("'location' needs 'group_sizes'");
    cfg.settings.push_back({single_location, single_sizes});
  }

  finalize_study_config(cfg);
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_study_config(buffer.str());
}

void finalize_study_config(StudyConfig& cfg) {
  const bool timing = cfg.study == "timing";
  if (cfg.study != "power" && cfg.study != "noise" && cfg.study != "hole" &&
      !timing)
    throw InvalidInput("unknown study '" + cfg.study + "'");
  if (timing) cfg.test = "tanova";
  if (cfg.test != "two_sample" && cfg.test != "tanova")
    throw InvalidInput("unknown test '" + cfg.test + "'");

  if (cfg.n_runs < 0) cfg.n_runs = timing ? 5 : 100;
  if (cfg.n_runs < 1) throw InvalidInput("n_runs must be positive");
  if (cfg.n_points < 1) throw InvalidInput("n_points must be positive");
  if (!(cfg.sigma >= 0.0)) throw InvalidInput("sigma must be nonnegative");
  if (cfg.basis_order < 0)
    throw InvalidInput("basis_order must be nonnegative");
  if (!(cfg.margin >= 0.0 && cfg.margin < 0.5))
    throw InvalidInput("margin must lie in [0, 0.5)");
  if (cfg.n_steps < 1 || cfg.shuffle_period < 1 || cfg.timing_steps < 1)
    throw InvalidInput("step counts must be positive");
  if (cfg.jobs < 1) throw InvalidInput("jobs must be positive");
  if (cfg.max_eps < 0.0) throw InvalidInput("max_eps must be nonnegative");
  if (cfg.group1 != "box" && cfg.group1 != "key")
    throw InvalidInput("group1 must be 'box' or 'key'");

  if (cfg.percents.empty())
    cfg.percents = timing ? std::vector<int>{100}
                          : std::vector<int>{90, 95, 100};
  for (int p : cfg.percents)
    if (p < 0 || p > 100)
      throw InvalidInput("percents must lie in [0, 100]");

  if (cfg.settings.empty()) {
    const bool two = cfg.test == "two_sample";
    if (cfg.study == "power") {
      if (two)
        cfg.settings = {{"", {5, 5}}};
      else
        cfg.settings = {{"", {5, 5, 5}}, {"", {20, 20, 20}},
                        {"", {5, 20, 100}}};
    } else if (two) {
      cfg.settings = {{"pre", {4, 4}},
                      {"random", {5, 5}},
                      {"random", {20, 20}},
                      {"random", {100, 100}}};
    } else {
      cfg.settings = {{"pre", {4, 4, 4}},
                      {"random", {5, 5, 5}},
                      {"random", {20, 20, 20}},
                      {"random", {5, 20, 100}}};
    }
  }

  for (auto& s : cfg.settings) {
    if (cfg.study == "power") {
      s.location.clear();
    } else {
      if (s.location.empty()) s.location = "pre";
      if (s.location != "pre" && s.location != "random")
        throw InvalidInput("setting location must be 'pre' or 'random'");
    }
    const std::size_t want = cfg.test == "two_sample" ? 2 : 3;
    if (s.group_sizes.size() != want)
      throw InvalidInput("each setting needs " + std::to_string(want) +
                         " group sizes for test '" + cfg.test + "'");
    for (int n : s.group_sizes)
      if (n < 1) throw InvalidInput("group sizes must be positive");
  }
}

// -------------------------------------------------------------- study API

StudyReport run_power_study(const StudyConfig& config) {
  StudyConfig cfg = config;
  finalize_study_config(cfg);
  if (cfg.study != "power")
    throw InvalidInput("run_power_study needs study = power");
  return run_grid_study(cfg);
}

StudyReport run_robustness_study(const StudyConfig& config) {
  StudyConfig cfg = config;
  finalize_study_config(cfg);
  if (cfg.study != "noise" && cfg.study != "hole")
    throw InvalidInput("run_robustness_study needs study = noise or hole");
  return run_grid_study(cfg);
}

TimingReport run_timing_study(const StudyConfig& config) {
  StudyConfig cfg = config;
  finalize_study_config(cfg);
  if (cfg.study != "timing")
    throw InvalidInput("run_timing_study needs study = timing");

  TimingReport report;
  report.config = cfg;
  report.cells.resize(cfg.settings.size());

  // measurements stay sequential regardless of `jobs`: concurrent
  // replicates would contend for cores and distort the wall times
  const int percent = cfg.percents.front();
  for (std::size_t ci = 0; ci < cfg.settings.size(); ++ci) {
    const StudySetting& s = cfg.settings[ci];
    TimingCell& cell = report.cells[ci];
    cell.location = s.location;
    cell.group_sizes = s.group_sizes;
    cell.n_total = 0;
    for (int n : s.group_sizes) cell.n_total += n;

    const auto specs = cell_group_specs(cfg, s, percent);
    const std::uint64_t cell_seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(ci));
    for (int rep = 0; rep < cfg.n_runs; ++rep) {
      const std::uint64_t rep_seed =
          derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
      const GroupedSample sample =
          build_replicate_sample(cfg, specs, s, rep_seed);
      const TestResult chain =
          tanova(sample, cfg.sigma, cfg.timing_steps, cfg.shuffle_period,
                 derive_seed(rep_seed, 0));
      const TestResult relabel = permanova_baseline(
          sample, cfg.sigma, cfg.timing_steps, derive_seed(rep_seed, 0));
      cell.chain_ms.push_back(chain.elapsed_ms);
      cell.relabel_ms.push_back(relabel.elapsed_ms);
    }
    mean_sd(cell.chain_ms, cell.chain_mean_ms, cell.chain_sd_ms);
    mean_sd(cell.relabel_ms, cell.relabel_mean_ms, cell.relabel_sd_ms);
  }

  const auto smallest = std::min_element(
      report.cells.begin(), report.cells.end(),
      [](const TimingCell& a, const TimingCell& b) {
        return a.n_total < b.n_total;
      });
  const auto largest = std::max_element(
      report.cells.begin(), report.cells.end(),
      [](const TimingCell& a, const TimingCell& b) {
        return a.n_total < b.n_total;
      });
  if (smallest != report.cells.end() && smallest->chain_mean_ms > 0.0) {
    report.chain_growth_ratio = largest->chain_mean_ms / smallest->chain_mean_ms;
    report.relabel_growth_ratio =
        smallest->relabel_mean_ms > 0.0
            ? largest->relabel_mean_ms / smallest->relabel_mean_ms
            : 0.0;
  }
  return report;
}

// ------------------------------------------------------------------- JSON

nlohmann::json study_config_to_json(const StudyConfig& c) {
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : c.settings)
    settings.push_back(
        {{"location", s.location}, {"group_sizes", s.group_sizes}});
  return {{"study", c.study},
          {"test", c.test},
          {"n_runs", c.n_runs},
          {"n_points", c.n_points},
          {"percents", c.percents},
          {"settings", settings},
          {"sigma", c.sigma},
          {"basis_order", c.basis_order},
          {"margin", c.margin},
          {"n_steps", c.n_steps},
          {"shuffle_period", c.shuffle_period},
          {"timing_steps", c.timing_steps},
          {"seed", c.seed},
          {"group1", c.group1},
          {"jobs", c.jobs},
          {"max_eps", c.max_eps}};
}

nlohmann::json study_report_to_json(const StudyReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"location", c.location},
                     {"group_sizes", c.group_sizes},
                     {"percent", c.percent},
                     {"p_values", c.p_values},
                     {"run_ms", c.run_ms},
                     {"n_degenerate", c.n_degenerate},
                     {"rejection_rate", c.rejection_rate},
                     {"mean_p", c.mean_p},
                     {"sd_p", c.sd_p}});
  return {{"study", r.study},
          {"test", r.test},
          {"config", study_config_to_json(r.config)},
          {"cells", cells}};
}

nlohmann::json timing_report_to_json(const TimingReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"location", c.location},
                     {"group_sizes", c.group_sizes},
                     {"n_total", c.n_total},
                     {"chain_ms", c.chain_ms},
                     {"relabel_ms", c.relabel_ms},
                     {"chain_mean_ms", c.chain_mean_ms},
                     {"chain_sd_ms", c.chain_sd_ms},
                     {"relabel_mean_ms", c.relabel_mean_ms},
                     {"relabel_sd_ms", c.relabel_sd_ms}});
  return {{"config", study_config_to_json(r.config)},
          {"cells", cells},
          {"chain_growth_ratio", r.chain_growth_ratio},
          {"relabel_growth_ratio", r.relabel_growth_ratio}};
}

std::string study_pvalues_csv(const StudyReport& r) {
  std::ostringstream out;
  out << "location,group_sizes,percent,run,p_value\n";
  out << std::setprecision(17);
  for (const auto& c : r.cells) {
    std::string sizes;
    for (std::size_t i = 0; i < c.group_sizes.size(); ++i) {
      if (i) sizes += '|';
      sizes += std::to_string(c.group_sizes[i]);
    }
    for (std::size_t run = 0; run < c.p_values.size(); ++run)
      out << c.location << ',' << sizes << ',' << c.percent << ','
          << run << ',' << c.p_values[run] << '\n';
  }
  return out.str();
}

}  // namespace topostat
