// Command-line front end: persistence diagrams, spectral embeddings,
// resampling tests, clustering, and the batch simulation studies.
//
// Exit codes: 0 success, 2 invalid input or usage, 3 degenerate test
// statistic (the result file is still written).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topostat/clustering.hpp"
#include "topostat/errors.hpp"
#include "topostat/inference.hpp"
#include "topostat/io.hpp"
#include "topostat/persistence.hpp"
#include "topostat/spectral.hpp"
#include "topostat/studies.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& out_path, const json& j) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    topostat::write_json_file(out_path, j);
}

json map_to_json(const topostat::DomainMap& m) {
  return {{"shift", m.shift}, {"scale", m.scale}, {"margin", m.margin}};
}

// ------------------------------------------------------------------- pd

struct PdArgs {
  std::string input;
  std::string kind = "points";
  int dim = 1;
  int max_dim = 2;
  double max_eps = 0.0;
  std::string out;
};

int run_pd(const PdArgs& a) {
  topostat::Filtration filt;
  if (a.kind == "points") {
    const auto pts = topostat::read_points_csv(a.input);
    filt = topostat::build_rips(pts, a.max_eps, a.max_dim);
  } else {
    const auto conn = topostat::read_connectivity_csv(a.input);
    filt = topostat::build_graph_filtration(conn);
  }
  const auto diagram = topostat::compute_diagram(filt, a.dim);

  json manifest = {{"command", "pd"},
                   {"inputs", json::array({a.input})},
                   {"params",
                    {{"kind", a.kind},
                     {"dim", a.dim},
                     {"max_dim", a.max_dim},
                     {"max_eps", a.max_eps}}},
                   {"tool_version", topostat::tool_version()}};
  json out = topostat::diagram_to_json(diagram);
  out["manifest"] = manifest;
  out["manifest_hash"] = topostat::manifest_hash(manifest);
  emit(a.out, out);
  return 0;
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
  std::vector<std::string> inputs;
  int M = 15;
  double margin = 0.05;
  std::string out_dir;
};

int run_embed(const EmbedArgs& a) {
  std::vector<topostat::PersistenceDiagram> diagrams;
  std::size_t total_pairs = 0;
  for (const auto& path : a.inputs) {
    diagrams.push_back(
        topostat::diagram_from_json(topostat::read_json_file(path)));
    total_pairs += diagrams.back().pairs.size();
  }
  if (total_pairs == 0)
    throw topostat::InvalidInput("all input diagrams are empty");

  const topostat::DomainMap map = topostat::fit_domain_map(diagrams, a.margin);
  const topostat::SpectralBasis basis = topostat::make_basis(a.M);

  std::filesystem::create_directories(a.out_dir);
  std::vector<std::string> outputs;
  for (const auto& path : a.inputs)
    outputs.push_back(
        std::filesystem::path(path).stem().string() + ".embedding.json");

  json manifest = {{"command", "embed"},
                   {"inputs", a.inputs},
                   {"outputs", outputs},
                   {"params", {{"M", a.M}, {"margin", a.margin}}},
                   {"map", map_to_json(map)},
                   {"tool_version", topostat::tool_version()}};
  const std::string hash = topostat::manifest_hash(manifest);

  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    const auto e = topostat::embed(diagrams[i], basis, map);
    json out = topostat::embedding_to_json(e);
    out["manifest_hash"] = hash;
    topostat::write_json_file(
        (std::filesystem::path(a.out_dir) / outputs[i]).string(), out);
  }
  json mfile = manifest;
  mfile["manifest_hash"] = hash;
  topostat::write_json_file(
      (std::filesystem::path(a.out_dir) / "manifest.json").string(), mfile);
  return 0;
}

// ----------------------------------------------------------------- test

struct TestArgs {
  std::string mode = "two-sample";
  std::string groups;
  double sigma = 1.0;
  long long steps = 100000;
  long long shuffle_period = 500;
  std::uint64_t seed = 0;
  std::string out;
};

int run_test(const TestArgs& a) {
  const auto rows = topostat::read_group_file(a.groups);
  std::vector<topostat::HKEmbedding> embeddings;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  for (const auto& [path, name] : rows) {
    embeddings.push_back(
        topostat::embedding_from_json(topostat::read_json_file(path)));
    int idx = -1;
    for (std::size_t g = 0; g < label_names.size(); ++g)
      if (label_names[g] == name) idx = static_cast<int>(g);
    if (idx < 0) {
      idx = static_cast<int>(label_names.size());
      label_names.push_back(name);
    }
    labels.push_back(idx);
  }
  const auto sample = topostat::make_grouped_sample(embeddings, labels);

  topostat::TestResult result;
  if (a.mode == "two-sample")
    result = topostat::two_sample_test(sample, a.sigma, a.steps,
                                       a.shuffle_period, a.seed);
  else if (a.mode == "tanova")
    result = topostat::tanova(sample, a.sigma, a.steps, a.shuffle_period,
                              a.seed);
  else
    result = topostat::permanova_baseline(sample, a.sigma, a.steps, a.seed);

  json manifest = {{"command", "test"},
                   {"inputs", a.groups},
                   {"params",
                    {{"mode", a.mode},
                     {"sigma", a.sigma},
                     {"steps", a.steps},
                     {"shuffle_period", a.shuffle_period},
                     {"seed", a.seed},
                     {"M", sample.M},
                     {"map", map_to_json(sample.map)}}},
                   {"tool_version", topostat::tool_version()}};
  json out = topostat::result_to_json(result);
  out["group_labels"] = label_names;
  out["manifest"] = manifest;
  out["manifest_hash"] = topostat::manifest_hash(manifest);
  emit(a.out, out);
  return result.degenerate ? 3 : 0;
}

// --------------------------------------------------------------- cluster

struct ClusterArgs {
  std::vector<std::string> inputs;
  int k = 0;
  std::string k_range;
  double sigma = 1.0;
  int n_init = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int run_cluster(const ClusterArgs& a) {
  std::vector<topostat::HKEmbedding> embeddings;
  for (const auto& path : a.inputs)
    embeddings.push_back(
        topostat::embedding_from_json(topostat::read_json_file(path)));

  json selection;
  topostat::Clustering fit;
  double sil = 0.0;
  if (!a.k_range.empty()) {
    const auto colon = a.k_range.find(':');
    if (colon == std::string::npos)
      throw topostat::InvalidInput("--k-range must look like 2:6");
    const int k_min = std::stoi(a.k_range.substr(0, colon));
    const int k_max = std::stoi(a.k_range.substr(colon + 1));
    const auto sel = topostat::fit_score(embeddings, k_min, k_max, a.sigma,
                                         a.n_init, a.seed);
    for (std::size_t i = 0; i < sel.ks.size(); ++i)
      if (sel.ks[i] == sel.best_k) {
        fit = sel.fits[i];
        sil = sel.scores[i];
      }
    selection = {{"ks", sel.ks}, {"scores", sel.scores},
                 {"best_k", sel.best_k}};
  } else {
    if (a.k < 1) throw topostat::InvalidInput("give --k or --k-range");
    fit = topostat::topo_kmeans(embeddings, a.k, a.sigma, a.n_init, 300,
                                a.seed);
    if (a.k >= 2) {
      const auto d = topostat::embedding_distance_matrix(embeddings, a.sigma);
      sil = topostat::silhouette(d, fit.assignments);
    }
  }

  json manifest = {{"command", "cluster"},
                   {"inputs", a.inputs},
                   {"params",
                    {{"k", a.k},
                     {"k_range", a.k_range},
                     {"sigma", a.sigma},
                     {"n_init", a.n_init},
                     {"seed", a.seed}}},
                   {"tool_version", topostat::tool_version()}};
  json out = topostat::clustering_to_json(fit);
  out["silhouette"] = sil;
  out["seed"] = a.seed;
  if (!selection.is_null()) out["selection"] = selection;
  out["manifest"] = manifest;
  out["manifest_hash"] = topostat::manifest_hash(manifest);
  emit(a.out, out);
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string study;
  std::string config;
  std::string out;
  std::string csv;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run_simulate(const SimulateArgs& a) {
  std::string text;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw topostat::InvalidInput("cannot open '" + a.config + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  // command-line overrides win over the config file
  text += "\nstudy = " + a.study + "\n";
  if (a.jobs > 0) text += "jobs = " + std::to_string(a.jobs) + "\n";
  if (a.seed_set) text += "seed = " + std::to_string(a.seed) + "\n";
  const topostat::StudyConfig cfg = topostat::parse_study_config(text);

  std::cerr << "simulate: study=" << cfg.study << " test=" << cfg.test
            << " cells=" << cfg.settings.size() * cfg.percents.size()
            << " runs=" << cfg.n_runs << " jobs=" << cfg.jobs << "\n";
  const auto t0 = std::chrono::steady_clock::now();

  json manifest = {{"command", "simulate"},
                   {"inputs", json::array()},
                   {"params", topostat::study_config_to_json(cfg)},
                   {"tool_version", topostat::tool_version()}};
  json out;
  std::string csv;
  if (cfg.study == "timing") {
    const auto report = topostat::run_timing_study(cfg);
    out = topostat::timing_report_to_json(report);
  } else {
    const auto report = cfg.study == "power"
                            ? topostat::run_power_study(cfg)
                            : topostat::run_robustness_study(cfg);
    out = topostat::study_report_to_json(report);
    csv = topostat::study_pvalues_csv(report);
  }
  out["manifest"] = manifest;
  out["manifest_hash"] = topostat::manifest_hash(manifest);

  const auto t1 = std::chrono::steady_clock::now();
  std::cerr << "simulate: done in "
            << std::chrono::duration<double>(t1 - t0).count() << " s\n";

  if (!a.csv.empty()) {
    if (csv.empty())
      throw topostat::InvalidInput("--csv applies to p-value studies only");
    std::ofstream f(a.csv);
    if (!f) throw topostat::InvalidInput("cannot write '" + a.csv + "'");
    f << csv;
  }
  emit(a.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topological data analysis: persistence diagrams, spectral "
               "embeddings, transposition tests, clustering, studies"};
  app.require_subcommand(1);

  PdArgs pd;
  auto* pd_cmd = app.add_subcommand(
      "pd", "compute a persistence diagram from points or a weighted graph");
  pd_cmd->add_option("input", pd.input, "CSV input file")->required();
  pd_cmd->add_option("--kind", pd.kind, "input kind")
      ->check(CLI::IsMember({"points", "graph"}));
  pd_cmd->add_option("--dim", pd.dim, "homology dimension (0 or 1)");
  pd_cmd->add_option("--max-dim", pd.max_dim,
                     "largest simplex dimension for point input");
  pd_cmd->add_option("--max-eps", pd.max_eps,
                     "filtration ceiling for point input (0 = automatic)");
  pd_cmd->add_option("--out", pd.out, "output JSON path (default: stdout)");

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand(
      "embed", "embed diagrams in the spectral basis over a shared map");
  embed_cmd->add_option("diagrams", embed.inputs, "diagram JSON files")
      ->required();
  embed_cmd->add_option("--M", embed.M, "basis order");
  embed_cmd->add_option("--margin", embed.margin, "domain map margin");
  embed_cmd->add_option("--out-dir", embed.out_dir, "output directory")
      ->required();

  TestArgs test;
  auto* test_cmd =
      app.add_subcommand("test", "resampling test on embedded groups");
  test_cmd->add_option("--mode", test.mode, "test kind")
      ->check(CLI::IsMember({"two-sample", "tanova", "permanova"}));
  test_cmd->add_option("--groups", test.groups,
                       "CSV of embedding_path,group_label")
      ->required();
  test_cmd->add_option("--sigma", test.sigma, "diffusion scale");
  test_cmd->add_option("--steps", test.steps, "resampling iterations");
  test_cmd->add_option("--shuffle-period", test.shuffle_period,
                       "full relabel every this many steps");
  test_cmd->add_option("--seed", test.seed, "random seed");
  test_cmd->add_option("--out", test.out, "output JSON path (default: stdout)");

  ClusterArgs cluster;
  auto* cluster_cmd =
      app.add_subcommand("cluster", "k-means on embedded diagrams");
  cluster_cmd->add_option("embeddings", cluster.inputs,
                          "embedding JSON files")->required();
  cluster_cmd->add_option("--k", cluster.k, "number of clusters");
  cluster_cmd->add_option("--k-range", cluster.k_range,
                          "sweep k over min:max and keep the best silhouette");
  cluster_cmd->add_option("--sigma", cluster.sigma, "diffusion scale");
  cluster_cmd->add_option("--n-init", cluster.n_init, "restarts per k");
  cluster_cmd->add_option("--seed", cluster.seed, "random seed");
  cluster_cmd->add_option("--out", cluster.out,
                          "output JSON path (default: stdout)");

  SimulateArgs sim;
  auto* sim_cmd =
      app.add_subcommand("simulate", "run a key-shape simulation study");
  sim_cmd->add_option("--study", sim.study, "study kind")
      ->check(CLI::IsMember({"power", "noise", "hole", "timing"}))
      ->required();
  sim_cmd->add_option("--config", sim.config, "key = value config file");
  sim_cmd->add_option("--out", sim.out, "report JSON path (default: stdout)");
  sim_cmd->add_option("--csv", sim.csv, "also write per-run p-values CSV");
  sim_cmd->add_option("--jobs", sim.jobs, "replicate parallelism");
  auto* seed_opt = sim_cmd->add_option("--seed", sim.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  sim.seed_set = seed_opt->count() > 0;

  try {
    if (pd_cmd->parsed()) return run_pd(pd);
    if (embed_cmd->parsed()) return run_embed(embed);
    if (test_cmd->parsed()) return run_test(test);
    if (cluster_cmd->parsed()) return run_cluster(cluster);
    if (sim_cmd->parsed()) return run_simulate(sim);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
