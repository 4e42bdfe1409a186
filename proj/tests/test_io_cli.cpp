// Tests for file formats and the command-line front end: CSV readers
// with line-precise errors, JSON round trips, manifest hashing, and
// subprocess runs of every subcommand including determinism and exit
// codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "topostat/clustering.hpp"
#include "topostat/errors.hpp"
#include "topostat/inference.hpp"
#include "topostat/io.hpp"
#include "topostat/persistence.hpp"
#include "topostat/spectral.hpp"

#ifndef TOPOSTAT_CLI
#error "TOPOSTAT_CLI must point at the command-line binary"
#endif

using namespace topostat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "topostat_io_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout." + std::to_string(counter));
  const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(TOPOSTAT_CLI) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string square_csv(double s) {
  std::ostringstream ss;
  ss << "0,0\n" << s << ",0\n0," << s << "\n" << s << "," << s << "\n";
  return ss.str();
}

HKEmbedding tiny_embedding(std::initializer_list<double> coeffs) {
  static const SpectralBasis basis = make_basis(1);
  HKEmbedding e;
  e.M = 1;
  e.lambda = basis.lambda;
  e.map.shift = 0.0;
  e.map.scale = 1.0;
  e.map.margin = 0.05;
  e.P = 1;
  e.coeffs.resize(static_cast<Eigen::Index>(coeffs.size()));
  Eigen::Index i = 0;
  for (double c : coeffs) e.coeffs[i++] = c;
  return e;
}

}  // namespace

TEST_CASE("points CSV parsing") {
  const fs::path good = work_dir() / "points_good.csv";
  write_text(good, " 0.5 , 1.25\n\n-2,3e-1\n");
  const auto pts = read_points_csv(good.string());
  REQUIRE(pts.rows() == 2);
  CHECK(pts(0, 0) == 0.5);
  CHECK(pts(0, 1) == 1.25);
  CHECK(pts(1, 0) == -2.0);
  CHECK(pts(1, 1) == 0.3);

  CHECK_THROWS_WITH_AS(read_points_csv((work_dir() / "absent.csv").string()),
                       doctest::Contains("cannot open"), InvalidInput);

  const fs::path empty = work_dir() / "points_empty.csv";
  write_text(empty, "\n  \n");
  CHECK_THROWS_WITH_AS(read_points_csv(empty.string()),
                       doctest::Contains("no points"), InvalidInput);

  const fs::path wide = work_dir() / "points_wide.csv";
  write_text(wide, "0,0\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_points_csv(wide.string()),
                       doctest::Contains("expected two columns"),
                       InvalidInput);

  const fs::path bad = work_dir() / "points_bad.csv";
  write_text(bad, "0,0\n1,x\n");
  try {
    read_points_csv(bad.string());
    FAIL("expected a parse error");
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    CHECK(what.find(bad.string() + ":2") != std::string::npos);
    CHECK(what.find("cannot parse number 'x'") != std::string::npos);
  }
}

TEST_CASE("connectivity CSV parsing") {
  const fs::path good = work_dir() / "conn_good.csv";
  write_text(good, "0,1,2\n1,0,3\n2,3,0\n");
  const Eigen::MatrixXd m = read_connectivity_csv(good.string());
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 3);
  CHECK(m(1, 2) == 3.0);
  CHECK(m(2, 0) == 2.0);

  const fs::path jagged = work_dir() / "conn_jagged.csv";
  write_text(jagged, "0,1\n1,0,2\n");
  CHECK_THROWS_WITH_AS(read_connectivity_csv(jagged.string()),
                       doctest::Contains("not square at row 2"), InvalidInput);

  const fs::path empty = work_dir() / "conn_empty.csv";
  write_text(empty, "");
  CHECK_THROWS_WITH_AS(read_connectivity_csv(empty.string()),
                       doctest::Contains("empty matrix"), InvalidInput);
}

TEST_CASE("group file parsing") {
  const fs::path good = work_dir() / "groups_good.csv";
  write_text(good, "a.json , treated\n\nb.json,control\n");
  const auto rows = read_group_file(good.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == "a.json");
  CHECK(rows[0].second == "treated");
  CHECK(rows[1].second == "control");

  const fs::path bad = work_dir() / "groups_bad.csv";
  write_text(bad, "only_one_field\n");
  try {
    read_group_file(bad.string());
    FAIL("expected a parse error");
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    CHECK(what.find(bad.string() + ":1:") != std::string::npos);
    CHECK(what.find("embedding_path,group_label") != std::string::npos);
  }

  const fs::path empty = work_dir() / "groups_empty.csv";
  write_text(empty, "  \n");
  CHECK_THROWS_WITH_AS(read_group_file(empty.string()),
                       doctest::Contains("no group rows"), InvalidInput);
}

TEST_CASE("diagram JSON round trip and validation") {
  PersistenceDiagram d;
  d.dim = 1;
  d.cap = std::sqrt(2.0);
  d.pairs = {{1.0, std::sqrt(2.0)}, {0.25, 0.75}};
  const PersistenceDiagram back = diagram_from_json(diagram_to_json(d));
  CHECK(back.dim == d.dim);
  CHECK(back.cap == d.cap);
  REQUIRE(back.pairs.size() == 2);
  CHECK(back.pairs[0].birth == d.pairs[0].birth);
  CHECK(back.pairs[0].death == d.pairs[0].death);
  CHECK(back.pairs[1].birth == d.pairs[1].birth);
  CHECK(back.pairs[1].death == d.pairs[1].death);

  CHECK_THROWS_AS(diagram_from_json(json{{"cap", 1.0}, {"pairs", json::array()}}),
                  InvalidInput);
  CHECK_THROWS_AS(
      diagram_from_json(json{{"dim", 1}, {"cap", 1.0}, {"pairs", 7}}),
      InvalidInput);
  CHECK_THROWS_AS(
      diagram_from_json(json{{"dim", 1},
                             {"cap", 1.0},
                             {"pairs", json::array({json::array({1, 2, 3})})}}),
      InvalidInput);
}

TEST_CASE("embedding JSON round trip and validation") {
  PersistenceDiagram d;
  d.dim = 1;
  d.cap = 2.0;
  d.pairs = {{0.3, 1.1}, {0.5, 1.9}};
  const DomainMap map = fit_domain_map({d}, 0.05);
  const SpectralBasis basis = make_basis(4);
  const HKEmbedding e = embed(d, basis, map);

  const HKEmbedding back = embedding_from_json(embedding_to_json(e));
  CHECK(back.M == e.M);
  CHECK(back.P == e.P);
  CHECK(back.map.shift == e.map.shift);
  CHECK(back.map.scale == e.map.scale);
  CHECK(back.map.margin == e.map.margin);
  REQUIRE(back.coeffs.size() == e.coeffs.size());
  CHECK((back.coeffs.array() == e.coeffs.array()).all());
  REQUIRE(back.lambda.size() == basis.lambda.size());
  CHECK((back.lambda.array() == basis.lambda.array()).all());

  json j = embedding_to_json(e);
  j["coeffs"].erase(0);  // one coefficient short of the basis
  CHECK_THROWS_WITH_AS(embedding_from_json(j),
                       doctest::Contains("does not match the basis order"),
                       InvalidInput);
  json missing = embedding_to_json(e);
  missing.erase("P");
  CHECK_THROWS_AS(embedding_from_json(missing), InvalidInput);
}

TEST_CASE("result and clustering JSON emitters echo every field") {
  std::vector<HKEmbedding> embeddings = {
      tiny_embedding({1.0, 0.0, 0.0}), tiny_embedding({1.1, 0.2, 0.0}),
      tiny_embedding({4.0, 1.0, 0.5}), tiny_embedding({4.2, 0.9, 0.4})};
  const GroupedSample sample =
      make_grouped_sample(embeddings, {0, 0, 1, 1});
  const TestResult r = two_sample_test(sample, 0.1, 400, 50, 9);
  const json j = result_to_json(r);
  CHECK(j["method"] == "two-sample");
  CHECK(j["sigma"].get<double>() == r.sigma);
  CHECK(j["observed"].get<double>() == r.observed);
  CHECK(j["p_value"].get<double>() == r.p_value);
  CHECK(j["n_resamples"].get<long long>() == r.n_resamples);
  CHECK(j["seed"].get<std::uint64_t>() == r.seed);
  CHECK(j["degenerate"].get<bool>() == r.degenerate);
  CHECK(j["null_mean"].get<double>() == r.null_mean);
  CHECK(j["null_sd"].get<double>() == r.null_sd);
  CHECK(j["histogram"]["lo"].get<double>() == r.hist_lo);
  CHECK(j["histogram"]["hi"].get<double>() == r.hist_hi);
  REQUIRE(j["histogram"]["counts"].size() == r.hist.size());
  CHECK(j["elapsed_ms"].get<double>() >= 0.0);

  const Clustering c = topo_kmeans(embeddings, 2, 0.1, 5, 300, 3);
  const json cj = clustering_to_json(c);
  CHECK(cj["k"] == 2);
  CHECK(cj["sigma"].get<double>() == c.sigma);
  REQUIRE(cj["assignments"].size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(cj["assignments"][i].get<int>() == c.assignments[i]);
  REQUIRE(cj["centroids"].size() == 2);
  REQUIRE(cj["centroids"][0].size() ==
          static_cast<std::size_t>(c.centroids.rows()));
  CHECK(cj["centroids"][1][0].get<double>() == c.centroids(0, 1));
  CHECK(cj["inertia"].get<double>() == c.inertia);
  CHECK(cj["n_iters"].get<int>() == c.n_iters);

  json round = json::parse(j.dump());
  CHECK(round["p_value"].get<double>() == r.p_value);
}

TEST_CASE("JSON file helpers and manifest hashing") {
  const fs::path path = work_dir() / "blob.json";
  const json j = {{"alpha", 1.5}, {"beta", {1, 2, 3}}};
  write_json_file(path.string(), j);
  CHECK(read_json_file(path.string()) == j);

  const fs::path broken = work_dir() / "broken.json";
  write_text(broken, "{ not json");
  try {
    read_json_file(broken.string());
    FAIL("expected a parse error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find(broken.string()) != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(read_json_file((work_dir() / "nope.json").string()),
                       doctest::Contains("cannot open"), InvalidInput);

  CHECK(tool_version() == "topostat 0.1.0");

  // frozen FNV-1a 64 vectors over the canonical sorted-key dump
  CHECK(manifest_hash(json{{"a", 1}}) == "9c3e82dd6fcae8b1");
  CHECK(manifest_hash(json{{"a", 1}, {"b", {2, 3}}}) == "55bed68470220de4");
  json unordered;
  unordered["b"] = {2, 3};
  unordered["a"] = 1;
  CHECK(manifest_hash(unordered) == "55bed68470220de4");
  CHECK(manifest_hash(json{{"a", 2}}) != manifest_hash(json{{"a", 1}}));
}

TEST_CASE("command line pipeline produces deterministic artifacts") {
  const fs::path dir = work_dir() / "pipeline";
  fs::create_directories(dir);

  // --- persistence diagrams from four scaled squares
  const double sides[4] = {1.0, 1.2, 1.4, 1.6};
  std::vector<fs::path> diagram_paths;
  for (int i = 0; i < 4; ++i) {
    const fs::path csv = dir / ("square" + std::to_string(i) + ".csv");
    write_text(csv, square_csv(sides[i]));
    const fs::path out = dir / ("d" + std::to_string(i) + ".json");
    const CliRun r = run_cli("pd " + csv.string() + " --dim 1 --out " +
                             out.string());
    CAPTURE(i);
    REQUIRE(r.exit_code == 0);
    diagram_paths.push_back(out);

    const json j = read_json_file(out.string());
    CHECK(j["dim"] == 1);
    REQUIRE(j["pairs"].size() == 1);
    CHECK(j["pairs"][0][0].get<double>() == doctest::Approx(sides[i]));
    CHECK(j["pairs"][0][1].get<double>() ==
          doctest::Approx(sides[i] * std::sqrt(2.0)));
    CHECK(manifest_hash(j["manifest"]) == j["manifest_hash"]);
  }

  SUBCASE("pd runs are byte-identical") {
    const fs::path again = dir / "d0_again.json";
    const CliRun r = run_cli("pd " + (dir / "square0.csv").string() +
                             " --dim 1 --out " + again.string());
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(again) == slurp(diagram_paths[0]));
  }

  SUBCASE("graph persistence from a connectivity matrix") {
    const fs::path conn = dir / "conn.csv";
    write_text(conn,
               "0,0.1,0.9,0.4\n"
               "0.1,0,0.2,0.9\n"
               "0.9,0.2,0,0.3\n"
               "0.4,0.9,0.3,0\n");
    const fs::path out = dir / "graph_d1.json";
    const CliRun r = run_cli("pd " + conn.string() +
                             " --kind graph --dim 1 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const json j = read_json_file(out.string());
    REQUIRE(j["pairs"].size() == 1);
    CHECK(j["pairs"][0][0].get<double>() == 0.4);
    CHECK(j["pairs"][0][1].get<double>() == 0.9);
  }

  // --- embeddings over a shared domain map
  const fs::path emb_dir = dir / "emb";
  std::string embed_args = "embed";
  for (const auto& p : diagram_paths) embed_args += " " + p.string();
  embed_args += " --M 6 --margin 0.05 --out-dir " + emb_dir.string();
  REQUIRE(run_cli(embed_args).exit_code == 0);

  std::vector<fs::path> embedding_paths;
  for (int i = 0; i < 4; ++i) {
    const fs::path p = emb_dir / ("d" + std::to_string(i) + ".embedding.json");
    CAPTURE(i);
    REQUIRE(fs::exists(p));
    embedding_paths.push_back(p);
  }

  SUBCASE("embed manifest records the map refit over the union") {
    const json manifest = read_json_file((emb_dir / "manifest.json").string());
    std::vector<PersistenceDiagram> diagrams;
    for (const auto& p : diagram_paths)
      diagrams.push_back(diagram_from_json(read_json_file(p.string())));
    const DomainMap map = fit_domain_map(diagrams, 0.05);
    CHECK(manifest["map"]["shift"].get<double>() == map.shift);
    CHECK(manifest["map"]["scale"].get<double>() == map.scale);
    CHECK(manifest["map"]["margin"].get<double>() == map.margin);
    REQUIRE(manifest["outputs"].size() == 4);
    CHECK(manifest["outputs"][0] == "d0.embedding.json");

    // per-file hash matches the shared manifest, and the coefficients
    // match an in-process embedding over the same map
    const json e0 = read_json_file(embedding_paths[0].string());
    CHECK(e0["manifest_hash"] == manifest["manifest_hash"]);
    const HKEmbedding lib = embed(diagrams[0], make_basis(6), map);
    const HKEmbedding cli = embedding_from_json(e0);
    REQUIRE(cli.coeffs.size() == lib.coeffs.size());
    CHECK((cli.coeffs.array() == lib.coeffs.array()).all());
  }

  // --- two-sample test on the embedded groups
  const fs::path groups = dir / "groups.csv";
  write_text(groups, embedding_paths[0].string() + ",small\n" +
                         embedding_paths[1].string() + ",small\n" +
                         embedding_paths[2].string() + ",large\n" +
                         embedding_paths[3].string() + ",large\n");
  const fs::path res1 = dir / "test1.json";
  const std::string test_args = "test --mode two-sample --groups " +
                                groups.string() +
                                " --sigma 0.5 --steps 400 --shuffle-period 50"
                                " --seed 5 --out ";
  REQUIRE(run_cli(test_args + res1.string()).exit_code == 0);
  json t1 = read_json_file(res1.string());
  CHECK(t1["method"] == "two-sample");
  CHECK(t1["p_value"].get<double>() >= 0.0);
  CHECK(t1["p_value"].get<double>() <= 1.0);
  CHECK(t1["degenerate"] == false);
  CHECK(t1["group_labels"] == json::array({"small", "large"}));
  CHECK(manifest_hash(t1["manifest"]) == t1["manifest_hash"]);

  SUBCASE("test reruns agree up to wall time") {
    const fs::path res2 = dir / "test2.json";
    REQUIRE(run_cli(test_args + res2.string()).exit_code == 0);
    json t2 = read_json_file(res2.string());
    json a = t1, b = t2;
    a.erase("elapsed_ms");
    b.erase("elapsed_ms");
    CHECK(a == b);
  }

  SUBCASE("three-group chain and the relabel baseline run") {
    const fs::path groups3 = dir / "groups3.csv";
    write_text(groups3, embedding_paths[0].string() + ",g0\n" +
                            embedding_paths[1].string() + ",g0\n" +
                            embedding_paths[2].string() + ",g1\n" +
                            embedding_paths[3].string() + ",g2\n");
    const CliRun tan = run_cli("test --mode tanova --groups " +
                               groups3.string() +
                               " --sigma 0.5 --steps 300 --seed 2");
    REQUIRE(tan.exit_code == 0);
    CHECK(json::parse(tan.out)["method"] == "tanova");
    const CliRun perm = run_cli("test --mode permanova --groups " +
                                groups3.string() +
                                " --sigma 0.5 --steps 200 --seed 2");
    REQUIRE(perm.exit_code == 0);
    CHECK(json::parse(perm.out)["method"] == "permanova");
  }

  SUBCASE("identical groups exit with the degenerate code") {
    const fs::path same = dir / "groups_same.csv";
    write_text(same, embedding_paths[0].string() + ",a\n" +
                         embedding_paths[0].string() + ",a\n" +
                         embedding_paths[0].string() + ",b\n" +
                         embedding_paths[0].string() + ",b\n");
    const fs::path out = dir / "degenerate.json";
    const CliRun r = run_cli("test --groups " + same.string() +
                             " --steps 100 --seed 1 --out " + out.string());
    CHECK(r.exit_code == 3);
    const json j = read_json_file(out.string());
    CHECK(j["degenerate"] == true);
    CHECK(j["p_value"].get<double>() == 1.0);
  }

  // --- clustering the embeddings
  std::string emb_args;
  for (const auto& p : embedding_paths) emb_args += " " + p.string();

  SUBCASE("fixed-k clustering is reproducible") {
    const fs::path c1 = dir / "cluster1.json";
    const fs::path c2 = dir / "cluster2.json";
    const std::string args =
        "cluster" + emb_args + " --k 2 --sigma 0.5 --seed 3 --out ";
    REQUIRE(run_cli(args + c1.string()).exit_code == 0);
    REQUIRE(run_cli(args + c2.string()).exit_code == 0);
    CHECK(slurp(c1) == slurp(c2));
    const json j = read_json_file(c1.string());
    CHECK(j["k"] == 2);
    CHECK(j["assignments"].size() == 4);
    CHECK(j["silhouette"].is_number());
    CHECK(manifest_hash(j["manifest"]) == j["manifest_hash"]);
  }

  SUBCASE("k sweep reports the scored selection") {
    const CliRun r =
        run_cli("cluster" + emb_args + " --k-range 2:3 --sigma 0.5 --seed 3");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["selection"]["ks"] == json::array({2, 3}));
    CHECK(j["selection"]["scores"].size() == 2);
    const int best = j["selection"]["best_k"].get<int>();
    CHECK(best >= 2);
    CHECK(best <= 3);
    CHECK(j["k"].get<int>() == best);
  }

  SUBCASE("single cluster collects everything") {
    const CliRun r = run_cli("cluster" + emb_args + " --k 1 --sigma 0.5");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    for (const auto& a : j["assignments"]) CHECK(a.get<int>() == 0);
  }
}

TEST_CASE("command line simulate runs studies from config files") {
  const fs::path dir = work_dir() / "simulate";
  fs::create_directories(dir);
  const fs::path cfg = dir / "study.cfg";
  write_text(cfg,
             "study = power\n"
             "group_sizes = 3,3\n"
             "percents = 100\n"
             "n_runs = 2\n"
             "n_points = 30\n"
             "basis_order = 5\n"
             "n_steps = 300\n"
             "shuffle_period = 50\n"
             "seed = 3\n");
  const fs::path rep = dir / "report.json";
  const fs::path csv1 = dir / "p1.csv";
  const fs::path csv2 = dir / "p2.csv";
  const std::string base = "simulate --study power --config " + cfg.string();
  REQUIRE(run_cli(base + " --out " + rep.string() + " --csv " +
                  csv1.string()).exit_code == 0);
  const json j = read_json_file(rep.string());
  CHECK(j["study"] == "power");
  REQUIRE(j["cells"].size() == 1);
  CHECK(j["cells"][0]["p_values"].size() == 2);
  CHECK(manifest_hash(j["manifest"]) == j["manifest_hash"]);

  REQUIRE(run_cli(base + " --csv " + csv2.string()).exit_code == 0);
  const std::string csv_text = slurp(csv1);
  CHECK(csv_text == slurp(csv2));
  CHECK(csv_text.rfind("location,group_sizes,percent,run,p_value\n", 0) == 0);
  CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 3);

  SUBCASE("the study flag overrides the config file") {
    const CliRun r = run_cli("simulate --study noise --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["study"] == "noise");
  }

  SUBCASE("timing reports have no p-value table") {
    const fs::path tcfg = dir / "timing.cfg";
    write_text(tcfg,
               "settings = pre:3,3,3\n"
               "n_runs = 1\n"
               "n_points = 30\n"
               "basis_order = 5\n"
               "timing_steps = 500\n"
               "seed = 2\n");
    const CliRun ok = run_cli("simulate --study timing --config " +
                              tcfg.string());
    REQUIRE(ok.exit_code == 0);
    const json tj = json::parse(ok.out);
    CHECK(tj["cells"].size() == 1);
    CHECK(tj["config"]["test"] == "tanova");
    const CliRun bad = run_cli("simulate --study timing --config " +
                               tcfg.string() + " --csv " +
                               (dir / "t.csv").string());
    CHECK(bad.exit_code == 2);
  }
}

TEST_CASE("command line rejects malformed input with exit code 2") {
  const fs::path dir = work_dir() / "errors";
  fs::create_directories(dir);

  SUBCASE("usage errors") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("pd").exit_code == 2);                  // missing input
    CHECK(run_cli("embed x.json").exit_code == 2);        // missing out dir
    CHECK(run_cli("test --groups g.csv --mode banana").exit_code == 2);
    CHECK(run_cli("simulate --study banana").exit_code == 2);
  }

  SUBCASE("bad point input") {
    const CliRun missing = run_cli("pd " + (dir / "nope.csv").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("error:") != std::string::npos);

    const fs::path bad = dir / "bad.csv";
    write_text(bad, "0,0\n1,x\n");
    const CliRun r = run_cli("pd " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":2") != std::string::npos);
    CHECK(r.err.find("cannot parse number") != std::string::npos);

    const fs::path empty = dir / "empty.csv";
    write_text(empty, "\n");
    CHECK(run_cli("pd " + empty.string()).exit_code == 2);
  }

  SUBCASE("embedding all-empty diagrams fails") {
    const fs::path d = dir / "empty_diagram.json";
    write_text(d, R"({"dim":1,"cap":1.0,"pairs":[]})");
    const CliRun r = run_cli("embed " + d.string() + " --out-dir " +
                             (dir / "emb").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("group file referencing a missing embedding fails") {
    const fs::path groups = dir / "groups_missing.csv";
    write_text(groups, (dir / "ghost.json").string() + ",a\n");
    CHECK(run_cli("test --groups " + groups.string()).exit_code == 2);
  }

  SUBCASE("cluster needs a well-formed cluster count") {
    const fs::path d = dir / "e.json";
    write_json_file(d.string(), embedding_to_json(tiny_embedding({1, 0, 0})));
    const CliRun r = run_cli("cluster " + d.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("give --k or --k-range") != std::string::npos);
    const CliRun bad_range =
        run_cli("cluster " + d.string() + " --k-range 5");
    CHECK(bad_range.exit_code == 2);
    CHECK(bad_range.err.find("--k-range") != std::string::npos);
  }

  SUBCASE("bad study config key") {
    const fs::path cfg = dir / "bad.cfg";
    write_text(cfg, "banana = 1\n");
    CHECK(run_cli("simulate --study power --config " + cfg.string())
              .exit_code == 2);
  }
}
