#include "topostat/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "topostat/errors.hpp"

namespace topostat {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidInput(where + ": cannot parse number '" + s + "'");
  return v;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields)
      row.push_back(
          parse_double(f, path + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Eigen::Matrix<double, Eigen::Dynamic, 2> read_points_csv(
    const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.empty()) throw InvalidInput(path + ": no points");
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(rows.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw InvalidInput(path + ": expected two columns (x,y) in row " +
                         std::to_string(i + 1));
    pts(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    pts(static_cast<Eigen::Index>(i), 1) = rows[i][1];
  }
  return pts;
}

Eigen::MatrixXd read_connectivity_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const std::size_t n = rows.size();
  if (n == 0) throw InvalidInput(path + ": empty matrix");
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw InvalidInput(path + ": matrix is not square at row " +
                         std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  }
  return m;
}

std::vector<std::pair<std::string, std::string>> read_group_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw InvalidInput(path + ":" + std::to_string(lineno) +
                         ": expected 'embedding_path,group_label'");
    out.emplace_back(fields[0], fields[1]);
  }
  if (out.empty()) throw InvalidInput(path + ": no group rows");
  return out;
}

nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : d.pairs) pairs.push_back({p.birth, p.death});
  return {{"dim", d.dim}, {"cap", d.cap}, {"pairs", pairs}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
  PersistenceDiagram d;
  try {
    d.dim = j.at("dim").get<int>();
    d.cap = j.at("cap").get<double>();
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2)
        throw InvalidInput("diagram pair must be [birth, death]");
      d.pairs.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed diagram JSON: ") + e.what());
  }
  return d;
}

nlohmann::json embedding_to_json(const HKEmbedding& e) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index k = 0; k < e.coeffs.size(); ++k)
    coeffs.push_back(e.coeffs[k]);
  return {{"basis", {{"M", e.M}}},
          {"map",
           {{"shift", e.map.shift},
            {"scale", e.map.scale},
            {"margin", e.map.margin}}},
          {"P", e.P},
          {"coeffs", coeffs}};
}

HKEmbedding embedding_from_json(const nlohmann::json& j) {
  HKEmbedding e;
  try {
    e.M = j.at("basis").at("M").get<int>();
    e.map.shift = j.at("map").at("shift").get<double>();
    e.map.scale = j.at("map").at("scale").get<double>();
    e.map.margin = j.at("map").at("margin").get<double>();
    e.P = j.at("P").get<int>();
    const auto& c = j.at("coeffs");
    e.coeffs.resize(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k)
      e.coeffs[static_cast<Eigen::Index>(k)] = c[k].get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("malformed embedding JSON: ") + ex.what());
  }
  const SpectralBasis basis = make_basis(e.M);
  if (basis.kappa() != e.coeffs.size())
    throw InvalidInput("coefficient count does not match the basis order");
  e.lambda = basis.lambda;
  return e;
}

nlohmann::json result_to_json(const TestResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (long long c : r.hist) hist.push_back(c);
  return {{"method", r.method},
          {"sigma", r.sigma},
          {"observed", r.observed},
          {"p_value", r.p_value},
          {"n_resamples", r.n_resamples},
          {"seed", r.seed},
          {"degenerate", r.degenerate},
          {"null_mean", r.null_mean},
          {"null_sd", r.null_sd},
          {"histogram", {{"lo", r.hist_lo}, {"hi", r.hist_hi},
                         {"counts", hist}}},
          {"elapsed_ms", r.elapsed_ms}};
}

nlohmann::json clustering_to_json(const Clustering& c) {
  nlohmann::json centroids = nlohmann::json::array();
  for (Eigen::Index col = 0; col < c.centroids.cols(); ++col) {
    nlohmann::json one = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.centroids.rows(); ++r)
      one.push_back(c.centroids(r, col));
    centroids.push_back(one);
  }
  return {{"k", c.k},
          {"sigma", c.sigma},
          {"assignments", c.assignments},
          {"centroids", centroids},
          {"inertia", c.inertia},
          {"n_iters", c.n_iters}};
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string tool_version() { return "topostat 0.1.0"; }

std::string manifest_hash(const nlohmann::json& manifest) {
  const std::string s = manifest.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace topostat
