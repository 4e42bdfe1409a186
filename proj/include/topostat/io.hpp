#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topostat/clustering.hpp"
#include "topostat/inference.hpp"
#include "topostat/persistence.hpp"
#include "topostat/spectral.hpp"

namespace topostat {

// ------------------------------------------------------------------- CSV

// x,y per row, no header
Eigen::Matrix<double, Eigen::Dynamic, 2> read_points_csv(
    const std::string& path);

// square symmetric matrix, one row per line
Eigen::MatrixXd read_connectivity_csv(const std::string& path);

// rows of (embedding path, group label); labels are arbitrary strings
std::vector<std::pair<std::string, std::string>> read_group_file(
    const std::string& path);

// ------------------------------------------------------------------ JSON

nlohmann::json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

nlohmann::json embedding_to_json(const HKEmbedding& e);
HKEmbedding embedding_from_json(const nlohmann::json& j);

nlohmann::json result_to_json(const TestResult& r);
nlohmann::json clustering_to_json(const Clustering& c);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// -------------------------------------------------------------- manifest

std::string tool_version();

// FNV-1a 64-bit over the canonical (sorted-key) dump, as lowercase hex
std::string manifest_hash(const nlohmann::json& manifest);

}  // namespace topostat
