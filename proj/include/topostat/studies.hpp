#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "topostat/inference.hpp"
#include "topostat/key_shape.hpp"

namespace topostat {

/**
 * Batch simulation studies over the synthetic key shape.
 *
 * A study is a grid of cells = (group-size setting) x (percent level).
 * Every cell runs n_runs independent replicates; a replicate samples
 * fresh point clouds for each group, computes their H1 persistence
 * diagrams, embeds them with a shared domain map, and runs the
 * configured resampling test. All randomness derives from the study
 * seed via per-cell and per-replicate stream splitting, so results are
 * identical for any --jobs value.
 *
 * Study kinds:
 *   power  - group 1 sampled from the bare box, last group from the
 *            key shape (two-sample: box vs key; three-group: box, box,
 *            key). group1 = "key" turns the study into an
 *            identical-generator null calibration.
 *   noise  - clean key vs key with a small disturbance hole
 *            (three-group: all groups disturbed). "pre" pins the hole
 *            location (per group); "random" draws it per sample.
 *   hole   - all groups keep one quarter of the keyhole. "pre" pins
 *            the quarter per group (group g keeps quarter g); "random"
 *            draws it per sample. Group 1 always keeps the top left.
 *   timing - per group-size setting, wall time of the transposition
 *            chain vs the full-relabel baseline at equal iteration
 *            counts on the same embedded samples.
 */

// One group-size setting of a study grid.
struct StudySetting {
  std::string location;         // "pre" | "random" (ignored by power)
  std::vector<int> group_sizes; // 2 entries for two_sample, 3 for tanova
};

struct StudyConfig {
  std::string study = "power";      // power | noise | hole | timing
  std::string test = "two_sample";  // two_sample | tanova
  int n_runs = -1;                  // -1: 100 (5 for timing)
  int n_points = 100;
  std::vector<int> percents;        // default {90, 95, 100} ({100} timing)
  std::vector<StudySetting> settings;  // default depends on study/test
  double sigma = 0.2;  // calibrated: separates shape groups without
                       // saturating, keeps identical-generator runs at
                       // the nominal rejection level
  int basis_order = 15;
  double margin = 0.05;
  long long n_steps = 100000;       // chain length per test
  long long shuffle_period = 500;
  long long timing_steps = 1000000; // iterations per timing measurement
  std::uint64_t seed = 1;
  std::string group1 = "box";       // power only: box | key
  int jobs = 1;
  double max_eps = 0.0;             // 0: per-cloud automatic ceiling
};

// Parses "key = value" lines ('#' comments, blank lines ignored) and
// fills study-dependent defaults. Unknown keys or malformed values
// raise InvalidInput. `settings` uses "loc:n1,n2;loc:n1,n2;..."
// (e.g. "pre:4,4;random:5,5"); plain "group_sizes"/"location" keys
// define a single setting instead.
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::string& path);

// Applies the study/test-dependent defaults for any field left at its
// sentinel; parse_study_config calls this itself.
void finalize_study_config(StudyConfig& config);

struct StudyCell {
  std::string location;
  std::vector<int> group_sizes;
  int percent = 100;
  std::vector<double> p_values;  // one per replicate, in replicate order
  std::vector<double> run_ms;    // full replicate wall time
  int n_degenerate = 0;
  // summaries, always recomputable from p_values
  double rejection_rate = 0.0;   // share with p < 0.05
  double mean_p = 0.0;
  double sd_p = 0.0;
};

struct StudyReport {
  std::string study;
  std::string test;
  StudyConfig config;
  std::vector<StudyCell> cells;
};

struct TimingCell {
  std::string location;
  std::vector<int> group_sizes;
  int n_total = 0;
  std::vector<double> chain_ms;    // transposition chain, loop time only
  std::vector<double> relabel_ms;  // full-relabel baseline, loop time only
  double chain_mean_ms = 0.0, chain_sd_ms = 0.0;
  double relabel_mean_ms = 0.0, relabel_sd_ms = 0.0;
};

struct TimingReport {
  StudyConfig config;
  std::vector<TimingCell> cells;
  // mean time of the largest-N setting over the smallest-N setting
  double chain_growth_ratio = 0.0;
  double relabel_growth_ratio = 0.0;
};

StudyReport run_power_study(const StudyConfig& config);
StudyReport run_robustness_study(const StudyConfig& config);
TimingReport run_timing_study(const StudyConfig& config);

nlohmann::json study_config_to_json(const StudyConfig& c);
nlohmann::json study_report_to_json(const StudyReport& r);
nlohmann::json timing_report_to_json(const TimingReport& r);

// CSV of per-replicate p-values:
// location,group_sizes,percent,run,p_value
std::string study_pvalues_csv(const StudyReport& r);

}  // namespace topostat
