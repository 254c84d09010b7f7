// Plain-text serialization for datasets, models, ground truths, simulation
// configs and fit reports, plus CSV helpers.  All numeric formatting goes
// through to_chars/from_chars so behaviour cannot depend on the host
// application's locale.
#pragma once

#include <string>
#include <vector>

#include "memip/types.hpp"

namespace memip {

// Shortest decimal string with `digits` significant digits that parses back
// losslessly for digits >= 17.  Canonical files use 17; CSV uses 15.
std::string format_double(double x, int digits = 17);
double parse_double(const std::string& token, const std::string& context);
long long parse_int(const std::string& token, const std::string& context);

// Events file: "d" header, one "window id t- t+" line per realization, then
// one "event id time type" line per event.  Loading shifts all times so the
// earliest window start sits at 0.
Dataset load_events(const std::string& path);
void save_events(const Dataset& data, const std::string& path);
std::string serialize_events(const Dataset& data);

// Model file: d/K/alpha header plus one "X v u k value" line per entry in
// [v][u][k] order, printed with full precision.
ExpSumModel load_model(const std::string& path);
void save_model(const ExpSumModel& model, const std::string& path);

// Ground truth file: one descriptor line per background and kernel.
GroundTruthModel load_truth(const std::string& path);
void save_truth(const GroundTruthModel& truth, const std::string& path);

struct CsvWriter {
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  [[nodiscard]] static std::string cell(double x) { return format_double(x, 15); }

 private:
  struct Impl;
  Impl* impl_;
};

// Whole-file helpers (throw io_error on failure).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Creates the directory (and parents) when missing.
void ensure_directory(const std::string& path);

}  // namespace memip
