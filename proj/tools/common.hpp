#pragma once

#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <corf/bank.hpp>
#include <corf/corf_cell.hpp>
#include <corf/types.hpp>

namespace corf::cli {

/// Flag > CORF_THREADS > hardware concurrency.
int resolve_threads(int flag_value);

/// "0.1,0.2,0.3" -> values.
std::vector<double> parse_double_list(const std::string& text);

/// "10..100:10" or a comma list.
std::vector<double> parse_range_spec(const std::string& text);

/// "auto" => beta = sigma; otherwise a fixed pixel distance.
BetaPolicy parse_beta(const std::string& text);

/// Content hashes of the input files, recorded in the manifest.
class ManifestInputs {
 public:
  void add(const std::string& path);
  const std::map<std::string, std::string>& hashes() const { return hashes_; }

 private:
  std::map<std::string, std::string> hashes_;
};

/// Reproducibility record: version, resolved configuration (defaults
/// filled) and input hashes. No timestamps; re-running the embedded
/// config must reproduce the outputs byte for byte.
void write_manifest(const std::string& path, const CLI::App& subcommand,
                    const ManifestInputs& inputs);

void write_text_atomic(const std::string& path, const std::string& text);

/// Saves a response map linearly rescaled so its maximum maps to 255;
/// returns that maximum (0 for an all-zero map).
double save_rescaled(const std::string& path, const PlaneD& map);

struct BankOptions {
  double sigma_start = 1.0;
  double sigma_end = 5.0;
  double sigma_step = 0.25;
  int orientations = 12;
  double k = 1.8;
  std::string beta = "auto";

  void attach(CLI::App& app);
  FilterBank build() const;
};

void register_configure(CLI::App& app);
void register_respond(CLI::App& app);
void register_bank(CLI::App& app);
void register_noise_sweep(CLI::App& app);
void register_probe(CLI::App& app);
void register_metrics(CLI::App& app);
void register_selfcheck(CLI::App& app);

}  // namespace corf::cli
