#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/sequences.hpp"
#include "lacunary/sets.hpp"
#include "lacunary/synthesis.hpp"

namespace lacunary {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kConfigVersion = 1;

/// Config rejected; carries every violated field, not just the first.
class ValidationError : public DomainError {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

enum class ExperimentKind {
  nazarov_sweep,
  ls_sweep,
  greedy_growth,
  zygmund_profile,
  lemma_ensemble,
  theorem_ensemble,
  carleman_denjoy,
  separation,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);

/// builder: hadamard | geometric | counterexample | greedy | values | file.
struct SequenceSource {
  std::string builder;
  nlohmann::json params;
};

/// pattern: interval | comb | periodic | random | full | file.
struct SetSource {
  std::string pattern;
  nlohmann::json params;
};

struct EnsembleParams {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  ExperimentKind kind = ExperimentKind::nazarov_sweep;
  std::optional<SequenceSource> sequence;
  std::optional<SetSource> set;
  std::optional<Grid> grid;
  EnsembleParams ensemble;
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path output;
  /// Relative paths in the config resolve against this directory.
  std::filesystem::path base_dir;
  /// SHA-256 of the config text.
  std::string sha256;
};

/// Parses and fully validates a config, including the Nyquist condition for
/// the spectra it will synthesize. Throws ValidationError.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

Sequence build_sequence(const SequenceSource& source, const std::filesystem::path& base_dir);
ThickSet build_set(const SetSource& source, const std::filesystem::path& base_dir);

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-named table; headers carry the quantity and its unit.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(std::string_view name) const;
  void add(std::vector<Cell> row);
};

/// Shortest round-trip-safe text ("%.17g"; inf, -inf, nan spelled out).
std::string format_cell(const Cell& cell);
/// RFC-4180-style CSV: header row, quoted fields where needed.
std::string to_csv(const ResultTable& table);

struct PlotSpec {
  /// Two or three column names.
  std::vector<std::string> columns;
  /// Defaults to the first column.
  std::optional<std::string> sort_by;
};

/// Whitespace-separated data file with a '#' header line. Errors on a
/// missing column or an empty table.
void emit_plot_data(const ResultTable& table, const PlotSpec& spec,
                    const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::string sha256_hex(std::string_view bytes);

struct ManifestEntry {
  std::string file;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string config_sha256;
  std::string tool_version;
  std::string rng;
  std::string kind;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<ManifestEntry> files;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Runs the experiment, writes every output atomically and the manifest
/// (manifest.json) last. A stale manifest in the output directory is removed
/// before anything else is written.
RunManifest run(const ExperimentConfig& config);

}  // namespace lacunary
