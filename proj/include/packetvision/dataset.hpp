#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "packetvision/config.hpp"

namespace packetvision::dataset {

inline const std::vector<std::string> kManifestHeader = {
    "sample_id", "class", "source_pcap", "packet_index",
    "image_relpath", "rows", "pad_count", "shuffle_seed"};
inline const std::vector<std::string> kSplitHeader = {"sample_id", "class",
                                                      "image_relpath"};
inline constexpr std::string_view kManifestFile = "manifest.csv";

/// Class names double as directory names and CSV fields: non-empty, no
/// path separators, commas, quotes, control characters, and not "." or "..".
bool is_valid_class_name(std::string_view name);

/// `<class>_<source index, 3 digits>_<packet index, 6 digits>`
std::string make_sample_id(std::string_view label, std::size_t source_index,
                           std::uint64_t packet_index);

struct SampleRecord {
  std::string sample_id;
  std::string label;
  std::string source_pcap;
  std::uint64_t packet_index = 0;
  std::string image_relpath;
  std::size_t rows = 0;
  std::size_t pad_count = 0;
  std::uint64_t shuffle_seed = 0;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct DatasetManifest {
  std::vector<SampleRecord> entries;
  /// In order of first appearance.
  std::vector<std::string> classes;
  /// Known only for manifests produced by build_dataset.
  std::optional<std::uint64_t> global_seed;
  std::optional<double> lambda;

  std::map<std::string, std::size_t> class_counts() const;
};

/// Throws MalformedCsv on duplicate ids, unknown classes or bad paths.
void validate_manifest(const DatasetManifest& manifest);

std::string manifest_to_csv(const DatasetManifest& manifest);
DatasetManifest manifest_from_csv(std::string_view text);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct BuildResult {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  std::uint64_t skipped_empty = 0;
};

/// Images every non-empty packet (up to each input's cap) into
/// output_dir/<class>/<sample_id>.png and writes output_dir/manifest.csv.
/// `jobs` == 0 uses the hardware concurrency. Output does not depend on
/// `jobs`.
BuildResult build_dataset(const config::BuildConfig& config, unsigned jobs = 0);

struct FoldEntry {
  std::string sample_id;
  std::string label;
  std::string image_relpath;
  std::size_t fold = 0;
};

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  /// Manifest order.
  std::vector<FoldEntry> entries;

  std::optional<std::size_t> fold_of(std::string_view sample_id) const;
  /// count[label][fold]
  std::map<std::string, std::vector<std::size_t>> class_fold_counts() const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Each class is shuffled with a seed derived from (seed, class position)
/// and dealt round-robin. The deal position carries over from one class to
/// the next so that whole-fold sizes also differ by at most one.
FoldAssignment stratified_kfold(const DatasetManifest& manifest, std::size_t k,
                                std::uint64_t seed);

struct SplitFiles {
  std::filesystem::path train;
  std::filesystem::path test;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

/// Writes out_dir/train.csv and out_dir/test.csv for one held-out fold.
SplitFiles export_split(const FoldAssignment& assignment, std::size_t fold,
                        const std::filesystem::path& out_dir);

}  // namespace packetvision::dataset
