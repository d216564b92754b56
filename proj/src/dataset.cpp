#include "packetvision/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "packetvision/csv.hpp"
#include "packetvision/error.hpp"
#include "packetvision/imaging.hpp"
#include "packetvision/io.hpp"
#include "packetvision/pcap.hpp"
#include "packetvision/random.hpp"

namespace packetvision::dataset {

namespace fs = std::filesystem;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
T parse_uint(const std::string& field, std::string_view what, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": bad " +
                                             std::string(what) + " '" + field + "'");
  }
  return value;
}

void remove_stale_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      fs::remove(entry.path());
    }
  }
}

struct Job {
  const pcap::RawPacket* packet;
  SampleRecord* record;
};

void run_jobs(std::vector<Job>& jobs, const fs::path& output_dir, double lambda,
              unsigned workers) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        auto& job = jobs[i];
        const auto img = imaging::packet_to_image(
            job.packet->data, {.lambda = lambda, .seed = job.record->shuffle_seed});
        imaging::encode_png(img, output_dir / job.record->image_relpath);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

bool is_valid_class_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7F || c == '/' || c == '\\' || c == ',' || c == '"';
  });
}

std::string make_sample_id(std::string_view label, std::size_t source_index,
                           std::uint64_t packet_index) {
  char suffix[64];
  std::snprintf(suffix, sizeof suffix, "_%03zu_%06llu", source_index,
                static_cast<unsigned long long>(packet_index));
  return std::string(label) + suffix;
}

std::map<std::string, std::size_t> DatasetManifest::class_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& c : classes) counts[c] = 0;
  for (const auto& e : entries) ++counts[e.label];
  return counts;
}

void validate_manifest(const DatasetManifest& manifest) {
  const std::set<std::string, std::less<>> classes(manifest.classes.begin(),
                                                   manifest.classes.end());
  if (classes.size() != manifest.classes.size()) {
    throw Error(ErrorCode::MalformedCsv, "duplicate class in class list");
  }
  std::unordered_set<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (!ids.insert(e.sample_id).second) {
      throw Error(ErrorCode::MalformedCsv, "duplicate sample_id " + e.sample_id);
    }
    if (!classes.contains(e.label)) {
      throw Error(ErrorCode::MalformedCsv, "unknown class " + e.label);
    }
    if (!e.image_relpath.starts_with(e.label + "/")) {
      throw Error(ErrorCode::MalformedCsv,
                  e.sample_id + ": image path outside its class directory");
    }
  }
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::string out = csv::join(kManifestHeader) + "\n";
  for (const auto& e : manifest.entries) {
    out += csv::join({e.sample_id, e.label, e.source_pcap, std::to_string(e.packet_index),
                      e.image_relpath, std::to_string(e.rows), std::to_string(e.pad_count),
                      std::to_string(e.shuffle_seed)});
    out += '\n';
  }
  return out;
}

DatasetManifest manifest_from_csv(std::string_view text) {
  const auto table = csv::parse(text, kManifestHeader);
  DatasetManifest m;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto line = table.line_numbers[i];
    SampleRecord r;
    r.sample_id = row[0];
    r.label = row[1];
    r.source_pcap = row[2];
    r.packet_index = parse_uint<std::uint64_t>(row[3], "packet_index", line);
    r.image_relpath = row[4];
    r.rows = parse_uint<std::size_t>(row[5], "rows", line);
    r.pad_count = parse_uint<std::size_t>(row[6], "pad_count", line);
    r.shuffle_seed = parse_uint<std::uint64_t>(row[7], "shuffle_seed", line);
    if (!is_valid_class_name(r.label)) {
      throw Error(ErrorCode::MalformedCsv,
                  "line " + std::to_string(line) + ": invalid class '" + r.label + "'");
    }
    if (seen.insert(r.label).second) m.classes.push_back(r.label);
    m.entries.push_back(std::move(r));
  }
  validate_manifest(m);
  return m;
}

DatasetManifest read_manifest(const fs::path& path) {
  try {
    return manifest_from_csv(io::read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

BuildResult build_dataset(const config::BuildConfig& config, unsigned jobs) {
  config::validate(config);

  BuildResult result;
  auto& manifest = result.manifest;
  manifest.global_seed = config.global_seed;
  manifest.lambda = config.lambda;

  std::unordered_map<std::string, std::string> dir_owner;
  for (const auto& in : config.inputs) {
    const auto [it, inserted] = dir_owner.emplace(lowercase(in.label), in.label);
    if (inserted) {
      manifest.classes.push_back(in.label);
    } else if (it->second != in.label) {
      throw Error(ErrorCode::DuplicateClassDirectoryCollision,
                  "labels '" + it->second + "' and '" + in.label +
                      "' map to the same directory on case-insensitive filesystems");
    }
  }

  const fs::path out_dir = config.resolve(config.output_dir);
  try {
    fs::create_directories(out_dir);
    for (const auto& label : manifest.classes) {
      fs::create_directories(out_dir / label);
      remove_stale_images(out_dir / label);
    }
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::IoError, e.what());
  }

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  for (std::size_t source = 0; source < config.inputs.size(); ++source) {
    const auto& in = config.inputs[source];
    const fs::path path = config.resolve(in.path);
    pcap::ReadResult read;
    try {
      read = pcap::read_packets(path);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    if (read.error) {
      throw Error(read.error->code(), path.string() + ": " + read.error->what());
    }
    result.skipped_empty += read.skipped_empty;

    std::size_t count = read.packets.size();
    if (in.max_packets) count = std::min<std::size_t>(count, *in.max_packets);

    const std::size_t first = manifest.entries.size();
    for (std::size_t p = 0; p < count; ++p) {
      SampleRecord r;
      r.sample_id = make_sample_id(in.label, source, p);
      r.label = in.label;
      r.source_pcap = in.path.generic_string();
      r.packet_index = p;
      r.image_relpath = in.label + "/" + r.sample_id + ".png";
      const std::size_t len = read.packets[p].data.size();
      r.rows = (len + imaging::kMatrixWidth - 1) / imaging::kMatrixWidth;
      r.pad_count = r.rows * imaging::kMatrixWidth - len;
      r.shuffle_seed = derive_image_seed(config.global_seed, source, p);
      manifest.entries.push_back(std::move(r));
    }

    std::vector<Job> work;
    work.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
      work.push_back({&read.packets[p], &manifest.entries[first + p]});
    }
    run_jobs(work, out_dir, config.lambda, jobs);
  }

  validate_manifest(manifest);
  result.manifest_path = out_dir / kManifestFile;
  io::write_text_file(result.manifest_path, manifest_to_csv(manifest));
  return result;
}

std::optional<std::size_t> FoldAssignment::fold_of(std::string_view sample_id) const {
  for (const auto& e : entries) {
    if (e.sample_id == sample_id) return e.fold;
  }
  return std::nullopt;
}

std::map<std::string, std::vector<std::size_t>> FoldAssignment::class_fold_counts() const {
  std::map<std::string, std::vector<std::size_t>> counts;
  for (const auto& e : entries) {
    auto& row = counts[e.label];
    row.resize(k, 0);
    ++row[e.fold];
  }
  return counts;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto& e : entries) ++sizes[e.fold];
  return sizes;
}

FoldAssignment stratified_kfold(const DatasetManifest& manifest, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorCode::KTooSmall, "k must be >= 2, got " + std::to_string(k));
  }
  validate_manifest(manifest);

  std::vector<std::vector<std::size_t>> members(manifest.classes.size());
  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
    class_index.emplace(manifest.classes[c], c);
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    members[class_index.at(manifest.entries[i].label)].push_back(i);
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < k) {
      throw Error(ErrorCode::KTooLarge,
                  "class " + manifest.classes[c] + " has " +
                      std::to_string(members[c].size()) + " samples, fewer than k=" +
                      std::to_string(k));
    }
  }

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.entries.resize(manifest.entries.size());
  std::size_t deal = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& idx = members[c];
    SplitMix64 rng(mix_seed(seed, c));
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.next_below(i)]);
    }
    for (const std::size_t i : idx) {
      const auto& e = manifest.entries[i];
      out.entries[i] = {e.sample_id, e.label, e.image_relpath, deal % k};
      ++deal;
    }
  }
  return out;
}

SplitFiles export_split(const FoldAssignment& assignment, std::size_t fold,
                        const fs::path& out_dir) {
  if (fold >= assignment.k) {
    throw Error(ErrorCode::FoldOutOfRange, "fold " + std::to_string(fold) +
                                               " is outside 0.." +
                                               std::to_string(assignment.k - 1));
  }
  std::string train = csv::join(kSplitHeader) + "\n";
  std::string test = train;
  SplitFiles files;
  for (const auto& e : assignment.entries) {
    const bool held_out = e.fold == fold;
    (held_out ? test : train) += csv::join({e.sample_id, e.label, e.image_relpath}) + "\n";
    ++(held_out ? files.test_rows : files.train_rows);
  }
  try {
    fs::create_directories(out_dir);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::IoError, e.what());
  }
  files.train = out_dir / "train.csv";
  files.test = out_dir / "test.csv";
  io::write_text_file(files.train, train);
  io::write_text_file(files.test, test);
  return files;
}

}  // namespace packetvision::dataset
