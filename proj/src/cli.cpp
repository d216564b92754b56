#include "packetvision/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "packetvision/config.hpp"
#include "packetvision/dataset.hpp"
#include "packetvision/error.hpp"
#include "packetvision/evalstats.hpp"
#include "packetvision/pcap.hpp"

namespace packetvision::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  unsigned jobs = 0;

  std::string manifest;
  long long k = 0;
  std::uint64_t seed = 0;
  std::string out;

  std::string predictions;
  bool per_fold = false;

  std::string a, b;
  double alpha = 0.05;

  std::string pcap;
};

std::uint64_t parse_seed_override(const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw UsageError(std::string(kSeedEnvVar) + " must be a non-negative integer, got '" +
                     text + "'");
  }
  return v;
}

std::string metrics_row(std::string_view name, const evalstats::MetricsReport& r) {
  std::ostringstream s;
  s << std::left << std::setw(8) << name << std::right << std::setw(10)
    << evalstats::format_percent(r.accuracy) << std::setw(11)
    << evalstats::format_percent(r.precision) << std::setw(9)
    << evalstats::format_percent(r.recall) << std::setw(9)
    << evalstats::format_percent(r.f1) << "\n";
  return s.str();
}

CommandOutcome do_build(const Options& o, const Environment& env, std::ostream& err) {
  auto cfg = config::load_build_config(o.config);
  std::ostringstream s;
  if (env.seed_override) {
    cfg.global_seed = parse_seed_override(*env.seed_override);
    s << "seed override from " << kSeedEnvVar << ": " << cfg.global_seed << "\n";
  }
  const unsigned jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  const auto result = dataset::build_dataset(cfg, jobs);
  if (result.skipped_empty) {
    err << "skipped " << result.skipped_empty << " zero-length record(s)\n";
  }
  const auto& m = result.manifest;
  s << "built " << m.entries.size() << " images in "
    << cfg.resolve(cfg.output_dir).generic_string() << "\n";
  s << "global_seed " << cfg.global_seed << ", lambda " << cfg.lambda << "\n";
  const auto counts = m.class_counts();
  for (const auto& label : m.classes) {
    s << "  " << std::left << std::setw(16) << label << std::right << std::setw(8)
      << counts.at(label) << "\n";
  }
  s << "  " << std::left << std::setw(16) << "Total" << std::right << std::setw(8)
    << m.entries.size() << "\n";
  s << "manifest " << result.manifest_path.generic_string() << "\n";
  return {kSuccess, s.str(), {result.manifest_path}};
}

CommandOutcome do_split(const Options& o) {
  if (o.k < 2) throw UsageError("k must be >= 2");
  const auto manifest = dataset::read_manifest(o.manifest);
  const auto folds = dataset::stratified_kfold(manifest, static_cast<std::size_t>(o.k), o.seed);
  CommandOutcome outcome;
  std::ostringstream s;
  s << "k " << folds.k << ", seed " << folds.seed << ", " << folds.entries.size()
    << " samples\n";
  const auto counts = folds.class_fold_counts();
  for (std::size_t f = 0; f < folds.k; ++f) {
    const fs::path dir = fs::path(o.out) / ("fold_" + std::to_string(f));
    const auto files = dataset::export_split(folds, f, dir);
    outcome.outputs.push_back(files.train);
    outcome.outputs.push_back(files.test);
    s << "fold " << f << ": test " << files.test_rows << ", train " << files.train_rows
      << " (";
    bool first = true;
    for (const auto& label : manifest.classes) {
      s << (first ? "" : ", ") << label << " " << counts.at(label)[f];
      first = false;
    }
    s << ")\n";
  }
  outcome.summary = s.str();
  return outcome;
}

CommandOutcome do_metrics(const Options& o) {
  const auto records = evalstats::read_predictions(o.predictions);
  if (records.empty()) {
    throw Error(ErrorCode::EmptyInput, o.predictions + ": no prediction rows");
  }
  const auto classes = evalstats::labels_of(records);
  std::map<std::size_t, std::vector<evalstats::PredictionRecord>> by_fold;
  for (const auto& r : records) by_fold[r.fold].push_back(r);

  std::vector<evalstats::MetricsReport> reports;
  std::ostringstream s;
  s << std::left << std::setw(8) << "fold" << std::right << std::setw(10) << "accuracy"
    << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1"
    << "\n";
  for (const auto& [fold, rows] : by_fold) {
    reports.push_back(evalstats::metrics(evalstats::confusion_from_predictions(rows, classes)));
    if (o.per_fold) s << metrics_row(std::to_string(fold), reports.back());
  }
  const auto mean = evalstats::aggregate_folds(reports);
  s << metrics_row("mean", mean);
  s << "\n" << std::left << std::setw(16) << "class" << std::right << std::setw(11)
    << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1" << "\n";
  for (const auto& c : mean.per_class) {
    s << std::left << std::setw(16) << c.label << std::right << std::setw(11)
      << evalstats::format_percent(c.precision) << std::setw(9)
      << evalstats::format_percent(c.recall) << std::setw(9)
      << evalstats::format_percent(c.f1);
    if (c.no_predictions || c.no_samples) s << "  (zero denominator)";
    s << "\n";
  }
  s << by_fold.size() << " fold(s), " << records.size() << " predictions, "
    << classes.size() << " classes\n";
  return {kSuccess, s.str(), {}};
}

CommandOutcome do_ztest(const Options& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  const auto a = evalstats::read_sample_list(o.a);
  const auto b = evalstats::read_sample_list(o.b);
  const auto z = evalstats::ztest(a, b, o.alpha);
  std::ostringstream s;
  s << std::fixed;
  s << "n_a      " << a.size() << "\n";
  s << "n_b      " << b.size() << "\n";
  s << "mean_a   " << std::setprecision(2) << z.mean_a << "\n";
  s << "mean_b   " << z.mean_b << "\n";
  s << "var_a    " << std::setprecision(4) << z.variance_a << "\n";
  s << "var_b    " << z.variance_b << "\n";
  s << "alpha    " << z.alpha << "\n";
  s << "z_obs    " << z.z_obs << (z.degenerate_variance ? "  (zero variance)" : "") << "\n";
  s << "z_crit   " << z.z_crit << "\n";
  s << "decision " << evalstats::to_string(z.decision) << "\n";
  return {kSuccess, s.str(), {}};
}

CommandOutcome do_inspect(const Options& o, std::ostream& err) {
  const auto read = pcap::read_packets(o.pcap);
  const auto& info = read.info;
  std::ostringstream s;
  s << "file        " << o.pcap << "\n";
  s << "byte order  " << (info.byte_order == pcap::ByteOrder::little ? "little" : "big")
    << (info.nanosecond_timestamps ? ", nanosecond timestamps" : "") << "\n";
  s << "version     " << info.version_major << "." << info.version_minor << "\n";
  s << "snaplen     " << info.snaplen << "\n";
  s << "link type   " << info.link_type << "\n";
  s << "records     " << info.packet_count << "\n";
  s << "packets     " << read.packets.size() << "\n";
  s << "skipped     " << read.skipped_empty << " zero-length\n";

  if (!read.packets.empty()) {
    std::size_t min_len = SIZE_MAX, max_len = 0, total = 0;
    for (const auto& p : read.packets) {
      min_len = std::min(min_len, p.data.size());
      max_len = std::max(max_len, p.data.size());
      total += p.data.size();
    }
    s << "length      min " << min_len << ", max " << max_len << ", mean " << std::fixed
      << std::setprecision(1)
      << static_cast<double>(total) / static_cast<double>(read.packets.size()) << "\n";
    struct Bucket {
      std::size_t lo, hi;
    };
    const Bucket buckets[] = {{1, 64},     {65, 128},    {129, 256},       {257, 512},
                              {513, 1024}, {1025, 1514}, {1515, SIZE_MAX}};
    s << "histogram (bytes)\n";
    for (const auto& bk : buckets) {
      const auto n = std::count_if(read.packets.begin(), read.packets.end(), [&](const auto& p) {
        return p.data.size() >= bk.lo && p.data.size() <= bk.hi;
      });
      std::string label = std::to_string(bk.lo) + "-" +
                          (bk.hi == SIZE_MAX ? std::string("") : std::to_string(bk.hi));
      if (bk.hi == SIZE_MAX) label = std::to_string(bk.lo) + "+";
      s << "  " << std::left << std::setw(11) << label << std::right << std::setw(8) << n
        << "\n";
    }
  }
  if (read.error) {
    err << o.pcap << ": " << read.error->what() << "\n";
    return {kDataError, s.str(), {}};
  }
  return {kSuccess, s.str(), {}};
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::IoError ? kIoError : kDataError;
}

}  // namespace

Environment Environment::from_process() {
  Environment env;
  if (const char* v = std::getenv(kSeedEnvVar)) env.seed_override = v;
  return env;
}

CommandOutcome run(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err, const Environment& env) {
  Options o;
  CLI::App app{"Packet Vision: packet captures to image datasets, splits and evaluation",
               "packetvision"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "Image every packet of the configured captures");
  build->add_option("--config", o.config, "TOML build config")->required();
  build->add_option("--jobs", o.jobs, "Worker threads (default: number of processors)")
      ->check(CLI::PositiveNumber);

  auto* split = app.add_subcommand("split", "Write stratified k-fold train/test lists");
  split->add_option("--manifest", o.manifest, "manifest.csv from build")->required();
  split->add_option("--k", o.k, "Number of folds")->required();
  split->add_option("--seed", o.seed, "Shuffle seed")->required();
  split->add_option("--out", o.out, "Output directory")->required();

  auto* metrics = app.add_subcommand("metrics", "Confusion-matrix metrics over predictions");
  metrics->add_option("--predictions", o.predictions, "Predictions CSV")->required();
  metrics->add_flag("--per-fold", o.per_fold, "Also print every fold");

  auto* ztest = app.add_subcommand("ztest", "One-tailed two-sample Z test on fold accuracies");
  ztest->add_option("--a", o.a, "Accuracies of classifier A, one percent value per line")
      ->required();
  ztest->add_option("--b", o.b, "Accuracies of classifier B")->required();
  ztest->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Capture statistics");
  inspect->add_option("--pcap", o.pcap, "Classic pcap file")->required();

  CommandOutcome outcome;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    outcome.exit_code = code == 0 ? kSuccess : kUsageError;
    return outcome;
  }

  try {
    if (*build) {
      outcome = do_build(o, env, err);
    } else if (*split) {
      outcome = do_split(o);
    } else if (*metrics) {
      outcome = do_metrics(o);
    } else if (*ztest) {
      outcome = do_ztest(o);
    } else {
      outcome = do_inspect(o, err);
    }
  } catch (const UsageError& e) {
    err << e.what() << "\nRun with --help for more information.\n";
    outcome = {kUsageError, {}, {}};
  } catch (const Error& e) {
    err << e.what() << "\n";
    outcome = {exit_code_for(e), {}, {}};
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << "\n";
    outcome = {kIoError, {}, {}};
  }
  out << outcome.summary;
  return outcome;
}

}  // namespace packetvision::cli
