#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace packetvision::evalstats {

inline const std::vector<std::string> kPredictionsHeader = {
    "fold", "sample_id", "true_label", "predicted_label"};

struct PredictionRecord {
  std::size_t fold = 0;
  std::string sample_id;
  std::string true_label;
  std::string predicted_label;
};

std::vector<PredictionRecord> predictions_from_csv(std::string_view text);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

/// Sorted union of every true and predicted label.
std::vector<std::string> labels_of(std::span<const PredictionRecord> records);

/// Ordered classes; counts[i][j] = records of true class i predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);
  ConfusionMatrix(std::vector<std::string> classes,
                  std::vector<std::vector<std::uint64_t>> counts);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return classes_.size(); }

  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_.size() + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1) {
    counts_[truth * classes_.size() + predicted] += n;
  }

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t predicted) const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::uint64_t> counts_;
};

/// Throws EmptyInput or UnknownLabel.
ConfusionMatrix confusion_from_predictions(std::span<const PredictionRecord> records,
                                           const std::vector<std::string>& classes);

struct ClassMetrics {
  std::string label;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  /// Set when a zero denominator forced a metric to 0.
  bool no_predictions = false;
  bool no_samples = false;
};

/// Percentages in [0, 100], full precision; round only for display.
struct MetricsReport {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::vector<ClassMetrics> per_class;

  bool degenerate() const;
};

/// Macro (unweighted) precision, recall and F1 over classes.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Field-wise arithmetic mean. Per-class rows are averaged by label.
MetricsReport aggregate_folds(std::span<const MetricsReport> reports);

/// "95.40"
std::string format_percent(double value);

enum class Decision { accept_h0, reject_h0 };
std::string_view to_string(Decision d);

struct ZTestResult {
  double z_obs = 0;
  double z_crit = 0;
  double alpha = 0;
  double mean_a = 0;
  double mean_b = 0;
  double variance_a = 0;
  double variance_b = 0;
  /// Both sample variances were zero; z_obs is 0 or +/-infinity.
  bool degenerate_variance = false;
  Decision decision = Decision::accept_h0;
};

/// Upper one-tailed standard normal quantile: P(Z > z) = alpha.
double upper_critical_value(double alpha);

/// Two-sample Z test of H0: mean_a <= mean_b against Ha: mean_a > mean_b,
/// with Bessel-corrected sample variances.
ZTestResult ztest(std::span<const double> samples_a, std::span<const double> samples_b,
                  double alpha = 0.05);

/// One value per line; blank lines and '#' comments are ignored.
std::vector<double> parse_sample_list(std::string_view text);
std::vector<double> read_sample_list(const std::filesystem::path& path);

}  // namespace packetvision::evalstats
