#include "packetvision/evalstats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "packetvision/csv.hpp"
#include "packetvision/error.hpp"
#include "packetvision/io.hpp"

namespace packetvision::evalstats {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::pair<double, double> mean_and_sample_variance(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1)};
}

}  // namespace

std::vector<PredictionRecord> predictions_from_csv(std::string_view text) {
  const auto table = csv::parse(text, kPredictionsHeader);
  std::vector<PredictionRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    PredictionRecord r;
    const auto* end = row[0].data() + row[0].size();
    const auto [ptr, ec] = std::from_chars(row[0].data(), end, r.fold);
    if (row[0].empty() || ec != std::errc{} || ptr != end) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(table.line_numbers[i]) +
                                               ": bad fold '" + row[0] + "'");
    }
    r.sample_id = row[1];
    r.true_label = row[2];
    r.predicted_label = row[3];
    if (r.true_label.empty() || r.predicted_label.empty()) {
      throw Error(ErrorCode::MalformedCsv,
                  "line " + std::to_string(table.line_numbers[i]) + ": empty label");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  try {
    return predictions_from_csv(io::read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::string> labels_of(std::span<const PredictionRecord> records) {
  std::set<std::string> labels;
  for (const auto& r : records) {
    labels.insert(r.true_label);
    labels.insert(r.predicted_label);
  }
  return {labels.begin(), labels.end()};
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {
  if (std::set<std::string>(classes_.begin(), classes_.end()).size() != classes_.size()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate class in confusion matrix");
  }
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : ConfusionMatrix(std::move(classes)) {
  if (counts.size() != size()) {
    throw Error(ErrorCode::InvalidArgument, "confusion matrix must be square");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (counts[i].size() != size()) {
      throw Error(ErrorCode::InvalidArgument, "confusion matrix must be square");
    }
    for (std::size_t j = 0; j < size(); ++j) add(i, j, counts[i][j]);
  }
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += at(truth, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, predicted);
  return s;
}

ConfusionMatrix confusion_from_predictions(std::span<const PredictionRecord> records,
                                           const std::vector<std::string>& classes) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no prediction records");
  ConfusionMatrix cm(classes);
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(cm.classes()[i], i);
  auto lookup = [&](const std::string& label, const PredictionRecord& r) {
    const auto it = index.find(label);
    if (it == index.end()) {
      throw Error(ErrorCode::UnknownLabel,
                  "label '" + label + "' in sample " + r.sample_id + " is not a known class");
    }
    return it->second;
  };
  for (const auto& r : records) {
    cm.add(lookup(r.true_label, r), lookup(r.predicted_label, r));
  }
  return cm;
}

bool MetricsReport::degenerate() const {
  for (const auto& c : per_class) {
    if (c.no_predictions || c.no_samples) return true;
  }
  return false;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "confusion matrix is empty");
  MetricsReport report;
  report.accuracy = 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t i = 0; i < cm.size(); ++i) {
    ClassMetrics c;
    c.label = cm.classes()[i];
    const auto tp = static_cast<double>(cm.at(i, i));
    const auto predicted = cm.col_sum(i);
    const auto actual = cm.row_sum(i);
    c.no_predictions = predicted == 0;
    c.no_samples = actual == 0;
    const double p = c.no_predictions ? 0.0 : tp / static_cast<double>(predicted);
    const double r = c.no_samples ? 0.0 : tp / static_cast<double>(actual);
    const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    c.precision = 100.0 * p;
    c.recall = 100.0 * r;
    c.f1 = 100.0 * f1;
    report.precision += c.precision;
    report.recall += c.recall;
    report.f1 += c.f1;
    report.per_class.push_back(std::move(c));
  }
  const auto n = static_cast<double>(cm.size());
  report.precision /= n;
  report.recall /= n;
  report.f1 /= n;
  return report;
}

MetricsReport aggregate_folds(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports to aggregate");
  MetricsReport out;
  std::vector<std::size_t> seen;
  for (const auto& r : reports) {
    out.accuracy += r.accuracy;
    out.precision += r.precision;
    out.recall += r.recall;
    out.f1 += r.f1;
    for (const auto& c : r.per_class) {
      auto it = std::find_if(out.per_class.begin(), out.per_class.end(),
                             [&](const ClassMetrics& m) { return m.label == c.label; });
      if (it == out.per_class.end()) {
        out.per_class.push_back({.label = c.label});
        seen.push_back(0);
        it = std::prev(out.per_class.end());
      }
      it->precision += c.precision;
      it->recall += c.recall;
      it->f1 += c.f1;
      it->no_predictions = it->no_predictions || c.no_predictions;
      it->no_samples = it->no_samples || c.no_samples;
      ++seen[static_cast<std::size_t>(it - out.per_class.begin())];
    }
  }
  const auto n = static_cast<double>(reports.size());
  out.accuracy /= n;
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  for (std::size_t i = 0; i < out.per_class.size(); ++i) {
    const auto m = static_cast<double>(seen[i]);
    out.per_class[i].precision /= m;
    out.per_class[i].recall /= m;
    out.per_class[i].f1 /= m;
  }
  return out;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string_view to_string(Decision d) {
  return d == Decision::reject_h0 ? "reject_h0" : "accept_h0";
}

double upper_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, alpha));
}

ZTestResult ztest(std::span<const double> samples_a, std::span<const double> samples_b,
                  double alpha) {
  if (samples_a.size() < 2 || samples_b.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "each sample needs at least 2 values");
  }
  ZTestResult z;
  z.alpha = alpha;
  z.z_crit = upper_critical_value(alpha);
  std::tie(z.mean_a, z.variance_a) = mean_and_sample_variance(samples_a);
  std::tie(z.mean_b, z.variance_b) = mean_and_sample_variance(samples_b);

  const double se2 = z.variance_a / static_cast<double>(samples_a.size()) +
                     z.variance_b / static_cast<double>(samples_b.size());
  const double diff = z.mean_a - z.mean_b;
  if (se2 == 0.0) {
    z.degenerate_variance = true;
    z.z_obs = diff == 0.0 ? 0.0
                          : std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    z.z_obs = diff / std::sqrt(se2);
  }
  z.decision = z.z_obs > z.z_crit ? Decision::reject_h0 : Decision::accept_h0;
  return z;
}

std::vector<double> parse_sample_list(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string value = trim(line);
    if (value.empty()) continue;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::MalformedCsv,
                  "line " + std::to_string(line_no) + ": not a number '" + value + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> read_sample_list(const std::filesystem::path& path) {
  try {
    return parse_sample_list(io::read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace packetvision::evalstats
