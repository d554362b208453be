#include "maat/strategies.hpp"

#include <cmath>
#include <cstdio>

#include "maat/errors.hpp"

namespace maat {

namespace {

std::string percent_name(double p) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "vt>=%g%%", p * 100.0);
  return buffer;
}

}  // namespace

Label label_count_threshold(const ScanReport& report, int t) {
  if (t < 1) throw ValidationError("count threshold must be >= 1");
  return report.positives >= t ? Label::Malicious : Label::Benign;
}

Label label_percent_threshold(const ScanReport& report, double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw ValidationError("percent threshold must be in (0, 1]");
  }
  if (report.total <= 0) return Label::Benign;
  const double fraction =
      static_cast<double>(report.positives) / static_cast<double>(report.total);
  return fraction >= p ? Label::Malicious : Label::Benign;
}

Label label_subset_threshold(const ScanReport& report,
                             const std::set<std::string>& scanners, int t) {
  if (t < 1) throw ValidationError("subset threshold must be >= 1");
  int detections = 0;
  for (const auto& scanner : scanners) {
    if (verdict_of(report, scanner) == Verdict::Malicious) ++detections;
    if (detections >= t) return Label::Malicious;
  }
  return Label::Benign;
}

CountThreshold::CountThreshold(int t)
    : threshold_(t), name_("vt>=" + std::to_string(t)) {
  if (t < 1) throw ValidationError("count threshold must be >= 1");
}

PercentThreshold::PercentThreshold(double p)
    : fraction_(p), name_(percent_name(p)) {
  if (!(p > 0.0) || p > 1.0) {
    throw ValidationError("percent threshold must be in (0, 1]");
  }
}

SubsetThreshold::SubsetThreshold(std::set<std::string> scanners, int t,
                                 std::string name)
    : scanners_(std::move(scanners)), threshold_(t), name_(std::move(name)) {
  if (threshold_ < 1 ||
      threshold_ > static_cast<int>(scanners_.size())) {
    throw ValidationError(
        "subset threshold must satisfy 1 <= t <= |scanners|");
  }
  if (name_.empty()) {
    name_ = "subset>=" + std::to_string(threshold_) + "/" +
            std::to_string(scanners_.size());
  }
}

BruteForceResult brute_force_threshold(const Snapshot& snapshot,
                                       const GroundTruth& truth, int t_max) {
  if (truth.labels.empty()) {
    throw ValidationError("brute-force threshold search needs a non-empty "
                          "ground truth");
  }
  if (t_max < 1) throw ValidationError("t_max must be >= 1");

  // Gather (positives, truth) pairs once; each threshold is then a scan.
  std::vector<std::pair<int, Label>> apps;
  apps.reserve(truth.labels.size());
  for (const auto& [app_id, label] : truth.labels) {
    const auto it = snapshot.reports.find(app_id);
    if (it == snapshot.reports.end()) {
      throw ValidationError("brute-force threshold search: app " + app_id +
                            " missing from snapshot " +
                            snapshot.date.to_string());
    }
    apps.emplace_back(it->second.positives, label);
  }

  BruteForceResult best{1, -2.0};
  for (int t = 1; t <= t_max; ++t) {
    ConfusionCounts counts;
    for (const auto& [positives, label] : apps) {
      counts.record(label,
                    positives >= t ? Label::Malicious : Label::Benign);
    }
    const double score = mcc(counts);
    if (score > best.mcc) best = {t, score};
  }
  return best;
}

const std::set<std::string>& drebin_scanners() {
  static const std::set<std::string> scanners = {
      "AntiVir", "AVG",       "BitDefender", "ClamAV", "ESET",
      "F-Secure", "Kaspersky", "McAfee",      "Panda",  "Sophos"};
  return scanners;
}

std::shared_ptr<LabelingStrategy> make_drebin_strategy() {
  return std::make_shared<SubsetThreshold>(drebin_scanners(), 2, "drebin");
}

}  // namespace maat
