#pragma once

#include <memory>
#include <set>
#include <string>

#include "maat/confusion.hpp"
#include "maat/report.hpp"

namespace maat {

/// A rule mapping one scan report to a binary label. Implementations must be
/// deterministic and safe to call concurrently. as_of only matters for
/// strategies with report-age features; threshold strategies ignore it.
class LabelingStrategy {
 public:
  virtual ~LabelingStrategy() = default;

  virtual const std::string& name() const noexcept = 0;
  virtual Label label(const ScanReport& report, Date as_of) const = 0;

  Label label(const ScanReport& report) const {
    return label(report, report.scan_date);
  }
};

/// Malicious iff positives >= t.
Label label_count_threshold(const ScanReport& report, int t);

/// Malicious iff total > 0 and positives/total >= p. Empty reports are benign.
Label label_percent_threshold(const ScanReport& report, double p);

/// Malicious iff at least t scanners of the subset return Malicious.
/// NotScanned entries never count toward the threshold.
Label label_subset_threshold(const ScanReport& report,
                             const std::set<std::string>& scanners, int t);

/// "vt>=N". Requires t >= 1.
class CountThreshold final : public LabelingStrategy {
 public:
  explicit CountThreshold(int t);

  const std::string& name() const noexcept override { return name_; }
  Label label(const ScanReport& report, Date) const override {
    return label_count_threshold(report, threshold_);
  }
  int threshold() const { return threshold_; }

 private:
  int threshold_;
  std::string name_;
};

/// "vt>=P%". Requires 0 < p <= 1.
class PercentThreshold final : public LabelingStrategy {
 public:
  explicit PercentThreshold(double p);

  const std::string& name() const noexcept override { return name_; }
  Label label(const ScanReport& report, Date) const override {
    return label_percent_threshold(report, fraction_);
  }
  double fraction() const { return fraction_; }

 private:
  double fraction_;
  std::string name_;
};

/// Fixed scanner subset with a count threshold. Requires 1 <= t <= |scanners|.
class SubsetThreshold final : public LabelingStrategy {
 public:
  SubsetThreshold(std::set<std::string> scanners, int t,
                  std::string name = {});

  const std::string& name() const noexcept override { return name_; }
  Label label(const ScanReport& report, Date) const override {
    return label_subset_threshold(report, scanners_, threshold_);
  }
  const std::set<std::string>& scanners() const { return scanners_; }
  int threshold() const { return threshold_; }

 private:
  std::set<std::string> scanners_;
  int threshold_;
  std::string name_;
};

struct BruteForceResult {
  int threshold = 1;
  double mcc = 0.0;
};

/// Evaluates CountThreshold(t) for t = 1..t_max against the ground truth by
/// MCC and returns the argmax; plateaus break toward the smallest t. Every
/// ground-truth app must be present in the snapshot.
BruteForceResult brute_force_threshold(const Snapshot& snapshot,
                                       const GroundTruth& truth,
                                       int t_max = 60);

/// The ten classic engines used by the drebin labeling rule.
const std::set<std::string>& drebin_scanners();

/// SubsetThreshold over drebin_scanners() with t = 2, named "drebin".
std::shared_ptr<LabelingStrategy> make_drebin_strategy();

}  // namespace maat
