#pragma once

#include <cstdint>
#include <span>

#include "maat/label.hpp"

namespace maat {

/// Binary confusion counts; malicious is the positive class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  void record(Label truth, Label predicted) {
    if (is_malicious(truth)) {
      is_malicious(predicted) ? ++tp : ++fn;
    } else {
      is_malicious(predicted) ? ++fp : ++tn;
    }
  }

  std::int64_t total() const { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const Label> truth,
                          std::span<const Label> predicted);

/// Matthews correlation coefficient,
/// (tp*tn - fp*fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn)).
/// Returns 0 when any denominator factor is 0.
double mcc(const ConfusionCounts& c);

/// (tp + tn) / (tp + tn + fp + fn); 0 on empty counts.
double accuracy(const ConfusionCounts& c);

}  // namespace maat
