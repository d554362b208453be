#include "maat/confusion.hpp"

#include <cmath>

#include "maat/errors.hpp"

namespace maat {

ConfusionCounts confusion(std::span<const Label> truth,
                          std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw ValidationError("confusion: label vectors differ in length");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    counts.record(truth[i], predicted[i]);
  }
  return counts;
}

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);
  const double d1 = tp + fp;
  const double d2 = tp + fn;
  const double d3 = tn + fp;
  const double d4 = tn + fn;
  if (d1 == 0 || d2 == 0 || d3 == 0 || d4 == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
}

double accuracy(const ConfusionCounts& c) {
  const std::int64_t total = c.total();
  if (total == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

}  // namespace maat
