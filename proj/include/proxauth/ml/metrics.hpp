#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace proxauth::ml {

/// Authentic is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Fractions in [0, 1]; nullopt where the denominator is zero.
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> f1;
};

/// Throws MlError("EmptyMatrix") when the matrix holds no samples.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

/// Three decimals, or "undefined".
std::string format_metric(const std::optional<double>& value);

std::ostream& operator<<(std::ostream& os, const ConfusionMatrix& cm);

}  // namespace proxauth::ml
