#include <iomanip>
#include <ostream>
#include <sstream>

#include "proxauth/ml/common.hpp"
#include "proxauth/ml/metrics.hpp"

namespace proxauth::ml {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MlError("EmptyMatrix", "confusion matrix holds no samples");
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  if (r.precision && r.sensitivity) {
    const double sum = *r.precision + *r.sensitivity;
    r.f1 = sum == 0.0 ? 0.0 : 2.0 * (*r.precision * *r.sensitivity) / sum;
  }
  return r;
}

std::string format_metric(const std::optional<double>& value) {
  if (!value) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *value;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const ConfusionMatrix& cm) {
  return os << "tp=" << cm.tp << " tn=" << cm.tn << " fp=" << cm.fp << " fn=" << cm.fn;
}

}  // namespace proxauth::ml
