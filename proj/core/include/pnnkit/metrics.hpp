#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "pnnkit/common.hpp"
#include "pnnkit/tensor.hpp"

namespace pnnkit {

struct EvalReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;  // equals accuracy for single-label classification
  double auroc = 0.0;     // one-vs-rest, macro over valid classes
  Matrix confusion;       // [C x C], rows = true class
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<int> excluded_classes;  // absent from the test labels

  void write(std::ostream& os) const;
};

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels);

Matrix confusion_matrix(const std::vector<int>& predictions,
                        const std::vector<int>& labels, int class_count);

// Unweighted mean of per-class F1 over classes present in the labels; a
// present class with P + R = 0 contributes 0.
double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& labels, int class_count);

// One-vs-rest AUC per class via midrank statistics (trapezoidal ROC),
// macro-averaged over classes with both positives and negatives.
double auroc_ovr_macro(const Matrix& scores, const std::vector<int>& labels);

// Full report from per-sample class scores (e.g. softmax probabilities).
EvalReport evaluate(const Matrix& scores, const std::vector<int>& labels);

struct MetricStats {
  double mean = 0.0;
  std::optional<double> sd;  // sample SD, present for >= 2 runs
};

struct RunStats {
  int runs = 0;
  MetricStats accuracy;
  MetricStats macro_f1;
  MetricStats auroc;
};

RunStats run_stats(const std::vector<EvalReport>& reports);

}  // namespace pnnkit
