#include "pnnkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "pnnkit/common.hpp"

namespace pnnkit {

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw ValidationError("accuracy: prediction/label length mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

Matrix confusion_matrix(const std::vector<int>& predictions,
                        const std::vector<int>& labels, int class_count) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("confusion: prediction/label length mismatch");
  }
  Matrix cm(static_cast<std::size_t>(class_count),
            static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count || predictions[i] < 0 ||
        predictions[i] >= class_count) {
      throw ValidationError("confusion: class index out of range");
    }
    cm(static_cast<std::size_t>(labels[i]),
       static_cast<std::size_t>(predictions[i])) += 1.0;
  }
  return cm;
}

double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& labels, int class_count) {
  const Matrix cm = confusion_matrix(predictions, labels, class_count);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < class_count; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    double tp = cm(cc, cc), fp = 0.0, fn = 0.0, support = 0.0;
    for (int o = 0; o < class_count; ++o) {
      const auto oo = static_cast<std::size_t>(o);
      support += cm(cc, oo);
      if (o != c) {
        fn += cm(cc, oo);
        fp += cm(oo, cc);
      }
    }
    if (support == 0.0) continue;  // class absent from the labels
    ++present;
    const double denom = 2.0 * tp + fp + fn;
    sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
  }
  if (present == 0) throw ValidationError("macro_f1: no class present");
  return sum / present;
}

double auroc_ovr_macro(const Matrix& scores, const std::vector<int>& labels) {
  if (scores.rows != labels.size() || scores.rows == 0) {
    throw ValidationError("auroc: score/label length mismatch");
  }
  const std::size_t n = scores.rows;
  const int class_count = static_cast<int>(scores.cols);
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      throw ValidationError("auroc: label out of range");
    }
  }

  double sum = 0.0;
  int valid = 0;
  std::vector<std::size_t> order(n);
  for (int c = 0; c < class_count; ++c) {
    std::size_t positives = 0;
    for (int y : labels) {
      if (y == c) ++positives;
    }
    if (positives == 0 || positives == n) continue;

    std::iota(order.begin(), order.end(), 0);
    const auto cc = static_cast<std::size_t>(c);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores(a, cc) < scores(b, cc);
    });
    // Midranks over tied scores, then the Mann-Whitney identity.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && scores(order[j + 1], cc) == scores(order[i], cc)) ++j;
      const double midrank = (static_cast<double>(i) + static_cast<double>(j)) /
                                 2.0 +
                             1.0;
      for (std::size_t k = i; k <= j; ++k) {
        if (labels[order[k]] == c) positive_rank_sum += midrank;
      }
      i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double neg = static_cast<double>(n) - p;
    sum += (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * neg);
    ++valid;
  }
  if (valid == 0) {
    throw ValidationError("auroc: no class has both positives and negatives");
  }
  return sum / valid;
}

EvalReport evaluate(const Matrix& scores, const std::vector<int>& labels) {
  if (scores.rows != labels.size() || scores.rows == 0) {
    throw ValidationError("evaluate: score/label length mismatch");
  }
  const int class_count = static_cast<int>(scores.cols);
  std::vector<int> predictions(scores.rows);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.cols; ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    predictions[i] = static_cast<int>(best);
  }

  EvalReport report;
  report.accuracy = accuracy(predictions, labels);
  report.micro_f1 = report.accuracy;  // single-label micro-F1 identity
  report.macro_f1 = macro_f1(predictions, labels, class_count);
  report.auroc = auroc_ovr_macro(scores, labels);
  report.confusion = confusion_matrix(predictions, labels, class_count);
  report.precision.assign(static_cast<std::size_t>(class_count), 0.0);
  report.recall.assign(static_cast<std::size_t>(class_count), 0.0);
  for (int c = 0; c < class_count; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    double tp = report.confusion(cc, cc), row = 0.0, col = 0.0;
    for (int o = 0; o < class_count; ++o) {
      row += report.confusion(cc, static_cast<std::size_t>(o));
      col += report.confusion(static_cast<std::size_t>(o), cc);
    }
    report.precision[cc] = col > 0.0 ? tp / col : 0.0;
    report.recall[cc] = row > 0.0 ? tp / row : 0.0;
    if (row == 0.0) report.excluded_classes.push_back(c);
  }
  return report;
}

void EvalReport::write(std::ostream& os) const {
  os << "accuracy = " << accuracy << '\n'
     << "macro_f1 = " << macro_f1 << '\n'
     << "micro_f1 = " << micro_f1 << '\n'
     << "auroc = " << auroc << '\n';
  if (!excluded_classes.empty()) {
    os << "excluded_classes =";
    for (int c : excluded_classes) os << ' ' << c;
    os << '\n';
  }
  os << "confusion_matrix:\n";
  for (std::size_t r = 0; r < confusion.rows; ++r) {
    for (std::size_t c = 0; c < confusion.cols; ++c) {
      os << (c ? " " : "") << confusion(r, c);
    }
    os << '\n';
  }
}

namespace {

MetricStats stats_of(const std::vector<double>& xs) {
  MetricStats s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
           static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

RunStats run_stats(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ValidationError("run_stats: no reports");
  std::vector<double> acc, f1, auc;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    f1.push_back(r.macro_f1);
    auc.push_back(r.auroc);
  }
  RunStats rs;
  rs.runs = static_cast<int>(reports.size());
  rs.accuracy = stats_of(acc);
  rs.macro_f1 = stats_of(f1);
  rs.auroc = stats_of(auc);
  return rs;
}

}  // namespace pnnkit
