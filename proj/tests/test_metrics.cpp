#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pnnkit/metrics.hpp"
#include "pnnkit/rng.hpp"

using namespace pnnkit;

TEST_CASE("accuracy basics") {
  CHECK(accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(accuracy({1, 2, 0}, {0, 1, 2}) == 0.0);
  CHECK(accuracy({0, 1, 2, 2}, {0, 1, 2, 0}) == 0.75);
  CHECK_THROWS_AS(accuracy({0}, {0, 1}), ValidationError);
}

TEST_CASE("accuracy equals one minus the misclassification indicator sum") {
  Rng rng(3);
  const int classes = 5, m = 200;
  std::vector<int> pred, truth;
  for (int i = 0; i < m; ++i) {
    pred.push_back(static_cast<int>(rng.uniform_int(classes)));
    truth.push_back(static_cast<int>(rng.uniform_int(classes)));
  }
  int indicator_sum = 0;
  for (int i = 0; i < m; ++i) indicator_sum += pred[i] != truth[i] ? 1 : 0;
  CHECK(accuracy(pred, truth) ==
        doctest::Approx(1.0 - static_cast<double>(indicator_sum) / m));

  // Accuracy is always trace(confusion) / total.
  const Matrix cm = confusion_matrix(pred, truth, classes);
  double trace = 0.0, total = 0.0;
  for (int c = 0; c < classes; ++c) {
    trace += cm(static_cast<std::size_t>(c), static_cast<std::size_t>(c));
  }
  for (double v : cm.data) total += v;
  CHECK(accuracy(pred, truth) == doctest::Approx(trace / total));
}

TEST_CASE("macro F1") {
  CHECK(macro_f1({0, 1, 2}, {0, 1, 2}, 3) == doctest::Approx(1.0));

  // Binary case with TP=1, FP=1, FN=1, TN=1 per class.
  CHECK(macro_f1({0, 1, 0, 1}, {0, 0, 1, 1}, 2) == doctest::Approx(0.5));

  // A class absent from the labels does not drag the average down.
  CHECK(macro_f1({0, 1}, {0, 1}, 3) == doctest::Approx(1.0));
}

TEST_CASE("AUROC hand case: 3 of 4 pairs ordered") {
  Matrix scores(4, 2);
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  for (std::size_t i = 0; i < 4; ++i) {
    scores(i, 1) = s[i];
    scores(i, 0) = 1.0 - s[i];
  }
  const std::vector<int> labels{1, 0, 1, 0};
  CHECK(auroc_ovr_macro(scores, labels) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("AUROC of a perfect ranking is 1, of constant scores is 0.5") {
  Matrix perfect(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    perfect(i, 1) = i < 2 ? 0.9 : 0.1;
    perfect(i, 0) = 1.0 - perfect(i, 1);
  }
  CHECK(auroc_ovr_macro(perfect, {1, 1, 0, 0}) == doctest::Approx(1.0));

  Matrix flat(4, 2, 0.5);
  CHECK(auroc_ovr_macro(flat, {1, 0, 1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("AUROC is invariant under strictly monotone score transforms") {
  Rng rng(9);
  Matrix scores(20, 3);
  std::vector<int> labels;
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 3; ++j) scores(i, j) = rng.uniform();
    labels.push_back(static_cast<int>(rng.uniform_int(3)));
  }
  Matrix transformed = scores;
  for (double& v : transformed.data) v = 2.0 * v + 1.0;
  CHECK(auroc_ovr_macro(scores, labels) ==
        doctest::Approx(auroc_ovr_macro(transformed, labels)).epsilon(1e-12));
}

TEST_CASE("evaluate assembles a consistent report") {
  Matrix scores(6, 3);
  const std::vector<int> labels{0, 0, 1, 1, 2, 2};
  Rng rng(5);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 3; ++j) scores(i, j) = rng.uniform();
    scores(i, static_cast<std::size_t>(labels[i])) += 0.5;
  }
  const EvalReport report = evaluate(scores, labels);
  double trace = 0.0, total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) trace += report.confusion(c, c);
  for (double v : report.confusion.data) total += v;
  CHECK(report.accuracy == doctest::Approx(trace / total));
  CHECK(report.micro_f1 == report.accuracy);
  // Confusion rows sum to per-class test counts.
  for (std::size_t c = 0; c < 3; ++c) {
    double row = 0.0;
    for (std::size_t o = 0; o < 3; ++o) row += report.confusion(c, o);
    CHECK(row == 2.0);
  }

  std::ostringstream os;
  report.write(os);
  CHECK(os.str().find("accuracy = ") != std::string::npos);
  CHECK(os.str().find("confusion_matrix:") != std::string::npos);
}

TEST_CASE("run_stats mean and sample SD") {
  EvalReport a, b;
  a.accuracy = 0.9;
  b.accuracy = 1.0;
  const RunStats rs = run_stats({a, b});
  CHECK(rs.accuracy.mean == doctest::Approx(0.95));
  REQUIRE(rs.accuracy.sd.has_value());
  CHECK(*rs.accuracy.sd == doctest::Approx(std::sqrt(0.005)).epsilon(1e-9));

  const RunStats identical = run_stats({a, a, a});
  CHECK(*identical.accuracy.sd == doctest::Approx(0.0));

  const RunStats single = run_stats({a});
  CHECK(single.accuracy.mean == doctest::Approx(0.9));
  CHECK_FALSE(single.accuracy.sd.has_value());

  CHECK_THROWS_AS(run_stats({}), ValidationError);
}
