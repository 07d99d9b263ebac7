#pragma once

#include <span>
#include <vector>

namespace newsframe {

/// correct / total. Throws UsageError on a length mismatch or empty input.
double micro_accuracy(std::span<const int> gold, std::span<const int> pred);

struct ClassScore {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool defined = false;  ///< false when P + R = 0; f1 is then 0
    int support = 0;       ///< gold count
};

/// One-vs-rest scores for label `cls`.
ClassScore per_class_f1(std::span<const int> gold, std::span<const int> pred, int cls);

/// counts[g][p] over labels 0..num_classes-1.
std::vector<std::vector<long>> confusion_matrix(std::span<const int> gold, std::span<const int> pred, int num_classes);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> xs);

}  // namespace newsframe
