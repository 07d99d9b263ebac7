#include "newsframe/metrics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace {

void check_lengths(std::span<const int> gold, std::span<const int> pred) {
    if (gold.size() != pred.size()) {
        throw UsageError("gold has " + std::to_string(gold.size()) + " labels but pred has " +
                         std::to_string(pred.size()));
    }
}

}  // namespace

double micro_accuracy(std::span<const int> gold, std::span<const int> pred) {
    check_lengths(gold, pred);
    if (gold.empty()) throw UsageError("accuracy of an empty label set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i];
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

ClassScore per_class_f1(std::span<const int> gold, std::span<const int> pred, int cls) {
    check_lengths(gold, pred);
    long tp = 0, fp = 0, fn = 0;
    ClassScore s;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool g = gold[i] == cls, p = pred[i] == cls;
        tp += g && p;
        fp += !g && p;
        fn += g && !p;
        s.support += g;
    }
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.defined = s.precision + s.recall > 0.0;
    s.f1 = s.defined ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

std::vector<std::vector<long>> confusion_matrix(std::span<const int> gold, std::span<const int> pred, int num_classes) {
    check_lengths(gold, pred);
    std::vector<std::vector<long>> m(static_cast<std::size_t>(num_classes),
                                     std::vector<long>(static_cast<std::size_t>(num_classes), 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] < 0 || gold[i] >= num_classes || pred[i] < 0 || pred[i] >= num_classes) {
            throw UsageError("label outside 0.." + std::to_string(num_classes - 1) + " at position " + std::to_string(i));
        }
        ++m[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
    }
    return m;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace newsframe
