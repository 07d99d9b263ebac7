#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "newsframe/agreement.hpp"

namespace oracles {

// Pairwise formulation: observed disagreement averages over ordered pairs
// within each unit weighted by 1/(m_u - 1); expected disagreement over all
// ordered pairs of pairable values.
inline double alpha(const newsframe::Codings& c) {
    const std::size_t items = c.front().size();
    std::vector<std::vector<std::string>> units;
    for (std::size_t i = 0; i < items; ++i) {
        std::vector<std::string> v;
        for (const auto& coder : c) {
            if (coder[i]) v.push_back(*coder[i]);
        }
        if (v.size() >= 2) units.push_back(v);
    }
    std::vector<std::string> all;
    for (const auto& u : units) all.insert(all.end(), u.begin(), u.end());
    const double n = static_cast<double>(all.size());
    double d_o = 0;
    for (const auto& u : units) {
        double s = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            for (std::size_t j = 0; j < u.size(); ++j) s += i != j && u[i] != u[j];
        }
        d_o += s / static_cast<double>(u.size() - 1);
    }
    d_o /= n;
    double d_e = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j < all.size(); ++j) d_e += i != j && all[i] != all[j];
    }
    d_e /= n * (n - 1);
    return 1.0 - d_o / d_e;
}

/// Raw-sum formula.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline double accuracy(const std::vector<int>& gold, const std::vector<int>& pred) {
    int eq = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) eq += gold[i] == pred[i];
    return static_cast<double>(eq) / static_cast<double>(gold.size());
}

/// 2 TP / (2 TP + FP + FN), 0 without true positives.
inline double f1(const std::vector<int>& gold, const std::vector<int>& pred, int c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        tp += gold[i] == c && pred[i] == c;
        fp += gold[i] != c && pred[i] == c;
        fn += gold[i] == c && pred[i] != c;
    }
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

/// -(1 - p_t)^gamma ln p_t from logits, via a max-shifted log-sum-exp.
inline double focal(const std::vector<double>& logits, int target, double gamma) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (double l : logits) z += std::exp(l - m);
    const double ce = -(logits[static_cast<std::size_t>(target)] - m - std::log(z));
    return std::pow(1.0 - std::exp(-ce), gamma) * ce;
}

}  // namespace oracles
