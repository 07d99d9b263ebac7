#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace newsframe {

/// codings[c][i] is coder c's nominal label for item i; nullopt = not coded.
using Codings = std::vector<std::vector<std::optional<std::string>>>;

struct AgreementResult {
    /// Share of fully-coded items on which every coder gave the same label;
    /// empty when no item was coded by all coders.
    std::optional<double> percent_agreement;
    double alpha = 0.0;
    /// Set when expected disagreement is zero (a single label value in the
    /// whole reliability data) and alpha is reported as 1 by convention.
    bool alpha_by_convention = false;
    std::string variable_name;
    int n_items = 0;
    int n_coders = 0;
    int n_pairable_values = 0;
};

/// Percent agreement and Krippendorff's alpha with the nominal difference
/// function. Items with fewer than two codes are not pairable and drop out.
/// Throws DataError for fewer than two coders, ragged input, or no pairable
/// values.
AgreementResult agreement(const Codings& codings, std::string variable_name = {});

void to_json(nlohmann::json& j, const AgreementResult& r);

}  // namespace newsframe
