#include "newsframe/agreement.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

AgreementResult agreement(const Codings& codings, std::string variable_name) {
    if (codings.size() < 2) throw DataError("agreement needs at least two coders");
    const std::size_t n_items = codings.front().size();
    if (n_items == 0) throw DataError("agreement needs at least one item");
    for (const auto& coder : codings) {
        if (coder.size() != n_items) throw DataError("every coder must have one entry per item");
    }

    std::map<std::string, int> value_index;
    for (const auto& coder : codings) {
        for (const auto& v : coder) {
            if (v) value_index.emplace(*v, 0);
        }
    }
    int next = 0;
    for (auto& [v, idx] : value_index) idx = next++;
    const auto V = static_cast<std::size_t>(next);

    // Coincidence matrix: every ordered pair of codes within an item adds
    // 1 / (m_u - 1), where m_u is the number of codes the item received.
    std::vector<double> coincidence(V * V, 0.0);
    int fully_coded = 0;
    int unanimous = 0;
    int pairable = 0;
    std::vector<std::size_t> present;
    for (std::size_t item = 0; item < n_items; ++item) {
        present.clear();
        for (const auto& coder : codings) {
            if (coder[item]) present.push_back(static_cast<std::size_t>(value_index[*coder[item]]));
        }
        if (present.size() == codings.size()) {
            ++fully_coded;
            bool same = true;
            for (auto v : present) same = same && v == present.front();
            if (same) ++unanimous;
        }
        const std::size_t m = present.size();
        if (m < 2) continue;
        pairable += static_cast<int>(m);
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (a != b) coincidence[present[a] * V + present[b]] += w;
            }
        }
    }
    if (pairable == 0) throw DataError("no item was coded by two or more coders");

    std::vector<double> marginal(V, 0.0);
    double observed = 0.0;
    for (std::size_t c = 0; c < V; ++c) {
        for (std::size_t k = 0; k < V; ++k) {
            marginal[c] += coincidence[c * V + k];
            if (c != k) observed += coincidence[c * V + k];
        }
    }
    double n = 0.0;
    for (double m : marginal) n += m;
    double expected = 0.0;
    for (std::size_t c = 0; c < V; ++c) {
        for (std::size_t k = 0; k < V; ++k) {
            if (c != k) expected += marginal[c] * marginal[k];
        }
    }

    AgreementResult r;
    r.variable_name = std::move(variable_name);
    r.n_items = static_cast<int>(n_items);
    r.n_coders = static_cast<int>(codings.size());
    r.n_pairable_values = pairable;
    if (fully_coded > 0) r.percent_agreement = static_cast<double>(unanimous) / fully_coded;
    if (expected == 0.0) {
        r.alpha = 1.0;
        r.alpha_by_convention = true;
    } else {
        r.alpha = 1.0 - (n - 1.0) * observed / expected;
    }
    return r;
}

void to_json(nlohmann::json& j, const AgreementResult& r) {
    j = nlohmann::json{{"variable", r.variable_name},
                       {"percent_agreement", r.percent_agreement ? nlohmann::json(*r.percent_agreement)
                                                                 : nlohmann::json(nullptr)},
                       {"alpha", r.alpha},
                       {"alpha_by_convention", r.alpha_by_convention},
                       {"n_items", r.n_items},
                       {"n_coders", r.n_coders},
                       {"n_pairable_values", r.n_pairable_values}};
}

}  // namespace newsframe
