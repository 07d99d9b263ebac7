#include <doctest.h>

#include <random>

#include "newsframe/agreement.hpp"
#include "newsframe/errors.hpp"
#include "oracles.hpp"

using namespace newsframe;

namespace {

Codings from_rows(const std::vector<std::string>& rows) {
    Codings c;
    for (const auto& r : rows) {
        std::vector<std::optional<std::string>> coder;
        for (char ch : r) {
            if (ch == ' ') continue;
            if (ch == '.') {
                coder.emplace_back();
            } else {
                coder.emplace_back(std::string(1, ch));
            }
        }
        c.push_back(coder);
    }
    return c;
}

}  // namespace

TEST_CASE("published worked example with missing data") {
    const auto c = from_rows({
        "1 2 3 3 2 1 4 1 2 . . .",
        "1 2 3 3 2 2 4 1 2 5 . 3",
        ". 3 3 3 2 3 4 2 2 5 1 .",
        "1 2 3 3 2 4 4 1 2 5 1 .",
    });
    const auto r = agreement(c, "example");
    CHECK(std::abs(r.alpha - 0.743) <= 1e-3);
    CHECK(r.n_pairable_values == 40);
    CHECK(r.variable_name == "example");
}

TEST_CASE("published binary two-coder example") {
    const auto c = from_rows({"0 1 0 0 0 0 0 0 1 0", "1 1 1 0 0 1 0 0 0 0"});
    const auto r = agreement(c);
    CHECK(std::abs(r.alpha - 0.095) <= 1e-3);
    REQUIRE(r.percent_agreement);
    CHECK(*r.percent_agreement == doctest::Approx(0.6));
}

TEST_CASE("alpha matches the pairwise oracle on random reliability data") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 40; ++trial) {
        const int coders = 2 + static_cast<int>(gen() % 4);
        const int items = 3 + static_cast<int>(gen() % 20);
        const int values = 2 + static_cast<int>(gen() % 4);
        Codings c(static_cast<std::size_t>(coders));
        for (auto& coder : c) {
            for (int i = 0; i < items; ++i) {
                if (gen() % 5 == 0) {
                    coder.emplace_back();
                } else {
                    coder.emplace_back(std::to_string(gen() % static_cast<std::uint64_t>(values)));
                }
            }
        }
        // Guarantee at least two distinct pairable values.
        c[0][0] = "0";
        c[1][0] = "1";
        const auto r = agreement(c);
        CHECK(r.alpha == doctest::Approx(oracles::alpha(c)).epsilon(1e-9));
    }
}

TEST_CASE("agreement edge cases") {
    SUBCASE("perfect agreement") {
        const auto r = agreement(from_rows({"a b c a", "a b c a"}));
        CHECK(r.alpha == doctest::Approx(1.0));
        CHECK(*r.percent_agreement == doctest::Approx(1.0));
    }
    SUBCASE("single value everywhere is alpha 1 by convention") {
        const auto r = agreement(from_rows({"a a a", "a a a"}));
        CHECK(r.alpha == 1.0);
        CHECK(r.alpha_by_convention);
    }
    SUBCASE("invalid input") {
        CHECK_THROWS_AS(agreement(from_rows({"a b"})), DataError);
        CHECK_THROWS_AS(agreement(from_rows({"a b", "a"})), DataError);
        CHECK_THROWS_AS(agreement(from_rows({"a .", ". b"})), DataError);
    }
}
