#pragma once

#include <string>
#include <string_view>

namespace newsframe::svg {

std::string escape(std::string_view s);
/// Fixed-point formatting with `digits` decimals.
std::string num(double v, int digits = 1);

/// Categorical colour for series i.
std::string_view colour(std::size_t i);

}  // namespace newsframe::svg
