#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace biquant {

using Rational = mpq_class;

// Always "num/den", also for integers.
std::string to_text(const Rational& q);

// Accepts "a", "-a", "a/b". Throws IoError on malformed input or zero denominator.
Rational parse_rational(std::string_view text);

}  // namespace biquant
