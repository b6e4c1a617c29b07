#pragma once

#include <string>

namespace sparsetd {

// Shortest decimal form that round-trips the exact double.
std::string csv_double(double v);

}  // namespace sparsetd
