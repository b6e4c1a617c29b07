#include "sparsetd/csv.hpp"

#include <charconv>

namespace sparsetd {

std::string csv_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace sparsetd
