#pragma once

#include <string>
#include <utility>

#include "sparsetd/approximator.hpp"

namespace sparsetd {

// Binary checkpoint: magic tag, format version, architecture fields, then the
// parameter arrays in declared order as little-endian doubles. Round-trips
// bit-exactly.
void checkpoint_save(const ApproximatorParams& params, const ArchSpec& arch,
                     const std::string& path);
std::pair<ApproximatorParams, ArchSpec> checkpoint_load(const std::string& path);

}  // namespace sparsetd
