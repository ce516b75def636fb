#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hqp {

/// Library version, "major.minor.patch".
std::string version();

/// (name, version) of every third-party library compiled into the core.
std::vector<std::pair<std::string, std::string>> dependency_versions();

}  // namespace hqp
