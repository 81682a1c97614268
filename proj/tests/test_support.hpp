#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "stopcost/system_model.hpp"

namespace testsupport {

inline std::string config_path(const std::string& name) { return std::string(STOPCOST_CONFIG_DIR) + "/" + name + ".yaml"; }

inline stopcost::SystemSpec bundled(const std::string& name) { return stopcost::load_system_file(config_path(name)); }

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testsupport
