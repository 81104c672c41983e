#pragma once

#include <string>

#include "orbitsphere/flowspec.hpp"

#ifndef ORBITSPHERE_SPEC_DIR
#error "ORBITSPHERE_SPEC_DIR must be defined by the build"
#endif

namespace testsupport {

inline std::string spec_path(const std::string& name) { return std::string(ORBITSPHERE_SPEC_DIR) + "/" + name; }

inline orbitsphere::FlowSpec load(const std::string& name) { return orbitsphere::load_flowspec(spec_path(name)); }

}  // namespace testsupport
