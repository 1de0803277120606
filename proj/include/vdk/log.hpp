#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace vdk {

// Standard-error logger. Level comes from VDK_LOG (error|warn|info|debug),
// default info.
spdlog::logger& log();

}  // namespace vdk
