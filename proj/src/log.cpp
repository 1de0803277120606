#include "vdk/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

namespace vdk {

spdlog::logger& log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>("vdk",
                                              std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("vdk %l: %v");
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("VDK_LOG")) {
      std::string v = env;
      if (v == "error") level = spdlog::level::err;
      else if (v == "warn") level = spdlog::level::warn;
      else if (v == "debug") level = spdlog::level::debug;
    }
    l->set_level(level);
    return l;
  }();
  return *logger;
}

}  // namespace vdk
