#pragma once

#include <string_view>

namespace magblock {

/// Environment variable that caps the worker count (useful on shared CI hosts).
inline constexpr std::string_view kWorkerCapEnv = "MAGBLOCK_MAX_WORKERS";

/// requested <= 0 means "all available cores"; the result honors the
/// environment cap and is always >= 1.
int resolve_workers(int requested);

}  // namespace magblock
