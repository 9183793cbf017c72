#pragma once

#include <iosfwd>

namespace windsteer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `windsteer` binary. Errors are reported as one line on
/// `err`: `windsteer: error kind=<kind> [field=<f>|path=<p>] message="<text>"`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace windsteer::cli
