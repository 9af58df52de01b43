#pragma once

#include <iosfwd>

namespace npi {

/// Exit codes of the npi_lab command line.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of npi_lab. Output directory: --out, else $NPI_OUT_DIR, else ".".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace npi
