#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fracseg/synth.hpp"

namespace fracseg {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitIo = 4 };

/// Version tag written into every result JSON.
inline constexpr std::string_view kResultSchema = "fracseg.detect/1";
inline constexpr std::string_view kSimulateSchema = "fracseg.simulate/1";

/// 64-bit FNV-1a hash rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Reads one value per line, or "t,x" pairs with uniform spacing in t.
/// Blank lines and lines starting with '#' are skipped; a first row made of
/// non-numeric cells is taken as a header. With one column the step is
/// `delta` (1 when absent); with two it comes from t and `delta` must agree
/// when given. Throws IoError naming the row and column of a bad cell.
SampledPath read_series_csv(std::istream& in, std::optional<double> delta = std::nullopt);

/// Runs `fracseg <subcommand> ...`; argv[0] is the program name. Returns an
/// ExitCode. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracseg
