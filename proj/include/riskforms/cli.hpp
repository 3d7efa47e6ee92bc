#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace riskforms::cli {

/// Runs one command line (without the program name) and writes a single JSON
/// document to `out`. Returns 0 on success, 1 on validation/domain/parse
/// errors, 2 on resource errors.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace riskforms::cli
