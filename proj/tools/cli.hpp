#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dynpred {

// exit codes: 0 ok, 1 input error, 2 inadmissible recurrence, 3 budget exhausted
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynpred
