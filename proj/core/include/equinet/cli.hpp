#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace equinet {

/// Entry point behind the `equinet` binary. args excludes the program name.
/// Returns 0 on success, 1 on failed verdicts, 2 on usage or config errors.
int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace equinet
