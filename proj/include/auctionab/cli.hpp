#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace auctionab {

// Command-line entry point. Subcommands: simulate, sweep, table, estimate,
// compare, bounds. Output goes to `out` unless --out names a file.
// Returns 0 on success, 2 on usage errors, 1 on numeric failures.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// Flat "key=value" lines as command-line flags; "key=true" becomes a bare
// flag, "key=false" is dropped. Blank lines and '#' comments are skipped.
std::vector<std::string> config_to_args(const std::string& path);

}  // namespace auctionab
