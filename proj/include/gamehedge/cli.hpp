#pragma once

namespace gamehedge {

/// Entry point of the `gamehedge` command line tool. Exit codes: 0 success,
/// 1 unexpected error, 2 configuration error, 3 numerical-contract violation.
int run_cli(int argc, char** argv);

}  // namespace gamehedge
