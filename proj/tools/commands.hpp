#pragma once

// Parses arguments, runs one subcommand and returns the process exit code:
// 0 success, 1 computation error, 2 usage or input validation error.
int run_cli(int argc, char** argv);
