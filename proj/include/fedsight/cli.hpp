#pragma once

namespace fedsight::cli {

// Entry point for the `fedsight` binary. Exit codes: 0 on success, 1 on
// validation or parse errors (including bad flags), 2 on runtime errors.
int run(int argc, char** argv);

}  // namespace fedsight::cli
