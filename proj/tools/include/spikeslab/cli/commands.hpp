#pragma once

#include <atomic>
#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace spikeslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInterrupted = 130;

// Set from a signal handler; benchmark commands stop starting replicates
// and write a truncated CSV.
std::atomic<bool>& interrupt_flag();

// Exit code for an in-flight exception: 2 for input and model errors, 3 for
// numerical failures, 1 otherwise.
int exit_code_for(std::exception_ptr error);

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spikeslab::cli
