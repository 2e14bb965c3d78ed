#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace saw::cli {

/// Runs one subcommand (ingest, synth, train, predict, evaluate, cv, report).
/// `args` excludes the program name. Returns the process exit status; failures
/// print a single diagnostic line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace saw::cli
