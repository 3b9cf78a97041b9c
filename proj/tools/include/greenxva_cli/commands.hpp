#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "greenxva_cli/config.hpp"

namespace greenxva::cli {

enum ExitCode { kOk = 0, kValidationFailure = 1, kConfigError = 2, kNumericFailure = 3 };

struct CommandOptions {
    std::string out_dir = ".";
    std::optional<std::string> cache_dir;
    std::ostream* log = nullptr;  // progress lines; null for silence
};

// Each command writes CSV files into out_dir and returns an exit code.
int cmd_defaults(const RunConfig& cfg, const CommandOptions& opt);
int cmd_mesh(const RunConfig& cfg, const CommandOptions& opt);
int cmd_eig(const RunConfig& cfg, const CommandOptions& opt);
int cmd_price(const RunConfig& cfg, const CommandOptions& opt);
int cmd_mc(const RunConfig& cfg, const CommandOptions& opt);
int cmd_validate(const RunConfig& cfg, const CommandOptions& opt);

// Runs f and maps library exceptions to exit codes, printing the message.
int guarded(const std::function<int()>& f, std::ostream& err);

}  // namespace greenxva::cli
