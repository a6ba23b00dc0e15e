#ifndef APPSLICE_COMMANDS_HPP
#define APPSLICE_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "appslice/scenario.hpp"

namespace appslice {

/// Exit codes shared by the CLI entry points: 0 success, 2 validation or
/// schema problems, 3 admission failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAllocation = 3;

struct RunOptions {
    std::filesystem::path scenario_path;
    std::filesystem::path out_dir;
    bool force_best_effort = false;
    bool no_dynamic = false;
};

struct SweepOptions {
    SweepAxis axis = SweepAxis::Network;
    std::vector<std::string> values;  // numbers, or net:cpu pairs for joint
    std::filesystem::path base_path;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out,
                 std::ostream& err);
int cmd_presets(const std::filesystem::path& out_dir, std::ostream& out,
                std::ostream& err);

/// Parses one --values token: "3" on a single axis, "0.5:0.5" on the joint
/// grid. Throws SchemaError on malformed input.
SweepInput parse_sweep_value(SweepAxis axis, const std::string& token);

}  // namespace appslice

#endif  // APPSLICE_COMMANDS_HPP
