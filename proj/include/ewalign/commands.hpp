#pragma once

#include <string>
#include <vector>

#include "ewalign/config.hpp"

namespace ewalign {

// Exit codes: 0 success, 2 config/validation error, 3 solver non-convergence
// (artifacts are still written).

int cmd_embed(const std::string& config_path, const CliOverrides& overrides);
int cmd_distances(const std::string& config_path, const CliOverrides& overrides);
int cmd_eval(const std::string& config_path, const CliOverrides& overrides);
int cmd_validate(const std::string& config_path, const CliOverrides& overrides);

struct CircleBenchArgs {
    int bins = 90;
    std::vector<double> kappas{0.0, 1.0, 2.0, 4.0};
    std::vector<double> lambdas{20.0, 0.2};
    double epsilon = 1e-3;
    int bcd_iters = 40;
    double location = 0.0;
    std::string out_dir = "out";
};

int cmd_circle_bench(const CircleBenchArgs& args);

}  // namespace ewalign
