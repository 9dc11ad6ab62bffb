#pragma once

#include "run_config.hpp"

namespace tca::cli {

int cmd_gen(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_attn(const RunConfig& cfg);
int cmd_gradcheck(const RunConfig& cfg);

}  // namespace tca::cli
