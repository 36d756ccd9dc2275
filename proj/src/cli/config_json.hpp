#pragma once

#include "hsusy/cli.hpp"
#include "json.hpp"

namespace hsusy::cli {

nlohmann::json config_echo(const RunConfig& config);

}  // namespace hsusy::cli
