#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wigner::cli {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitPartial = 4;

int cmd_run(const CommonOptions& opts);
int cmd_sweep(const CommonOptions& opts);
int cmd_collapse(const CommonOptions& opts, const std::optional<std::string>& input_dir);
int cmd_lyapunov(const CommonOptions& opts);
int cmd_oracle_check(const CommonOptions& opts);

}  // namespace wigner::cli
