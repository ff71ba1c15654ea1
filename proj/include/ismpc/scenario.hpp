#pragma once

#include "ismpc/controller.hpp"
#include "ismpc/footstep.hpp"
#include "ismpc/lip.hpp"
#include "ismpc/run_log.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ismpc::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlanKind { Regular, Explicit, Generated };

struct RegularGait {
  std::size_t steps = 0;  // 0: enough to cover the run and its preview
  double step_length = 0.1;
  double lateral = 0.18;
  double first_time = 0.5;
  double step_time = 0.5;
};

struct Scenario {
  std::string name = "custom";
  std::string description;
  double duration = 10.0;
  double gravity = 9.81;
  double com_height = 0.78;
  double sample_time = 0.01;
  double control_horizon = 1.0;
  double preview_horizon = 0.0;  // 0: same as the control horizon
  controller::MpcConfig mpc;
  footstep::CruiseParams cruise;
  footstep::ReferenceSchedule reference;
  PlanKind plan_kind = PlanKind::Regular;
  double ss_fraction = 0.8;
  RegularGait regular;
  footstep::FootstepPlan explicit_plan;
  double divergence_threshold = 0.5;
  std::uint64_t rng_seed = 0;  // reserved; the pipeline is deterministic

  lip::LipParams lip() const { return {gravity, com_height, sample_time}; }
  /// Controller configuration with horizons converted to samples.
  controller::MpcConfig resolved_mpc() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses `key = value` lines with dotted keys; `#` starts a comment.
/// Throws ConfigError naming the offending line.
Scenario parse_scenario(std::istream& in, const std::string& source = "<config>");
Scenario load_scenario(const std::string& path);

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> builtin_scenarios();
/// Throws ConfigError for an unknown name.
Scenario builtin_scenario(const std::string& name);
/// Config text of a builtin, in the same format accepted by parse_scenario.
std::string builtin_config_text(const std::string& name);

/// Runs the closed loop until the duration elapses, the QP fails or the CoM
/// diverges from the ZMP. Every sample is logged, including the last one.
RunLog run_scenario(const Scenario& scenario);

/// 0 completed, 3 infeasible (or solver limit), 4 divergence.
int exit_code(const RunLog& log);

}  // namespace ismpc::sim
