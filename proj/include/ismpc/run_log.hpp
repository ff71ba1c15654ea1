#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ismpc::sim {

struct RunRecord {
  double t = 0.0;
  double xc = 0.0;
  double yc = 0.0;
  double dxc = 0.0;
  double dyc = 0.0;
  double xz = 0.0;
  double yz = 0.0;
  double xu = 0.0;
  double yu = 0.0;
  double xu_min = 0.0;
  double xu_max = 0.0;
  double yu_min = 0.0;
  double yu_max = 0.0;
  double margin_x = 0.0;
  double margin_y = 0.0;
  std::string qp_status;
  std::string support_phase;
  long active_footstep_index = 0;
};

enum class ExitReason { Completed, Infeasible, Diverged, SolverLimit };

std::string_view to_string(ExitReason reason);

struct RunLog {
  std::string scenario;
  double sample_time = 0.01;
  std::vector<RunRecord> records;
  ExitReason exit = ExitReason::Completed;
  /// Margins come from an outer box of rotated regions or from free
  /// footsteps, so they are indicative only.
  bool approximate_margins = false;
};

inline constexpr std::array<std::string_view, 18> kCsvColumns = {
    "t",      "xc",     "yc",     "dxc",      "dyc",      "xz",        "yz",
    "xu",     "yu",     "xu_min", "xu_max",   "yu_min",   "yu_max",    "margin_x",
    "margin_y", "qp_status", "support_phase", "active_footstep_index"};

void write_csv(const RunLog& log, std::ostream& out);
/// Throws std::runtime_error naming `path` on I/O failure.
void emit_csv(const RunLog& log, const std::string& path);
/// Throws std::runtime_error on a malformed header or row.
RunLog parse_csv(std::istream& in);

/// Largest |com - zmp| over both axes and all samples.
double max_com_zmp_distance(const RunLog& log);

/// "infeasible", "divergent" (|com - zmp| above `threshold` on either axis)
/// or "stable".
std::string stability_verdict(const RunLog& log, double threshold = 0.5);

struct CompareReport {
  std::size_t samples = 0;
  bool truncated = false;
  double max_com_delta = 0.0;
  double max_zmp_delta = 0.0;
  std::optional<double> first_exceed_time;
  std::string verdict_a;
  std::string verdict_b;
};

/// Compares two runs sample by sample over the shorter one. `threshold`
/// applies to the CoM difference for first_exceed_time.
CompareReport compare_runs(const RunLog& a, const RunLog& b, double threshold = 0.01,
                           double divergence = 0.5);

}  // namespace ismpc::sim
