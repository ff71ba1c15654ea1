#include "ismpc/run_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace ismpc::sim {

std::string_view to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::Completed: return "completed";
    case ExitReason::Infeasible: return "infeasible";
    case ExitReason::Diverged: return "diverged";
    case ExitReason::SolverLimit: return "solver_limit";
  }
  return "unknown";
}

void write_csv(const RunLog& log, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : log.records) {
    out << r.t << ',' << r.xc << ',' << r.yc << ',' << r.dxc << ',' << r.dyc << ',' << r.xz << ',' << r.yz << ','
        << r.xu << ',' << r.yu << ',' << r.xu_min << ',' << r.xu_max << ',' << r.yu_min << ',' << r.yu_max << ','
        << r.margin_x << ',' << r.margin_y << ',' << r.qp_status << ',' << r.support_phase << ','
        << r.active_footstep_index << '\n';
  }
}

void emit_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(log, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

RunLog parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  const auto header = split(line);
  if (header.size() != kCsvColumns.size() || !std::equal(header.begin(), header.end(), kCsvColumns.begin())) {
    throw std::runtime_error("unexpected CSV header");
  }
  RunLog log;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != kCsvColumns.size()) {
      throw std::runtime_error("line " + std::to_string(n) + ": expected 18 columns");
    }
    RunRecord r;
    double* fields[] = {&r.t,  &r.xc, &r.yc,     &r.dxc,    &r.dyc,    &r.xz,     &r.yz,      &r.xu,
                        &r.yu, &r.xu_min, &r.xu_max, &r.yu_min, &r.yu_max, &r.margin_x, &r.margin_y};
    for (std::size_t i = 0; i < 15; ++i) *fields[i] = number(c[i], n);
    r.qp_status = c[15];
    r.support_phase = c[16];
    r.active_footstep_index = static_cast<long>(number(c[17], n));
    log.records.push_back(std::move(r));
  }
  if (log.records.size() >= 2) log.sample_time = log.records[1].t - log.records[0].t;
  return log;
}

double max_com_zmp_distance(const RunLog& log) {
  double m = 0.0;
  for (const auto& r : log.records) m = std::max({m, std::abs(r.xc - r.xz), std::abs(r.yc - r.yz)});
  return m;
}

std::string stability_verdict(const RunLog& log, double threshold) {
  if (max_com_zmp_distance(log) > threshold) return "divergent";
  const bool infeasible = std::any_of(log.records.begin(), log.records.end(),
                                      [](const RunRecord& r) { return r.qp_status != "optimal"; });
  return infeasible ? "infeasible" : "stable";
}

CompareReport compare_runs(const RunLog& a, const RunLog& b, double threshold, double divergence) {
  CompareReport rep;
  rep.samples = std::min(a.records.size(), b.records.size());
  rep.truncated = a.records.size() != b.records.size();
  if (rep.truncated) {
    std::cerr << "warning: logs differ in length (" << a.records.size() << " vs " << b.records.size()
              << "), comparing the first " << rep.samples << " samples\n";
  }
  for (std::size_t i = 0; i < rep.samples; ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    const double dc = std::hypot(ra.xc - rb.xc, ra.yc - rb.yc);
    const double dz = std::hypot(ra.xz - rb.xz, ra.yz - rb.yz);
    rep.max_com_delta = std::max(rep.max_com_delta, dc);
    rep.max_zmp_delta = std::max(rep.max_zmp_delta, dz);
    if (!rep.first_exceed_time && dc > threshold) rep.first_exceed_time = ra.t;
  }
  rep.verdict_a = stability_verdict(a, divergence);
  rep.verdict_b = stability_verdict(b, divergence);
  return rep;
}

}  // namespace ismpc::sim
