#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tal/certificate.hpp"
#include "tal/certify.hpp"
#include "tal/gaussian_nd.hpp"
#include "tal/measure.hpp"

namespace tal {

struct Settings {
  int grid_size = 512;
  double atol = 1e-7;
  double rtol = 1e-7;
  std::uint64_t seed = 7;
  int threads = 1;
};

/// Outcome of one certificate request; failed requests keep the run going and
/// are reported inline.
struct CertRecord {
  std::string request_id;
  bool ok = false;
  Certificate cert;
  std::string error;
  std::vector<double> axis_values;  // sweep coordinates when applicable
};

struct SweepResult {
  std::string inequality_id;
  std::vector<std::string> axis_names;
  std::vector<CertRecord> records;
  std::string out_path;  // CSV destination
};

struct RunResult {
  std::vector<CertRecord> certificates;
  std::vector<SweepResult> sweeps;
  std::uint64_t seed = 0;
  std::string config_digest;
  size_t errors = 0;
  size_t violated = 0;
};

/// Parsed, validated run configuration. Measures are constructed eagerly so
/// configuration errors surface before any certificate runs.
class RunConfig {
 public:
  static RunConfig load(const std::string& path, std::optional<double> atol_override,
                        std::optional<double> rtol_override,
                        std::optional<std::uint64_t> seed_override,
                        std::optional<int> threads_override);

  const Settings& settings() const { return settings_; }
  const std::string& digest() const { return digest_; }
  const std::string& report_path() const { return report_path_; }

  Measure1D measure(const std::string& name) const;
  const GaussianNd& gaussian(const std::string& name) const;

  /// Runs all certificate requests (threads per settings), in stable order.
  RunResult run_verify() const;

  /// Runs the sweep sections; each sweep yields ordered per-point records.
  RunResult run_sweeps() const;

 private:
  RunConfig() = default;

  struct Request {
    std::string id;
    std::function<Certificate()> run;
  };

  struct Sweep {
    std::string id;
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> points;
    std::vector<Request> requests;  // one per point, same order
    std::string out_path;
  };

  void parse(const std::string& text);

  Settings settings_;
  std::string digest_;
  std::string report_path_ = "report.json";
  std::map<std::string, Measure1D> measures_;
  std::map<std::string, GaussianNd> gaussians_;
  std::vector<Request> requests_;
  std::vector<Sweep> sweeps_;
};

/// Serializes the run into the report JSON (atomically: temp file + rename).
/// The layout is deterministic: reruns on identical config bytes produce
/// byte-identical files regardless of thread count.
void write_report(const std::string& path, const RunResult& result);

/// CSV for one sweep: header row of axis names plus lhs, rhs, slack, verdict;
/// numbers printed with 17 significant digits.
void write_sweep_csv(const SweepResult& sweep);

/// 64-bit FNV-1a of the raw config bytes, hex encoded.
std::string fnv1a_digest(const std::string& bytes);

/// Exit code contract: 0 clean, 2 on any Violated verdict, 1 on any error.
int exit_code_for(const RunResult& result);

}  // namespace tal
