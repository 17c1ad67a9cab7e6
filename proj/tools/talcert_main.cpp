#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tal/config.hpp"
#include "tal/geodesics.hpp"
#include "tal/transport.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<double> atol, rtol;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("config", opts.config_path, "run configuration (JSON)")->required();
  cmd->add_option("--atol", [&opts](const std::vector<std::string>& v) {
        opts.atol = std::stod(v[0]);
        return true;
      },
      "override verdict absolute tolerance");
  cmd->add_option("--rtol", [&opts](const std::vector<std::string>& v) {
        opts.rtol = std::stod(v[0]);
        return true;
      },
      "override verdict relative tolerance");
  cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
        opts.seed = std::stoull(v[0]);
        return true;
      },
      "override the RNG seed for randomized suites");
  cmd->add_option("--threads", [&opts](const std::vector<std::string>& v) {
        opts.threads = std::stoi(v[0]);
        return true;
      },
      "number of worker threads");
}

tal::RunConfig load(const CommonOpts& opts) {
  return tal::RunConfig::load(opts.config_path, opts.atol, opts.rtol, opts.seed, opts.threads);
}

void print_summary(const tal::RunResult& result, double wall_seconds) {
  size_t total = result.certificates.size();
  for (const auto& sweep : result.sweeps) total += sweep.records.size();
  size_t holds = 0, tight = 0, unverified = 0;
  auto count = [&](const tal::CertRecord& rec) {
    if (!rec.ok) return;
    switch (rec.cert.verdict) {
      case tal::Verdict::Holds: ++holds; break;
      case tal::Verdict::Tight: ++tight; break;
      case tal::Verdict::HypothesesUnverified: ++unverified; break;
      default: break;
    }
  };
  for (const auto& rec : result.certificates) count(rec);
  for (const auto& sweep : result.sweeps) {
    for (const auto& rec : sweep.records) count(rec);
  }
  std::fprintf(stderr,
               "%zu certificates: %zu holds, %zu tight, %zu violated, %zu unverified, "
               "%zu errors (%.2f s)\n",
               total, holds, tight, result.violated, unverified, result.errors, wall_seconds);
}

int run_verify(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  tal::RunConfig config = load(opts);
  tal::RunResult result = config.run_verify();
  tal::write_report(config.report_path(), result);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_summary(result, secs);
  std::fprintf(stderr, "report written to %s\n", config.report_path().c_str());
  return tal::exit_code_for(result);
}

int run_sweep(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  tal::RunConfig config = load(opts);
  tal::RunResult result = config.run_sweeps();
  for (const auto& sweep : result.sweeps) {
    tal::write_sweep_csv(sweep);
    std::fprintf(stderr, "sweep '%s': %zu points -> %s\n", sweep.inequality_id.c_str(),
                 sweep.records.size(), sweep.out_path.c_str());
  }
  tal::write_report(config.report_path(), result);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_summary(result, secs);
  return tal::exit_code_for(result);
}

int run_map(const CommonOpts& opts, const std::string& source, const std::string& target,
            const std::string& out_path, const std::string& curve_out,
            const std::string& reference, const std::string& base) {
  tal::RunConfig config = load(opts);
  tal::Measure1D src = config.measure(source);
  tal::Measure1D tgt = config.measure(target);
  tal::TransportMap1D map(src, tgt, config.settings().grid_size);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot write map table to %s\n", out_path.c_str());
    return 1;
  }
  out << "x T Tprime\n";
  char line[128];
  const auto xs = map.source_points();
  const auto ts = map.map_values();
  const auto dts = map.derivative_values();
  for (size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g %.17g\n", xs[i], ts[i], dts[i]);
    out << line;
  }
  std::fprintf(stderr, "map table (%zu rows) written to %s\n", xs.size(), out_path.c_str());

  if (!curve_out.empty()) {
    if (reference.empty()) {
      std::fprintf(stderr, "--curve-out requires --reference\n");
      return 1;
    }
    tal::Reference ref = tal::Reference::measure(config.measure(reference));
    tal::GeodesicCurve curve =
        base.empty()
            ? tal::make_geodesic(src, tgt, tal::chebyshev_times(),
                                 config.settings().grid_size)
            : tal::make_generalized_geodesic(src, tgt, config.measure(base),
                                             tal::chebyshev_times(),
                                             config.settings().grid_size);
    std::ofstream curve_file(curve_out, std::ios::binary);
    if (!curve_file) {
      std::fprintf(stderr, "cannot write entropy curve to %s\n", curve_out.c_str());
      return 1;
    }
    curve_file << "t,entropy,deficit\n";
    for (const auto& point : tal::entropy_curve(curve, ref)) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", point.t, point.entropy,
                    point.deficit);
      curve_file << line;
    }
    std::fprintf(stderr, "entropy curve written to %s\n", curve_out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"talcert: numerical certificates for transport-entropy inequalities"};
  app.require_subcommand(1);

  CommonOpts verify_opts, sweep_opts, map_opts;
  CLI::App* verify = app.add_subcommand("verify", "run certificate requests from a config");
  add_common(verify, verify_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "run parameter sweeps from a config");
  add_common(sweep, sweep_opts);
  CLI::App* map_cmd = app.add_subcommand("map", "export an optimal transport map table");
  add_common(map_cmd, map_opts);
  std::string source, target, out_path = "map.txt", curve_out, reference, base;
  map_cmd->add_option("--source", source, "source measure name")->required();
  map_cmd->add_option("--target", target, "target measure name")->required();
  map_cmd->add_option("--out", out_path, "output path for the (x, T, T') table");
  map_cmd->add_option("--curve-out", curve_out, "optional entropy-curve CSV path");
  map_cmd->add_option("--reference", reference, "reference measure for the entropy curve");
  map_cmd->add_option("--base", base, "base measure for a generalized geodesic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify(verify_opts);
    if (sweep->parsed()) return run_sweep(sweep_opts);
    if (map_cmd->parsed()) {
      return run_map(map_opts, source, target, out_path, curve_out, reference, base);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
