#include "tal/config.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tal/geodesics.hpp"
#include "tal/transport.hpp"

namespace tal {

namespace {

using nlohmann::json;

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : eng_(seed) {}
  double operator()(double lo, double hi) {
    const double u = (eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

double num_or_expr(const json& v, const std::map<std::string, double>& vars,
                   const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return Expr::parse(v.get<std::string>()).eval(vars);
  fail(ErrorKind::ConfigError, what + " must be a number or expression string");
}

IntervalSet parse_intervals(const json& v, const std::string& what) {
  if (!v.is_array()) fail(ErrorKind::ConfigError, what + " must be an array of [lo, hi] pairs");
  std::vector<Interval> intervals;
  for (const json& pair : v) {
    if (!pair.is_array() || pair.size() != 2) {
      fail(ErrorKind::ConfigError, what + " entries must be [lo, hi] pairs");
    }
    Interval iv;
    iv.lo = pair[0].is_null() ? -kInf : pair[0].get<double>();
    iv.hi = pair[1].is_null() ? kInf : pair[1].get<double>();
    intervals.push_back(iv);
  }
  return IntervalSet(std::move(intervals));
}

Matrix parse_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) fail(ErrorKind::ConfigError, what + " must be a nested array");
  const int n = static_cast<int>(v.size());
  Matrix m(n);
  for (int i = 0; i < n; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != n) {
      fail(ErrorKind::ConfigError, what + " must be square");
    }
    for (int j = 0; j < n; ++j) m(i, j) = v[i][j].get<double>();
  }
  return m;
}

std::vector<double> parse_vector(const json& v, const std::string& what) {
  if (!v.is_array()) fail(ErrorKind::ConfigError, what + " must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) out.push_back(x.get<double>());
  return out;
}

DeclaredBounds parse_bounds(const json& req) {
  DeclaredBounds b;
  if (!req.contains("bounds")) return b;
  const json& v = req.at("bounds");
  auto pick = [&](const char* key) -> std::optional<double> {
    if (v.contains(key) && !v.at(key).is_null()) return v.at(key).get<double>();
    return std::nullopt;
  };
  b.kappa = pick("kappa");
  b.kappa_prime = pick("kappa_prime");
  b.kappa0 = pick("kappa0");
  b.kappa1 = pick("kappa1");
  b.kappa2 = pick("kappa2");
  b.tau = pick("tau");
  b.c_mu = pick("c_mu");
  b.c_mu0 = pick("c_mu0");
  return b;
}

GaussianNd random_gaussian(SeededUniform& rng, int dim, double eig_lo, double eig_hi,
                           double mean_lo, double mean_hi) {
  Matrix cov(dim);
  for (int i = 0; i < dim; ++i) cov(i, i) = rng(eig_lo, eig_hi);
  // Random Givens rotations keep the spectrum inside [eig_lo, eig_hi].
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double theta = rng(0.0, 2.0 * M_PI);
      const double c = std::cos(theta), s = std::sin(theta);
      Matrix g = Matrix::identity(dim);
      g(i, i) = c;
      g(j, j) = c;
      g(i, j) = -s;
      g(j, i) = s;
      cov = g * cov * g.transpose();
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double avg = 0.5 * (cov(i, j) + cov(j, i));
      cov(i, j) = avg;
      cov(j, i) = avg;
    }
  }
  std::vector<double> mean(dim);
  for (double& x : mean) x = rng(mean_lo, mean_hi);
  return GaussianNd(mean, cov);
}

Matrix random_spd(SeededUniform& rng, int dim, double eig_lo, double eig_hi) {
  return random_gaussian(rng, dim, eig_lo, eig_hi, 0.0, 0.0).cov;
}

json certificate_to_json(const Certificate& c) {
  json rec;
  rec["id"] = c.inequality_id;
  rec["instance"] = c.instance;
  rec["lhs"] = c.lhs;
  rec["rhs"] = c.rhs;
  rec["slack"] = c.slack;
  rec["atol"] = c.atol;
  rec["rtol"] = c.rtol;
  rec["verdict"] = verdict_name(c.verdict);
  rec["error_estimate"] = c.error_estimate;
  rec["hypotheses_verified"] = c.hypotheses_verified;
  json fns = json::array();
  for (const FunctionalReport& f : c.functionals) {
    json fn;
    fn["name"] = f.name;
    fn["value"] = f.value;
    fn["error_estimate"] = f.error_estimate;
    if (f.infinite) fn["infinite"] = true;
    if (f.hypotheses_unverified) fn["hypotheses_unverified"] = true;
    if (f.unreliable) fn["unreliable"] = true;
    fns.push_back(fn);
  }
  rec["functionals"] = fns;
  rec["notes"] = c.notes;
  return rec;
}

}  // namespace

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016" PRIx64, h);
  return buf;
}

Measure1D RunConfig::measure(const std::string& name) const {
  auto it = measures_.find(name);
  if (it == measures_.end()) {
    fail(ErrorKind::ConfigError, "undefined measure '" + name + "'");
  }
  return it->second;
}

const GaussianNd& RunConfig::gaussian(const std::string& name) const {
  auto it = gaussians_.find(name);
  if (it == gaussians_.end()) {
    fail(ErrorKind::ConfigError, "undefined Gaussian '" + name + "'");
  }
  return it->second;
}

namespace {

/// Builds a 1D measure from a config record; `resolve` supplies referenced
/// measures, `vars` binds sweep axis variables inside expression parameters.
Measure1D build_measure(const json& def, const std::map<std::string, double>& vars,
                        const std::function<Measure1D(const std::string&)>& resolve) {
  if (!def.is_object() || !def.contains("kind")) {
    fail(ErrorKind::ConfigError, "measure definition needs a 'kind'");
  }
  const std::string kind = def.at("kind").get<std::string>();
  if (kind == "gaussian") {
    const double mean = num_or_expr(def.at("mean"), vars, "mean");
    double variance;
    if (def.contains("variance")) {
      variance = num_or_expr(def.at("variance"), vars, "variance");
    } else if (def.contains("sd")) {
      const double sd = num_or_expr(def.at("sd"), vars, "sd");
      variance = sd * sd;
    } else {
      fail(ErrorKind::ConfigError, "gaussian measure needs 'variance' or 'sd'");
    }
    return Measure1D::gaussian(mean, variance);
  }
  if (kind == "potential") {
    PotentialSpec spec = [&]() {
      if (def.contains("coefficients")) {
        return PotentialSpec::polynomial(parse_vector(def.at("coefficients"), "coefficients"));
      }
      if (def.contains("potential")) {
        return PotentialSpec::from_expr(Expr::parse(def.at("potential").get<std::string>()));
      }
      fail(ErrorKind::ConfigError, "potential measure needs 'potential' or 'coefficients'");
    }();
    if (def.contains("hint")) spec.with_hint(num_or_expr(def.at("hint"), vars, "hint"));
    std::optional<double> klo, khi;
    if (def.contains("kappa_lo") && !def.at("kappa_lo").is_null()) {
      klo = num_or_expr(def.at("kappa_lo"), vars, "kappa_lo");
    }
    if (def.contains("kappa_hi") && !def.at("kappa_hi").is_null()) {
      khi = num_or_expr(def.at("kappa_hi"), vars, "kappa_hi");
    }
    if (klo || khi) spec.with_bounds(klo, khi);
    return Measure1D::from_potential(spec);
  }
  if (kind == "grid") {
    return Measure1D::grid(parse_vector(def.at("nodes"), "nodes"),
                           parse_vector(def.at("values"), "values"));
  }
  if (kind == "restricted") {
    Measure1D base = resolve(def.at("base").get<std::string>());
    return base.restricted(parse_intervals(def.at("intervals"), "intervals"));
  }
  if (kind == "tilt") {
    Measure1D base = resolve(def.at("base").get<std::string>());
    const double strength =
        def.contains("strength") ? num_or_expr(def.at("strength"), vars, "strength") : 1.0;
    return base.tilted(Expr::parse(def.at("function").get<std::string>()), strength);
  }
  if (kind == "translated") {
    Measure1D base = resolve(def.at("base").get<std::string>());
    return base.translated(num_or_expr(def.at("shift"), vars, "shift"));
  }
  fail(ErrorKind::ConfigError, "unknown measure kind '" + kind + "'");
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = {
      "talagrand",      "sti1",
      "sti2",           "ssti",
      "mc1",            "mc2",
      "rsti",           "hwi",
      "lsi",            "hwi_c13",
      "lsi_c13",        "hwi_c21",
      "lsi_c21",        "poincare",
      "poincare_refined", "lemma_odd",
      "lemma_centered", "lemma_general",
      "concentration",  "blaschke_santalo",
      "w2_cross_check", "contraction",
      "ma_residual",    "gauss_equality",
      "gauss_translation", "ssti_gauss",
      "sti2_gauss",     "logdet",
      "convexity_modulus"};
  return ids;
}

std::string catalog_message() {
  std::string msg = "known inequality ids: ";
  for (size_t i = 0; i < catalog_ids().size(); ++i) {
    if (i) msg += ", ";
    msg += catalog_ids()[i];
  }
  return msg;
}

}  // namespace

void RunConfig::parse(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }

  if (root.contains("settings")) {
    const json& s = root.at("settings");
    if (s.contains("grid_size")) settings_.grid_size = s.at("grid_size").get<int>();
    if (s.contains("atol")) settings_.atol = s.at("atol").get<double>();
    if (s.contains("rtol")) settings_.rtol = s.at("rtol").get<double>();
    if (s.contains("seed")) settings_.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("threads")) settings_.threads = s.at("threads").get<int>();
    if (settings_.grid_size < 64 || settings_.grid_size > (1 << 20)) {
      fail(ErrorKind::ConfigError, "settings.grid_size out of range [64, 2^20]");
    }
    if (settings_.threads < 1 || settings_.threads > 256) {
      fail(ErrorKind::ConfigError, "settings.threads out of range [1, 256]");
    }
  }
  if (root.contains("report")) report_path_ = root.at("report").get<std::string>();

  const std::map<std::string, double> no_vars;
  if (root.contains("measures")) {
    const json& defs = root.at("measures");
    std::function<Measure1D(const std::string&)> resolve = [&](const std::string& name) {
      auto it = measures_.find(name);
      if (it != measures_.end()) return it->second;
      if (!defs.contains(name)) fail(ErrorKind::ConfigError, "undefined measure '" + name + "'");
      Measure1D built = build_measure(defs.at(name), no_vars, resolve);
      measures_.emplace(name, built);
      return built;
    };
    for (auto it = defs.begin(); it != defs.end(); ++it) {
      const json& def = it.value();
      if (def.contains("kind") && def.at("kind") == "gaussian_nd") {
        gaussians_.emplace(it.key(), GaussianNd(parse_vector(def.at("mean"), "mean"),
                                                parse_matrix(def.at("cov"), "cov")));
      } else {
        resolve(it.key());
      }
    }
  }

  Tolerances tols{settings_.atol, settings_.rtol};
  SeededUniform rng(settings_.seed);

  // Builds the closure for one concrete request. Axis variables are baked in
  // so sweep points parallelize without shared state.
  auto make_request = [this, tols](const json& req,
                                   const std::map<std::string, double>& vars,
                                   const std::function<Measure1D(const std::string&)>& lookup)
      -> Request {
    if (!req.contains("id")) fail(ErrorKind::ConfigError, "certificate request needs an 'id'");
    const std::string id = req.at("id").get<std::string>();
    const DeclaredBounds bounds = parse_bounds(req);
    auto measure_arg = [&, lookup](const char* key) -> Measure1D {
      if (!req.contains(key)) {
        fail(ErrorKind::ConfigError, "request '" + id + "' needs measure '" + key + "'");
      }
      const json& v = req.at(key);
      if (v.is_string()) return lookup(v.get<std::string>());
      return build_measure(v, vars, [&](const std::string& name) { return lookup(name); });
    };
    auto gauss_arg = [&](const char* key) -> GaussianNd {
      if (!req.contains(key)) {
        fail(ErrorKind::ConfigError, "request '" + id + "' needs Gaussian '" + key + "'");
      }
      const json& v = req.at(key);
      if (v.is_string()) return gaussian(v.get<std::string>());
      return GaussianNd(parse_vector(v.at("mean"), "mean"), parse_matrix(v.at("cov"), "cov"));
    };

    if (id == "talagrand") {
      Measure1D m = measure_arg("m"), mu = measure_arg("mu");
      return {id, [=]() { return verify_talagrand(m, mu, bounds, tols); }};
    }
    static const std::map<std::string, SymmetrizedVariant> sym = {
        {"sti1", SymmetrizedVariant::STI1}, {"sti2", SymmetrizedVariant::STI2},
        {"ssti", SymmetrizedVariant::SSTI}, {"mc1", SymmetrizedVariant::MC1},
        {"mc2", SymmetrizedVariant::MC2},   {"rsti", SymmetrizedVariant::RSTI}};
    if (auto it = sym.find(id); it != sym.end()) {
      const SymmetrizedVariant variant = it->second;
      Measure1D m = measure_arg("m"), mu = measure_arg("mu"), nu = measure_arg("nu");
      return {id, [=]() { return verify_symmetrized(variant, m, mu, nu, bounds, tols); }};
    }
    static const std::map<std::string, HwiLsiVariant> hwi = {
        {"hwi", HwiLsiVariant::HWI},         {"lsi", HwiLsiVariant::LSI},
        {"hwi_c13", HwiLsiVariant::HWI_C13}, {"lsi_c13", HwiLsiVariant::LSI_C13},
        {"hwi_c21", HwiLsiVariant::HWI_C21}, {"lsi_c21", HwiLsiVariant::LSI_C21}};
    if (auto it = hwi.find(id); it != hwi.end()) {
      const HwiLsiVariant variant = it->second;
      Measure1D m = measure_arg("m"), mu = measure_arg("mu");
      return {id, [=]() { return verify_hwi_lsi(variant, m, mu, bounds, tols); }};
    }
    if (id == "poincare" || id == "poincare_refined") {
      const PoincareVariant variant =
          id == "poincare" ? PoincareVariant::Base : PoincareVariant::Refined;
      Measure1D m = measure_arg("m");
      Expr f = Expr::parse(req.at("f").get<std::string>());
      return {id, [=]() { return verify_poincare(variant, m, f, bounds, tols); }};
    }
    static const std::map<std::string, LemmaVariant> lemma = {
        {"lemma_odd", LemmaVariant::OddSymmetric},
        {"lemma_centered", LemmaVariant::GaussianCentered},
        {"lemma_general", LemmaVariant::General}};
    if (auto it = lemma.find(id); it != lemma.end()) {
      const LemmaVariant variant = it->second;
      Measure1D m = measure_arg("m");
      Expr f = Expr::parse(req.at("f").get<std::string>());
      Expr g = Expr::parse(req.at("g").get<std::string>());
      return {id, [=]() { return verify_lemma_core(variant, m, f, g, bounds, tols); }};
    }
    if (id == "concentration") {
      Measure1D m = measure_arg("m");
      IntervalSet a = parse_intervals(req.at("A"), "A");
      IntervalSet b = parse_intervals(req.at("B"), "B");
      return {id, [=]() { return verify_concentration(m, a, b, bounds, tols); }};
    }
    if (id == "blaschke_santalo") {
      Measure1D m = measure_arg("m");
      Expr f = Expr::parse(req.at("F").get<std::string>());
      Expr g = Expr::parse(req.at("G").get<std::string>());
      return {id, [=]() { return verify_blaschke_santalo(m, f, g, bounds, tols); }};
    }
    if (id == "w2_cross_check") {
      Measure1D mu = measure_arg("mu"), nu = measure_arg("nu");
      return {id, [=]() {
                const double a = w2_squared(mu, nu);
                const double b = w2_squared_xspace(mu, nu);
                return make_certificate("w2_cross_check",
                                        "mu=" + mu.describe() + ", nu=" + nu.describe(),
                                        std::abs(a - b), 0.0, tols, 1e-10, true);
              }};
    }
    if (id == "contraction") {
      Measure1D mu = measure_arg("mu"), nu = measure_arg("nu");
      const double k0 = req.at("kappa0").get<double>();
      const double k1 = req.at("kappa1").get<double>();
      const int grid = settings_.grid_size;
      return {id, [=]() {
                TransportMap1D map(mu, nu, grid);
                ContractionReport r = contraction_check(map, k0, k1);
                Certificate c = make_certificate(
                    "contraction", "source=" + mu.describe() + ", target=" + nu.describe(),
                    r.sup_derivative, r.bound, tols, 1e-10,
                    r.hypotheses_ok && r.monotone);
                return c;
              }};
    }
    if (id == "ma_residual") {
      Measure1D mu = measure_arg("mu"), nu = measure_arg("nu");
      const int grid = req.contains("grid_size") ? req.at("grid_size").get<int>()
                                                 : settings_.grid_size;
      return {id, [=]() {
                TransportMap1D map(mu, nu, grid);
                MaResidualReport r = ma_residual(map);
                return make_certificate(
                    "ma_residual", "source=" + mu.describe() + ", target=" + nu.describe(),
                    r.residual, 1e-4, tols, 1e-12, !r.overflow_flagged);
              }};
    }
    if (id == "convexity_modulus") {
      Measure1D mu0 = measure_arg("mu"), mu1 = measure_arg("nu");
      Measure1D ref = measure_arg("m");
      std::optional<Measure1D> base;
      if (req.contains("base")) {
        base = req.at("base").is_string() ? lookup(req.at("base").get<std::string>())
                                          : build_measure(req.at("base"), vars, lookup);
      }
      const double predicted = req.contains("predicted") ? req.at("predicted").get<double>() : 0.0;
      const int grid = settings_.grid_size;
      return {id, [=]() {
                GeodesicCurve curve = base ? make_generalized_geodesic(mu0, mu1, *base,
                                                                        chebyshev_times(), grid)
                                           : make_geodesic(mu0, mu1, chebyshev_times(), grid);
                const double est = convexity_modulus(curve, Reference::measure(ref));
                return make_certificate("convexity_modulus",
                                        "mu0=" + mu0.describe() + ", mu1=" + mu1.describe(),
                                        predicted, est, tols, 1e-8, true);
              }};
    }
    if (id == "gauss_equality") {
      Matrix a = parse_matrix(req.at("A"), "A");
      std::vector<double> center = parse_vector(req.at("a"), "a");
      std::optional<std::vector<double>> b;
      if (req.contains("b")) b = parse_vector(req.at("b"), "b");
      return {id, [=]() {
                return equality_case(a, center, tols, b ? &*b : nullptr);
              }};
    }
    if (id == "gauss_translation") {
      GaussianNd mu = gauss_arg("mu"), nu = gauss_arg("nu");
      std::vector<double> a = parse_vector(req.at("a"), "a");
      return {id, [=]() { return translation_check(mu, nu, a, tols); }};
    }
    if (id == "ssti_gauss") {
      GaussianNd mu = gauss_arg("mu"), nu = gauss_arg("nu");
      return {id, [=]() { return gauss_ssti(mu, nu, tols); }};
    }
    if (id == "sti2_gauss") {
      GaussianNd mu = gauss_arg("mu"), nu = gauss_arg("nu");
      return {id, [=]() { return gauss_sti2(mu, nu, tols); }};
    }
    if (id == "logdet") {
      Matrix a = parse_matrix(req.at("A"), "A");
      Matrix b = parse_matrix(req.at("B"), "B");
      const double t = req.at("t").get<double>();
      return {id, [=]() { return logdet_certificate(a, b, t, tols); }};
    }
    fail(ErrorKind::UnknownInequality, "unknown inequality id '" + id + "'; " +
                                            catalog_message());
  };

  auto lookup_global = [this](const std::string& name) { return measure(name); };

  if (root.contains("certificates")) {
    for (const json& req : root.at("certificates")) {
      // Randomized requests expand deterministically from the config seed.
      if (req.contains("random")) {
        const json& r = req.at("random");
        const std::string id = req.at("id").get<std::string>();
        const int count = r.at("count").get<int>();
        const int max_dim = r.contains("max_dim") ? r.at("max_dim").get<int>() : 4;
        double eig_lo = 0.2, eig_hi = 5.0, mean_lo = -2.0, mean_hi = 2.0;
        if (r.contains("eig_range")) {
          eig_lo = r.at("eig_range")[0].get<double>();
          eig_hi = r.at("eig_range")[1].get<double>();
        }
        if (r.contains("mean_range")) {
          mean_lo = r.at("mean_range")[0].get<double>();
          mean_hi = r.at("mean_range")[1].get<double>();
        }
        Tolerances rtols{settings_.atol, settings_.rtol};
        for (int i = 0; i < count; ++i) {
          const int dim = rng.integer(1, max_dim);
          if (id == "gauss_equality") {
            Matrix a = random_spd(rng, dim, eig_lo, eig_hi);
            GaussianNd center = random_gaussian(rng, dim, eig_lo, eig_hi, mean_lo, mean_hi);
            requests_.push_back({id, [=]() {
                                   return equality_case(a, center.mean, rtols);
                                 }});
          } else if (id == "ssti_gauss") {
            GaussianNd mu = random_gaussian(rng, dim, eig_lo, eig_hi, mean_lo, mean_hi);
            GaussianNd nu = random_gaussian(rng, dim, eig_lo, eig_hi, mean_lo, mean_hi);
            requests_.push_back({id, [=]() { return gauss_ssti(mu, nu, rtols); }});
          } else if (id == "logdet") {
            Matrix a = random_spd(rng, dim, eig_lo, eig_hi);
            Matrix b = random_spd(rng, dim, eig_lo, eig_hi);
            const double t = rng(0.0, 1.0);
            requests_.push_back({id, [=]() { return logdet_certificate(a, b, t, rtols); }});
          } else if (id == "gauss_translation") {
            GaussianNd mu = random_gaussian(rng, dim, eig_lo, eig_hi, mean_lo, mean_hi);
            GaussianNd nu = random_gaussian(rng, dim, eig_lo, eig_hi, mean_lo, mean_hi);
            std::vector<double> shift(dim);
            for (double& x : shift) x = rng(mean_lo, mean_hi);
            requests_.push_back(
                {id, [=]() { return translation_check(mu, nu, shift, rtols); }});
          } else {
            fail(ErrorKind::ConfigError, "randomized requests unsupported for id '" + id + "'");
          }
        }
        continue;
      }
      requests_.push_back(make_request(req, no_vars, lookup_global));
    }
  }

  if (root.contains("sweeps")) {
    for (const json& sw : root.at("sweeps")) {
      Sweep sweep;
      sweep.id = sw.at("id").get<std::string>();
      sweep.out_path = sw.contains("out") ? sw.at("out").get<std::string>()
                                          : sweep.id + "_sweep.csv";
      std::vector<std::vector<double>> axis_values;
      if (sw.contains("axes")) {
        for (const json& ax : sw.at("axes")) {
          sweep.axis_names.push_back(ax.at("name").get<std::string>());
          const double lo = ax.at("min").get<double>();
          const double hi = ax.at("max").get<double>();
          std::vector<double> values;
          if (ax.contains("count")) {
            const int count = ax.at("count").get<int>();
            if (count < 1) fail(ErrorKind::ConfigError, "axis count must be >= 1");
            for (int i = 0; i < count; ++i) {
              values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            }
          } else {
            const double step = ax.at("step").get<double>();
            if (!(step > 0)) fail(ErrorKind::ConfigError, "axis step must be positive");
            for (double v = lo; v <= hi + 0.5 * step; v += step) values.push_back(v);
          }
          axis_values.push_back(std::move(values));
        }
      }
      size_t total = 1;
      for (const auto& vals : axis_values) {
        total *= vals.size();
        if (total > 1000000) fail(ErrorKind::SizeLimit, "sweep grid exceeds 10^6 points");
      }
      // Row-major enumeration over the axis grid.
      std::vector<size_t> idx(axis_values.size(), 0);
      for (size_t point = 0; point < total; ++point) {
        std::map<std::string, double> vars;
        std::vector<double> coords;
        for (size_t k = 0; k < axis_values.size(); ++k) {
          vars[sweep.axis_names[k]] = axis_values[k][idx[k]];
          coords.push_back(axis_values[k][idx[k]]);
        }
        // Local parametric measures shadow globals.
        auto lookup_local = [this, sw, vars](const std::string& name) -> Measure1D {
          if (sw.contains("measures") && sw.at("measures").contains(name)) {
            std::function<Measure1D(const std::string&)> rec =
                [&](const std::string& inner) -> Measure1D {
              if (sw.at("measures").contains(inner) && inner != name) {
                return build_measure(sw.at("measures").at(inner), vars,
                                     [this](const std::string& n) { return measure(n); });
              }
              return measure(inner);
            };
            return build_measure(sw.at("measures").at(name), vars, rec);
          }
          return measure(name);
        };
        sweep.points.push_back(coords);
        sweep.requests.push_back(make_request(sw, vars, lookup_local));
        // advance the odometer
        for (size_t k = axis_values.size(); k-- > 0;) {
          if (++idx[k] < axis_values[k].size()) break;
          idx[k] = 0;
        }
      }
      sweeps_.push_back(std::move(sweep));
    }
  }
}

RunConfig RunConfig::load(const std::string& path, std::optional<double> atol_override,
                          std::optional<double> rtol_override,
                          std::optional<std::uint64_t> seed_override,
                          std::optional<int> threads_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  RunConfig config;
  config.digest_ = fnv1a_digest(buffer.str());
  // Overrides are applied before requests are baked so tolerances propagate;
  // the digest always covers the raw config bytes.
  std::string text = buffer.str();
  if (atol_override || rtol_override || seed_override || threads_override) {
    json patched = json::parse(text);
    json& s = patched["settings"];
    if (atol_override) s["atol"] = *atol_override;
    if (rtol_override) s["rtol"] = *rtol_override;
    if (seed_override) s["seed"] = *seed_override;
    if (threads_override) s["threads"] = *threads_override;
    text = patched.dump();
  }
  config.parse(text);
  return config;
}

RunResult RunConfig::run_verify() const {
  RunResult result;
  result.seed = settings_.seed;
  result.config_digest = digest_;
  result.certificates.resize(requests_.size());

  const int threads = std::max(1, settings_.threads);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= requests_.size()) break;
      CertRecord& rec = result.certificates[i];
      rec.request_id = requests_[i].id;
      try {
        rec.cert = requests_[i].run();
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const CertRecord& rec : result.certificates) {
    if (!rec.ok) {
      ++result.errors;
    } else if (rec.cert.verdict == Verdict::Violated) {
      ++result.violated;
    }
  }
  return result;
}

RunResult RunConfig::run_sweeps() const {
  RunResult result;
  result.seed = settings_.seed;
  result.config_digest = digest_;
  const int threads = std::max(1, settings_.threads);

  for (const Sweep& sweep : sweeps_) {
    SweepResult sr;
    sr.inequality_id = sweep.id;
    sr.axis_names = sweep.axis_names;
    sr.out_path = sweep.out_path;
    sr.records.resize(sweep.requests.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= sweep.requests.size()) break;
        CertRecord& rec = sr.records[i];
        rec.request_id = sweep.requests[i].id;
        rec.axis_values = sweep.points[i];
        try {
          rec.cert = sweep.requests[i].run();
          rec.ok = true;
        } catch (const std::exception& e) {
          rec.ok = false;
          rec.error = e.what();
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    for (const CertRecord& rec : sr.records) {
      if (!rec.ok) {
        ++result.errors;
      } else if (rec.cert.verdict == Verdict::Violated) {
        ++result.violated;
      }
    }
    result.sweeps.push_back(std::move(sr));
  }
  return result;
}

void write_report(const std::string& path, const RunResult& result) {
  json root;
  root["tool"] = "talcert";
  root["version"] = "0.1.0";
  root["config_digest"] = result.config_digest;
  root["seed"] = result.seed;

  json certs = json::array();
  size_t holds = 0, tight = 0, violated = 0, unverified = 0, errors = 0;
  double min_slack = kInf;
  std::string min_slack_id;
  auto add_record = [&](const CertRecord& rec) {
    json r;
    r["request"] = rec.request_id;
    if (!rec.axis_values.empty()) r["axis_values"] = rec.axis_values;
    if (rec.ok) {
      r["certificate"] = certificate_to_json(rec.cert);
      switch (rec.cert.verdict) {
        case Verdict::Holds: ++holds; break;
        case Verdict::Tight: ++tight; break;
        case Verdict::Violated: ++violated; break;
        case Verdict::HypothesesUnverified: ++unverified; break;
      }
      if (rec.cert.slack < min_slack) {
        min_slack = rec.cert.slack;
        min_slack_id = rec.cert.inequality_id;
      }
    } else {
      r["error"] = rec.error;
      ++errors;
    }
    certs.push_back(r);
  };
  for (const CertRecord& rec : result.certificates) add_record(rec);
  for (const SweepResult& sweep : result.sweeps) {
    for (const CertRecord& rec : sweep.records) add_record(rec);
  }
  root["certificates"] = certs;

  json summary;
  summary["total"] = certs.size();
  summary["holds"] = holds;
  summary["tight"] = tight;
  summary["violated"] = violated;
  summary["hypotheses_unverified"] = unverified;
  summary["errors"] = errors;
  if (std::isfinite(min_slack)) {
    summary["min_slack"] = min_slack;
    summary["min_slack_id"] = min_slack_id;
  }
  root["summary"] = summary;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::ConfigError, "cannot write report to '" + tmp + "'");
    out << root.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    fail(ErrorKind::ConfigError, "cannot move report into place at '" + path + "'");
  }
}

void write_sweep_csv(const SweepResult& sweep) {
  std::ofstream out(sweep.out_path, std::ios::binary);
  if (!out) fail(ErrorKind::ConfigError, "cannot write sweep CSV '" + sweep.out_path + "'");
  for (const std::string& name : sweep.axis_names) out << name << ",";
  out << "lhs,rhs,slack,verdict\n";
  for (const CertRecord& rec : sweep.records) {
    for (double v : rec.axis_values) out << format17(v) << ",";
    if (rec.ok) {
      out << format17(rec.cert.lhs) << "," << format17(rec.cert.rhs) << ","
          << format17(rec.cert.slack) << "," << verdict_name(rec.cert.verdict) << "\n";
    } else {
      out << ",,,error\n";
    }
  }
}

int exit_code_for(const RunResult& result) {
  if (result.violated > 0) return 2;
  if (result.errors > 0) return 1;
  return 0;
}

}  // namespace tal
