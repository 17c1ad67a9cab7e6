#include "tal/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tal/special.hpp"

namespace tal {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Potential growth (relative to the minimum) at which the density is cut:
// e^{-92} ~ 1e-40, far below every tolerance used downstream.
constexpr double kLogCut = 92.0;

double finite_or_throw(double v, const char* what) {
  if (std::isnan(v)) fail(ErrorKind::InvalidPotential, std::string("NaN in ") + what);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// PotentialSpec
// ---------------------------------------------------------------------------

PotentialSpec PotentialSpec::quadratic(double center, double curvature, double offset) {
  if (!(curvature > 0)) fail(ErrorKind::InvalidPotential, "quadratic potential needs curvature > 0");
  PotentialSpec spec;
  spec.family_ = "quadratic";
  spec.v_ = [=](double x) { return 0.5 * curvature * (x - center) * (x - center) + offset; };
  spec.dv_ = [=](double x) { return curvature * (x - center); };
  spec.d2v_ = [=](double) { return curvature; };
  spec.kappa_lo_ = curvature;
  spec.kappa_hi_ = curvature;
  spec.hint_ = center;
  return spec;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) fail(ErrorKind::InvalidPotential, "empty polynomial potential");
  auto eval = [](const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  };
  auto derive = [](const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    return d;
  };
  std::vector<double> d1 = derive(coeffs);
  std::vector<double> d2 = derive(d1);
  PotentialSpec spec;
  spec.family_ = "polynomial";
  spec.v_ = [coeffs, eval](double x) { return eval(coeffs, x); };
  spec.dv_ = [d1, eval](double x) { return eval(d1, x); };
  spec.d2v_ = [d2, eval](double x) { return eval(d2, x); };
  return spec;
}

PotentialSpec PotentialSpec::from_expr(const Expr& v, std::optional<double> hint) {
  Expr dv = v.derivative();
  Expr d2v = dv.derivative();
  PotentialSpec spec;
  spec.family_ = "expr";
  spec.v_ = [v](double x) { return v(x); };
  spec.dv_ = [dv](double x) { return dv(x); };
  spec.d2v_ = [d2v](double x) { return d2v(x); };
  spec.hint_ = hint;
  return spec;
}

PotentialSpec PotentialSpec::custom(Fn1 v, Fn1 dv, Fn1 d2v, std::optional<double> hint,
                                    std::string label) {
  PotentialSpec spec;
  spec.family_ = std::move(label);
  spec.v_ = std::move(v);
  spec.dv_ = std::move(dv);
  spec.d2v_ = std::move(d2v);
  spec.hint_ = hint;
  return spec;
}

PotentialSpec& PotentialSpec::with_bounds(std::optional<double> kappa_lo,
                                          std::optional<double> kappa_hi) {
  if (kappa_lo && !(*kappa_lo > 0)) fail(ErrorKind::MissingBounds, "kappa_lo must be positive");
  if (kappa_hi && !(*kappa_hi > 0)) fail(ErrorKind::MissingBounds, "kappa_hi must be positive");
  kappa_lo_ = kappa_lo;
  kappa_hi_ = kappa_hi;
  return *this;
}

PotentialSpec& PotentialSpec::with_hint(double hint) {
  hint_ = hint;
  return *this;
}

void PotentialSpec::spot_check(std::span<const double> xs, double tol) const {
  for (double x : xs) {
    const double v = finite_or_throw(v_(x), "potential V");
    const double dv = finite_or_throw(dv_(x), "potential V'");
    const double d2v = finite_or_throw(d2v_(x), "potential V''");
    if (kappa_lo_ && d2v < *kappa_lo_ - tol * std::max(1.0, std::abs(*kappa_lo_))) {
      fail(ErrorKind::MissingBounds,
           "V''(" + format_double(x) + ") = " + format_double(d2v) +
               " violates declared lower bound " + format_double(*kappa_lo_));
    }
    if (kappa_hi_ && d2v > *kappa_hi_ + tol * std::max(1.0, std::abs(*kappa_hi_))) {
      fail(ErrorKind::MissingBounds,
           "V''(" + format_double(x) + ") = " + format_double(d2v) +
               " violates declared upper bound " + format_double(*kappa_hi_));
    }
    const double h = 1e-5 * (1.0 + std::abs(x));
    const double fd = (v_(x + h) - v_(x - h)) / (2.0 * h);
    const double fd_err = std::abs(fd - dv);
    // Central differences are O(h^2); allow for the h^2 V''' term plus roundoff.
    const double allowance = 1e-4 * h * (1.0 + std::abs(dv) + std::abs(d2v)) +
                             h * h * (1.0 + std::abs(v)) + 1e-9 * (1.0 + std::abs(dv));
    if (fd_err > std::max(1e-6, 300 * allowance)) {
      fail(ErrorKind::InvalidPotential,
           "V' inconsistent with central difference of V at x = " + format_double(x));
    }
  }
}

// ---------------------------------------------------------------------------
// IntervalSet
// ---------------------------------------------------------------------------

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const Interval& iv : intervals) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo <= iv.hi)) {
      fail(ErrorKind::DomainError, "malformed interval in interval set");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalSet IntervalSet::whole_line() { return IntervalSet({Interval{-kInf, kInf}}); }

IntervalSet IntervalSet::single(double lo, double hi) { return IntervalSet({Interval{lo, hi}}); }

bool IntervalSet::contains(double x) const {
  for (const Interval& iv : intervals_) {
    if (iv.contains(x)) return true;
  }
  return false;
}

bool IntervalSet::is_whole_line() const {
  return intervals_.size() == 1 && intervals_[0].lo == -kInf && intervals_[0].hi == kInf;
}

double IntervalSet::distance_to(const IntervalSet& other) const {
  double best = kInf;
  for (const Interval& a : intervals_) {
    for (const Interval& b : other.intervals_) {
      if (a.hi >= b.lo && b.hi >= a.lo) return 0.0;  // overlap
      best = std::min(best, a.lo > b.hi ? a.lo - b.hi : b.lo - a.hi);
    }
  }
  return best;
}

IntervalSet IntervalSet::mirrored() const {
  std::vector<Interval> flipped;
  for (const Interval& iv : intervals_) flipped.push_back(Interval{-iv.hi, -iv.lo});
  return IntervalSet(std::move(flipped));
}

std::string IntervalSet::describe() const {
  std::ostringstream out;
  for (size_t i = 0; i < intervals_.size(); ++i) {
    if (i) out << " u ";
    out << "[" << format_double(intervals_[i].lo) << ", " << format_double(intervals_[i].hi)
        << "]";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Measure defaults
// ---------------------------------------------------------------------------

double Measure::log_density_derivative(double x) const {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x));
  return (log_density(x + h) - log_density(x - h)) / (2.0 * h);
}

double Measure::log_density_second_derivative(double x) const {
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + std::abs(x));
  return (log_density(x + h) - 2.0 * log_density(x) + log_density(x - h)) / (h * h);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

QuadResult integrate_against(const Measure1D& mu, const Fn1& g, double rel_tol) {
  std::vector<double> breaks = mu.p_breakpoints();
  Fn1 central = [&](double p) { return g(mu.quantile(p)); };
  Fn1 lower = [&](double q) { return g(mu.quantile_lower_tail(q)); };
  Fn1 upper = [&](double q) { return g(mu.quantile_upper_tail(q)); };
  return integrate_quantile_coords(central, lower, upper, breaks, 1e-6, rel_tol);
}

double stable_interval_mass(const Measure1D& m, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo == -kInf && hi == kInf) return 1.0;
  if (lo == -kInf) return m.cdf(hi);
  if (hi == kInf) return m.ccdf(lo);
  double diff;
  if (m.cdf(hi) <= 0.5) {
    diff = m.cdf(hi) - m.cdf(lo);
  } else if (m.ccdf(lo) <= 0.5) {
    diff = m.ccdf(lo) - m.ccdf(hi);
  } else {
    diff = m.cdf(hi) - m.cdf(lo);
  }
  if (diff < 1e-8) {
    diff = integrate_doubling([&m](double t) { return m.density(t); }, lo, hi, 1e-10, 2,
                              1 << 10)
               .value;
  }
  return std::max(diff, 0.0);
}

double mass_of(const Measure1D& m, const IntervalSet& a) {
  double total = 0.0;
  for (const Interval& iv : a.intervals()) total += stable_interval_mass(m, iv.lo, iv.hi);
  return std::min(total, 1.0);
}

Moments compute_moments(const Measure& measure, double mode_search_tol_d) {
  Measure1D handle(std::shared_ptr<const Measure>(&measure, [](const Measure*) {}));
  Moments m;
  m.barycenter = integrate_against(handle, [](double x) { return x; }).value;
  m.second_moment = integrate_against(handle, [](double x) { return x * x; }).value;

  // Mode: scan densities on a dense quantile grid plus structural points,
  // then polish the best interior bracket.
  std::vector<double> xs;
  const int n = 2001;
  for (int i = 0; i < n; ++i) {
    const double p = 1e-5 + (1.0 - 2e-5) * i / (n - 1);
    xs.push_back(measure.quantile(p));
  }
  for (double b : measure.x_breakpoints()) xs.push_back(b);
  Interval sup = measure.support();
  if (std::isfinite(sup.lo)) xs.push_back(sup.lo);
  if (std::isfinite(sup.hi)) xs.push_back(sup.hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> dens(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) dens[i] = measure.density(xs[i]);

  // Collect local maxima of the sampled profile.
  std::vector<size_t> peaks;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double left = i ? dens[i - 1] : -1.0;
    const double right = i + 1 < xs.size() ? dens[i + 1] : -1.0;
    if (dens[i] >= left && dens[i] >= right) peaks.push_back(i);
  }
  size_t best = peaks.empty() ? 0 : peaks[0];
  for (size_t p : peaks) {
    if (dens[p] > dens[best]) best = p;
  }

  double mode = xs[best];
  // Golden-section polish inside the neighbor bracket (interior maxima only).
  if (best > 0 && best + 1 < xs.size()) {
    double a = xs[best - 1], b = xs[best + 1];
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = measure.density(c), fd = measure.density(d);
    for (int it = 0; it < 90 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = measure.density(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = measure.density(d);
      }
    }
    mode = 0.5 * (a + b);
    if (measure.density(mode) < dens[best]) mode = xs[best];
  }

  const double best_density = measure.density(mode);
  const double tol_x = 1e-6 * std::max(1.0, std::sqrt(std::max(m.second_moment, 0.0)));
  for (size_t p : peaks) {
    if (std::abs(xs[p] - mode) <= tol_x) continue;
    const double gap = (best_density - dens[p]) / std::max(best_density, 1e-300);
    if (gap < mode_search_tol_d) {
      m.mode_ambiguous = true;
      break;
    }
  }
  m.mode = mode;
  return m;
}

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

namespace {

class GaussianMeasure final : public Measure {
 public:
  GaussianMeasure(double mean, double variance) : mean_(mean), var_(variance) {
    if (!std::isfinite(mean) || !std::isfinite(variance)) {
      fail(ErrorKind::InvalidPotential, "gaussian parameters must be finite");
    }
    if (!(variance > 0)) {
      fail(ErrorKind::InvalidPotential, "zero-variance (Dirac) measures are not representable");
    }
    sd_ = std::sqrt(variance);
    moments_.barycenter = mean;
    moments_.second_moment = mean * mean + variance;
    moments_.mode = mean;
  }

  double density(double x) const override {
    const double z = (x - mean_) / sd_;
    return std::exp(-0.5 * z * z) / (sd_ * 2.5066282746310002);
  }
  double log_density(double x) const override {
    const double z = (x - mean_) / sd_;
    return -0.5 * z * z - std::log(sd_) - 0.9189385332046727;
  }
  double cdf(double x) const override { return norm_cdf((x - mean_) / sd_); }
  double ccdf(double x) const override { return norm_ccdf((x - mean_) / sd_); }
  double quantile(double p) const override { return mean_ + sd_ * norm_quantile(p); }
  double quantile_lower_tail(double q) const override {
    return mean_ + sd_ * norm_quantile_lower(q);
  }
  double quantile_upper_tail(double q) const override {
    return mean_ + sd_ * norm_quantile_upper(q);
  }
  Interval support() const override { return Interval{-kInf, kInf}; }
  double log_density_derivative(double x) const override { return -(x - mean_) / var_; }
  double log_density_second_derivative(double) const override { return -1.0 / var_; }
  bool has_analytic_score() const override { return true; }
  std::optional<double> convexity_lower() const override { return 1.0 / var_; }
  std::optional<double> convexity_upper() const override { return 1.0 / var_; }
  bool full_support() const override { return true; }
  std::string describe() const override {
    return "gaussian(mean=" + format_double(mean_) + ", var=" + format_double(var_) + ")";
  }

  double mean() const { return mean_; }
  double variance() const { return var_; }

 private:
  double mean_, var_, sd_;
};

// ---------------------------------------------------------------------------
// Potential-backed measure with tabulated CDF
// ---------------------------------------------------------------------------

class ExpPotentialMeasure final : public Measure {
 public:
  ExpPotentialMeasure(PotentialSpec pot, std::optional<Interval> domain_hint,
                      bool is_tilt = false, std::string describe_override = "")
      : pot_(std::move(pot)),
        is_tilt_(is_tilt),
        describe_override_(std::move(describe_override)) {
    locate_mode(domain_hint);
    choose_range(domain_hint);
    normalize();
    build_tables();
    pot_.spot_check(sample_grid(), 1e-6);
    moments_ = compute_moments(*this);
  }

  double density(double x) const override { return std::exp(log_density(x)); }
  double log_density(double x) const override {
    return -(finite_or_throw(pot_(x), "potential V") - vmin_) - log_i_;
  }
  double cdf(double x) const override {
    if (x <= lo_) return tail_lo_ * std::exp(-(pot_(x) - pot_(lo_)));
    if (x >= hi_) return 1.0 - ccdf(x);
    const size_t k = panel_index(x);
    return tail_lo_ + cum_[k] + gl_panel([this](double t) { return density(t); }, edge(k), x);
  }
  double ccdf(double x) const override {
    if (x >= hi_) return tail_hi_ * std::exp(-(pot_(x) - pot_(hi_)));
    if (x <= lo_) return 1.0 - cdf(x);
    const size_t k = panel_index(x);
    return tail_hi_ + rcum_[k + 1] +
           gl_panel([this](double t) { return density(t); }, x, edge(k + 1));
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "quantile needs p in (0,1)");
    if (p <= 0.5) return solve_lower(p);
    return solve_upper(1.0 - p);
  }
  double quantile_lower_tail(double q) const override {
    if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::DomainError, "tail mass must be in (0,1)");
    return q <= 0.5 ? solve_lower(q) : solve_upper(1.0 - q);
  }
  double quantile_upper_tail(double q) const override {
    if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::DomainError, "tail mass must be in (0,1)");
    return q <= 0.5 ? solve_upper(q) : solve_lower(1.0 - q);
  }
  Interval support() const override { return Interval{-kInf, kInf}; }
  double log_density_derivative(double x) const override { return -pot_.deriv(x); }
  double log_density_second_derivative(double x) const override { return -pot_.second_deriv(x); }
  bool has_analytic_score() const override { return true; }
  std::optional<double> convexity_lower() const override { return pot_.kappa_lower(); }
  std::optional<double> convexity_upper() const override { return pot_.kappa_upper(); }
  bool full_support() const override { return true; }
  std::string describe() const override {
    if (!describe_override_.empty()) return describe_override_;
    return "potential(" + pot_.family() + ")";
  }

  double log_norm_constant() const { return log_i_ + vmin_; }
  std::optional<double> tilt_log_integral() const {
    if (!is_tilt_) return std::nullopt;
    // The tilted potential is V_base - kappa F with V_base = -log rho_base, so
    // the normalization constant equals int e^{kappa F} dm.
    return log_norm_constant();
  }
  const PotentialSpec& potential() const { return pot_; }
  Interval effective_range() const { return Interval{lo_, hi_}; }

 private:
  double edge(size_t k) const { return lo_ + (hi_ - lo_) * k / panels_; }
  size_t panel_index(double x) const {
    double t = (x - lo_) / (hi_ - lo_) * panels_;
    long k = static_cast<long>(t);
    k = std::clamp<long>(k, 0, static_cast<long>(panels_) - 1);
    return static_cast<size_t>(k);
  }

  std::vector<double> sample_grid() const {
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(lo_ + (hi_ - lo_) * i / 40.0);
    return xs;
  }

  void locate_mode(const std::optional<Interval>& domain_hint) {
    double center = pot_.minimizer_hint().value_or(0.0);
    if (domain_hint && !domain_hint->contains(center)) {
      center = 0.5 * (std::max(domain_hint->lo, -1e6) + std::min(domain_hint->hi, 1e6));
    }
    finite_or_throw(pot_(center), "potential V");
    // Coarse scan outward from the hint until the potential has climbed by
    // kLogCut on both sides; tracks the global sampled minimum on the way.
    double best_x = center, best_v = pot_(center);
    auto scan_side = [&](double dir) {
      double step = 0.25 * (1.0 + std::abs(center));
      double x = center;
      double climbed = -kInf;
      for (int it = 0; it < 400; ++it) {
        x += dir * step;
        step *= 1.35;
        if (std::abs(x) > 1e9) {
          fail(ErrorKind::NonIntegrable, "potential does not grow; e^{-V} is not integrable");
        }
        const double v = finite_or_throw(pot_(x), "potential V");
        if (v < best_v) {
          best_v = v;
          best_x = x;
        }
        climbed = v - best_v;
        if (climbed >= kLogCut * 1.2) return x;
      }
      fail(ErrorKind::NonIntegrable, "potential does not grow; e^{-V} is not integrable");
    };
    scan_lo_ = scan_side(-1.0);
    scan_hi_ = scan_side(+1.0);

    // Newton polish of the sampled minimum, safeguarded inside the scan range.
    double x = best_x;
    for (int it = 0; it < 80; ++it) {
      const double g = pot_.deriv(x);
      const double h = pot_.second_deriv(x);
      double step = (std::isfinite(h) && h > 1e-14) ? g / h : g * 0.1;
      if (!std::isfinite(step)) break;
      step = std::clamp(step, -0.5 * (scan_hi_ - scan_lo_), 0.5 * (scan_hi_ - scan_lo_));
      const double xn = std::clamp(x - step, scan_lo_, scan_hi_);
      if (pot_(xn) <= pot_(x)) x = xn;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    mode_ = pot_(x) <= best_v ? x : best_x;
    vmin_ = pot_(mode_);
  }

  void choose_range(const std::optional<Interval>& domain_hint) {
    auto cut_point = [&](double from, double to) {
      // First x between from (inside) and to (outside) with V - vmin = kLogCut.
      double a = from, b = to;
      for (int it = 0; it < 200; ++it) {
        const double midpoint = 0.5 * (a + b);
        if ((pot_(midpoint) - vmin_) >= kLogCut) {
          b = midpoint;
        } else {
          a = midpoint;
        }
        if (std::abs(b - a) < 1e-12 * (1.0 + std::abs(a))) break;
      }
      return b;
    };
    lo_ = cut_point(mode_, scan_lo_);
    hi_ = cut_point(mode_, scan_hi_);
    if (domain_hint) {
      lo_ = std::max(lo_, domain_hint->lo);
      hi_ = std::min(hi_, domain_hint->hi);
    }
    if (auto kappa = pot_.kappa_lower(); kappa && *kappa > 0) {
      const double radius = std::sqrt(2.0 * kLogCut / *kappa);
      lo_ = std::max(lo_, mode_ - radius);
      hi_ = std::min(hi_, mode_ + radius);
    }
    if (!(hi_ > lo_)) fail(ErrorKind::InvalidPotential, "degenerate integration range");
  }

  void normalize() {
    Fn1 shifted = [this](double x) { return std::exp(-(pot_(x) - vmin_)); };
    QuadResult z = integrate_doubling(shifted, lo_, hi_, 1e-12, 64, 1 << 15);
    if (!(z.value > 0) || !std::isfinite(z.value)) {
      fail(ErrorKind::NonIntegrable, "normalization integral is not finite and positive");
    }
    log_i_ = std::log(z.value);
    norm_error_ = z.error_estimate / z.value;
  }

  void build_tables() {
    panels_ = 1024;
    cum_.assign(panels_ + 1, 0.0);
    rcum_.assign(panels_ + 1, 0.0);
    std::vector<double> s(panels_);
    for (size_t k = 0; k < panels_; ++k) {
      s[k] = gl_panel([this](double t) { return density(t); }, edge(k), edge(k + 1));
    }
    for (size_t k = 0; k < panels_; ++k) cum_[k + 1] = cum_[k] + s[k];
    for (size_t k = panels_; k-- > 0;) rcum_[k] = rcum_[k + 1] + s[k];
    // Certified bounds on the mass outside the table: the potential is within
    // kLogCut of its minimum inside, and decays at least linearly with slope
    // |V'| at the boundary outside.
    const double slope_lo = std::max(-pot_.deriv(lo_), 1e-2);
    const double slope_hi = std::max(pot_.deriv(hi_), 1e-2);
    tail_lo_ = density(lo_) / slope_lo;
    tail_hi_ = density(hi_) / slope_hi;
    const double total = tail_lo_ + cum_[panels_] + tail_hi_;
    if (std::abs(total - 1.0) > 1e-9) {
      fail(ErrorKind::NonIntegrable,
           "normalized density does not integrate to 1 (defect " + format_double(total - 1.0) +
               ")");
    }
  }

  // Solve cdf(x) = q (q <= 0.5) with a bracketed Newton iteration.
  double solve_lower(double q) const {
    if (q <= tail_lo_) return lo_;
    auto cum_at = [&](size_t k) { return tail_lo_ + cum_[k]; };
    size_t klo = 0, khi = panels_;
    while (khi - klo > 1) {
      const size_t mid = (klo + khi) / 2;
      if (cum_at(mid) < q) {
        klo = mid;
      } else {
        khi = mid;
      }
    }
    double a = edge(klo), b = edge(khi);
    double x = a + (b - a) * std::clamp((q - cum_at(klo)) /
                                            std::max(cum_at(khi) - cum_at(klo), 1e-300),
                                        0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
      const double f = cdf(x) - q;
      if (f > 0) {
        b = x;
      } else {
        a = x;
      }
      const double d = density(x);
      double xn = d > 0 ? x - f / d : kNaN;
      if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
      if (std::abs(xn - x) < 1e-13 * (1.0 + std::abs(x)) || (b - a) < 1e-13 * (1.0 + std::abs(a))) {
        x = xn;
        break;
      }
      x = xn;
    }
    return x;
  }

  // Solve ccdf(x) = q (q <= 0.5).
  double solve_upper(double q) const {
    if (q <= tail_hi_) return hi_;
    auto rcum_at = [&](size_t k) { return tail_hi_ + rcum_[k]; };
    size_t klo = 0, khi = panels_;
    while (khi - klo > 1) {
      const size_t mid = (klo + khi) / 2;
      if (rcum_at(mid) > q) {
        klo = mid;
      } else {
        khi = mid;
      }
    }
    double a = edge(klo), b = edge(khi);
    double x = a + (b - a) * std::clamp((rcum_at(klo) - q) /
                                            std::max(rcum_at(klo) - rcum_at(khi), 1e-300),
                                        0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
      const double f = ccdf(x) - q;  // decreasing in x
      if (f > 0) {
        a = x;
      } else {
        b = x;
      }
      const double d = density(x);
      double xn = d > 0 ? x + f / d : kNaN;
      if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
      if (std::abs(xn - x) < 1e-13 * (1.0 + std::abs(x)) || (b - a) < 1e-13 * (1.0 + std::abs(a))) {
        x = xn;
        break;
      }
      x = xn;
    }
    return x;
  }

  PotentialSpec pot_;
  bool is_tilt_ = false;
  std::string describe_override_;
  double mode_ = 0.0, vmin_ = 0.0, log_i_ = 0.0;
  double scan_lo_ = 0.0, scan_hi_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  double tail_lo_ = 0.0, tail_hi_ = 0.0;
  double norm_error_ = 0.0;
  size_t panels_ = 0;
  std::vector<double> cum_, rcum_;
};

// ---------------------------------------------------------------------------
// Piecewise-linear grid density
// ---------------------------------------------------------------------------

class GridMeasure final : public Measure {
 public:
  GridMeasure(std::vector<double> nodes, std::vector<double> values)
      : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
      fail(ErrorKind::InvalidPotential, "grid measure needs matching nodes/values, >= 2 points");
    }
    for (size_t i = 0; i + 1 < nodes_.size(); ++i) {
      if (!(nodes_[i] < nodes_[i + 1])) {
        fail(ErrorKind::InvalidPotential, "grid nodes must be strictly increasing");
      }
    }
    double total = 0.0;
    for (size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
        fail(ErrorKind::InvalidPotential, "grid density values must be finite and >= 0");
      }
      if (i + 1 < values_.size()) {
        total += 0.5 * (values_[i] + values_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
      }
    }
    if (!(total > 0)) fail(ErrorKind::InvalidPotential, "grid density has zero mass");
    for (double& v : values_) v /= total;
    cum_.assign(nodes_.size(), 0.0);
    for (size_t i = 0; i + 1 < nodes_.size(); ++i) {
      cum_[i + 1] = cum_[i] + 0.5 * (values_[i] + values_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
    }
    cum_.back() = 1.0;
    moments_ = compute_moments(*this);
  }

  double density(double x) const override {
    if (x < nodes_.front() || x > nodes_.back()) return 0.0;
    const size_t k = cell(x);
    const double t = (x - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
    return values_[k] + t * (values_[k + 1] - values_[k]);
  }
  double log_density(double x) const override {
    const double d = density(x);
    return d > 0 ? std::log(d) : -kInf;
  }
  double cdf(double x) const override {
    if (x <= nodes_.front()) return 0.0;
    if (x >= nodes_.back()) return 1.0;
    const size_t k = cell(x);
    const double dx = x - nodes_[k];
    const double slope = (values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k]);
    return cum_[k] + values_[k] * dx + 0.5 * slope * dx * dx;
  }
  double ccdf(double x) const override {
    if (x <= nodes_.front()) return 1.0;
    if (x >= nodes_.back()) return 0.0;
    const size_t k = cell(x);
    const double dx = nodes_[k + 1] - x;
    const double slope = (values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k]);
    // integrate from x to right node, then add full cells
    const double partial = values_[k + 1] * dx - 0.5 * slope * dx * dx;
    return (1.0 - cum_[k + 1]) + partial;
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "quantile needs p in (0,1)");
    size_t k = std::upper_bound(cum_.begin(), cum_.end(), p) - cum_.begin();
    k = k > 0 ? k - 1 : 0;
    while (k + 1 < cum_.size() && cum_[k + 1] <= p) ++k;
    if (k + 1 >= nodes_.size()) return nodes_.back();
    const double target = p - cum_[k];
    const double h = nodes_[k + 1] - nodes_[k];
    const double slope = (values_[k + 1] - values_[k]) / h;
    const double rho = values_[k];
    if (rho + std::abs(slope) * h < 1e-300) return nodes_[k + 1];  // empty cell
    const double disc = std::max(rho * rho + 2.0 * slope * target, 0.0);
    double t;
    if (std::abs(slope) < 1e-14 * std::max(rho, 1.0)) {
      t = target / rho;
    } else {
      t = 2.0 * target / (rho + std::sqrt(disc));
    }
    return nodes_[k] + std::clamp(t, 0.0, h);
  }
  Interval support() const override { return Interval{nodes_.front(), nodes_.back()}; }
  std::vector<double> x_breakpoints() const override { return nodes_; }
  bool smooth_density() const override { return false; }
  std::string describe() const override {
    return "grid(" + std::to_string(nodes_.size()) + " nodes on [" +
           format_double(nodes_.front()) + ", " + format_double(nodes_.back()) + "])";
  }

 private:
  size_t cell(double x) const {
    size_t k = std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin();
    if (k == 0) return 0;
    if (k >= nodes_.size()) return nodes_.size() - 2;
    return k - 1;
  }

  std::vector<double> nodes_, values_, cum_;
};

// ---------------------------------------------------------------------------
// Restriction m(.|A)
// ---------------------------------------------------------------------------

class RestrictedMeasure final : public Measure {
 public:
  RestrictedMeasure(Measure1D base, IntervalSet set) : base_(std::move(base)), set_(set) {
    if (set_.empty()) fail(ErrorKind::EmptyRestriction, "empty interval set");
    for (const Interval& iv : set_.intervals()) {
      masses_.push_back(stable_mass(iv.lo, iv.hi));
    }
    total_ = 0.0;
    for (double m : masses_) total_ += m;
    if (!(total_ > 1e-13)) {
      fail(ErrorKind::EmptyRestriction,
           "restriction set has zero mass under " + base_.describe());
    }
    prefix_.assign(masses_.size() + 1, 0.0);
    for (size_t i = 0; i < masses_.size(); ++i) prefix_[i + 1] = prefix_[i] + masses_[i];
    moments_ = compute_moments(*this);
  }

  double density(double x) const override {
    return set_.contains(x) ? base_.density(x) / total_ : 0.0;
  }
  double log_density(double x) const override {
    return set_.contains(x) ? base_.log_density(x) - std::log(total_) : -kInf;
  }
  double cdf(double x) const override {
    double acc = 0.0;
    for (size_t i = 0; i < masses_.size(); ++i) {
      const Interval& iv = set_.intervals()[i];
      if (x < iv.lo) break;
      if (x >= iv.hi) {
        acc += masses_[i];
      } else {
        acc += stable_mass(iv.lo, x);
        break;
      }
    }
    return std::min(acc / total_, 1.0);
  }
  double ccdf(double x) const override {
    double acc = 0.0;
    for (size_t i = masses_.size(); i-- > 0;) {
      const Interval& iv = set_.intervals()[i];
      if (x > iv.hi) break;
      if (x <= iv.lo) {
        acc += masses_[i];
      } else {
        acc += stable_mass(x, iv.hi);
        break;
      }
    }
    return std::min(acc / total_, 1.0);
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "quantile needs p in (0,1)");
    const double target = p * total_;
    size_t k = 0;
    while (k + 1 < masses_.size() && prefix_[k + 1] < target) ++k;
    const Interval& iv = set_.intervals()[k];
    const double local = target - prefix_[k];      // mass inside interval k
    const double remain = prefix_[k + 1] - target;  // mass to interval's right end
    if (iv.lo == -kInf) {
      return base_.quantile_lower_tail(std::max(local, 1e-300));
    }
    if (iv.hi == kInf) {
      return base_.quantile_upper_tail(std::max(remain, 1e-300));
    }
    const double pa = base_.cdf(iv.lo);
    const double pb = base_.cdf(iv.hi);
    double pt = pa + local;
    // Choose the better-conditioned side of the bracket.
    if (remain < local) pt = pb - remain;
    pt = std::clamp(pt, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
    return std::clamp(base_.quantile(pt), iv.lo, iv.hi);
  }
  double quantile_lower_tail(double q) const override {
    const Interval& iv = set_.intervals().front();
    if (iv.lo == -kInf) return base_.quantile_lower_tail(q * total_);
    // Finite left edge: expand from the edge with a local Newton.
    double x = iv.lo;
    const double target = q * total_;
    for (int it = 0; it < 100; ++it) {
      const double f = stable_mass(iv.lo, x) - target;
      const double d = base_.density(x);
      if (d <= 0) break;
      const double step = f / d;
      x = std::clamp(x - step, iv.lo, iv.hi);
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    return x;
  }
  double quantile_upper_tail(double q) const override {
    const Interval& iv = set_.intervals().back();
    if (iv.hi == kInf) return base_.quantile_upper_tail(q * total_);
    double x = iv.hi;
    const double target = q * total_;
    for (int it = 0; it < 100; ++it) {
      const double f = stable_mass(x, iv.hi) - target;
      const double d = base_.density(x);
      if (d <= 0) break;
      const double step = f / d;
      x = std::clamp(x + step, iv.lo, iv.hi);
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    return x;
  }
  Interval support() const override {
    return Interval{set_.intervals().front().lo, set_.intervals().back().hi};
  }
  std::vector<double> x_breakpoints() const override {
    std::vector<double> xs;
    for (const Interval& iv : set_.intervals()) {
      if (std::isfinite(iv.lo)) xs.push_back(iv.lo);
      if (std::isfinite(iv.hi)) xs.push_back(iv.hi);
    }
    return xs;
  }
  double log_density_derivative(double x) const override {
    return base_.log_density_derivative(x);
  }
  double log_density_second_derivative(double x) const override {
    return base_.log_density_second_derivative(x);
  }
  bool has_analytic_score() const override { return base_.impl().has_analytic_score(); }
  bool smooth_density() const override { return false; }
  std::string describe() const override {
    return "restricted(" + base_.describe() + ", " + set_.describe() + ")";
  }

  double total_mass() const { return total_; }
  const Measure1D& base() const { return base_; }
  const IntervalSet& set() const { return set_; }

 private:
  double stable_mass(double a, double b) const { return stable_interval_mass(base_, a, b); }

  Measure1D base_;
  IntervalSet set_;
  std::vector<double> masses_;
  std::vector<double> prefix_;
  double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Translation wrapper
// ---------------------------------------------------------------------------

class TranslatedMeasure final : public Measure {
 public:
  TranslatedMeasure(Measure1D base, double shift) : base_(std::move(base)), shift_(shift) {
    const Moments& bm = base_.impl().cached_moments();
    moments_.barycenter = bm.barycenter + shift;
    moments_.second_moment =
        bm.second_moment + 2.0 * shift * bm.barycenter + shift * shift;
    moments_.mode = bm.mode + shift;
    moments_.mode_ambiguous = bm.mode_ambiguous;
  }

  double density(double x) const override { return base_.density(x - shift_); }
  double log_density(double x) const override { return base_.log_density(x - shift_); }
  double cdf(double x) const override { return base_.cdf(x - shift_); }
  double ccdf(double x) const override { return base_.ccdf(x - shift_); }
  double quantile(double p) const override { return base_.quantile(p) + shift_; }
  double quantile_lower_tail(double q) const override {
    return base_.quantile_lower_tail(q) + shift_;
  }
  double quantile_upper_tail(double q) const override {
    return base_.quantile_upper_tail(q) + shift_;
  }
  Interval support() const override {
    Interval s = base_.support();
    return Interval{s.lo + shift_, s.hi + shift_};
  }
  std::vector<double> x_breakpoints() const override {
    std::vector<double> xs = base_.x_breakpoints();
    for (double& x : xs) x += shift_;
    return xs;
  }
  double log_density_derivative(double x) const override {
    return base_.log_density_derivative(x - shift_);
  }
  double log_density_second_derivative(double x) const override {
    return base_.log_density_second_derivative(x - shift_);
  }
  bool has_analytic_score() const override { return base_.impl().has_analytic_score(); }
  std::optional<double> convexity_lower() const override { return base_.convexity_lower(); }
  std::optional<double> convexity_upper() const override { return base_.convexity_upper(); }
  bool smooth_density() const override { return base_.smooth_density(); }
  bool full_support() const override { return base_.full_support(); }
  std::string describe() const override {
    return "translated(" + base_.describe() + ", " + format_double(shift_) + ")";
  }

 private:
  Measure1D base_;
  double shift_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Measure1D factories and accessors
// ---------------------------------------------------------------------------

Measure1D Measure1D::gaussian(double mean, double variance) {
  return Measure1D(std::make_shared<GaussianMeasure>(mean, variance));
}

Measure1D Measure1D::from_potential(const PotentialSpec& potential,
                                    std::optional<Interval> domain_hint) {
  return Measure1D(std::make_shared<ExpPotentialMeasure>(potential, domain_hint));
}

Measure1D Measure1D::grid(std::vector<double> nodes, std::vector<double> values) {
  return Measure1D(std::make_shared<GridMeasure>(std::move(nodes), std::move(values)));
}

Measure1D Measure1D::restricted(const IntervalSet& a) const {
  if (a.is_whole_line()) return *this;
  return Measure1D(std::make_shared<RestrictedMeasure>(*this, a));
}

Measure1D Measure1D::tilted(const Expr& tilt_fn, double kappa) const {
  if (!(kappa > 0)) fail(ErrorKind::DomainError, "tilt strength must be positive");
  PotentialSpec base_pot = [&]() -> PotentialSpec {
    if (const auto* g = dynamic_cast<const GaussianMeasure*>(impl_.get())) {
      const double var = g->variance();
      return PotentialSpec::quadratic(g->mean(), 1.0 / var,
                                      0.5 * std::log(2.0 * M_PI * var));
    }
    if (const auto* e = dynamic_cast<const ExpPotentialMeasure*>(impl_.get())) {
      const PotentialSpec& p = e->potential();
      const double log_z = e->log_norm_constant();
      return PotentialSpec::custom([p, log_z](double x) { return p(x) + log_z; },
                                   [p](double x) { return p.deriv(x); },
                                   [p](double x) { return p.second_deriv(x); },
                                   p.minimizer_hint(), "shifted");
    }
    fail(ErrorKind::InvalidPotential,
         "tilting requires a smooth potential-backed base measure");
  }();

  Expr df = tilt_fn.derivative();
  Expr d2f = df.derivative();
  Fn1 v = [base_pot, tilt_fn, kappa](double x) { return base_pot(x) - kappa * tilt_fn(x); };
  Fn1 dv = [base_pot, df, kappa](double x) { return base_pot.deriv(x) - kappa * df(x); };
  Fn1 d2v = [base_pot, d2f, kappa](double x) { return base_pot.second_deriv(x) - kappa * d2f(x); };
  PotentialSpec tilted_pot =
      PotentialSpec::custom(std::move(v), std::move(dv), std::move(d2v),
                            base_pot.minimizer_hint(), "tilted");
  std::string label = "tilt(" + describe() + ", F=" + tilt_fn.to_string() +
                      ", kappa=" + format_double(kappa) + ")";
  auto built = std::make_shared<ExpPotentialMeasure>(tilted_pot, std::nullopt, true, label);
  if (!std::isfinite(*built->tilt_log_integral())) {
    fail(ErrorKind::NonIntegrable, "tilt integral diverges");
  }
  return Measure1D(std::move(built));
}

Measure1D Measure1D::translated(double a) const {
  if (a == 0.0) return *this;
  if (const auto* g = dynamic_cast<const GaussianMeasure*>(impl_.get())) {
    return gaussian(g->mean() + a, g->variance());
  }
  return Measure1D(std::make_shared<TranslatedMeasure>(*this, a));
}

double Measure1D::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "quantile needs p in (0,1)");
  return impl_->quantile(p);
}

double Measure1D::mode() const {
  const Moments& m = impl_->cached_moments();
  if (m.mode_ambiguous) {
    fail(ErrorKind::AmbiguousMode, "density maximizer is not unique for " + describe());
  }
  return m.mode;
}

Moments Measure1D::moments() const {
  const Moments& m = impl_->cached_moments();
  if (m.mode_ambiguous) {
    fail(ErrorKind::AmbiguousMode, "density maximizer is not unique for " + describe());
  }
  return m;
}

std::vector<double> Measure1D::p_breakpoints() const {
  std::vector<double> ps;
  for (double x : impl_->x_breakpoints()) {
    const double p = impl_->cdf(x);
    if (p > 0.0 && p < 1.0) ps.push_back(p);
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

std::optional<double> Measure1D::log_norm_constant() const {
  if (const auto* e = dynamic_cast<const ExpPotentialMeasure*>(impl_.get())) {
    return e->log_norm_constant();
  }
  if (const auto* g = dynamic_cast<const GaussianMeasure*>(impl_.get())) {
    return 0.5 * std::log(2.0 * M_PI * g->variance());
  }
  return std::nullopt;
}

std::optional<double> Measure1D::log_tilt_integral() const {
  if (const auto* e = dynamic_cast<const ExpPotentialMeasure*>(impl_.get())) {
    return e->tilt_log_integral();
  }
  return std::nullopt;
}

}  // namespace tal
