#include "fracseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracseg/errors.hpp"

namespace fracseg {

Schedule default_schedule(Family family, std::size_t N, double kappa, double gap) {
  if (N < 2) throw DomainError("N must be at least 2");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const double n = static_cast<double>(N);
  Schedule s;
  switch (family) {
    case Family::FGN:
    case Family::FARIMA:
      if (!(kappa < 2.0 / 15.0)) {
        throw DomainError("kappa must lie in (0, 2/15) for the long-memory schedule");
      }
      s.a_N = std::pow(n, 0.2 + kappa);
      s.v_N = std::pow(n, 0.4 - 3.0 * kappa);
      break;
    case Family::FBM: {
      if (!(gap >= 0.0)) throw DomainError("Hurst gap must be nonnegative");
      if (gap >= 0.5) {
        s.warnings.push_back("Hurst gap " + std::to_string(gap) +
                             " >= 1/2: the FBM schedule has no consistency guarantee");
      } else if (!(kappa < 1.0 / (1.0 + 4.0 * gap) - 1.0 / 3.0)) {
        throw DomainError("kappa must lie in (0, 1/(1+4A) - 1/3) for the FBM schedule");
      }
      s.a_N = std::pow(n, 1.0 / 3.0 + kappa);
      s.v_N = std::pow(n, 2.0 / 3.0 * (1.0 - 2.0 * gap) - kappa * (2.0 + 4.0 * gap));
      break;
    }
    case Family::LocallyFractional:
      if (!(kappa < 0.5)) {
        throw DomainError("kappa must lie in (0, 1/2) for the locally fractional schedule");
      }
      s.a_N = 1.0;
      s.delta = std::pow(n, -0.5 - kappa);
      s.v_N = std::pow(n, 0.5 - kappa);
      break;
  }
  return s;
}

int default_ell(std::size_t N) {
  return std::max(3, static_cast<int>(std::floor(0.0015 * static_cast<double>(N))));
}

MotherWavelet WaveletChoice::build() const {
  return kind == WaveletKind::CompactPoly ? make_compact_poly(q) : make_band_limited(lambda, mu);
}

WaveletChoice WaveletChoice::parse(const std::string& text) {
  WaveletChoice c;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "poly") {
      c.kind = WaveletKind::CompactPoly;
      if (!tail.empty()) c.q = std::stoi(tail);
      return c;
    }
    if (head == "band") {
      c.kind = WaveletKind::BandLimited;
      if (!tail.empty()) {
        const auto comma = tail.find(',');
        if (comma == std::string::npos) throw DomainError("band wavelet needs 'band:lambda,mu'");
        c.lambda = std::stod(tail.substr(0, comma));
        c.mu = std::stod(tail.substr(comma + 1));
      }
      return c;
    }
  } catch (const std::logic_error&) {
  }
  throw DomainError("cannot parse wavelet '" + text + "' (expected poly:Q or band:LAMBDA,MU)");
}

std::string WaveletChoice::to_string() const {
  std::ostringstream os;
  if (kind == WaveletKind::CompactPoly) {
    os << "poly:" << q;
  } else {
    os << "band:" << lambda << "," << mu;
  }
  return os.str();
}

namespace {

WaveletChoice default_wavelet(Family family) {
  WaveletChoice c;
  if (family == Family::LocallyFractional) c.kind = WaveletKind::BandLimited;
  return c;
}

}  // namespace

AnalysisReport analyze(const SampledPath& path, const AnalysisOptions& options) {
  path.validate();
  if (!(options.max_margin_fraction >= 0.0 && options.max_margin_fraction < 0.5)) {
    throw DomainError("max_margin_fraction must lie in [0, 1/2)");
  }
  AnalysisReport report;
  report.family = options.family;
  report.N = path.last_index();
  report.delta = path.delta;

  const WaveletChoice choice = options.wavelet.value_or(default_wavelet(options.family));
  if (options.family == Family::LocallyFractional && choice.kind != WaveletKind::BandLimited) {
    throw DomainError("the locally fractional family needs a band-limited wavelet (band:LAMBDA,MU)");
  }
  const MotherWavelet w = choice.build();
  report.wavelet = w.describe();

  Schedule schedule = default_schedule(options.family, report.N, options.kappa, options.gap);
  report.warnings = schedule.warnings;
  const int ell = options.ell > 0 ? options.ell : default_ell(report.N);

  if (options.family == Family::LocallyFractional) {
    report.grid = make_band_grid(w, options.f_min, options.f_max, ell, options.trim);
    report.a_N = report.grid.base;
  } else {
    report.a_N = options.a_N.value_or(schedule.a_N);
    if (!(report.a_N > 0.0)) throw DomainError("a_N must be positive");
    const double trim = w.kind() == WaveletKind::BandLimited ? options.trim : 0.0;
    report.grid = make_integer_grid(report.a_N * path.delta, ell, trim);
  }
  if (report.grid.scale(0) < path.delta * (1.0 - 1e-12)) {
    throw DomainError("smallest scale " + std::to_string(report.grid.scale(0)) +
                      " is below the sampling step " + std::to_string(path.delta));
  }

  const Scalogram sc(path, w, report.grid);
  // throws NumericError when some scale has zero variance over the whole series
  sc.log_variances(0.0, path.duration());
  report.constraints = default_constraints(options.m, sc);
  if (options.min_len) report.constraints.min_len = *options.min_len;
  if (options.stride) report.constraints.stride = *options.stride;
  report.changes = detect(sc, report.constraints);

  report.v_N = options.v_N.value_or(schedule.v_N);
  if (!(report.v_N > 0.0)) throw DomainError("v_N must be positive");
  const auto segments = report.changes.segments();
  double shortest = segments.front().length();
  for (const auto& s : segments) shortest = std::min(shortest, s.length());
  double margin = sc.duration() / report.v_N;
  const double cap = options.max_margin_fraction * shortest;
  if (margin > cap) {
    margin = cap;
    report.margin_capped = true;
  }
  auto admissible = [&](double mg) {
    for (const auto& s : segments) {
      if (!sc.variances(s.lo + mg, s.hi - mg)) return false;
    }
    return true;
  };
  for (int i = 0; i < 40 && margin > 0.0 && !admissible(margin); ++i) {
    margin *= 0.5;
    report.margin_capped = true;
  }
  if (!admissible(margin)) margin = 0.0;
  report.margin = margin;
  report.changes.v_N = report.v_N;
  report.changes.shrunk.clear();
  for (const auto& s : segments) report.changes.shrunk.push_back({s.lo + margin, s.hi - margin});

  for (std::size_t j = 0; j < segments.size(); ++j) {
    SegmentFit fit;
    fit.segment = segments[j];
    fit.window = report.changes.shrunk[j];
    fit.Y = sc.log_variances(fit.window.lo, fit.window.hi);
    const Eigen::MatrixXd& L = sc.design();
    fit.log_scales = L.col(0);
    const ThetaEstimate pilot = ols_theta(fit.Y.Y, L);
    fit.gamma = gamma_for_family(options.family, pilot.alpha, report.grid, w, &fit.plugin_clamped);
    fit.ols = ols_theta(fit.Y.Y, L, &fit.gamma, fit.Y.n_eff);
    fit.fgls = fgls_theta(fit.Y.Y, L, fit.gamma, fit.Y.n_eff);
    fit.gof = gof(fit.Y.Y, L, fit.fgls, fit.gamma, fit.Y.n_eff);
    fit.exponent_ols = exponent_from_alpha(options.family, fit.ols.alpha);
    fit.exponent_fgls = exponent_from_alpha(options.family, fit.fgls.alpha);
    fit.hurst_ols = hurst_from_alpha(options.family, fit.ols.alpha);
    fit.hurst_fgls = hurst_from_alpha(options.family, fit.fgls.alpha);
    fit.ci_ols = confidence_interval(fit.ols, options.ci_level);
    fit.ci_fgls = confidence_interval(fit.fgls, options.ci_level);
    if (fit.plugin_clamped) {
      report.warnings.push_back("segment " + std::to_string(j) +
                                ": plug-in exponent clamped to its valid range");
    }
    if (fit.fgls.fallback) {
      report.warnings.push_back("segment " + std::to_string(j) + ": FGLS fell back to OLS");
    }
    report.segments.push_back(std::move(fit));
  }
  return report;
}

}  // namespace fracseg
