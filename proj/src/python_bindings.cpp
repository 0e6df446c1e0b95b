#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracseg/distributions.hpp"
#include "fracseg/errors.hpp"
#include "fracseg/estimate.hpp"
#include "fracseg/montecarlo.hpp"
#include "fracseg/pipeline.hpp"
#include "fracseg/scalogram.hpp"
#include "fracseg/segment.hpp"
#include "fracseg/synth.hpp"
#include "fracseg/wavelet.hpp"

namespace py = pybind11;
using namespace fracseg;

namespace {

PiecewiseSpec make_spec(const std::string& family, std::vector<double> tau,
                        std::vector<double> exponents, std::optional<std::vector<double>> sigmas,
                        double f_min, double f_max) {
  PiecewiseSpec spec;
  spec.family = parse_family(family);
  spec.tau_stars = std::move(tau);
  spec.exponents = std::move(exponents);
  spec.sigmas = sigmas ? *sigmas : std::vector<double>(spec.exponents.size(), 1.0);
  spec.f_min = f_min;
  spec.f_max = f_max;
  return spec;
}

SampledPath to_path(const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
                    double delta) {
  if (x.ndim() != 1) throw DomainError("series must be one-dimensional");
  SampledPath path;
  path.values.assign(x.data(), x.data() + x.size());
  path.delta = delta;
  return path;
}

py::dict estimate_dict(Family family, const ThetaEstimate& est,
                       const std::array<ConfidenceInterval, 2>& ci) {
  py::dict d;
  d["alpha"] = est.alpha;
  d["log_beta"] = est.log_beta;
  d["exponent"] = exponent_from_alpha(family, est.alpha);
  d["hurst"] = hurst_from_alpha(family, est.alpha);
  d["cov"] = Eigen::Matrix2d(est.cov);
  d["ci_alpha"] = py::make_tuple(ci[0].lo, ci[0].hi);
  d["ci_log_beta"] = py::make_tuple(ci[1].lo, ci[1].hi);
  d["fallback_to_ols"] = est.fallback;
  return d;
}

py::dict report_dict(const AnalysisReport& r) {
  py::list segments;
  for (const SegmentFit& s : r.segments) {
    py::dict d;
    d["lo"] = s.segment.lo;
    d["hi"] = s.segment.hi;
    d["window"] = py::make_tuple(s.window.lo, s.window.hi);
    d["n_eff"] = s.Y.n_eff;
    d["log_scale"] = Eigen::VectorXd(s.log_scales);
    d["log_variance"] = Eigen::VectorXd(s.Y.Y);
    d["ols"] = estimate_dict(r.family, s.ols, s.ci_ols);
    d["fgls"] = estimate_dict(r.family, s.fgls, s.ci_fgls);
    py::dict g;
    g["T"] = s.gof.T;
    g["df"] = s.gof.df;
    g["p_value"] = s.gof.p_value;
    d["gof"] = g;
    d["gamma"] = Eigen::MatrixXd(s.gamma);
    d["plugin_clamped"] = s.plugin_clamped;
    segments.append(d);
  }
  py::dict out;
  out["family"] = std::string(to_string(r.family));
  out["N"] = r.N;
  out["delta"] = r.delta;
  out["wavelet"] = r.wavelet;
  out["scale_base"] = r.grid.base;
  out["scale_ratios"] = r.grid.ratios;
  out["a_N"] = r.a_N;
  out["v_N"] = r.v_N;
  out["margin"] = r.margin;
  out["k_hat"] = r.changes.k_hat;
  out["tau_hat"] = r.changes.tau_hat;
  out["G_min"] = r.changes.G_min;
  out["candidates"] = r.changes.candidates;
  out["segments"] = segments;
  out["warnings"] = r.warnings;
  return out;
}

AnalysisOptions make_options(const std::string& family, std::size_t m, int ell, double kappa,
                             double gap, std::optional<std::string> wavelet,
                             std::optional<double> a_n, std::optional<double> v_n,
                             std::optional<double> min_len, std::optional<double> stride,
                             double f_min, double f_max, double trim, double ci_level) {
  AnalysisOptions o;
  o.family = parse_family(family);
  o.m = m;
  o.ell = ell;
  o.kappa = kappa;
  o.gap = gap;
  if (wavelet) o.wavelet = WaveletChoice::parse(*wavelet);
  o.a_N = a_n;
  o.v_N = v_n;
  o.min_len = min_len;
  o.stride = stride;
  o.f_min = f_min;
  o.f_max = f_max;
  o.trim = trim;
  o.ci_level = ci_level;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Change points in the scaling exponent of Gaussian time series";

  py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

  mod.def(
      "simulate",
      [](const std::string& family, std::size_t n, std::vector<double> exponents,
         std::vector<double> tau, std::optional<std::vector<double>> sigmas, double delta,
         std::uint64_t seed, double f_min, double f_max) {
        const auto spec = make_spec(family, std::move(tau), std::move(exponents),
                                    std::move(sigmas), f_min, f_max);
        SampledPath path;
        {
          py::gil_scoped_release release;
          path = simulate_piecewise(spec, n, delta, seed);
        }
        return py::array_t<double>(static_cast<py::ssize_t>(path.values.size()),
                                   path.values.data());
      },
      py::arg("family"), py::arg("n"), py::arg("exponents"), py::arg("tau") = std::vector<double>{},
      py::arg("sigmas") = py::none(), py::arg("delta") = 1.0, py::arg("seed") = 1,
      py::arg("f_min") = 0.5, py::arg("f_max") = 8.0,
      "Piecewise path X_0 .. X_{n delta} with N = n.");

  mod.def(
      "analyze",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> x, double delta,
         const std::string& family, std::size_t m, int ell, double kappa, double gap,
         std::optional<std::string> wavelet, std::optional<double> a_n,
         std::optional<double> v_n, std::optional<double> min_len, std::optional<double> stride,
         double f_min, double f_max, double trim, double ci_level) {
        const SampledPath path = to_path(x, delta);
        const auto opt = make_options(family, m, ell, kappa, gap, std::move(wavelet), a_n, v_n,
                                      min_len, stride, f_min, f_max, trim, ci_level);
        AnalysisReport report;
        {
          py::gil_scoped_release release;
          report = analyze(path, opt);
        }
        return report_dict(report);
      },
      py::arg("x"), py::arg("delta") = 1.0, py::arg("family") = "fgn", py::arg("m") = 0,
      py::arg("ell") = 0, py::arg("kappa") = 0.05, py::arg("gap") = 0.0,
      py::arg("wavelet") = py::none(), py::arg("a_n") = py::none(), py::arg("v_n") = py::none(),
      py::arg("min_len") = py::none(), py::arg("stride") = py::none(), py::arg("f_min") = 0.5,
      py::arg("f_max") = 8.0, py::arg("trim") = 0.2, py::arg("ci_level") = 0.95,
      "Detect m change points, then fit OLS and FGLS per segment with a goodness-of-fit test.");

  mod.def(
      "log_variances",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> x, double delta,
         double base, int ell, const std::string& wavelet, double lo,
         std::optional<double> hi) {
        const SampledPath path = to_path(x, delta);
        const MotherWavelet w = WaveletChoice::parse(wavelet).build();
        const ScaleGrid grid = make_integer_grid(base, ell);
        const Scalogram sc(path, w, grid);
        const auto Y = sc.log_variances(lo, hi.value_or(path.duration()));
        return py::make_tuple(Eigen::VectorXd(design_matrix(grid).col(0)), Eigen::VectorXd(Y.Y),
                              Y.n_eff);
      },
      py::arg("x"), py::arg("delta") = 1.0, py::arg("base") = 1.0, py::arg("ell") = 3,
      py::arg("wavelet") = "poly:3", py::arg("lo") = 0.0, py::arg("hi") = py::none(),
      "(log scales, log variances, n_eff) on [lo, hi) for the integer grid base * (1..ell).");

  mod.def(
      "gamma",
      [](const std::string& family, double exponent, double base, std::vector<int> ratios,
         const std::string& wavelet, double trim) {
        const MotherWavelet w = WaveletChoice::parse(wavelet).build();
        const ScaleGrid grid{base, std::move(ratios), w.kind() == WaveletKind::BandLimited ? trim : 0.0};
        const Family f = parse_family(family);
        if (f == Family::LocallyFractional) return gamma_locfrac(exponent, grid, w, trim);
        if (f == Family::FBM) return gamma_fbm(exponent, grid, w);
        return gamma_lrd(exponent, grid, w);
      },
      py::arg("family"), py::arg("exponent"), py::arg("base") = 1.0,
      py::arg("ratios") = std::vector<int>{1, 2, 3}, py::arg("wavelet") = "poly:3",
      py::arg("trim") = 0.2,
      "Limiting covariance of sqrt(n_eff) times the log-variance vector.");

  mod.def(
      "montecarlo",
      [](const std::string& family, std::size_t n, std::vector<double> exponents,
         std::vector<double> tau, std::size_t reps, std::uint64_t seed, int ell, double gap,
         double delta, unsigned threads) {
        MonteCarloConfig mc;
        mc.spec = make_spec(family, std::move(tau), std::move(exponents), std::nullopt, 0.5, 8.0);
        mc.N = n;
        mc.delta = delta;
        mc.reps = reps;
        mc.seed = seed;
        mc.threads = threads;
        mc.options.family = mc.spec.family;
        mc.options.m = mc.spec.num_changes();
        mc.options.ell = ell;
        mc.options.gap = gap;
        MonteCarloResult result;
        {
          py::gil_scoped_release release;
          result = run_montecarlo(mc);
        }
        py::list rows;
        for (const SummaryRow& r : result.summary) {
          py::dict d;
          d["quantity"] = r.quantity;
          d["truth"] = r.truth;
          d["mean"] = r.mean;
          d["sigma_hat"] = r.sigma_hat;
          d["sqrt_mse"] = r.sqrt_mse;
          d["count"] = r.count;
          rows.append(d);
        }
        py::list tau_hat;
        for (const ReplicateResult& r : result.replicates) tau_hat.append(r.tau_hat);
        py::dict out;
        out["summary"] = rows;
        out["tau_hat"] = tau_hat;
        out["failures"] = result.failures;
        return out;
      },
      py::arg("family"), py::arg("n"), py::arg("exponents"), py::arg("tau") = std::vector<double>{},
      py::arg("reps") = 2, py::arg("seed") = 1, py::arg("ell") = 0, py::arg("gap") = 0.0,
      py::arg("delta") = 1.0, py::arg("threads") = 1,
      "Replicate simulate + analyze; replicate i uses seed + i.");

  mod.def("chi2_quantile", &chi2_quantile, py::arg("p"), py::arg("df"));
  mod.def("chi2_sf", &chi2_sf, py::arg("x"), py::arg("df"));
  mod.def("default_ell", &default_ell, py::arg("n"));
}
