#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rirsynth/core.hpp"
#include "rirsynth/errors.hpp"

namespace rirsynth {

// Schroeder backward energy integral in dB, 0 dB at the onset. Zero-energy
// suffixes are clamped to kFloorDb instead of -inf.
struct EnergyDecayCurve {
  std::vector<double> values;  // dB
  double sample_rate = 0.0;    // Hz

  static constexpr double kFloorDb = -300.0;
};

struct T60Estimate {
  double t60 = 0.0;           // s
  double slope_db = 0.0;      // fitted EDC slope, dB per sample
  double intercept_db = 0.0;  // fitted EDC value at sample 0, dB
  int fit_begin = 0;          // first sample of the fit range
  int fit_end = 0;            // one past the last sample of the fit range
};

// Ratio of energy in a window around the direct-path peak to the energy of
// everything after it. The window is clipped at the buffer start when the
// peak sits closer than w to it.
inline double measure_drr(const std::vector<double>& h, int n_d, int w) {
  const long n = static_cast<long>(h.size());
  if (w < 0) throw InvalidParameterError("drr window must be non-negative");
  if (n_d < 0 || n_d >= n) throw InvalidParameterError("direct-path index out of range");
  if (static_cast<long>(n_d) + w + 1 >= n) {
    throw InvalidParameterError("no late region after the direct window");
  }
  const long lo = std::max(0L, static_cast<long>(n_d) - w);
  const long hi = static_cast<long>(n_d) + w;
  double direct = 0.0, late = 0.0;
  for (long i = lo; i <= hi; ++i) {
    const double v = h[static_cast<std::size_t>(i)];
    direct += v * v;
  }
  for (long i = hi + 1; i < n; ++i) {
    const double v = h[static_cast<std::size_t>(i)];
    late += v * v;
  }
  if (!(late > 0.0)) throw AnalysisError("anechoic input: no energy after the direct window");
  return direct / late;
}

inline EnergyDecayCurve schroeder_edc(const std::vector<double>& h, double sample_rate) {
  if (h.empty()) throw InvalidParameterError("impulse response is empty");
  if (!(sample_rate > 0.0)) throw InvalidParameterError("sample rate must be positive");
  EnergyDecayCurve edc;
  edc.sample_rate = sample_rate;
  edc.values.assign(h.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc.values[i] = acc;
  }
  const double total = edc.values[0];
  if (!(total > 0.0)) throw AnalysisError("impulse response carries no energy");
  for (auto& v : edc.values) {
    v = v > 0.0 ? std::max(10.0 * std::log10(v / total), EnergyDecayCurve::kFloorDb)
                : EnergyDecayCurve::kFloorDb;
  }
  return edc;
}

// Reverberation time from the EDC slope fitted between -5 dB and -35 dB and
// extrapolated to 60 dB of decay. The last tenth of the curve is excluded
// from the fit: backward integration forces the EDC toward the floor there,
// which would otherwise let decay-free signals produce a fit.
inline T60Estimate estimate_t60(const EnergyDecayCurve& edc, double fit_from_db = -5.0,
                                double fit_to_db = -35.0) {
  if (!(edc.sample_rate > 0.0)) throw InvalidParameterError("EDC has no sample rate");
  if (!(fit_from_db > fit_to_db)) {
    throw InvalidParameterError("fit range must run from a higher to a lower level");
  }
  const long n = static_cast<long>(edc.values.size());
  const long usable = n - n / 10;

  long begin = -1, end = -1;
  for (long i = 0; i < usable; ++i) {
    const double v = edc.values[static_cast<std::size_t>(i)];
    if (begin < 0 && v <= fit_from_db) begin = i;
    if (v <= fit_to_db) {
      end = i;
      break;
    }
  }
  if (begin < 0 || end < 0 || end <= begin + 1) {
    const double attained =
        usable > 0 ? edc.values[static_cast<std::size_t>(usable - 1)] : 0.0;
    throw InsufficientRangeError(attained, fit_to_db);
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(end - begin + 1);
  for (long i = begin; i <= end; ++i) {
    const double x = static_cast<double>(i);
    const double y = edc.values[static_cast<std::size_t>(i)];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw AnalysisError("degenerate decay fit range");
  const double slope = (m * sxy - sx * sy) / denom;
  if (!(slope < 0.0)) throw AnalysisError("energy decay curve is not decaying");

  T60Estimate est;
  est.slope_db = slope;
  est.intercept_db = (sy - slope * sx) / m;
  est.fit_begin = static_cast<int>(begin);
  est.fit_end = static_cast<int>(end + 1);
  est.t60 = -60.0 / slope / edc.sample_rate;
  return est;
}

inline T60Estimate estimate_t60(const std::vector<double>& h, double sample_rate) {
  return estimate_t60(schroeder_edc(h, sample_rate));
}

inline double mean_absolute_error(const std::vector<double>& estimates,
                                  const std::vector<double>& truths) {
  if (estimates.size() != truths.size()) {
    throw InvalidParameterError("estimate and truth lengths differ");
  }
  if (estimates.empty()) throw InvalidParameterError("nothing to compare");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    acc += std::abs(estimates[i] - truths[i]);
  }
  return acc / static_cast<double>(estimates.size());
}

// Distance bucketed into 10 cm classes, half-up so 0.05 m maps to class 1.
inline int distance_to_class(double distance_m) {
  if (!(distance_m >= 0.0)) throw InvalidParameterError("distance must be non-negative");
  return static_cast<int>(std::floor(distance_m * 10.0 + 0.5));
}

// Center of a 10 cm distance class.
inline double class_to_distance(int cls) {
  if (cls < 0) throw InvalidParameterError("class index must be non-negative");
  return static_cast<double>(cls) * 0.1;
}

}  // namespace rirsynth
