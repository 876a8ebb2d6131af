#pragma once

// Independent reference computations used to freeze and cross-check the
// library's results. Nothing here calls into the code path it checks.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fxsig/nbayes.hpp"

namespace oracle {

/// Posterior by the direct product P(y) * prod_i N(x_i; mu, var), no logs.
inline std::array<double, 3> direct_posterior(const fxsig::NBModel& m, std::span<const double> x) {
  std::array<long double, 3> joint{};
  for (std::size_t c = 0; c < 3; ++c) {
    long double p = m.priors[c];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double var = m.params.variance[c][i];
      const long double d = x[i] - m.params.mean[c][i];
      p *= 1.0L / std::sqrt(2.0L * std::numbers::pi_v<long double> * var) * std::exp(-d * d / (2.0L * var));
    }
    joint[c] = p;
  }
  const long double z = joint[0] + joint[1] + joint[2];
  return {static_cast<double>(joint[0] / z), static_cast<double>(joint[1] / z),
          static_cast<double>(joint[2] / z)};
}

/// Gaussian density, straight from the formula.
inline double gaussian_pdf(double x, double mean, double var) {
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * var) * std::exp(-(x - mean) * (x - mean) / (2.0 * var));
}

/// Windowed mean with extended-precision accumulation; index i holds the
/// mean of closes[i - period + 1 .. i] (i < period - 1 left as NaN).
inline std::vector<double> windowed_mean(std::span<const double> closes, std::size_t period) {
  std::vector<double> out(closes.size(), std::nan(""));
  for (std::size_t i = period - 1; i < closes.size(); ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < period; ++j) s += closes[i - j];
    out[i] = static_cast<double>(s / period);
  }
  return out;
}

/// Wilder RSI evaluated step by step in long double.
inline std::vector<double> wilder_rsi(std::span<const double> closes, std::size_t period) {
  std::vector<double> out(closes.size(), std::nan(""));
  std::vector<long double> up, down;
  for (std::size_t i = 1; i < closes.size(); ++i) {
    const long double d = static_cast<long double>(closes[i]) - closes[i - 1];
    up.push_back(d > 0 ? d : 0.0L);
    down.push_back(d < 0 ? -d : 0.0L);
  }
  auto to_rsi = [](long double g, long double l) -> double {
    if (g == 0 && l == 0) return 50.0;
    if (l == 0) return 100.0;
    return static_cast<double>(100.0L - 100.0L / (1.0L + g / l));
  };
  long double g = 0, l = 0;
  for (std::size_t k = 0; k < period; ++k) {
    g += up[k];
    l += down[k];
  }
  g /= period;
  l /= period;
  out[period] = to_rsi(g, l);
  for (std::size_t k = period; k < up.size(); ++k) {
    g = (g * (period - 1) + up[k]) / period;
    l = (l * (period - 1) + down[k]) / period;
    out[k + 1] = to_rsi(g, l);
  }
  return out;
}

}  // namespace oracle
