#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "nlg/parallel.hpp"
#include "nlg/random.hpp"

namespace nlg {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Samples are split into fixed-size chunks, each with its own substream,
// and partial sums are combined in chunk order; the estimate depends only on
// (seed, samples).
constexpr std::uint64_t kMonteCarloChunk = 1 << 14;

template <typename Trial>
MonteCarloEstimate monte_carlo(std::uint64_t seed, std::uint64_t samples, int workers, Trial&& trial) {
  MonteCarloEstimate est;
  est.samples = samples;
  if (samples == 0) return est;
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
  parallel_chunks(static_cast<std::int64_t>(chunks), workers, [&](std::int64_t c) {
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(c)));
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double x = trial(rng);
      s += x;
      s2 += x * x;
    }
    sum[c] = s;
    sum_sq[c] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sum_sq[c];
  }
  const double n = static_cast<double>(samples);
  est.mean = s / n;
  const double var = samples > 1 ? std::max(0.0, (s2 - n * est.mean * est.mean) / (n - 1)) : 0.0;
  est.std_error = std::sqrt(var / n);
  return est;
}

struct ComplexEstimate {
  std::complex<double> mean;
  double std_error_real = 0.0;
  double std_error_imag = 0.0;
  std::uint64_t samples = 0;
};

// Complex-valued version of monte_carlo with the same chunking.
template <typename Trial>
ComplexEstimate monte_carlo_complex(std::uint64_t seed, std::uint64_t samples, int workers, Trial&& trial) {
  ComplexEstimate est;
  est.samples = samples;
  if (samples == 0) return est;
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::complex<double>> sum(chunks);
  std::vector<double> sq_re(chunks, 0.0), sq_im(chunks, 0.0);
  parallel_chunks(static_cast<std::int64_t>(chunks), workers, [&](std::int64_t c) {
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(c)));
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    std::complex<double> s = 0.0;
    double r2 = 0.0, i2 = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::complex<double> x = trial(rng);
      s += x;
      r2 += x.real() * x.real();
      i2 += x.imag() * x.imag();
    }
    sum[c] = s;
    sq_re[c] = r2;
    sq_im[c] = i2;
  });
  std::complex<double> s = 0.0;
  double r2 = 0.0, i2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sum[c];
    r2 += sq_re[c];
    i2 += sq_im[c];
  }
  const double n = static_cast<double>(samples);
  est.mean = s / n;
  auto error = [&](double sq, double mean) {
    if (samples < 2) return 0.0;
    return std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1)) / n);
  };
  est.std_error_real = error(r2, est.mean.real());
  est.std_error_imag = error(i2, est.mean.imag());
  return est;
}

}  // namespace nlg
