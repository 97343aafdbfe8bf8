// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "fda.hpp"

namespace covop {

// splitmix64 finaliser chained over the inputs. Used for every seed derivation
// in the library so that results only depend on the documented seed tree:
//   run seed       = derive_seed({base_seed, run})
//   data seed      = derive_seed({run_seed, kDataStream})
//   bootstrap seed = derive_seed({run_seed, kBootstrapStream})
//   multipliers    = derive_seed({bootstrap_seed, replicate, tag})
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

inline constexpr std::uint64_t kDataStream = 0xDA7A;
inline constexpr std::uint64_t kBootstrapStream = 0xB007;

// Multiplier tags: first sample / second sample / change-point series.
enum class MultiplierTag : std::uint32_t { First = 0, Second = 1, Series = 2 };

struct MultiplierStream {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 1; // 1-based
  MultiplierTag tag = MultiplierTag::First;
};

// `count` i.i.d. N(0,1) variates; identical for identical streams.
std::vector<double> gaussian_multipliers(const MultiplierStream& stream, std::size_t count);

// Entry k = (1/sqrt(l)) (sum_{j=k}^{k+l-1} S_j - (l/n) sum_j S_j), k = 1..n-l+1.
std::vector<Surface> block_sums(std::span<const Surface> surfaces, std::size_t block_len);

class BootstrapDraws {
public:
  explicit BootstrapDraws(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  // The floor(R(1-alpha))-th order statistic (1-based, ascending), index
  // clamped to [1, R].
  double quantile(double alpha) const;

private:
  std::vector<double> values_;
  std::vector<double> sorted_;
};

double quantile(const BootstrapDraws& draws, double alpha);

// Runs fn(i) for i in [0, count) on up to `workers` threads. Work is split by
// index only, so callers that write result[i] get schedule-independent output.
// The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace covop
