// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "errors.hpp"

namespace covop {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t p : parts) {
    h = splitmix64(h ^ splitmix64(p));
  }
  return h;
}

std::vector<double> gaussian_multipliers(const MultiplierStream& stream, std::size_t count) {
  std::vector<double> out(count);
  if (count == 0) {
    return out;
  }
  std::mt19937_64 engine(
      derive_seed({stream.seed, stream.replicate, static_cast<std::uint64_t>(stream.tag)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) {
    v = normal(engine);
  }
  return out;
}

std::vector<Surface> block_sums(std::span<const Surface> surfaces, std::size_t block_len) {
  const std::size_t n = surfaces.size();
  if (block_len < 1 || block_len > n) {
    throw InvalidInput("block length " + std::to_string(block_len) + " outside [1, " +
                       std::to_string(n) + "]");
  }
  const std::size_t g = surfaces.front().grid_size();
  for (const auto& s : surfaces) {
    if (s.grid_size() != g) {
      throw InvalidInput("block_sums: surfaces live on different grids");
    }
  }
  const std::size_t cells = g * g;
  std::vector<double> total(cells, 0.0);
  for (const auto& s : surfaces) {
    auto v = s.values();
    for (std::size_t p = 0; p < cells; ++p) {
      total[p] += v[p];
    }
  }
  const double l = static_cast<double>(block_len);
  const double share = l / static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(l);

  std::vector<Surface> out;
  out.reserve(n - block_len + 1);
  for (std::size_t k = 0; k + block_len <= n; ++k) {
    Surface block(g);
    auto b = block.values();
    for (std::size_t j = k; j < k + block_len; ++j) {
      auto v = surfaces[j].values();
      for (std::size_t p = 0; p < cells; ++p) {
        b[p] += v[p];
      }
    }
    for (std::size_t p = 0; p < cells; ++p) {
      b[p] = scale * (b[p] - share * total[p]);
    }
    out.push_back(std::move(block));
  }
  return out;
}

BootstrapDraws::BootstrapDraws(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidInput("bootstrap needs at least one replicate");
  }
  sorted_ = values_;
  std::sort(sorted_.begin(), sorted_.end());
}

double BootstrapDraws::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0,1)");
  }
  const double r = static_cast<double>(sorted_.size());
  // R(1-alpha) is formed in floating point; nudge so that exact products such
  // as 200 * 0.95 = 190 are not floored to 189.
  auto index = static_cast<std::size_t>(std::floor(r * (1.0 - alpha) + 1e-9));
  index = std::clamp<std::size_t>(index, 1, sorted_.size());
  return sorted_[index - 1];
}

double quantile(const BootstrapDraws& draws, double alpha) { return draws.quantile(alpha); }

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex failure_lock;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::thread> threads;
  threads.reserve(n_threads - 1);
  for (unsigned t = 1; t < n_threads; ++t) {
    threads.emplace_back(work);
  }
  work();
  for (auto& t : threads) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

} // namespace covop
