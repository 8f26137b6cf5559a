#pragma once

// Grid scans of M_{|0><0|,t} on qubit states and their CSV output.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "bloch.hpp"
#include "monotones.hpp"

namespace magic::figures {

/// Evaluates f(0..n-1) on a pool of workers; results keep index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F f, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::vector<double> default_alpha_grid(double step = 0.01) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(i / double(n));
  return g;
}

inline std::vector<double> default_t_values() { return {0.0, 0.5, 1.0, 2.0, 5.0}; }

struct Fig3Row {
  double t, alpha, m;
};

/// M_{|0><0|,t}((1-alpha) I/2 + alpha |T><T|); rows t-major, alpha-minor.
inline std::vector<Fig3Row> figure3_scan(const std::vector<double>& t_values,
                                         const std::vector<double>& alpha_grid,
                                         unsigned threads = 0) {
  for (double a : alpha_grid)
    if (a < 0.0 || a > 1.0) throw InvariantViolation("figure3_scan: alpha outside [0, 1]");
  const DensityMatrix sigma = states::basis_state(2, 0);
  const std::size_t na = alpha_grid.size();
  return parallel_map<Fig3Row>(
      t_values.size() * na,
      [&](std::size_t i) {
        const double t = t_values[i / na], a = alpha_grid[i % na];
        return Fig3Row{t, a, monotone(sigma, t, states::t_line(a)).value};
      },
      threads);
}

struct Fig2Row {
  double x, y, m;
};

/// The resolution x resolution grid on [-1, 1]^2, x-major, restricted to
/// the unit disk (z = 0).
inline std::vector<std::pair<double, double>> disk_grid(int resolution) {
  if (resolution < 2) throw InvariantViolation("figure2_grid: resolution must be >= 2");
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < resolution; ++i)
    for (int k = 0; k < resolution; ++k) {
      const double x = -1.0 + 2.0 * i / (resolution - 1);
      const double y = -1.0 + 2.0 * k / (resolution - 1);
      if (x * x + y * y <= 1.0 + 1e-12) pts.emplace_back(x, y);
    }
  return pts;
}

inline std::vector<Fig2Row> figure2_grid(int resolution = 21, unsigned threads = 0) {
  const DensityMatrix sigma = states::basis_state(2, 0);
  const auto pts = disk_grid(resolution);
  return parallel_map<Fig2Row>(
      pts.size(),
      [&](std::size_t i) {
        const auto [x, y] = pts[i];
        const double r2 = x * x + y * y;
        // Boundary points carry rounding noise; pull them onto the sphere.
        const double s = r2 > 1.0 ? 1.0 / std::sqrt(r2) : 1.0;
        return Fig2Row{x, y, monotone(sigma, 1.0, bloch_to_density(s * x, s * y, 0.0)).value};
      },
      threads);
}

struct ThresholdRow {
  double t;
  double first_positive_alpha;  // NaN when M vanishes on the whole grid
};

/// For each t, the first alpha on the T-line with M_{sigma,t} > threshold.
/// Faithfulness shows up as a first positive alpha just above 1/sqrt(3).
inline std::vector<ThresholdRow> threshold_scan(const DensityMatrix& sigma,
                                                const std::vector<double>& t_values,
                                                const std::vector<double>& alpha_grid,
                                                double threshold = 1e-5, unsigned threads = 0) {
  if (sigma.dim() != 2) throw DimensionMismatch("threshold_scan: sigma must be a qubit state");
  return parallel_map<ThresholdRow>(
      t_values.size(),
      [&](std::size_t i) {
        const double t = t_values[i];
        for (double a : alpha_grid)
          if (monotone(sigma, t, states::t_line(a)).value > threshold) return ThresholdRow{t, a};
        return ThresholdRow{t, std::numeric_limits<double>::quiet_NaN()};
      },
      threads);
}

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const std::vector<Fig3Row>& rows) {
  out << "t,alpha,M\n";
  for (const auto& r : rows) out << fmt12(r.t) << ',' << fmt12(r.alpha) << ',' << fmt12(r.m) << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<Fig2Row>& rows) {
  out << "x,y,M\n";
  for (const auto& r : rows) out << fmt12(r.x) << ',' << fmt12(r.y) << ',' << fmt12(r.m) << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<ThresholdRow>& rows) {
  out << "t,alpha_first_positive\n";
  for (const auto& r : rows) out << fmt12(r.t) << ',' << fmt12(r.first_positive_alpha) << '\n';
}

}  // namespace magic::figures
