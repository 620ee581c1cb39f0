#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gosbounds/error.hpp"

namespace gosbounds {

/// Absolute tolerance under which two rates are treated as one repeated rate.
inline constexpr double kRateGroupingTol = 1e-12;

/// Partial sums rho[j] = sum_{i=j}^r 1/gamma_i, indexed 1..r.
class RhoTable {
 public:
  RhoTable() = default;
  explicit RhoTable(std::span<const double> gamma_desc) : rho_(gamma_desc.size()) {
    // gamma is non-increasing, so 1/gamma_i grows with i; accumulating from
    // i = r downwards would add the largest terms first. Sum each tail in
    // index order instead, which is ascending magnitude.
    const std::size_t r = gamma_desc.size();
    for (std::size_t j = 0; j < r; ++j) {
      double s = 0.0;
      for (std::size_t i = j; i < r; ++i) s += 1.0 / gamma_desc[i];
      rho_[j] = s;
    }
  }

  double operator[](std::size_t j) const { return rho_.at(j - 1); }
  std::size_t size() const { return rho_.size(); }

 private:
  std::vector<double> rho_;
};

/// Parameter vector of a generalized order statistic X^(r).
///
/// The marginal law of a single gOS does not depend on the order of
/// gamma_1..gamma_r, so the vector is stored sorted in non-increasing order
/// and every formula downstream assumes that order. Indices in the public
/// accessors are 1-based to follow the usual rank notation.
class GosParams {
 public:
  explicit GosParams(std::vector<double> gamma) : gamma_(std::move(gamma)) {
    if (gamma_.empty()) throw Error(ErrorCode::EmptyVector, "gamma must contain at least one value");
    for (double g : gamma_) {
      if (!(g > 0.0) || !std::isfinite(g)) {
        throw Error(ErrorCode::NonPositiveGamma, "gamma values must be finite and positive, got " + std::to_string(g));
      }
    }
    std::sort(gamma_.begin(), gamma_.end(), std::greater<>());
    rho_ = RhoTable(gamma_);
  }

  std::size_t rank() const { return gamma_.size(); }
  std::span<const double> gamma() const { return gamma_; }

  double gamma(std::size_t j) const {
    check_index(j);
    return gamma_[j - 1];
  }

  double rho(std::size_t j) const {
    check_index(j);
    return rho_[j];
  }

  const RhoTable& rho_table() const { return rho_; }

  /// c_{r-1} = prod gamma_j.
  double gamma_product() const {
    double c = 1.0;
    for (double g : gamma_) c *= g;
    return c;
  }

  double min_gamma() const { return gamma_.back(); }

  /// Parameters of the lower-rank statistic X^(j) sharing gamma_1..gamma_j.
  GosParams prefix(std::size_t j) const {
    check_index(j);
    return GosParams(std::vector<double>(gamma_.begin(), gamma_.begin() + static_cast<std::ptrdiff_t>(j)));
  }

  bool operator==(const GosParams& other) const { return gamma_ == other.gamma_; }

 private:
  void check_index(std::size_t j) const {
    if (j < 1 || j > gamma_.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "index " + std::to_string(j) + " outside 1.." + std::to_string(gamma_.size()));
    }
  }

  std::vector<double> gamma_;
  RhoTable rho_;
};

inline GosParams new_params(std::vector<double> gamma) { return GosParams(std::move(gamma)); }

inline double rho(const GosParams& params, std::size_t j) { return params.rho(j); }

// Standard submodels of generalized order statistics.

struct OrderStatistics {
  int n = 0;
  int r = 0;
};

struct KRecords {
  int k = 0;
  int r = 0;
};

/// Progressive type-II censoring of n units with removal scheme R_1..R_m.
struct ProgressiveCensoring {
  int n = 0;
  std::vector<int> removals;
  int r = 0;
};

using Model = std::variant<OrderStatistics, KRecords, ProgressiveCensoring>;

inline GosParams from_model(const OrderStatistics& m) {
  if (m.n < 1 || m.r < 1 || m.r > m.n) {
    throw Error(ErrorCode::InvalidModelParameters, "order statistics need 1 <= r <= n");
  }
  std::vector<double> g;
  for (int i = 1; i <= m.r; ++i) g.push_back(static_cast<double>(m.n - i + 1));
  return GosParams(std::move(g));
}

inline GosParams from_model(const KRecords& m) {
  if (m.k < 1 || m.r < 1) throw Error(ErrorCode::InvalidModelParameters, "k-records need k >= 1 and r >= 1");
  return GosParams(std::vector<double>(static_cast<std::size_t>(m.r), static_cast<double>(m.k)));
}

/// gamma_i = n - i + 1 - sum_{j<i} R_j: units still on test just before the
/// i-th observed failure.
inline GosParams from_model(const ProgressiveCensoring& m) {
  const int stages = static_cast<int>(m.removals.size());
  if (m.n < 1 || m.r < 1 || m.r > stages) {
    throw Error(ErrorCode::InvalidModelParameters, "progressive censoring needs 1 <= r <= m = |R|");
  }
  int removed_before_last = 0;
  for (int j = 0; j < stages; ++j) {
    if (m.removals[static_cast<std::size_t>(j)] < 0) {
      throw Error(ErrorCode::InvalidModelParameters, "removal counts must be nonnegative");
    }
    if (j + 1 < stages) removed_before_last += m.removals[static_cast<std::size_t>(j)];
  }
  if (stages + removed_before_last > m.n) {
    throw Error(ErrorCode::InvalidModelParameters, "removal scheme exceeds the number of units");
  }
  std::vector<double> g;
  int removed = 0;
  for (int i = 1; i <= m.r; ++i) {
    g.push_back(static_cast<double>(m.n - i + 1 - removed));
    removed += m.removals[static_cast<std::size_t>(i - 1)];
  }
  return GosParams(std::move(g));
}

inline GosParams from_model(const Model& model) {
  return std::visit([](const auto& m) { return from_model(m); }, model);
}

}  // namespace gosbounds
