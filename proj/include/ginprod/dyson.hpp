#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ginprod {

/// Symmetry class of the Ginibre factors: real (1), complex (2) or quaternionic (4).
class DysonIndex {
 public:
  static constexpr DysonIndex real() noexcept { return DysonIndex(1); }
  static constexpr DysonIndex complex() noexcept { return DysonIndex(2); }
  static constexpr DysonIndex quaternion() noexcept { return DysonIndex(4); }

  static DysonIndex from_int(int beta) {
    switch (beta) {
      case 1: return real();
      case 2: return complex();
      case 4: return quaternion();
      default: throw DomainError("Dyson index must be 1, 2 or 4, got " + std::to_string(beta));
    }
  }

  constexpr int value() const noexcept { return beta_; }
  constexpr double as_double() const noexcept { return static_cast<double>(beta_); }
  constexpr bool is_real() const noexcept { return beta_ == 1; }
  constexpr bool is_complex() const noexcept { return beta_ == 2; }
  constexpr bool is_quaternion() const noexcept { return beta_ == 4; }

  /// Complex matrix dimension per quaternionic/real/complex dimension (2 for beta=4).
  constexpr int embedding_factor() const noexcept { return beta_ == 4 ? 2 : 1; }

  friend constexpr bool operator==(DysonIndex, DysonIndex) = default;

 private:
  constexpr explicit DysonIndex(int beta) noexcept : beta_(beta) {}
  int beta_;
};

/// Smallest dimension N and rectangularity offsets nu_1..nu_t (nu_0 = 0 implied).
///
/// Factor i (1-based) has shape (N + nu_i) x (N + nu_{i-1}). The default
/// constructor enforces the canonical nondecreasing ordering; `any_order`
/// accepts permuted profiles, which are equivalent in distribution for the
/// non-zero spectrum and are needed for products that close to a square
/// matrix (nu_t = 0).
class DimensionProfile {
 public:
  DimensionProfile(int n, std::vector<int> nus) : DimensionProfile(n, std::move(nus), true) {}

  static DimensionProfile any_order(int n, std::vector<int> nus) {
    return DimensionProfile(n, std::move(nus), false);
  }

  static DimensionProfile square(int n, int t) { return constant(n, 0, t); }

  static DimensionProfile constant(int n, int nu, int t) {
    if (t < 1) throw DimensionError("profile length must be at least 1");
    return DimensionProfile(n, std::vector<int>(static_cast<std::size_t>(t), nu));
  }

  int n() const noexcept { return n_; }
  int length() const noexcept { return static_cast<int>(nus_.size()); }
  std::span<const int> nus() const noexcept { return nus_; }

  /// nu_i for 0 <= i <= t, with nu_0 = 0.
  int nu(int i) const { return i == 0 ? 0 : nus_.at(static_cast<std::size_t>(i - 1)); }
  int nu_max() const noexcept { return *std::max_element(nus_.begin(), nus_.end()); }

  int rows(int i) const { return n_ + nu(i); }
  int cols(int i) const { return n_ + nu(i - 1); }

  bool is_canonical() const noexcept { return std::is_sorted(nus_.begin(), nus_.end()); }
  bool is_square() const noexcept {
    return std::all_of(nus_.begin(), nus_.end(), [](int v) { return v == 0; });
  }
  /// True when the product X_t...X_1 is an N x N matrix and has an eigenvalue spectrum.
  bool closes() const noexcept { return nus_.back() == 0; }

  /// Distinct nu values with their multiplicities, ascending in nu.
  std::vector<std::pair<int, int>> multiplicities() const {
    std::map<int, int> counts;
    for (int v : nus_) ++counts[v];
    return {counts.begin(), counts.end()};
  }

  DimensionProfile prefix(int len) const {
    if (len < 1 || len > length()) throw DimensionError("prefix length out of range");
    return DimensionProfile(n_, std::vector<int>(nus_.begin(), nus_.begin() + len), false);
  }

  friend bool operator==(const DimensionProfile&, const DimensionProfile&) = default;

 private:
  DimensionProfile(int n, std::vector<int> nus, bool require_canonical)
      : n_(n), nus_(std::move(nus)) {
    if (n_ < 1) throw DimensionError("dimension N must be positive");
    if (nus_.empty()) throw DimensionError("profile must contain at least one factor");
    for (int v : nus_)
      if (v < 0) throw DimensionError("rectangularity offsets must be non-negative");
    if (require_canonical && !is_canonical())
      throw DimensionError("profile must be nondecreasing; use DimensionProfile::any_order");
  }

  int n_;
  std::vector<int> nus_;
};

}  // namespace ginprod
