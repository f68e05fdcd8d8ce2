#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace zrp {

inline constexpr std::int64_t kDefaultStateCap = 5'000'000;

// Configurations of N particles on the box {0..L-1}^d, ordered
// lexicographically with the first site's occupation decreasing.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(int L, int d, int N, std::int64_t cap = kDefaultStateCap);

  int L() const { return L_; }
  int d() const { return d_; }
  int N() const { return N_; }
  int sites() const { return sites_; }
  std::int64_t size() const { return size_; }

  std::span<const std::uint16_t> state(std::int64_t i) const {
    return {occ_.data() + static_cast<std::size_t>(i) * sites_, static_cast<std::size_t>(sites_)};
  }
  std::int64_t rank(std::span<const std::uint16_t> eta) const;
  std::vector<std::uint16_t> unrank(std::int64_t r) const;
  // Index of eta - delta_from + delta_to, or -1 if eta_from == 0.
  std::int64_t move(std::int64_t i, int from, int to) const;

  const std::vector<int>& neighbors(int x) const { return nbr_[x]; }
  int degree(int x) const { return static_cast<int>(nbr_[x].size()); }
  // Lattice coordinates of site x (first coordinate fastest).
  std::vector<int> coords(int x) const;

  // Number of compositions of n into s nonnegative parts (saturating).
  static std::uint64_t count(int n, int s);

 private:
  std::uint64_t M(int n, int s) const { return table_[static_cast<std::size_t>(s) * (N_ + 1) + n]; }

  int L_ = 0;
  int d_ = 0;
  int N_ = 0;
  int sites_ = 0;
  std::int64_t size_ = 0;
  std::vector<std::uint16_t> occ_;
  std::vector<std::uint64_t> table_;
  std::vector<std::vector<int>> nbr_;
};

// Nearest neighbours inside the box {0..L-1}^d, first coordinate fastest.
std::vector<std::vector<int>> lattice_neighbors(int L, int d);

inline StateSpace enumerate(int L, int d, int N, std::int64_t cap = kDefaultStateCap) {
  return StateSpace(L, d, N, cap);
}

}  // namespace zrp
