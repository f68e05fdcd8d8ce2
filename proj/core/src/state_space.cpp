#include "zrp/state_space.hpp"

#include <limits>
#include <string>

#include "zrp/error.hpp"

namespace zrp {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

}  // namespace

std::uint64_t StateSpace::count(int n, int s) {
  if (s <= 0) return n == 0 ? 1 : 0;
  // C(n+s-1, s-1) via multiplicative formula with saturation
  const int k = std::min(n, s - 1);
  const int top = n + s - 1;
  __extension__ unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(top - k + i) / static_cast<unsigned>(i);
    if (r > kSat) return kSat;
  }
  return static_cast<std::uint64_t>(r);
}

StateSpace::StateSpace(int L, int d, int N, std::int64_t cap) : L_(L), d_(d), N_(N) {
  if (L < 1 || d < 1) fail_argument("enumerate: L and d must be >= 1");
  if (N < 0 || N > 65535) fail_argument("enumerate: N must lie in [0, 65535]");
  std::int64_t sites = 1;
  for (int i = 0; i < d; ++i) {
    sites *= L;
    if (sites > 1'000'000) fail_cap("enumerate: lattice too large");
  }
  sites_ = static_cast<int>(sites);
  const std::uint64_t total = count(N, sites_);
  if (total > static_cast<std::uint64_t>(cap))
    fail_cap("enumerate: state space has " + (total == kSat ? std::string("> 1.8e19") : std::to_string(total)) +
             " states, above cap " + std::to_string(cap));
  size_ = static_cast<std::int64_t>(total);

  table_.resize(static_cast<std::size_t>(sites_ + 2) * (N_ + 1));
  for (int s = 0; s <= sites_ + 1; ++s)
    for (int n = 0; n <= N_; ++n) table_[static_cast<std::size_t>(s) * (N_ + 1) + n] = count(n, s);

  occ_.resize(static_cast<std::size_t>(size_) * sites_);
  std::vector<std::uint16_t> cur(sites_, 0);
  std::size_t out = 0;
  // depth-first, first-site occupation decreasing
  auto emit = [&](auto&& self, int site, int rem) -> void {
    if (site == sites_ - 1) {
      cur[site] = static_cast<std::uint16_t>(rem);
      std::copy(cur.begin(), cur.end(), occ_.begin() + static_cast<std::ptrdiff_t>(out));
      out += sites_;
      return;
    }
    for (int a = rem; a >= 0; --a) {
      cur[site] = static_cast<std::uint16_t>(a);
      self(self, site + 1, rem - a);
    }
  };
  emit(emit, 0, N_);

  nbr_ = lattice_neighbors(L_, d_);
}

std::vector<std::vector<int>> lattice_neighbors(int L, int d) {
  int sites = 1;
  for (int k = 0; k < d; ++k) sites *= L;
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(sites));
  for (int x = 0; x < sites; ++x) {
    int stride = 1;
    for (int k = 0; k < d; ++k) {
      const int ck = (x / stride) % L;
      if (ck > 0) nbr[x].push_back(x - stride);
      if (ck + 1 < L) nbr[x].push_back(x + stride);
      stride *= L;
    }
  }
  return nbr;
}

std::vector<int> StateSpace::coords(int x) const {
  std::vector<int> c(d_);
  for (int k = 0; k < d_; ++k) {
    c[k] = x % L_;
    x /= L_;
  }
  return c;
}

std::int64_t StateSpace::rank(std::span<const std::uint16_t> eta) const {
  std::uint64_t idx = 0;
  int rem = N_;
  for (int i = 0; i + 1 < sites_; ++i) {
    const int a = eta[i];
    // configurations with a larger value at site i: sum_{j=0}^{rem-a-1} M(j, sites-i-1) = M(rem-a-1, sites-i)
    if (a < rem) idx += M(rem - a - 1, sites_ - i);
    rem -= a;
  }
  return static_cast<std::int64_t>(idx);
}

std::vector<std::uint16_t> StateSpace::unrank(std::int64_t r) const {
  if (r < 0 || r >= size_) fail_argument("unrank: index out of range");
  std::vector<std::uint16_t> eta(sites_, 0);
  auto left = static_cast<std::uint64_t>(r);
  int rem = N_;
  for (int i = 0; i + 1 < sites_; ++i) {
    int a = rem;
    while (true) {
      const std::uint64_t block = M(rem - a, sites_ - i - 1);
      if (left < block) break;
      left -= block;
      --a;
    }
    eta[i] = static_cast<std::uint16_t>(a);
    rem -= a;
  }
  eta[sites_ - 1] = static_cast<std::uint16_t>(rem);
  return eta;
}

std::int64_t StateSpace::move(std::int64_t i, int from, int to) const {
  const auto eta = state(i);
  if (eta[from] == 0) return -1;
  if (from == to) return i;
  // rank difference computed on a local copy
  std::vector<std::uint16_t> tmp(eta.begin(), eta.end());
  tmp[from] -= 1;
  tmp[to] += 1;
  return rank(tmp);
}

}  // namespace zrp
