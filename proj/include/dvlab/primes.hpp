#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dvlab {

/// Smallest-prime-factor sieve with divisor/factorization helpers.
class SpfSieve {
 public:
  explicit SpfSieve(std::uint64_t limit) : limit_(limit < 2 ? 2 : limit) {
    spf_.assign(limit_ + 1, 0);
    for (std::uint64_t i = 2; i <= limit_; ++i) {
      if (spf_[i] == 0) {
        primes_.push_back(i);
        for (std::uint64_t j = i; j <= limit_; j += i) {
          if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
        }
      }
    }
  }

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }

  bool is_prime(std::uint64_t n) const {
    return n >= 2 && n <= limit_ && spf_[n] == n;
  }

  /// (prime, exponent) pairs, primes ascending.  Requires n <= limit.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> factorize(std::uint64_t n) const {
    if (n > limit_) throw std::out_of_range("SpfSieve::factorize: n exceeds sieve limit");
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    while (n > 1) {
      std::uint64_t p = spf_[n];
      std::uint32_t e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
    return out;
  }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint64_t> primes_;
};

/// Process-wide sieve that grows on demand.  Readers always see a complete
/// sieve: the pointer swap publishes a fully built replacement.
inline std::shared_ptr<const SpfSieve> spf_sieve(std::uint64_t at_least) {
  static std::mutex mu;
  static std::shared_ptr<const SpfSieve> current;
  std::lock_guard<std::mutex> lock(mu);
  if (!current || current->limit() < at_least) {
    std::uint64_t limit = current ? current->limit() : 1024;
    while (limit < at_least) limit *= 2;
    current = std::make_shared<const SpfSieve>(limit);
  }
  return current;
}

/// First `count` primes.
inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::uint64_t limit = 64;
  for (;;) {
    auto sieve = spf_sieve(limit);
    if (sieve->primes().size() >= count) {
      return {sieve->primes().begin(), sieve->primes().begin() + count};
    }
    limit *= 2;
  }
}

/// Factorize any n (trial division by sieved primes up to sqrt n).  Handles
/// the large sparse indices (up to 2^32 and beyond) that the sieve cannot.
inline std::vector<std::pair<std::uint64_t, std::uint32_t>> factorize_u64(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize_u64: n must be positive");
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))) + 2;
  auto sieve = spf_sieve(std::max<std::uint64_t>(root, 1024));
  if (n <= sieve->limit()) return sieve->factorize(n);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (std::uint64_t p : sieve->primes()) {
    if (p * p > n) break;
    if (n % p == 0) {
      std::uint32_t e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Exponent vector over the first d primes; throws if n has a larger factor.
inline std::vector<std::uint32_t> prime_exponents(std::uint64_t n, int d) {
  auto ps = first_primes(static_cast<std::size_t>(d));
  std::vector<std::uint32_t> alpha(static_cast<std::size_t>(d), 0);
  auto factors = factorize_u64(n);
  for (const auto& [p, e] : factors) {
    bool found = false;
    for (int j = 0; j < d; ++j) {
      if (ps[static_cast<std::size_t>(j)] == p) {
        alpha[static_cast<std::size_t>(j)] = e;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::domain_error("index " + std::to_string(n) +
                              " is not smooth over the first " + std::to_string(d) +
                              " primes");
    }
  }
  return alpha;
}

inline bool is_smooth(std::uint64_t n, int d) {
  auto ps = first_primes(static_cast<std::size_t>(d));
  std::uint64_t bound = ps.empty() ? 1 : ps.back();
  for (const auto& [p, e] : factorize_u64(n)) {
    (void)e;
    if (p > bound) return false;
  }
  return true;
}

}  // namespace dvlab
