#ifndef DOCBIAS_UTIL_HPP_
#define DOCBIAS_UTIL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace docbias {

// Error taxonomy: user-facing errors (bad config, bad input files) exit 1,
// anything else exits 2.
struct UserError : std::runtime_error {
  explicit UserError(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : UserError {
  explicit ConfigError(const std::string& what) : UserError(what) {}
};
struct IngestError : UserError {
  explicit IngestError(const std::string& what) : UserError(what) {}
};
struct TrainError : std::runtime_error {
  explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit FNV-1a. Stable across runs and platforms; used for WL relabeling
// and for content hashes in manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}
inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}
inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::string hex64(std::uint64_t v);

// Deterministic RNG. std::mt19937_64 output is fully specified by the
// standard; the bounded draw below avoids std::uniform_int_distribution,
// whose mapping is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) { next(); next(); }

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= lim);
    return x % n;
  }

  // Uniform in [0, 1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

// Shortest decimal string that parses back to exactly the same double.
// Always carries a decimal point or exponent ("2.0", not "2"), so exported
// numbers read as floating point.
std::string repr_double(double v);

std::string lower_ascii(const std::string& s);
std::string trim(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);
std::uint64_t hash_file(const std::string& path);

}  // namespace docbias

#endif
