#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace steklov {

/// Formats a double with 17 significant digits, enough for an exact
/// decimal round-trip. All floating-point text emitted by the library
/// goes through this.
std::string format_g17(double v);

/// FNV-1a 64-bit hash of a byte string, as a 16-char lowercase hex string.
std::string fnv1a64_hex(std::string_view bytes);

/// Reads a whole file into a string. Throws Error if the file cannot be read.
std::string read_file(const std::string& path);

/// Writes a string to a file, creating parent directories if needed.
void write_file(const std::string& path, std::string_view contents);

/// Deterministic uniform doubles in [0, 1) from a SplitMix64 stream.
/// Used wherever reproducible "random" data is needed; the mapping is
/// platform-independent (no library distribution involved).
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace steklov
