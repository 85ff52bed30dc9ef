#pragma once

#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace latticeforge {

// ---------------------------------------------------------------------------
// Error types. Callers of the generation pipeline treat DegenerateInput and
// SingularSystem as retryable; everything else is a hard failure.
// ---------------------------------------------------------------------------

struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IsolatedNode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptRecord : std::runtime_error {
  CorruptRecord(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

struct EmptyRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic seeding utilities. Dataset content must be a pure function of
// (global seed, sample index, attempt), independent of worker count, so all
// per-sample seeds are derived through a stateless mixer.
// ---------------------------------------------------------------------------

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t global, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix64(global ^ 0x243F6A8885A308D3ULL);
  h = mix64(h ^ stream * 0x100000001B3ULL);
  h = mix64(h ^ index);
  return h;
}

// Seed streams. Keeping them in one table makes disjointness auditable:
// hidden-test seeds can never collide with train/val seeds by construction.
namespace seed_stream {
constexpr std::uint64_t kDataset = 1;
constexpr std::uint64_t kHiddenTest = 2;
constexpr std::uint64_t kSplit = 3;
constexpr std::uint64_t kInit = 4;
constexpr std::uint64_t kShuffle = 5;
constexpr std::uint64_t kToyData = 6;
constexpr std::uint64_t kInverseDb = 7;
constexpr std::uint64_t kRetry = 8;
}  // namespace seed_stream

// Uniform double in [0, 1) with exactly 53 random bits. Bit-stable across
// standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in {lo, ..., hi}, inclusive.
inline int uniform_int_in(std::mt19937_64& rng, int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + static_cast<int>(uniform01(rng) * span);
}

constexpr const char* kSchemaTag = "lattice-forge/1";
constexpr const char* kCheckpointTag = "lattice-forge-ckpt/1";

// 17 significant digits round-trip a double exactly, keeping text artifacts
// byte-deterministic.
inline std::string num17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace latticeforge
