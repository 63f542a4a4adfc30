#pragma once

#include <cstdint>
#include <random>

namespace lamina {

// Stream purposes. Each estimator phase draws from its own family of
// streams so that adding a phase never shifts the numbers of another.
enum class StreamTag : std::uint32_t {
  path = 1,
  start = 2,
  fiber = 3,
  pilot = 4,
  sample = 5,
};

/// Independent generator for one (seed, tag, index) triple. Results depend
/// only on the key, never on which worker consumes the stream.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, StreamTag tag, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace lamina
