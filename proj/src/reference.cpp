#include "distillq/sweep.hpp"

namespace distillq {

const ReferenceTable& reference_table() {
  // qubits, mean size-7, mean infinite, states (infinite), utilization,
  // transitions
  static const ReferenceTable table{
      {16, 2.80, 2.96, 9, 0.69, 270},
      {32, 3.85, 6.51, 19, 0.73, 558},
      {64, 4.35, 13.61, 37, 0.76, 1134},
      {128, 4.59, 27.83, 73, 0.77, 2286},
      {256, 4.71, 56.28, 147, 0.77, 4590},
      {512, 4.77, 113.17, 293, 0.78, 9198},
      {1024, 4.80, 226.94, 585, 0.78, 18414},
      {1536, 4.80, 340.72, 878, 0.78, 27630},
      {2048, 4.82, 454.5, 1171, 0.78, 36846},
  };
  return table;
}

std::vector<Rational> default_rate_grid() {
  return {Rational(1, 5),   Rational(2, 9), Rational(1, 4), Rational(16, 63),
          Rational(4, 15), Rational(2, 7), Rational(1, 3)};
}

} // namespace distillq
