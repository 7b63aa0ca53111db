#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace bnp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row sense of a linear constraint `a^T x (sense) rhs`.
enum class Sense { Le, Ge, Eq };

enum class VarKind { Continuous, Integer };

/// A point of a block's integer y-lattice.
using Design = std::vector<std::int64_t>;

/// One (row, col, value) entry of a sparse matrix.
struct SparseEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

const char* sense_name(Sense s);

}  // namespace bnp
