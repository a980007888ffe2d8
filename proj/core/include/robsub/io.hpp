#pragma once

// File formats: Matrix Market (coordinate and array), headerless CSV,
// one-column weight files, and 0-based edge lists.

#include "robsub/core.hpp"
#include "robsub/hardness.hpp"

#include <string>
#include <utility>
#include <vector>

namespace robsub {

/// Coordinate files load as sparse, array files as dense. Symmetric and
/// pattern variants are expanded.
Matrix read_matrix_market(const std::string& path);
/// Dense matrices are written in array format, sparse ones as coordinates.
void write_matrix_market(const std::string& path, const Matrix& m);

Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const DenseMatrix& m);

/// .mtx goes to the Matrix Market reader, everything else to CSV.
Matrix read_matrix(const std::string& path);

/// One value per line (or a single CSV column).
Vector read_vector_csv(const std::string& path);
WeightVector read_weights_csv(const std::string& path);

/// "u v" per line, 0-based; blank lines and '#' comments are skipped. The
/// vertex count is the largest index plus one.
Adjacency read_edge_list(const std::string& path);

}  // namespace robsub
