#pragma once

#include "istiefel/linalg.hpp"

#include <filesystem>
#include <iosfwd>

namespace istiefel {

class MtxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MtxLayout { array, coordinate };

// Matrix Market I/O for real matrices. Reads "array" and "coordinate" files
// with real, integer or pattern fields and general or symmetric symmetry;
// symmetric files store the lower triangle only.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::filesystem::path& path);

void write_matrix_market(std::ostream& out, const Matrix& m, MtxLayout layout = MtxLayout::array,
                         bool symmetric = false);
void write_matrix_market(const std::filesystem::path& path, const Matrix& m,
                         MtxLayout layout = MtxLayout::array, bool symmetric = false);

}  // namespace istiefel
