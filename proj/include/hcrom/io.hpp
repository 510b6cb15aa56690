#ifndef HCROM_IO_HPP
#define HCROM_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hcrom/fem_system.hpp"
#include "hcrom/reduced_basis.hpp"

namespace hcrom {

// Doubles are written with enough digits to round-trip; infinities as "inf".
std::string fmt(double v);

// Plain-text nodal field with a mesh-resolution header line.
void write_field(const std::filesystem::path& path, const StructuredMesh& mesh, const Field& u);
Field read_field(const std::filesystem::path& path, int expect_cells = -1);

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::filesystem::path& path);

// Dense matrix as text with a "rows cols" header.
void write_dense(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_dense(const std::filesystem::path& path);

// Sparse matrix in MatrixMarket coordinate format.
void write_sparse(const std::filesystem::path& path, const SparseMat& m);

// Diagnostics bundle: A_0.mtx .. A_{d-1}.mtx, S.mtx, F.txt.
void export_system(const std::filesystem::path& dir, const FemSystem& sys);

// Line-oriented CSV with deterministic formatting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// Reduced-basis archive: snapshot parameters, QR factors, and the reduced
// operators, sufficient to rebuild the basis without the training solves.
void save_basis_archive(const std::filesystem::path& dir, const ReducedBasis& rb,
                        const std::string& meta_json);
ReducedBasis load_basis_archive(const std::filesystem::path& dir, const FemSystem& sys);
std::string load_basis_meta(const std::filesystem::path& dir);

}  // namespace hcrom

#endif
