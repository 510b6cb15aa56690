#ifndef HCROM_MESH_HPP
#define HCROM_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hcrom {

// Uniform triangulation of the square [-1,1]^2 with homogeneous Dirichlet
// boundary. Each grid cell is split into two triangles by the diagonal of
// positive slope. Interior vertices carry the degrees of freedom,
// enumerated row-major from the bottom-left.
struct StructuredMesh {
  int cells_per_side = 0;
  std::vector<Eigen::Vector2d> vertices;        // (N+1)^2, row-major
  std::vector<std::array<int, 3>> triangles;    // 2 N^2, positive orientation
  std::vector<int> interior_dof;                // vertex -> DOF ordinal, -1 on boundary
  int n_interior = 0;

  int vertex_index(int i, int j) const { return j * (cells_per_side + 1) + i; }
  bool on_boundary(int v) const { return interior_dof[v] < 0; }
  double h() const { return 2.0 / cells_per_side; }
};

// cells_per_side must be >= 4 and divisible by 4 so that every triangle
// lies inside a single quarter-side subdomain square.
StructuredMesh build_mesh(int cells_per_side);

// Partition of [-1,1]^2 into d subdomains, defined on the 4x4 grid of
// squares of side 1/2. Grid squares are addressed (col,row) from the
// bottom-left, flattened as col + 4*row. Labels are 0-based.
struct SubdomainPartition {
  int d = 0;
  std::array<int, 16> label_of_cell{};
  std::string geometry_name;

  int label_at(int col, int row) const { return label_of_cell[col + 4 * row]; }
};

// Known geometries: "lipschitz4" (three rectangular inclusions in a
// background, d=4), "latin4" (Latin-square layout of four labels, d=4),
// "grid16" (every square its own subdomain, d=16).
SubdomainPartition make_partition(const std::string& geometry_name, int d);

// Grid square containing a point of the open square (-1,1)^2.
int grid_cell_of_point(double x, double y);

// Subdomain label of each mesh triangle under a partition.
std::vector<int> label_triangles(const StructuredMesh& mesh,
                                 const SubdomainPartition& partition);

}  // namespace hcrom

#endif
