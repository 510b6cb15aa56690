#include "hcrom/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "hcrom/errors.hpp"

namespace hcrom {

StructuredMesh build_mesh(int cells_per_side) {
  if (cells_per_side < 4 || cells_per_side % 4 != 0) {
    throw ConfigError("build_mesh: cells_per_side must be >= 4 and divisible by 4, got " +
                      std::to_string(cells_per_side));
  }
  StructuredMesh m;
  m.cells_per_side = cells_per_side;
  const int n = cells_per_side;
  const double h = 2.0 / n;

  m.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices.emplace_back(-1.0 + i * h, -1.0 + j * h);
    }
  }

  m.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = m.vertex_index(i, j);
      const int v10 = m.vertex_index(i + 1, j);
      const int v01 = m.vertex_index(i, j + 1);
      const int v11 = m.vertex_index(i + 1, j + 1);
      // Diagonal of positive slope: v00 -- v11.
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }

  m.interior_dof.assign((n + 1) * (n + 1), -1);
  int dof = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      m.interior_dof[m.vertex_index(i, j)] = dof++;
    }
  }
  m.n_interior = dof;
  return m;
}

namespace {

SubdomainPartition lipschitz4_partition() {
  SubdomainPartition p;
  p.d = 4;
  p.geometry_name = "lipschitz4";
  // 0=A, 1=B, 2=C, 3=D (background).
  p.label_of_cell.fill(3);
  p.label_of_cell[1 + 4 * 0] = 0;  // A
  p.label_of_cell[3 + 4 * 1] = 1;  // B
  p.label_of_cell[1 + 4 * 2] = 2;  // C
  p.label_of_cell[2 + 4 * 2] = 2;
  p.label_of_cell[3 + 4 * 2] = 2;
  return p;
}

SubdomainPartition latin4_partition() {
  SubdomainPartition p;
  p.d = 4;
  p.geometry_name = "latin4";
  // Rows bottom to top; 0=A, 1=B, 2=C, 3=D.
  constexpr int rows[4][4] = {
      {0, 2, 1, 3},
      {2, 0, 3, 1},
      {1, 3, 0, 2},
      {3, 1, 2, 0},
  };
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      p.label_of_cell[col + 4 * row] = rows[row][col];
    }
  }
  return p;
}

SubdomainPartition grid16_partition() {
  SubdomainPartition p;
  p.d = 16;
  p.geometry_name = "grid16";
  for (int c = 0; c < 16; ++c) p.label_of_cell[c] = c;
  return p;
}

}  // namespace

SubdomainPartition make_partition(const std::string& geometry_name, int d) {
  SubdomainPartition p;
  if (geometry_name == "lipschitz4") {
    p = lipschitz4_partition();
  } else if (geometry_name == "latin4") {
    p = latin4_partition();
  } else if (geometry_name == "grid16") {
    p = grid16_partition();
  } else {
    throw ConfigError("make_partition: unknown geometry '" + geometry_name + "'");
  }
  if (d != p.d) {
    throw ConfigError("make_partition: geometry '" + geometry_name + "' has d=" +
                      std::to_string(p.d) + ", requested d=" + std::to_string(d));
  }
  return p;
}

int grid_cell_of_point(double x, double y) {
  int col = static_cast<int>(std::floor((x + 1.0) / 0.5));
  int row = static_cast<int>(std::floor((y + 1.0) / 0.5));
  col = std::min(std::max(col, 0), 3);
  row = std::min(std::max(row, 0), 3);
  return col + 4 * row;
}

std::vector<int> label_triangles(const StructuredMesh& mesh,
                                 const SubdomainPartition& partition) {
  std::vector<int> labels(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d c =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    labels[t] = partition.label_of_cell[grid_cell_of_point(c.x(), c.y())];
  }
  return labels;
}

}  // namespace hcrom
