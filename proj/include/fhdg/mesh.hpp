#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fhdg {

using Point = Eigen::Vector2d; // d <= 2; the unused coordinate of 1D points is 0

/// Conforming simplicial mesh of an interval (d = 1) or a polygon (d = 2).
///
/// Local face i of an element is the face opposite its local vertex i.  Face
/// vertex tuples are stored in ascending global order, which fixes the face
/// parametrization independently of the element it is seen from.
class SimplicialMesh {
public:
    SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<int> element_vertices);

    int dim() const noexcept { return dim_; }
    int vertices_per_element() const noexcept { return dim_ + 1; }
    int faces_per_element() const noexcept { return dim_ + 1; }
    int vertices_per_face() const noexcept { return dim_; }

    int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
    int num_elements() const noexcept { return static_cast<int>(element_vertices_.size()) / (dim_ + 1); }
    int num_faces() const noexcept { return static_cast<int>(face_boundary_.size()); }

    const Point& vertex(int v) const { return vertices_[v]; }
    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    int element_vertex(int K, int i) const { return element_vertices_[K * (dim_ + 1) + i]; }
    int element_face(int K, int i) const { return element_faces_[K * (dim_ + 1) + i]; }
    int face_vertex(int F, int i) const { return face_vertices_[F * dim_ + i]; }
    bool is_boundary(int F) const { return face_boundary_[F] != 0; }

    /// Elements adjacent to F as (element, local face index); the second entry
    /// is {-1, -1} on the boundary.
    const std::array<std::array<int, 2>, 2>& face_elements(int F) const { return face_elements_[F]; }

    /// Outward unit normal of local face i of K.
    Point outward_normal(int K, int i) const;

    double element_volume(int K) const;
    double face_measure(int F) const;
    double element_diameter(int K) const;
    double inradius(int K) const;

    std::vector<int> boundary_faces() const;
    std::vector<int> interior_faces() const;
    int num_interior_faces() const;

private:
    void build_faces();

    int dim_;
    std::vector<Point> vertices_;
    std::vector<int> element_vertices_;
    std::vector<int> element_faces_;
    std::vector<int> face_vertices_;
    std::vector<char> face_boundary_;
    std::vector<std::array<std::array<int, 2>, 2>> face_elements_;
};

struct MeshMetrics {
    double h = 0.0;                 ///< max element diameter
    std::vector<double> h_K;
    std::vector<double> rho_K;      ///< inradius per element
    double rho = 0.0;               ///< min inradius
    double quasi_uniformity = 0.0;  ///< h / min h_K
};

MeshMetrics compute_metrics(const SimplicialMesh& mesh);

SimplicialMesh build_interval_mesh(double a, double b, int n);

/// n x n squares, each split along its (i,j)-(i+1,j+1) diagonal.
SimplicialMesh build_unit_square_mesh(int n);

/// Splits every element into 2^d children (midpoint / red refinement).
SimplicialMesh refine_uniform(const SimplicialMesh& mesh);

/// Text format: `dim nv ne`, nv coordinate lines, ne lines of d+1 zero-based indices.
SimplicialMesh read_mesh(std::istream& in);
SimplicialMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const SimplicialMesh& mesh);

} // namespace fhdg
