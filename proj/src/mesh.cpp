#include "fhdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fhdg {

namespace {

double signed_volume(int dim, const Point& a, const Point& b, const Point& c)
{
    if (dim == 1)
        return b.x() - a.x();
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

SimplicialMesh::SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<int> element_vertices)
    : dim_(dim), vertices_(std::move(vertices)), element_vertices_(std::move(element_vertices))
{
    if (dim_ != 1 && dim_ != 2)
        throw std::invalid_argument("mesh: only d = 1 and d = 2 are supported");
    if (element_vertices_.empty() || element_vertices_.size() % (dim_ + 1) != 0)
        throw std::invalid_argument("mesh: element connectivity has the wrong length");
    for (int v : element_vertices_)
        if (v < 0 || v >= num_vertices())
            throw std::invalid_argument("mesh: element references a missing vertex");

    // positive orientation; degenerate simplexes are rejected
    for (int K = 0; K < num_elements(); ++K) {
        int* ev = &element_vertices_[K * (dim_ + 1)];
        const Point& c = dim_ == 2 ? vertices_[ev[2]] : vertices_[ev[0]];
        const double vol = signed_volume(dim_, vertices_[ev[0]], vertices_[ev[1]], c);
        const double scale = std::pow((vertices_[ev[1]] - vertices_[ev[0]]).norm(), dim_);
        if (!(std::abs(vol) > 1e-14 * scale))
            throw std::invalid_argument("mesh: degenerate element " + std::to_string(K));
        if (vol < 0.0)
            std::swap(ev[0], ev[1]);
    }
    build_faces();
}

void SimplicialMesh::build_faces()
{
    const int nfe = dim_ + 1;
    element_faces_.assign(element_vertices_.size(), -1);
    std::map<std::array<int, 2>, int> index;
    for (int K = 0; K < num_elements(); ++K) {
        for (int i = 0; i < nfe; ++i) {
            std::array<int, 2> key{-1, -1};
            int slot = 0;
            for (int j = 0; j < nfe; ++j)
                if (j != i)
                    key[slot++] = element_vertex(K, j);
            if (dim_ == 2 && key[0] > key[1])
                std::swap(key[0], key[1]);

            auto [it, inserted] = index.try_emplace(key, num_faces());
            const int F = it->second;
            if (inserted) {
                for (int j = 0; j < dim_; ++j)
                    face_vertices_.push_back(key[j]);
                face_boundary_.push_back(1);
                face_elements_.push_back({{{K, i}, {-1, -1}}});
            } else {
                auto& adj = face_elements_[F];
                if (adj[1][0] != -1)
                    throw std::invalid_argument("mesh: face shared by more than two elements");
                adj[1] = {K, i};
                face_boundary_[F] = 0;
            }
            element_faces_[K * nfe + i] = F;
        }
    }
}

Point SimplicialMesh::outward_normal(int K, int i) const
{
    const Point& opposite = vertices_[element_vertex(K, i)];
    const int F = element_face(K, i);
    const Point& a = vertices_[face_vertex(F, 0)];
    Point n;
    if (dim_ == 1) {
        n = Point(a.x() > opposite.x() ? 1.0 : -1.0, 0.0);
    } else {
        const Point e = vertices_[face_vertex(F, 1)] - a;
        n = Point(e.y(), -e.x()).normalized();
        if (n.dot(a - opposite) < 0.0)
            n = -n;
    }
    return n;
}

double SimplicialMesh::element_volume(int K) const
{
    const Point& a = vertices_[element_vertex(K, 0)];
    const Point& b = vertices_[element_vertex(K, 1)];
    const Point& c = dim_ == 2 ? vertices_[element_vertex(K, 2)] : a;
    return std::abs(signed_volume(dim_, a, b, c));
}

double SimplicialMesh::face_measure(int F) const
{
    if (dim_ == 1)
        return 1.0;
    return (vertices_[face_vertex(F, 1)] - vertices_[face_vertex(F, 0)]).norm();
}

double SimplicialMesh::element_diameter(int K) const
{
    double h = 0.0;
    for (int i = 0; i <= dim_; ++i)
        for (int j = i + 1; j <= dim_; ++j)
            h = std::max(h, (vertices_[element_vertex(K, i)] - vertices_[element_vertex(K, j)]).norm());
    return h;
}

double SimplicialMesh::inradius(int K) const
{
    // rho = d |K| / |dK|
    if (dim_ == 1)
        return 0.5 * element_volume(K);
    double perimeter = 0.0;
    for (int i = 0; i <= dim_; ++i)
        perimeter += face_measure(element_face(K, i));
    return 2.0 * element_volume(K) / perimeter;
}

std::vector<int> SimplicialMesh::boundary_faces() const
{
    std::vector<int> out;
    for (int F = 0; F < num_faces(); ++F)
        if (is_boundary(F))
            out.push_back(F);
    return out;
}

std::vector<int> SimplicialMesh::interior_faces() const
{
    std::vector<int> out;
    for (int F = 0; F < num_faces(); ++F)
        if (!is_boundary(F))
            out.push_back(F);
    return out;
}

int SimplicialMesh::num_interior_faces() const
{
    return static_cast<int>(std::count(face_boundary_.begin(), face_boundary_.end(), 0));
}

MeshMetrics compute_metrics(const SimplicialMesh& mesh)
{
    MeshMetrics m;
    m.h_K.resize(mesh.num_elements());
    m.rho_K.resize(mesh.num_elements());
    double h_min = std::numeric_limits<double>::infinity();
    m.rho = std::numeric_limits<double>::infinity();
    for (int K = 0; K < mesh.num_elements(); ++K) {
        m.h_K[K] = mesh.element_diameter(K);
        m.rho_K[K] = mesh.inradius(K);
        m.h = std::max(m.h, m.h_K[K]);
        h_min = std::min(h_min, m.h_K[K]);
        m.rho = std::min(m.rho, m.rho_K[K]);
    }
    m.quasi_uniformity = m.h / h_min;
    return m;
}

SimplicialMesh build_interval_mesh(double a, double b, int n)
{
    if (n <= 0 || !(a < b))
        throw std::invalid_argument("interval mesh needs a < b and n >= 1");
    std::vector<Point> vertices(n + 1);
    for (int i = 0; i <= n; ++i)
        vertices[i] = Point(i == n ? b : a + (b - a) * i / n, 0.0);
    std::vector<int> elements;
    for (int i = 0; i < n; ++i) {
        elements.push_back(i);
        elements.push_back(i + 1);
    }
    return SimplicialMesh(1, std::move(vertices), std::move(elements));
}

SimplicialMesh build_unit_square_mesh(int n)
{
    if (n <= 0)
        throw std::invalid_argument("unit square mesh needs n >= 1");
    std::vector<Point> vertices;
    vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<int> elements;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            elements.insert(elements.end(), {id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            elements.insert(elements.end(), {id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return SimplicialMesh(2, std::move(vertices), std::move(elements));
}

SimplicialMesh refine_uniform(const SimplicialMesh& mesh)
{
    const int d = mesh.dim();
    std::vector<Point> vertices = mesh.vertices();
    std::vector<int> elements;

    if (d == 1) {
        // new vertices in coordinate order so the result matches direct construction
        std::vector<std::pair<double, int>> order;
        for (int K = 0; K < mesh.num_elements(); ++K) {
            const int a = mesh.element_vertex(K, 0), b = mesh.element_vertex(K, 1);
            const int m = static_cast<int>(vertices.size());
            vertices.emplace_back(0.5 * (vertices[a] + vertices[b]));
            elements.insert(elements.end(), {a, m, m, b});
        }
        for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
            order.emplace_back(vertices[v].x(), v);
        std::sort(order.begin(), order.end());
        std::vector<int> renumber(vertices.size());
        std::vector<Point> sorted(vertices.size());
        for (std::size_t r = 0; r < order.size(); ++r) {
            renumber[order[r].second] = static_cast<int>(r);
            sorted[r] = vertices[order[r].second];
        }
        for (int& v : elements)
            v = renumber[v];
        std::vector<std::pair<int, int>> cells;
        for (std::size_t e = 0; e < elements.size(); e += 2)
            cells.emplace_back(elements[e], elements[e + 1]);
        std::sort(cells.begin(), cells.end());
        elements.clear();
        for (auto [a, b] : cells)
            elements.insert(elements.end(), {a, b});
        return SimplicialMesh(1, std::move(sorted), std::move(elements));
    }

    // one midpoint per face
    std::vector<int> midpoint(mesh.num_faces());
    for (int F = 0; F < mesh.num_faces(); ++F) {
        midpoint[F] = static_cast<int>(vertices.size());
        vertices.emplace_back(0.5 * (vertices[mesh.face_vertex(F, 0)] + vertices[mesh.face_vertex(F, 1)]));
    }
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const int v0 = mesh.element_vertex(K, 0), v1 = mesh.element_vertex(K, 1), v2 = mesh.element_vertex(K, 2);
        // midpoint of the edge opposite local vertex i
        const int m0 = midpoint[mesh.element_face(K, 0)];
        const int m1 = midpoint[mesh.element_face(K, 1)];
        const int m2 = midpoint[mesh.element_face(K, 2)];
        elements.insert(elements.end(), {v0, m2, m1});
        elements.insert(elements.end(), {m2, v1, m0});
        elements.insert(elements.end(), {m1, m0, v2});
        elements.insert(elements.end(), {m0, m1, m2});
    }
    return SimplicialMesh(2, std::move(vertices), std::move(elements));
}

SimplicialMesh read_mesh(std::istream& in)
{
    int dim = 0, nv = 0, ne = 0;
    if (!(in >> dim >> nv >> ne))
        throw std::runtime_error("mesh file: bad header (expected `dim nv ne`)");
    if ((dim != 1 && dim != 2) || nv <= 0 || ne <= 0)
        throw std::runtime_error("mesh file: unsupported header values");
    std::vector<Point> vertices(nv, Point::Zero());
    for (int v = 0; v < nv; ++v)
        for (int c = 0; c < dim; ++c)
            if (!(in >> vertices[v][c]))
                throw std::runtime_error("mesh file: truncated vertex block");
    std::vector<int> elements(static_cast<std::size_t>(ne) * (dim + 1));
    for (int& v : elements)
        if (!(in >> v))
            throw std::runtime_error("mesh file: truncated element block");
    return SimplicialMesh(dim, std::move(vertices), std::move(elements));
}

SimplicialMesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open mesh file " + path);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const SimplicialMesh& mesh)
{
    const int d = mesh.dim();
    out << d << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    out << std::setprecision(17);
    for (const Point& p : mesh.vertices()) {
        for (int c = 0; c < d; ++c)
            out << (c ? " " : "") << p[c];
        out << '\n';
    }
    for (int K = 0; K < mesh.num_elements(); ++K) {
        for (int i = 0; i <= d; ++i)
            out << (i ? " " : "") << mesh.element_vertex(K, i);
        out << '\n';
    }
}

} // namespace fhdg
