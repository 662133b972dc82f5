#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fhdg/basis.hpp"
#include "fhdg/mesh.hpp"

using namespace fhdg;

namespace {

double total_volume(const SimplicialMesh& m)
{
    double s = 0.0;
    for (int K = 0; K < m.num_elements(); ++K)
        s += m.element_volume(K);
    return s;
}

std::set<std::pair<double, double>> boundary_vertices(const SimplicialMesh& m)
{
    std::set<std::pair<double, double>> out;
    for (int F : m.boundary_faces())
        for (int i = 0; i < m.vertices_per_face(); ++i) {
            const Point& p = m.vertex(m.face_vertex(F, i));
            out.insert({p.x(), p.y()});
        }
    return out;
}

void check_conforming(const SimplicialMesh& m)
{
    std::vector<int> count(m.num_faces(), 0);
    for (int K = 0; K < m.num_elements(); ++K)
        for (int i = 0; i < m.faces_per_element(); ++i)
            ++count[m.element_face(K, i)];
    for (int F = 0; F < m.num_faces(); ++F) {
        CHECK(count[F] == (m.is_boundary(F) ? 1 : 2));
        if (!m.is_boundary(F)) {
            const auto& fe = m.face_elements(F);
            const Point n0 = m.outward_normal(fe[0][0], fe[0][1]);
            const Point n1 = m.outward_normal(fe[1][0], fe[1][1]);
            CHECK((n0 + n1).norm() <= 1e-14);
        }
    }
    for (int K = 0; K < m.num_elements(); ++K) {
        CHECK(m.element_volume(K) > 0.0);
        for (int i = 0; i < m.faces_per_element(); ++i)
            CHECK(std::abs(m.outward_normal(K, i).norm() - 1.0) <= 1e-14);
    }
}

} // namespace

TEST_SUITE("meshing")
{
    TEST_CASE("interval meshes")
    {
        const SimplicialMesh m = build_interval_mesh(0.0, 1.0, 2);
        CHECK(m.num_elements() == 2);
        CHECK(m.num_faces() == 3);
        CHECK(m.num_interior_faces() == 1);
        const int F = m.interior_faces()[0];
        CHECK(m.vertex(m.face_vertex(F, 0)).x() == 0.5);
        const auto& fe = m.face_elements(F);
        CHECK(fe[0][0] != fe[1][0]);
        CHECK(fe[1][0] >= 0);

        const SimplicialMesh one = build_interval_mesh(0.0, 1.0, 1);
        CHECK(one.num_elements() == 1);
        CHECK(one.boundary_faces().size() == 2);
        CHECK(one.num_interior_faces() == 0);

        const MeshMetrics mm = compute_metrics(build_interval_mesh(0.0, 1.0, 4));
        CHECK(mm.h == doctest::Approx(0.25).epsilon(1e-15));
        for (double r : mm.rho_K)
            CHECK(r == doctest::Approx(0.125).epsilon(1e-15));

        CHECK_THROWS(build_interval_mesh(0.0, 1.0, 0));
        CHECK_THROWS(build_interval_mesh(1.0, 1.0, 3));
    }

    TEST_CASE("unit square meshes")
    {
        const SimplicialMesh m1 = build_unit_square_mesh(1);
        CHECK(m1.num_elements() == 2);
        CHECK(m1.num_interior_faces() == 1);
        CHECK(m1.boundary_faces().size() == 4);

        const SimplicialMesh m2 = build_unit_square_mesh(2);
        CHECK(m2.num_elements() == 8);
        CHECK(m2.num_faces() == 16);
        CHECK(m2.boundary_faces().size() == 8);

        const MeshMetrics mm = compute_metrics(build_unit_square_mesh(4));
        CHECK(mm.h == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
        CHECK(mm.quasi_uniformity == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_THROWS(build_unit_square_mesh(0));
    }

    TEST_CASE("conformity, volumes, metric bounds")
    {
        for (const SimplicialMesh& m : {build_interval_mesh(0.0, 1.0, 7), build_unit_square_mesh(3),
                                        refine_uniform(build_unit_square_mesh(3))}) {
            check_conforming(m);
            CHECK(std::abs(total_volume(m) - 1.0) <= 1e-12);
            const MeshMetrics mm = compute_metrics(m);
            for (int K = 0; K < m.num_elements(); ++K) {
                CHECK(mm.rho_K[K] > 0.0);
                CHECK(mm.rho_K[K] <= mm.h_K[K] / 2.0 + 1e-15);
                CHECK(mm.h_K[K] <= mm.h + 1e-15);
            }
        }
    }

    TEST_CASE("refinement")
    {
        const SimplicialMesh a = refine_uniform(build_interval_mesh(0.0, 1.0, 2));
        const SimplicialMesh b = build_interval_mesh(0.0, 1.0, 4);
        REQUIRE(a.num_elements() == b.num_elements());
        for (int K = 0; K < a.num_elements(); ++K)
            for (int i = 0; i < 2; ++i)
                CHECK(a.vertex(a.element_vertex(K, i)).x() == b.vertex(b.element_vertex(K, i)).x());

        CHECK(refine_uniform(build_unit_square_mesh(1)).num_elements() == 8);

        for (const SimplicialMesh& m : {build_interval_mesh(0.0, 1.0, 3), build_unit_square_mesh(2)}) {
            const SimplicialMesh r = refine_uniform(m);
            CHECK(std::abs(compute_metrics(r).h - compute_metrics(m).h / 2.0) <= 1e-14);
            check_conforming(r);
            // the original boundary vertices survive refinement
            const auto before = boundary_vertices(m);
            const auto after = boundary_vertices(r);
            CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
            for (const auto& [x, y] : after) {
                const bool on_boundary = x == 0.0 || x == 1.0 || (m.dim() == 2 && (y == 0.0 || y == 1.0));
                CHECK(on_boundary);
            }
        }
    }

    TEST_CASE("traces of a continuous polynomial agree across interior faces")
    {
        const SimplicialMesh m = build_unit_square_mesh(3);
        const auto poly = [](const Point& x) { return 1.0 + x.x() * x.x() - 3.0 * x.x() * x.y() + x.y(); };
        for (int F : m.interior_faces()) {
            const auto& fe = m.face_elements(F);
            for (double s : {0.1, 0.5, 0.77}) {
                const ElementGeometry g0(m, fe[0][0]), g1(m, fe[1][0]);
                const Point x0 = g0.to_physical(face_point_on_reference(m, fe[0][0], fe[0][1], s));
                const Point x1 = g1.to_physical(face_point_on_reference(m, fe[1][0], fe[1][1], s));
                CHECK((x0 - x1).norm() <= 1e-14);
                CHECK(std::abs(poly(x0) - poly(x1)) <= 1e-12);
                CHECK((x0 - face_point(m, F, s)).norm() <= 1e-14);
            }
        }
    }

    TEST_CASE("mesh file round trip")
    {
        const SimplicialMesh m = build_unit_square_mesh(2);
        std::stringstream ss;
        write_mesh(ss, m);
        const SimplicialMesh r = read_mesh(ss);
        CHECK(r.num_elements() == m.num_elements());
        CHECK(r.num_faces() == m.num_faces());
        CHECK(r.boundary_faces().size() == m.boundary_faces().size());

        std::istringstream text("1 3 2\n0\n0.5\n1\n0 1\n1 2\n");
        const SimplicialMesh i = read_mesh(text);
        CHECK(i.num_elements() == 2);
        CHECK(i.num_interior_faces() == 1);

        std::istringstream bad("2 3 1\n0 0\n1 0\n2 0\n0 1 2\n");
        CHECK_THROWS(read_mesh(bad));
    }
}
