#pragma once

#include <functional>
#include <string>
#include <utility>

#include "afc/mesh.hpp"
#include "afc/report.hpp"

namespace afc {

// L1 and L2 norms of (exact - u_h) by element quadrature of order >= 3.
std::pair<double, double> error_norms(const std::vector<double>& u_h,
                                      const std::function<double(const Vec3&)>& exact,
                                      const Mesh& mesh);

// Finite-element evaluation of u_h at a point inside the mesh.
struct ProbeLocation {
    std::int64_t cell = -1;
    std::array<double, 8> weights{};
    std::array<std::int32_t, 8> nodes{};
    int n = 0;

    double eval(const std::vector<double>& u) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += weights[i] * u[nodes[i]];
        return s;
    }
};

// Throws afc::Error when the point lies outside the mesh.
ProbeLocation locate_point(const Mesh& mesh, const Vec3& point);

double probe(const std::vector<double>& u_h, const Mesh& mesh,
             const Vec3& point);

// Legacy ASCII VTK unstructured grid with the point scalar field "u".
void write_vtk(const std::vector<double>& u_h, const Mesh& mesh,
               const std::string& path);

}  // namespace afc
