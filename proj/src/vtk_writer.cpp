#include <cstdio>

#include "afc/errors.hpp"
#include "afc/harness.hpp"

namespace afc {

void write_vtk(const std::vector<double>& u_h, const Mesh& mesh,
               const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot open for writing: " + path);

    const int nv = mesh.verts_per_cell();
    const int vtk_type = mesh.cell_type == CellType::Tet ? 10 : 12;

    std::fprintf(f, "# vtk DataFile Version 3.0\n");
    std::fprintf(f, "afc3d solution\n");
    std::fprintf(f, "ASCII\n");
    std::fprintf(f, "DATASET UNSTRUCTURED_GRID\n");
    std::fprintf(f, "POINTS %lld double\n",
                 static_cast<long long>(mesh.n_nodes()));
    for (const auto& p : mesh.nodes)
        std::fprintf(f, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);

    std::fprintf(f, "CELLS %lld %lld\n", static_cast<long long>(mesh.n_cells()),
                 static_cast<long long>(mesh.n_cells() * (nv + 1)));
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
        const std::int32_t* v = mesh.cell(c);
        std::fprintf(f, "%d", nv);
        for (int i = 0; i < nv; ++i) std::fprintf(f, " %d", v[i]);
        std::fprintf(f, "\n");
    }
    std::fprintf(f, "CELL_TYPES %lld\n", static_cast<long long>(mesh.n_cells()));
    for (std::int64_t c = 0; c < mesh.n_cells(); ++c)
        std::fprintf(f, "%d\n", vtk_type);

    std::fprintf(f, "POINT_DATA %lld\n", static_cast<long long>(mesh.n_nodes()));
    std::fprintf(f, "SCALARS u double 1\n");
    std::fprintf(f, "LOOKUP_TABLE default\n");
    for (double x : u_h) std::fprintf(f, "%.17g\n", x);

    if (std::fclose(f) != 0) throw Error("write failed: " + path);
}

}  // namespace afc
