#include "afc/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "afc/errors.hpp"
#include "afc/msh_reader.hpp"

namespace afc {

namespace {

constexpr double kGeomTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kGeomTol; }

double segment_distance(const Vec3& x, const Vec3& p, const Vec3& q) {
    const Vec3 d = q - p;
    const double len2 = dot(d, d);
    double s = len2 > 0.0 ? dot(x - p, d) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return norm(x - (p + s * d));
}

std::string default_data_dir() {
    if (const char* env = std::getenv("AFC_DATA_DIR")) return env;
#ifdef AFC_DATA_DIR
    return AFC_DATA_DIR;
#else
    return "data";
#endif
}

}  // namespace

std::int64_t BoundaryClassification::count_dirichlet() const {
    std::int64_t n = 0;
    for (auto k : kind) n += (k == NodeKind::Dirichlet);
    return n;
}

// ---- rotating shapes -------------------------------------------------------

ProblemSpec rotating_shapes() {
    ProblemSpec p;
    p.name = "rotating-shapes";
    p.epsilon = 1e-20;
    p.velocity = [](double, const Vec3& x) {
        return Vec3{0.5 - x[1], x[0] - 0.5, 0.0};
    };
    p.facet_kind = [](const Vec3&, int) {
        return std::optional<BoundaryKind>(BoundaryKind::Dirichlet);
    };
    p.dirichlet_value = [](double, const Vec3&) { return 0.0; };
    p.initial = [](const Vec3& x) {
        // cube, center (0.5, 0.25, 0.5), edge 0.25
        if (std::abs(x[0] - 0.5) <= 0.125 && std::abs(x[1] - 0.25) <= 0.125 &&
            std::abs(x[2] - 0.5) <= 0.125)
            return 1.0;
        // cone, base radius 0.125 at (0.75, 0.5, 0.25), height 0.5
        if (x[2] >= 0.25 && x[2] <= 0.75) {
            const double rho =
                std::hypot(x[0] - 0.75, x[1] - 0.5);
            if (rho <= 0.125 * (1.0 - (x[2] - 0.25) / 0.5)) return 1.0;
        }
        // hollow cylinder, radii 0.0625/0.125, base center (0.5, 0.75, 0.25)
        if (x[2] >= 0.25 && x[2] <= 0.75) {
            const double rho = std::hypot(x[0] - 0.5, x[1] - 0.75);
            if (rho >= 0.0625 && rho <= 0.125) return 1.0;
        }
        return 0.0;
    };
    p.exact_solution = p.initial;  // one full revolution
    p.final_time = 2.0 * std::acos(-1.0);
    p.transient = true;
    p.make_mesh = [](int level) { return build_hex_mesh(unit_cube(), level); };
    return p;
}

// ---- concentration of species ----------------------------------------------

ProblemSpec species_concentration() {
    ProblemSpec p;
    p.name = "species";
    p.epsilon = 1e-6;
    p.velocity = [](double, const Vec3&) {
        return Vec3{1.0, -0.25, -0.125};
    };
    const Vec3 g0 = {0.0, 11.0 / 16.0, 11.0 / 16.0};
    const Vec3 g1 = {1.0, 7.0 / 16.0, 9.0 / 16.0};
    p.reaction = [g0, g1](double, const Vec3& x) {
        return segment_distance(x, g0, g1) <= 0.1 ? 1.0 : 0.0;
    };
    // outlet {1} x (3/8,4/8) x (4/8,5/8) is the only Neumann part
    p.facet_kind = [](const Vec3& c, int) {
        const bool outlet = near(c[0], 1.0) && c[1] > 3.0 / 8.0 &&
                            c[1] < 4.0 / 8.0 && c[2] > 4.0 / 8.0 &&
                            c[2] < 5.0 / 8.0;
        return std::optional<BoundaryKind>(outlet ? BoundaryKind::Neumann
                                                  : BoundaryKind::Dirichlet);
    };
    p.dirichlet_value = [](double t, const Vec3& x) {
        const bool inlet = near(x[0], 0.0) &&
                           x[1] >= 5.0 / 8.0 - kGeomTol &&
                           x[1] <= 6.0 / 8.0 + kGeomTol &&
                           x[2] >= 5.0 / 8.0 - kGeomTol &&
                           x[2] <= 6.0 / 8.0 + kGeomTol;
        if (!inlet) return 0.0;
        const double pi = std::acos(-1.0);
        if (t <= 1.0) return std::sin(pi * t / 2.0);
        if (t <= 2.0) return 1.0;
        return std::sin(pi * (t - 1.0) / 2.0);
    };
    p.initial = [](const Vec3&) { return 0.0; };
    p.final_time = 3.0;
    p.clip_negative = true;
    p.transient = true;
    p.make_mesh = [](int level) { return build_hex_mesh(unit_cube(), level); };
    return p;
}

// ---- non-constant convection (channel with a block) -------------------------

ProblemSpec nonconstant_convection(const std::string& msh_path) {
    ProblemSpec p;
    p.name = "nonconstant-convection";
    p.epsilon = 1e-3;
    p.velocity = [](double, const Vec3& x) {
        const double l =
            (0.19 * x[0] * x[0] * x[0] - 1.42 * x[0] * x[0] - 2.38 * x[0]) / 4.0;
        return Vec3{1.0, l, l};
    };
    // tags written by the bundled mesh: 1 outer walls, 2 block walls, 3 outlet
    p.facet_kind = [](const Vec3&, int tag) -> std::optional<BoundaryKind> {
        switch (tag) {
            case 1:
            case 2:
                return BoundaryKind::Dirichlet;
            case 3:
                return BoundaryKind::Neumann;
            default:
                return std::nullopt;
        }
    };
    p.dirichlet_value = [](double, const Vec3& x) {
        const bool on_block =
            x[0] >= 0.5 - kGeomTol && x[0] <= 0.8 + kGeomTol &&
            x[1] >= 0.8 - kGeomTol && x[1] <= 1.2 + kGeomTol &&
            x[2] >= 0.8 - kGeomTol && x[2] <= 1.2 + kGeomTol;
        return on_block ? 0.0 : 1.0;
    };
    p.transient = false;
    const std::string path =
        msh_path.empty() ? default_data_dir() + "/nonconstant_convection.msh"
                         : msh_path;
    p.make_mesh = [path](int level) {
        Mesh m = load_msh(path);
        for (int l = 0; l < level; ++l) m = refine_uniform(m);
        m.level = level;
        return m;
    };
    return p;
}

// ---- circular convection -----------------------------------------------------

ProblemSpec circular_convection() {
    ProblemSpec p;
    p.name = "circular-convection";
    p.epsilon = 0.0;
    p.velocity = [](double, const Vec3& x) {
        return Vec3{x[1], -x[0], 0.0};
    };
    p.exact_solution = [](const Vec3& x) {
        const double r = std::hypot(x[0], x[1]);
        if (r >= 0.15 && r <= 0.45) return 1.0;
        if (r >= 0.55 && r <= 0.85) {
            const double pi = std::acos(-1.0);
            const double c = std::cos(10.0 * pi * (r - 0.7) / 3.0);
            return c * c;
        }
        return 0.0;
    };
    // Dirichlet on y=1, x=0, x=1
    p.facet_kind = [](const Vec3& c, int) {
        const bool dir = near(c[1], 1.0) || near(c[0], 0.0) || near(c[0], 1.0);
        return std::optional<BoundaryKind>(dir ? BoundaryKind::Dirichlet
                                               : BoundaryKind::Neumann);
    };
    p.dirichlet_value = [exact = p.exact_solution](double, const Vec3& x) {
        return exact(x);
    };
    p.transient = false;
    p.make_mesh = [](int level) { return build_tet_mesh(unit_cube(), level); };
    return p;
}

ProblemSpec problem_by_name(const std::string& name) {
    if (name == "rotating-shapes") return rotating_shapes();
    if (name == "species") return species_concentration();
    if (name == "nonconstant-convection") return nonconstant_convection();
    if (name == "circular-convection") return circular_convection();
    throw ConfigError("unknown problem: " + name);
}

std::vector<std::string> problem_names() {
    return {"rotating-shapes", "species", "nonconstant-convection",
            "circular-convection"};
}

// ---- boundary classification -------------------------------------------------

BoundaryClassification classify_boundary(const Mesh& mesh,
                                         const ProblemSpec& spec, double t) {
    BoundaryClassification bc;
    bc.kind.assign(mesh.n_nodes(), NodeKind::Interior);
    bc.value.assign(mesh.n_nodes(), 0.0);

    // Neumann first, then Dirichlet so that shared nodes end up Dirichlet.
    std::vector<const BoundaryFacet*> dirichlet_facets;
    for (const auto& f : mesh.boundary_facets) {
        Vec3 c = {0, 0, 0};
        for (int k = 0; k < f.nv; ++k) c = c + mesh.nodes[f.v[k]];
        c = (1.0 / f.nv) * c;
        const auto kind = spec.facet_kind(c, f.tag);
        if (!kind)
            throw ConfigError("boundary facet matches neither boundary part (tag " +
                              std::to_string(f.tag) + ")");
        if (*kind == BoundaryKind::Neumann) {
            for (int k = 0; k < f.nv; ++k) bc.kind[f.v[k]] = NodeKind::Neumann;
        } else {
            dirichlet_facets.push_back(&f);
        }
    }
    for (const auto* f : dirichlet_facets)
        for (int k = 0; k < f->nv; ++k) bc.kind[f->v[k]] = NodeKind::Dirichlet;

    refresh_dirichlet_values(bc, mesh, spec, t);
    return bc;
}

void refresh_dirichlet_values(BoundaryClassification& bc, const Mesh& mesh,
                              const ProblemSpec& spec, double t) {
    for (std::int64_t i = 0; i < mesh.n_nodes(); ++i)
        if (bc.kind[i] == NodeKind::Dirichlet)
            bc.value[i] = spec.dirichlet_value(t, mesh.nodes[i]);
}

}  // namespace afc
