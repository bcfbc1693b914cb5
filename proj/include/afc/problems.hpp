#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "afc/mesh.hpp"

namespace afc {

enum class BoundaryKind { Dirichlet, Neumann };
enum class NodeKind : unsigned char { Interior, Dirichlet, Neumann };

struct BoundaryClassification {
    std::vector<NodeKind> kind;
    std::vector<double> value;  // u_D at classification time, 0 elsewhere

    bool is_dirichlet(std::int64_t i) const {
        return kind[i] == NodeKind::Dirichlet;
    }
    std::int64_t count_dirichlet() const;
    std::int64_t count_free() const {
        return static_cast<std::int64_t>(kind.size()) - count_dirichlet();
    }
};

// Coefficients, geometry, boundary partition and data of one benchmark.
// All fields are plain callables so tests can construct ad-hoc problems.
struct ProblemSpec {
    std::string name;
    double epsilon = 0.0;
    std::function<Vec3(double, const Vec3&)> velocity;
    std::function<double(double, const Vec3&)> reaction;  // empty means 0
    std::function<double(double, const Vec3&)> source;    // empty means 0
    bool nonzero_neumann = false;

    // Facet classification by centroid and mesh tag; nullopt makes
    // classify_boundary fail with a ConfigError.
    std::function<std::optional<BoundaryKind>(const Vec3&, int)> facet_kind;
    std::function<double(double, const Vec3&)> dirichlet_value;

    std::function<double(const Vec3&)> initial;        // transient problems
    std::function<double(const Vec3&)> exact_solution; // empty if unknown
    double final_time = 0.0;
    bool clip_negative = false;
    bool transient = true;

    std::function<Mesh(int level)> make_mesh;
};

// Benchmark problems.
ProblemSpec rotating_shapes();
ProblemSpec species_concentration();
// msh_path empty: use the bundled channel-with-block mesh.
ProblemSpec nonconstant_convection(const std::string& msh_path = "");
ProblemSpec circular_convection();

ProblemSpec problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

// Classifies every boundary node; a node on both a Dirichlet and a Neumann
// facet is Dirichlet. Dirichlet values are evaluated at time t.
BoundaryClassification classify_boundary(const Mesh& mesh,
                                         const ProblemSpec& spec, double t);

// Re-evaluates Dirichlet values at a new time, keeping the node kinds.
void refresh_dirichlet_values(BoundaryClassification& bc, const Mesh& mesh,
                              const ProblemSpec& spec, double t);

}  // namespace afc
