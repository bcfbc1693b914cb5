#pragma once

#include <string>

#include "afc/mesh.hpp"

namespace afc {

// Reads an ASCII Gmsh MSH file (format 2.2 or 4.1) containing 4-node
// tetrahedra and 3-node boundary triangles. Triangle physical tags become
// boundary facet tags. Throws afc::ParseError with the offending line number
// on malformed input and afc::UnsupportedError for non-tetrahedral volume
// elements.
Mesh load_msh(const std::string& path);

}  // namespace afc
