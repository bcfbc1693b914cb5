#include "afc/msh_reader.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "afc/errors.hpp"

namespace afc {

namespace {

struct LineReader {
    std::ifstream in;
    long line_no = 0;
    std::string current;

    explicit LineReader(const std::string& path) : in(path) {
        if (!in) throw Error("cannot open mesh file: " + path);
    }

    bool try_next() {
        while (std::getline(in, current)) {
            ++line_no;
            if (!current.empty() && current.back() == '\r') current.pop_back();
            if (!current.empty()) return true;
        }
        return false;
    }

    std::string next() {
        if (!try_next()) throw ParseError("unexpected end of file", line_no);
        return current;
    }

    std::istringstream tokens() { return std::istringstream(next()); }

    template <class T>
    T one() {
        auto ts = tokens();
        T v{};
        if (!(ts >> v)) throw ParseError("malformed line", line_no);
        return v;
    }

    void skip_until(const std::string& marker) {
        while (next() != marker) {
        }
    }
};

template <class T>
T want(std::istringstream& ts, LineReader& r, const char* what) {
    T v{};
    if (!(ts >> v))
        throw ParseError(std::string("expected ") + what, r.line_no);
    return v;
}

struct RawMesh {
    std::vector<Vec3> xyz;
    std::unordered_map<long long, std::int32_t> id_map;
    std::vector<std::array<std::int32_t, 4>> tets;
    std::vector<std::array<std::int32_t, 3>> tris;
    std::vector<int> tri_tags;

    std::int32_t node(long long tag, LineReader& r) const {
        auto it = id_map.find(tag);
        if (it == id_map.end())
            throw ParseError("element references unknown node " +
                                 std::to_string(tag),
                             r.line_no);
        return it->second;
    }
};

void parse_nodes_v2(LineReader& r, RawMesh& m) {
    const long long count = r.one<long long>();
    m.xyz.reserve(count);
    for (long long i = 0; i < count; ++i) {
        auto ts = r.tokens();
        const auto tag = want<long long>(ts, r, "node id");
        Vec3 p;
        p[0] = want<double>(ts, r, "x");
        p[1] = want<double>(ts, r, "y");
        p[2] = want<double>(ts, r, "z");
        m.id_map[tag] = static_cast<std::int32_t>(m.xyz.size());
        m.xyz.push_back(p);
    }
    if (r.next() != "$EndNodes")
        throw ParseError("expected $EndNodes", r.line_no);
}

void parse_elements_v2(LineReader& r, RawMesh& m) {
    const long long count = r.one<long long>();
    for (long long i = 0; i < count; ++i) {
        auto ts = r.tokens();
        want<long long>(ts, r, "element id");
        const int type = want<int>(ts, r, "element type");
        const int ntags = want<int>(ts, r, "tag count");
        int phys = 0;
        for (int t = 0; t < ntags; ++t) {
            const int tag = want<int>(ts, r, "tag");
            if (t == 0) phys = tag;
        }
        switch (type) {
            case 2: {  // 3-node triangle
                std::array<std::int32_t, 3> tri;
                for (auto& v : tri)
                    v = m.node(want<long long>(ts, r, "node id"), r);
                m.tris.push_back(tri);
                m.tri_tags.push_back(phys);
                break;
            }
            case 4: {  // 4-node tetrahedron
                std::array<std::int32_t, 4> tet;
                for (auto& v : tet)
                    v = m.node(want<long long>(ts, r, "node id"), r);
                m.tets.push_back(tet);
                break;
            }
            case 5:
            case 6:
            case 7:
                throw UnsupportedError(
                    "only tetrahedral volume elements are supported "
                    "(line " +
                    std::to_string(r.line_no) + ")");
            default:
                break;  // points, lines, ... are ignored
        }
    }
    if (r.next() != "$EndElements")
        throw ParseError("expected $EndElements", r.line_no);
}

// $Entities maps entity (dim,tag) to its first physical tag.
void parse_entities_v4(LineReader& r, std::map<std::pair<int, int>, int>& phys) {
    auto header = r.tokens();
    long long np = want<long long>(header, r, "point count");
    long long nc = want<long long>(header, r, "curve count");
    long long ns = want<long long>(header, r, "surface count");
    long long nv = want<long long>(header, r, "volume count");
    for (long long i = 0; i < np; ++i) {
        auto ts = r.tokens();
        const int tag = want<int>(ts, r, "tag");
        for (int k = 0; k < 3; ++k) want<double>(ts, r, "coord");
        const long long n = want<long long>(ts, r, "phys count");
        int p = 0;
        for (long long k = 0; k < n; ++k) {
            int v = want<int>(ts, r, "phys tag");
            if (k == 0) p = v;
        }
        phys[{0, tag}] = p;
    }
    const int dims[3] = {1, 2, 3};
    const long long counts[3] = {nc, ns, nv};
    for (int d = 0; d < 3; ++d)
        for (long long i = 0; i < counts[d]; ++i) {
            auto ts = r.tokens();
            const int tag = want<int>(ts, r, "tag");
            for (int k = 0; k < 6; ++k) want<double>(ts, r, "bbox");
            const long long n = want<long long>(ts, r, "phys count");
            int p = 0;
            for (long long k = 0; k < n; ++k) {
                int v = want<int>(ts, r, "phys tag");
                if (k == 0) p = v;
            }
            phys[{dims[d], tag}] = p;
            // trailing bounding-entity list, same line
        }
    r.skip_until("$EndEntities");
}

void parse_nodes_v4(LineReader& r, RawMesh& m) {
    auto header = r.tokens();
    const long long nblocks = want<long long>(header, r, "block count");
    const long long total = want<long long>(header, r, "node count");
    m.xyz.reserve(total);
    for (long long b = 0; b < nblocks; ++b) {
        auto ts = r.tokens();
        want<int>(ts, r, "entity dim");
        want<int>(ts, r, "entity tag");
        const int parametric = want<int>(ts, r, "parametric flag");
        if (parametric)
            throw UnsupportedError("parametric nodes are not supported (line " +
                                   std::to_string(r.line_no) + ")");
        const long long n = want<long long>(ts, r, "node count");
        std::vector<long long> tags(n);
        for (auto& t : tags) t = r.one<long long>();
        for (long long i = 0; i < n; ++i) {
            auto cs = r.tokens();
            Vec3 p;
            p[0] = want<double>(cs, r, "x");
            p[1] = want<double>(cs, r, "y");
            p[2] = want<double>(cs, r, "z");
            m.id_map[tags[i]] = static_cast<std::int32_t>(m.xyz.size());
            m.xyz.push_back(p);
        }
    }
    if (r.next() != "$EndNodes")
        throw ParseError("expected $EndNodes", r.line_no);
}

void parse_elements_v4(LineReader& r, RawMesh& m,
                       const std::map<std::pair<int, int>, int>& phys) {
    auto header = r.tokens();
    const long long nblocks = want<long long>(header, r, "block count");
    want<long long>(header, r, "element count");
    for (long long b = 0; b < nblocks; ++b) {
        auto ts = r.tokens();
        const int dim = want<int>(ts, r, "entity dim");
        const int etag = want<int>(ts, r, "entity tag");
        const int type = want<int>(ts, r, "element type");
        const long long n = want<long long>(ts, r, "element count");
        int p = 0;
        if (auto it = phys.find({dim, etag}); it != phys.end()) p = it->second;
        for (long long i = 0; i < n; ++i) {
            auto es = r.tokens();
            want<long long>(es, r, "element tag");
            switch (type) {
                case 2: {
                    std::array<std::int32_t, 3> tri;
                    for (auto& v : tri)
                        v = m.node(want<long long>(es, r, "node id"), r);
                    m.tris.push_back(tri);
                    m.tri_tags.push_back(p);
                    break;
                }
                case 4: {
                    std::array<std::int32_t, 4> tet;
                    for (auto& v : tet)
                        v = m.node(want<long long>(es, r, "node id"), r);
                    m.tets.push_back(tet);
                    break;
                }
                case 5:
                case 6:
                case 7:
                    throw UnsupportedError(
                        "only tetrahedral volume elements are supported "
                        "(line " +
                        std::to_string(r.line_no) + ")");
                default:
                    break;
            }
        }
    }
    if (r.next() != "$EndElements")
        throw ParseError("expected $EndElements", r.line_no);
}

}  // namespace

Mesh load_msh(const std::string& path) {
    LineReader r(path);
    RawMesh raw;
    std::map<std::pair<int, int>, int> entity_phys;

    double version = 0.0;
    bool saw_elements = false;
    while (r.try_next()) {
        const std::string section = r.current;
        if (section == "$MeshFormat") {
            auto ts = r.tokens();
            version = want<double>(ts, r, "version");
            const int file_type = want<int>(ts, r, "file type");
            if (file_type != 0)
                throw UnsupportedError("binary MSH files are not supported");
            if (!(version >= 2.199 && version < 2.3) &&
                !(version >= 4.099 && version < 4.2))
                throw UnsupportedError("unsupported MSH version " +
                                       std::to_string(version));
            r.skip_until("$EndMeshFormat");
        } else if (section == "$Entities") {
            parse_entities_v4(r, entity_phys);
        } else if (section == "$Nodes") {
            if (version < 3.0)
                parse_nodes_v2(r, raw);
            else
                parse_nodes_v4(r, raw);
        } else if (section == "$Elements") {
            saw_elements = true;
            if (version < 3.0)
                parse_elements_v2(r, raw);
            else
                parse_elements_v4(r, raw, entity_phys);
        } else if (!section.empty() && section[0] == '$') {
            r.skip_until("$End" + section.substr(1));
        } else {
            throw ParseError("unexpected content outside a section", r.line_no);
        }
    }

    if (!saw_elements || raw.tets.empty())
        throw Error("mesh file contains no tetrahedra: " + path);

    Mesh mesh;
    mesh.cell_type = CellType::Tet;
    mesh.level = 0;
    mesh.nodes = std::move(raw.xyz);
    mesh.cells.reserve(raw.tets.size() * 4);
    for (auto t : raw.tets) {
        const Vec3 &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]],
                   &c = mesh.nodes[t[2]], &d = mesh.nodes[t[3]];
        if (dot(b - a, cross(c - a, d - a)) < 0.0) std::swap(t[2], t[3]);
        mesh.cells.insert(mesh.cells.end(), t.begin(), t.end());
    }
    mesh.boundary_facets.reserve(raw.tris.size());
    for (std::size_t i = 0; i < raw.tris.size(); ++i)
        mesh.boundary_facets.push_back(
            {{raw.tris[i][0], raw.tris[i][1], raw.tris[i][2], -1}, 3,
             raw.tri_tags[i]});
    return mesh;
}

}  // namespace afc
