#include "taylorgrid/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "taylorgrid/errors.hpp"

namespace tg {

void TriMesh::bounds(Vec3& lo, Vec3& hi) const {
    lo = {1e300, 1e300, 1e300};
    hi = {-1e300, -1e300, -1e300};
    for (const auto& v : vertices) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], v[a]);
            hi[a] = std::max(hi[a], v[a]);
        }
    }
}

Vec3 TriMesh::triangle_normal(int t) const {
    const auto& tri = triangles[t];
    return cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double TriMesh::triangle_area(int t) const { return 0.5 * norm(triangle_normal(t)); }

double TriMesh::surface_area() const {
    double a = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) a += triangle_area(t);
    return a;
}

bool is_watertight(const TriMesh& mesh) {
    if (mesh.empty()) return false;
    // edge-manifold closed: every undirected edge borders exactly two faces
    std::map<std::pair<int, int>, int> edges;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e];
            const int b = tri[(e + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}] += 1;
        }
    }
    for (const auto& [edge, count] : edges) {
        if (count != 2) return false;
    }
    return true;
}

int drop_degenerate_triangles(TriMesh& mesh) {
    const std::size_t before = mesh.triangles.size();
    std::erase_if(mesh.triangles, [&](const std::array<int, 3>& tri) {
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) return true;
        const Vec3 n = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                             mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
        return norm2(n) == 0.0;
    });
    return static_cast<int>(before - mesh.triangles.size());
}

void normalize_to_box(TriMesh& mesh, double half_extent) {
    if (mesh.vertices.empty()) return;
    Vec3 lo, hi;
    mesh.bounds(lo, hi);
    const Vec3 center = 0.5 * (lo + hi);
    double longest = 0.0;
    for (int a = 0; a < 3; ++a) longest = std::max(longest, hi[a] - lo[a]);
    const double scale = longest > 0.0 ? 2.0 * half_extent / longest : 1.0;
    for (auto& v : mesh.vertices) v = scale * (v - center);
}

namespace {

TriMesh load_obj(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("obj: cannot open: " + path.string());
    TriMesh mesh;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw IngestError("obj: " + what + " at " + path.string() + ":" + std::to_string(line_no));
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (line.size() >= 2 && line[0] == 'v' && (line[1] == ' ' || line[1] == '\t')) {
            std::istringstream ls(line.substr(2));
            Vec3 v{0, 0, 0};
            if (!(ls >> v[0] >> v[1] >> v[2])) fail("malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (line.size() >= 2 && line[0] == 'f' && (line[1] == ' ' || line[1] == '\t')) {
            std::istringstream ls(line.substr(2));
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // "v", "v/t", "v//n", "v/t/n"; negative indices are relative
                const std::size_t slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                int v = 0;
                try {
                    v = std::stoi(head);
                } catch (...) {
                    fail("malformed face index '" + tok + "'");
                }
                if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
                if (v < 1 || v > static_cast<int>(mesh.vertices.size())) {
                    fail("face index out of range");
                }
                idx.push_back(v - 1);
            }
            if (idx.size() < 3) fail("face with fewer than 3 vertices");
            for (std::size_t i = 2; i < idx.size(); ++i) {
                mesh.triangles.push_back({idx[0], idx[static_cast<int>(i) - 1], idx[i]});
            }
        }
    }
    return mesh;
}

TriMesh load_stl(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("stl: cannot open: " + path.string());
    char header[80] = {};
    is.read(header, 80);
    std::uint32_t count = 0;
    is.read(reinterpret_cast<char*>(&count), 4);
    const auto file_size = std::filesystem::file_size(path);

    TriMesh mesh;
    const bool looks_binary = is && file_size == 84ull + 50ull * count;
    if (looks_binary) {
        mesh.triangles.reserve(count);
        for (std::uint32_t t = 0; t < count; ++t) {
            float rec[12];
            if (!is.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
                throw IngestError("stl: truncated triangle records in " + path.string());
            }
            char attr[2];
            is.read(attr, 2);
            const int base = static_cast<int>(mesh.vertices.size());
            for (int v = 0; v < 3; ++v) {
                mesh.vertices.push_back(
                    {rec[3 + 3 * v + 0], rec[3 + 3 * v + 1], rec[3 + 3 * v + 2]});
            }
            mesh.triangles.push_back({base, base + 1, base + 2});
        }
    } else {
        // ascii fallback: "vertex x y z" records grouped in threes
        std::ifstream as(path);
        std::string tok;
        std::vector<Vec3> verts;
        while (as >> tok) {
            if (tok == "vertex") {
                Vec3 v{0, 0, 0};
                if (!(as >> v[0] >> v[1] >> v[2])) {
                    throw IngestError("stl: malformed ascii vertex in " + path.string());
                }
                verts.push_back(v);
            }
        }
        if (verts.empty() || verts.size() % 3 != 0) {
            throw IngestError("stl: not a valid binary or ascii STL: " + path.string());
        }
        for (std::size_t i = 0; i < verts.size(); i += 3) {
            const int base = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(verts[i]);
            mesh.vertices.push_back(verts[i + 1]);
            mesh.vertices.push_back(verts[i + 2]);
            mesh.triangles.push_back({base, base + 1, base + 2});
        }
    }
    // STL repeats vertices per facet; weld exact duplicates so manifold checks
    // and the sign test see shared edges.
    std::map<std::array<double, 3>, int> dedup;
    std::vector<int> remap(mesh.vertices.size());
    std::vector<Vec3> welded;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto key = mesh.vertices[i];
        auto [it, inserted] = dedup.try_emplace(key, static_cast<int>(welded.size()));
        if (inserted) welded.push_back(mesh.vertices[i]);
        remap[i] = it->second;
    }
    for (auto& tri : mesh.triangles) {
        for (int& v : tri) v = remap[v];
    }
    mesh.vertices = std::move(welded);
    return mesh;
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path, MeshIngestInfo* info) {
    if (!std::filesystem::exists(path)) {
        throw IngestError("mesh: file not found: " + path.string());
    }
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    TriMesh mesh;
    if (ext == ".obj") {
        mesh = load_obj(path);
    } else if (ext == ".stl") {
        mesh = load_stl(path);
    } else {
        throw IngestError("mesh: unsupported format '" + ext + "' for " + path.string());
    }
    if (mesh.vertices.empty() || mesh.triangles.empty()) {
        throw IngestError("mesh: no usable geometry in " + path.string());
    }
    const int dropped = drop_degenerate_triangles(mesh);
    if (mesh.triangles.empty()) {
        throw IngestError("mesh: only degenerate faces in " + path.string());
    }
    normalize_to_box(mesh);
    if (info) {
        info->dropped_degenerate = dropped;
        info->watertight = is_watertight(mesh);
    }
    return mesh;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("obj: cannot open for writing: " + path.string());
    os.precision(17);
    for (const auto& v : mesh.vertices) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles) {
        os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!os) throw IngestError("obj: write failed: " + path.string());
}

TriMesh make_icosphere(int subdivisions, double radius) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh mesh;
    mesh.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                     {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                     {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : mesh.vertices) v = radius * normalized(v);

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(radius * normalized(mesh.vertices[a] + mesh.vertices[b]));
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const auto& t : mesh.triangles) {
            const int ab = mid(t[0], t[1]);
            const int bc = mid(t[1], t[2]);
            const int ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(next);
    }
    return mesh;
}

TriMesh make_box(const Vec3& center, const Vec3& half_size) {
    TriMesh mesh;
    for (int c = 0; c < 8; ++c) {
        Vec3 v = center;
        for (int a = 0; a < 3; ++a) v[a] += ((c >> a) & 1) ? half_size[a] : -half_size[a];
        mesh.vertices.push_back(v);
    }
    // two triangles per face, outward winding
    const int faces[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                             {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
    for (const auto& f : faces) {
        mesh.triangles.push_back({f[0], f[1], f[2]});
        mesh.triangles.push_back({f[0], f[2], f[3]});
    }
    return mesh;
}

}  // namespace tg
