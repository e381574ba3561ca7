/// @file mesh.hpp
/// @brief Face-based finite-volume meshes: uniform 1D grids and 2D triangulations.
///
/// Both kinds share one representation. A face stores the cell on each side;
/// boundary faces have right == -1, carry a tag index and an outward normal.
/// Interior face normals point from `left` to `right`.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ipmuq/errors.hpp"

namespace ipmuq {

using Point2 = Eigen::Vector2d;

struct Face {
    int left = -1;
    int right = -1;  // -1 on the boundary
    Point2 normal = Point2::Zero();
    double length = 1.0;
    Point2 midpoint = Point2::Zero();
    int tag = -1;  // boundary tag index, -1 for interior faces
    std::array<int, 2> vertices{-1, -1};

    bool boundary() const { return right < 0; }
};

struct FvMesh {
    int dim = 1;
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;  // empty in 1D
    std::vector<double> volume;
    std::vector<Point2> centroid;
    std::vector<double> h;  // dx in 1D, area / perimeter in 2D
    std::vector<Face> faces;
    std::vector<std::vector<int>> cell_faces;
    std::vector<std::string> tags;

    int cells() const { return static_cast<int>(volume.size()); }
    int tag_index(const std::string& name) const {
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i] == name) return static_cast<int>(i);
        return -1;
    }
    double total_volume() const {
        double sum = 0.0;
        for (double v : volume) sum += v;
        return sum;
    }
};

/// Uniform grid of nx cells on [x_min, x_max]. Cell j (0-based) has center
/// x_min + (j + 1/2) dx. Boundary tags are "left" and "right" unless periodic.
inline FvMesh make_mesh_1d(double x_min, double x_max, int nx, bool periodic = false) {
    if (!(x_max > x_min) || nx < 1) throw DomainError("1D mesh requires x_max > x_min and nx >= 1");
    FvMesh mesh;
    mesh.dim = 1;
    const double dx = (x_max - x_min) / nx;
    mesh.volume.assign(static_cast<std::size_t>(nx), dx);
    mesh.h.assign(static_cast<std::size_t>(nx), dx);
    mesh.cell_faces.resize(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) mesh.centroid.emplace_back(x_min + (j + 0.5) * dx, 0.0);
    if (!periodic) mesh.tags = {"left", "right"};

    auto add_face = [&](int left, int right, double x, double nx_dir, int tag) {
        Face f;
        f.left = left;
        f.right = right;
        f.normal = Point2(nx_dir, 0.0);
        f.midpoint = Point2(x, 0.0);
        f.tag = tag;
        mesh.faces.push_back(f);
        const int id = static_cast<int>(mesh.faces.size()) - 1;
        mesh.cell_faces[static_cast<std::size_t>(left)].push_back(id);
        if (right >= 0) mesh.cell_faces[static_cast<std::size_t>(right)].push_back(id);
    };
    if (periodic) {
        add_face(nx - 1, 0, x_min, 1.0, -1);
    } else {
        add_face(0, -1, x_min, -1.0, 0);
    }
    for (int j = 0; j + 1 < nx; ++j) add_face(j, j + 1, x_min + (j + 1) * dx, 1.0, -1);
    if (!periodic) add_face(nx - 1, -1, x_max, 1.0, 1);
    return mesh;
}

/// Boundary segments of one tag, as vertex pairs.
struct BoundaryMarker {
    std::string tag;
    std::vector<std::array<int, 2>> segments;
};

/// Build a triangle mesh. Clockwise triangles are reoriented. `element_lines`
/// (optional) gives source line numbers used in validation errors.
inline FvMesh build_triangle_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles, const std::vector<BoundaryMarker>& markers,
                                  const std::vector<int>& element_lines = {}) {
    auto fail = [&](const std::string& what, std::size_t element) -> void {
        if (element < element_lines.size()) throw ParseError(what, element_lines[element]);
        throw ParseError(what + " (element " + std::to_string(element) + ")", 0);
    };
    FvMesh mesh;
    mesh.dim = 2;
    const int nv = static_cast<int>(vertices.size());
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_cells;  // sorted pair -> (cell, local edge)
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        auto& tri = triangles[t];
        for (int v : tri)
            if (v < 0 || v >= nv) fail("triangle references vertex " + std::to_string(v) + " out of range", t);
        const Point2 a = vertices[static_cast<std::size_t>(tri[0])], b = vertices[static_cast<std::size_t>(tri[1])],
                     c = vertices[static_cast<std::size_t>(tri[2])];
        double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), (c - b).squaredNorm()});
        if (!(std::abs(area2) > 1e-14 * scale)) fail("triangle has zero area", t);
        if (area2 < 0.0) {
            std::swap(tri[1], tri[2]);
            area2 = -area2;
        }
        mesh.volume.push_back(0.5 * area2);
        mesh.centroid.push_back((a + b + c) / 3.0);
        for (int e = 0; e < 3; ++e) {
            const int p = tri[static_cast<std::size_t>(e)], q = tri[static_cast<std::size_t>((e + 1) % 3)];
            auto& owners = edge_cells[{std::min(p, q), std::max(p, q)}];
            owners.emplace_back(static_cast<int>(t), e);
            if (owners.size() > 2) fail("edge shared by more than two triangles", t);
        }
    }

    std::map<std::pair<int, int>, int> segment_tag;
    for (const auto& marker : markers) {
        mesh.tags.push_back(marker.tag);
        for (const auto& s : marker.segments) segment_tag[{std::min(s[0], s[1]), std::max(s[0], s[1])}] = static_cast<int>(mesh.tags.size()) - 1;
    }

    mesh.cell_faces.resize(triangles.size());
    std::vector<double> perimeter(triangles.size(), 0.0);
    for (const auto& [key, owners] : edge_cells) {
        const auto [cell, local] = owners.front();
        const auto& tri = triangles[static_cast<std::size_t>(cell)];
        const int p = tri[static_cast<std::size_t>(local)], q = tri[static_cast<std::size_t>((local + 1) % 3)];
        const Point2 a = vertices[static_cast<std::size_t>(p)], b = vertices[static_cast<std::size_t>(q)];
        Face f;
        f.left = cell;
        f.vertices = {p, q};
        f.length = (b - a).norm();
        f.normal = Point2((b - a).y(), -(b - a).x()) / f.length;  // outward for a counter-clockwise triangle
        f.midpoint = 0.5 * (a + b);
        if (owners.size() == 2) {
            f.right = owners.back().first;
        } else {
            const auto it = segment_tag.find(key);
            if (it == segment_tag.end())
                throw ParseError("boundary edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ") has no marker", 0);
            f.tag = it->second;
        }
        mesh.faces.push_back(f);
        const int id = static_cast<int>(mesh.faces.size()) - 1;
        mesh.cell_faces[static_cast<std::size_t>(f.left)].push_back(id);
        perimeter[static_cast<std::size_t>(f.left)] += f.length;
        if (f.right >= 0) {
            mesh.cell_faces[static_cast<std::size_t>(f.right)].push_back(id);
            perimeter[static_cast<std::size_t>(f.right)] += f.length;
        }
    }
    for (const auto& [key, tag] : segment_tag)
        if (edge_cells.find(key) == edge_cells.end() || edge_cells.at(key).size() != 1)
            throw ParseError("marker segment (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ") is not a boundary edge", 0);
    for (std::size_t c = 0; c < triangles.size(); ++c) mesh.h.push_back(mesh.volume[c] / perimeter[c]);
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    return mesh;
}

/// Markers of a 2D mesh, reconstructed from its boundary faces.
inline std::vector<BoundaryMarker> boundary_markers(const FvMesh& mesh) {
    std::vector<BoundaryMarker> markers;
    for (const auto& tag : mesh.tags) markers.push_back({tag, {}});
    for (const auto& f : mesh.faces)
        if (f.boundary() && f.tag >= 0) markers[static_cast<std::size_t>(f.tag)].segments.push_back(f.vertices);
    return markers;
}

/// Maximum over cells of |sum_e length_e n_e| relative to the cell perimeter.
inline double closure_defect(const FvMesh& mesh) {
    std::vector<Point2> sum(static_cast<std::size_t>(mesh.cells()), Point2::Zero());
    std::vector<double> perimeter(static_cast<std::size_t>(mesh.cells()), 0.0);
    for (const auto& f : mesh.faces) {
        sum[static_cast<std::size_t>(f.left)] += f.length * f.normal;
        perimeter[static_cast<std::size_t>(f.left)] += f.length;
        if (f.right >= 0) {
            sum[static_cast<std::size_t>(f.right)] -= f.length * f.normal;
            perimeter[static_cast<std::size_t>(f.right)] += f.length;
        }
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < sum.size(); ++c) worst = std::max(worst, sum[c].norm() / perimeter[c]);
    return worst;
}

// ---------------------------------------------------------------------------
// ASCII mesh format:
//   NDIME= 2
//   NPOIN= <n>        followed by n lines "x y"
//   NELEM= <n>        followed by n lines "a b c" (0-based vertex indices)
//   NMARK= <k>        followed by k blocks:
//     MARKER_TAG= <name>
//     MARKER_ELEMS= <e>  followed by e lines "a b"
// Lines starting with '%' and blank lines are ignored.

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-blank, non-comment line; false at end of input.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }
    std::string require(const std::string& what) {
        std::string line;
        if (!next(line)) throw ParseError("unexpected end of file, expected " + what, number_ + 1);
        return line;
    }
    /// Parse "KEY= value".
    std::string keyword(const std::string& key) {
        const std::string line = require(key);
        const auto pos = line.find('=');
        std::string name = line.substr(0, pos);
        name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
        if (pos == std::string::npos || name != key) throw ParseError("expected " + key + "=", number_);
        std::string value = line.substr(pos + 1);
        const auto b = value.find_first_not_of(" \t");
        const auto e = value.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : value.substr(b, e - b + 1);
    }
    int count(const std::string& key) {
        const std::string value = keyword(key);
        std::istringstream ss(value);
        long n = -1;
        if (!(ss >> n) || n < 0) throw ParseError(key + " needs a non-negative count", number_);
        return static_cast<int>(n);
    }
    int line_number() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

template <std::size_t K, class T>
std::array<T, K> parse_fields(const std::string& line, int number, const char* what) {
    std::istringstream ss(line);
    std::array<T, K> out{};
    for (auto& v : out)
        if (!(ss >> v)) throw ParseError(std::string("malformed ") + what + " line", number);
    std::string extra;
    if (ss >> extra) throw ParseError(std::string("trailing data on ") + what + " line", number);
    return out;
}

}  // namespace detail

inline FvMesh read_mesh(std::istream& in) {
    detail::LineReader reader(in);
    if (reader.count("NDIME") != 2) throw ParseError("only NDIME= 2 is supported", reader.line_number());
    const int np = reader.count("NPOIN");
    std::vector<Point2> vertices;
    vertices.reserve(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i) {
        const std::string line = reader.require("vertex");
        const auto xy = detail::parse_fields<2, double>(line, reader.line_number(), "vertex");
        vertices.emplace_back(xy[0], xy[1]);
    }
    const int ne = reader.count("NELEM");
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> lines;
    for (int i = 0; i < ne; ++i) {
        const std::string line = reader.require("triangle");
        triangles.push_back(detail::parse_fields<3, int>(line, reader.line_number(), "triangle"));
        lines.push_back(reader.line_number());
    }
    const int nm = reader.count("NMARK");
    std::vector<BoundaryMarker> markers;
    for (int i = 0; i < nm; ++i) {
        BoundaryMarker marker;
        marker.tag = reader.keyword("MARKER_TAG");
        if (marker.tag.empty()) throw ParseError("empty marker tag", reader.line_number());
        const int count = reader.count("MARKER_ELEMS");
        for (int s = 0; s < count; ++s) {
            const std::string line = reader.require("segment");
            const auto seg = detail::parse_fields<2, int>(line, reader.line_number(), "segment");
            if (seg[0] < 0 || seg[0] >= np || seg[1] < 0 || seg[1] >= np) throw ParseError("segment vertex out of range", reader.line_number());
            marker.segments.push_back(seg);
        }
        markers.push_back(std::move(marker));
    }
    std::string extra;
    if (reader.next(extra)) throw ParseError("unexpected content after markers", reader.line_number());
    return build_triangle_mesh(std::move(vertices), std::move(triangles), markers, lines);
}

inline FvMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file " + path);
    return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const FvMesh& mesh) {
    if (mesh.dim != 2) throw DomainError("only triangle meshes can be written");
    out << "NDIME= 2\nNPOIN= " << mesh.vertices.size() << '\n' << std::setprecision(17);
    for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << '\n';
    out << "NELEM= " << mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    const auto markers = boundary_markers(mesh);
    out << "NMARK= " << markers.size() << '\n';
    for (const auto& m : markers) {
        out << "MARKER_TAG= " << m.tag << "\nMARKER_ELEMS= " << m.segments.size() << '\n';
        for (const auto& s : m.segments) out << s[0] << ' ' << s[1] << '\n';
    }
}

inline void save_mesh(const std::string& path, const FvMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write mesh file " + path);
    write_mesh(out, mesh);
}

/// Structured rectangle split into 2 nx ny triangles. An optional bump
/// h sin^2(pi (x - a) / (b - a)) on [a, b] lifts the bottom side; interior
/// vertices are shifted proportionally.
struct RectangleSpec {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 1, ny = 1;
    double bump_height = 0.0, bump_start = 0.0, bump_end = 0.0;
    std::array<std::string, 4> tags{"bottom", "right", "top", "left"};
};

inline FvMesh generate_rectangle(const RectangleSpec& spec) {
    if (spec.nx < 1 || spec.ny < 1 || !(spec.x1 > spec.x0) || !(spec.y1 > spec.y0)) throw DomainError("invalid rectangle specification");
    constexpr double pi = 3.14159265358979323846;
    auto bottom = [&](double x) {
        if (spec.bump_height == 0.0 || x <= spec.bump_start || x >= spec.bump_end) return spec.y0;
        const double s = std::sin(pi * (x - spec.bump_start) / (spec.bump_end - spec.bump_start));
        return spec.y0 + spec.bump_height * s * s;
    };
    std::vector<Point2> vertices;
    auto id = [&](int i, int j) { return j * (spec.nx + 1) + i; };
    for (int j = 0; j <= spec.ny; ++j)
        for (int i = 0; i <= spec.nx; ++i) {
            const double x = spec.x0 + (spec.x1 - spec.x0) * i / spec.nx;
            const double yb = bottom(x);
            vertices.emplace_back(x, yb + (spec.y1 - yb) * j / spec.ny);
        }
    std::vector<std::array<int, 3>> triangles;
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    std::vector<BoundaryMarker> markers;
    auto marker_for = [&](const std::string& tag) -> BoundaryMarker& {
        for (auto& m : markers)
            if (m.tag == tag) return m;
        markers.push_back({tag, {}});
        return markers.back();
    };
    for (int i = 0; i < spec.nx; ++i) marker_for(spec.tags[0]).segments.push_back({id(i, 0), id(i + 1, 0)});
    for (int j = 0; j < spec.ny; ++j) marker_for(spec.tags[1]).segments.push_back({id(spec.nx, j), id(spec.nx, j + 1)});
    for (int i = 0; i < spec.nx; ++i) marker_for(spec.tags[2]).segments.push_back({id(i + 1, spec.ny), id(i, spec.ny)});
    for (int j = 0; j < spec.ny; ++j) marker_for(spec.tags[3]).segments.push_back({id(0, j + 1), id(0, j)});
    return build_triangle_mesh(std::move(vertices), std::move(triangles), markers);
}

/// FNV-1a over the mesh geometry and connectivity.
inline std::uint64_t mesh_hash(const FvMesh& mesh) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    mix(&mesh.dim, sizeof(mesh.dim));
    for (const auto& c : mesh.centroid) mix(c.data(), 2 * sizeof(double));
    for (double v : mesh.volume) mix(&v, sizeof(double));
    for (const auto& f : mesh.faces) {
        mix(&f.left, sizeof(int));
        mix(&f.right, sizeof(int));
    }
    return h;
}

/// Axis-aligned region selecting cells by centroid.
struct MaskBox {
    double x0, x1, y0, y1;
    bool contains(const Point2& p) const { return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1; }
};

/// sqrt(sum_j |K_j| e_j^2) over cells whose centroid lies in the mask.
inline double discrete_l2(const Eigen::VectorXd& field, const FvMesh& mesh, const std::optional<MaskBox>& mask = std::nullopt) {
    if (field.size() != mesh.cells()) throw DomainError("field size does not match the mesh");
    double sum = 0.0;
    int used = 0;
    for (int j = 0; j < mesh.cells(); ++j) {
        if (mask && !mask->contains(mesh.centroid[static_cast<std::size_t>(j)])) continue;
        sum += mesh.volume[static_cast<std::size_t>(j)] * field(j) * field(j);
        ++used;
    }
    if (used == 0) throw DomainError("mask selects no cells");
    return std::sqrt(sum);
}

/// ||field - reference|| / ||reference|| in the discrete L2 norm.
inline double relative_l2_error(const Eigen::VectorXd& field, const Eigen::VectorXd& reference, const FvMesh& mesh,
                                const std::optional<MaskBox>& mask = std::nullopt) {
    const double denom = discrete_l2(reference, mesh, mask);
    if (denom == 0.0) throw DomainError("relative error against a zero reference");
    return discrete_l2(field - reference, mesh, mask) / denom;
}

}  // namespace ipmuq
