/// @file moment_io.hpp
/// @brief Moment snapshots: a self-describing ASCII format.
///
///   ipmuq-moments 1
///   method <name>
///   p <stochastic dimension>
///   m <conserved variables>
///   cells <count>
///   mesh_hash <hex>
///   time <t>
///   orders
///   <order of each cell>
///   moments
///   <one line per cell: N x m values, moment-major>
#pragma once

#include <Eigen/Dense>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ipmuq/closure/dual_solver.hpp"
#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/random_space/basis.hpp"

namespace ipmuq {

struct Snapshot {
    std::string method;
    int p = 1;
    int m = 1;
    std::uint64_t mesh_hash = 0;
    double time = 0.0;
    std::vector<int> orders;
    std::vector<Eigen::MatrixXd> moments;  // N_j x m per cell
};

template <int M>
Snapshot make_snapshot(const std::string& method, int p, const FvMesh& mesh, double time, const std::vector<MomentMatrix<M>>& moments,
                       const std::vector<int>& orders) {
    Snapshot s{method, p, M, mesh_hash(mesh), time, orders, {}};
    for (const auto& u : moments) s.moments.emplace_back(u);
    return s;
}

inline void write_snapshot(std::ostream& out, const Snapshot& s) {
    char buf[64];
    out << "ipmuq-moments 1\n";
    out << "method " << s.method << "\n";
    out << "p " << s.p << "\n";
    out << "m " << s.m << "\n";
    out << "cells " << s.moments.size() << "\n";
    std::snprintf(buf, sizeof buf, "%016" PRIx64, s.mesh_hash);
    out << "mesh_hash " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", s.time);
    out << "time " << buf << "\n";
    out << "orders\n";
    for (std::size_t j = 0; j < s.orders.size(); ++j) out << (j ? " " : "") << s.orders[j];
    out << "\nmoments\n";
    for (const auto& u : s.moments) {
        bool first = true;
        for (Eigen::Index i = 0; i < u.rows(); ++i)
            for (Eigen::Index c = 0; c < u.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", u(i, c));
                out << (first ? "" : " ") << buf;
                first = false;
            }
        out << "\n";
    }
}

inline Snapshot read_snapshot(std::istream& in) {
    int line_no = 0;
    std::string line;
    auto next = [&]() -> std::istringstream {
        if (!std::getline(in, line)) throw ParseError("unexpected end of snapshot", line_no + 1);
        ++line_no;
        return std::istringstream(line);
    };
    auto keyed = [&](const std::string& key) {
        auto ls = next();
        std::string k;
        ls >> k;
        if (k != key) throw ParseError("expected '" + key + "'", line_no);
        return ls;
    };
    {
        auto ls = next();
        std::string magic;
        int version = 0;
        ls >> magic >> version;
        if (magic != "ipmuq-moments" || version != 1) throw ParseError("not an ipmuq moment snapshot", line_no);
    }
    Snapshot s;
    keyed("method") >> s.method;
    if (!(keyed("p") >> s.p) || s.p < 1) throw ParseError("bad stochastic dimension", line_no);
    if (!(keyed("m") >> s.m) || s.m < 1) throw ParseError("bad number of conserved variables", line_no);
    long cells = 0;
    if (!(keyed("cells") >> cells) || cells < 0) throw ParseError("bad cell count", line_no);
    std::string hash;
    keyed("mesh_hash") >> hash;
    try {
        s.mesh_hash = std::stoull(hash, nullptr, 16);
    } catch (const std::exception&) {
        throw ParseError("bad mesh hash", line_no);
    }
    if (!(keyed("time") >> s.time)) throw ParseError("bad time", line_no);
    keyed("orders");
    {
        auto ls = next();
        s.orders.resize(static_cast<std::size_t>(cells));
        for (auto& o : s.orders)
            if (!(ls >> o) || o < 0) throw ParseError("bad order list", line_no);
    }
    keyed("moments");
    for (long j = 0; j < cells; ++j) {
        auto ls = next();
        const auto n = static_cast<Eigen::Index>(basis_size(s.orders[static_cast<std::size_t>(j)], s.p));
        Eigen::MatrixXd u(n, s.m);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index c = 0; c < s.m; ++c)
                if (!(ls >> u(i, c))) throw ParseError("too few moment values for cell " + std::to_string(j), line_no);
        double extra;
        if (ls >> extra) throw ParseError("too many moment values for cell " + std::to_string(j), line_no);
        s.moments.push_back(std::move(u));
    }
    return s;
}

inline void save_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write snapshot '" + path + "'");
    write_snapshot(out, s);
}

inline Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read snapshot '" + path + "'");
    return read_snapshot(in);
}

/// Moments of a snapshot checked against the active mesh and basis. With
/// `orders` given, cells must match them exactly unless `truncate` is set,
/// in which case higher-order cells keep their leading moments.
template <int M>
std::vector<MomentMatrix<M>> snapshot_moments(const Snapshot& s, const FvMesh& mesh, int p, const std::vector<int>* orders = nullptr,
                                              bool truncate = false) {
    if (s.mesh_hash != mesh_hash(mesh) || static_cast<int>(s.moments.size()) != mesh.cells())
        throw IncompatibleSnapshot("snapshot was written for a different mesh");
    if (s.p != p) throw IncompatibleSnapshot("snapshot has stochastic dimension " + std::to_string(s.p) + ", expected " + std::to_string(p));
    if (s.m != M) throw IncompatibleSnapshot("snapshot has " + std::to_string(s.m) + " conserved variables, expected " + std::to_string(M));
    std::vector<MomentMatrix<M>> out;
    out.reserve(s.moments.size());
    for (std::size_t j = 0; j < s.moments.size(); ++j) {
        const int have = s.orders[j];
        if (!orders) {
            out.emplace_back(s.moments[j]);
            continue;
        }
        const int want = (*orders)[j];
        if (have == want) {
            out.emplace_back(s.moments[j]);
        } else if (truncate && have > want) {
            out.emplace_back(s.moments[j].topRows(static_cast<Eigen::Index>(basis_size(want, p))));
        } else {
            throw IncompatibleSnapshot("cell " + std::to_string(j) + " has order " + std::to_string(have) + ", expected " + std::to_string(want) +
                                       (have > want ? " (pass the truncation flag to keep the leading moments)" : ""));
        }
    }
    return out;
}

}  // namespace ipmuq
