#ifndef HERMWAVE_IO_HPP
#define HERMWAVE_IO_HPP

// Plain-text output formats. Every writer has a matching reader; numbers are
// written with 17 significant digits so a write/read cycle is lossless.
//
//   errors.csv    N,L2,L2_rate,Linf,Linf_rate[,H1,H1_rate]   (first-row rates empty)
//   energy.csv    t,energy
//   snap_t<T>.txt # nx <nx> / # ny <ny> / # window xmin xmax ymin ymax / # time <t>,
//                 then ny rows of nx values (row j is y_j, x increasing)
//   xsec_*.csv    s,x,y,u  with a leading "# section <name> time <t>" line
//   manifest.txt  key = value lines
//   coefficients  # dims d / # basis N center scale (per dim) / rows of values

#include "hermwave/diagnostics.hpp"
#include "hermwave/error.hpp"
#include "hermwave/field.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hermwave::io {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Compact time label for file names: 0.005 -> "0.005".
inline std::string time_label(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", t);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path.string() + "' for reading");
    return in;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

// strtod rather than stod: tiny subnormal values must parse, not throw.
inline double to_double(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw Error("malformed number '" + s + "' in '" + path.string() + "'");
    return v;
}

inline std::optional<double> opt_double(const std::string& s, const std::filesystem::path& path) {
    if (s.empty())
        return std::nullopt;
    return to_double(s, path);
}

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

} // namespace detail

inline void write_errors_csv(const std::filesystem::path& path, const std::vector<ErrorReport>& rows) {
    bool with_h1 = false;
    for (const auto& r : rows)
        with_h1 = with_h1 || r.h1_error.has_value();
    auto out = detail::open_out(path);
    out << "N,L2,L2_rate,Linf,Linf_rate" << (with_h1 ? ",H1,H1_rate" : "") << '\n';
    for (const auto& r : rows) {
        out << r.N << ',' << num(r.l2_error) << ',' << detail::opt_num(r.rate_l2) << ',' << num(r.linf_error) << ','
            << detail::opt_num(r.rate_linf);
        if (with_h1)
            out << ',' << detail::opt_num(r.h1_error) << ',' << detail::opt_num(r.rate_h1);
        out << '\n';
    }
}

inline std::vector<ErrorReport> read_errors_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw Error("empty errors file '" + path.string() + "'");
    const bool with_h1 = detail::split_csv(line).size() == 7;
    std::vector<ErrorReport> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != (with_h1 ? 7u : 5u))
            throw Error("malformed row in '" + path.string() + "': " + line);
        ErrorReport r;
        r.N = static_cast<int>(detail::to_double(cells[0], path));
        r.l2_error = detail::to_double(cells[1], path);
        r.rate_l2 = detail::opt_double(cells[2], path);
        r.linf_error = detail::to_double(cells[3], path);
        r.rate_linf = detail::opt_double(cells[4], path);
        if (with_h1) {
            r.h1_error = detail::opt_double(cells[5], path);
            r.rate_h1 = detail::opt_double(cells[6], path);
        }
        rows.push_back(r);
    }
    return rows;
}

inline void write_energy_csv(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& samples) {
    auto out = detail::open_out(path);
    out << "t,energy\n";
    for (const auto& [t, e] : samples)
        out << num(t) << ',' << num(e) << '\n';
}

inline std::vector<std::pair<double, double>> read_energy_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != 2)
            throw Error("malformed row in '" + path.string() + "': " + line);
        out.emplace_back(detail::to_double(cells[0], path), detail::to_double(cells[1], path));
    }
    return out;
}

/// Field values on a uniform nx x ny grid over `window`.
struct Snapshot {
    std::array<double, 4> window{}; // xmin xmax ymin ymax
    double time = 0.0;
    Eigen::MatrixXd values; // ny x nx, values(j, i) = u(x_i, y_j)

    int nx() const { return static_cast<int>(values.cols()); }
    int ny() const { return static_cast<int>(values.rows()); }
};

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    auto out = detail::open_out(path);
    out << "# nx " << s.nx() << '\n'
        << "# ny " << s.ny() << '\n'
        << "# window " << num(s.window[0]) << ' ' << num(s.window[1]) << ' ' << num(s.window[2]) << ' '
        << num(s.window[3]) << '\n'
        << "# time " << num(s.time) << '\n';
    for (int j = 0; j < s.ny(); ++j) {
        for (int i = 0; i < s.nx(); ++i)
            out << (i ? " " : "") << num(s.values(j, i));
        out << '\n';
    }
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    auto header = [&](const std::string& key) {
        std::string line, hash, k;
        if (!std::getline(in, line))
            throw Error("truncated snapshot header in '" + path.string() + "'");
        std::istringstream s(line);
        s >> hash >> k;
        if (hash != "#" || k != key)
            throw Error("expected '# " + key + "' in '" + path.string() + "'");
        std::string rest;
        std::getline(s, rest);
        return rest;
    };
    Snapshot snap;
    const int nx = std::stoi(header("nx"));
    const int ny = std::stoi(header("ny"));
    std::istringstream w(header("window"));
    std::string tok;
    for (auto& v : snap.window) {
        w >> tok;
        v = detail::to_double(tok, path);
    }
    std::string t = header("time");
    t.erase(0, t.find_first_not_of(' '));
    snap.time = detail::to_double(t, path);
    snap.values.resize(ny, nx);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!(in >> tok))
                throw Error("truncated snapshot data in '" + path.string() + "'");
            snap.values(j, i) = detail::to_double(tok, path);
        }
    return snap;
}

/// Field values along a line through the display window.
struct CrossSection {
    std::string name; // "diag", "x=17", "y=5"
    double time = 0.0;
    std::vector<double> s, x, y, u;
};

inline void write_cross_section(const std::filesystem::path& path, const CrossSection& c) {
    auto out = detail::open_out(path);
    out << "# section " << c.name << " time " << num(c.time) << '\n' << "s,x,y,u\n";
    for (std::size_t k = 0; k < c.s.size(); ++k)
        out << num(c.s[k]) << ',' << num(c.x[k]) << ',' << num(c.y[k]) << ',' << num(c.u[k]) << '\n';
}

inline CrossSection read_cross_section(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    CrossSection c;
    std::string line, hash, key, tkey, tval;
    std::getline(in, line);
    std::istringstream h(line);
    h >> hash >> key >> c.name >> tkey >> tval;
    if (hash != "#" || key != "section" || tkey != "time")
        throw Error("malformed cross-section header in '" + path.string() + "'");
    c.time = detail::to_double(tval, path);
    std::getline(in, line); // column names
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != 4)
            throw Error("malformed row in '" + path.string() + "': " + line);
        c.s.push_back(detail::to_double(cells[0], path));
        c.x.push_back(detail::to_double(cells[1], path));
        c.y.push_back(detail::to_double(cells[2], path));
        c.u.push_back(detail::to_double(cells[3], path));
    }
    return c;
}

using Manifest = std::vector<std::pair<std::string, std::string>>;

inline void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    auto out = detail::open_out(path);
    for (const auto& [k, v] : m)
        out << k << " = " << v << '\n';
}

inline Manifest read_manifest(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            continue;
        m.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return m;
}

inline void write_coefficients(const std::filesystem::path& path, const SpectralField& f) {
    auto out = detail::open_out(path);
    out << "# dims " << f.dims() << '\n';
    for (const auto& b : f.basis)
        out << "# basis " << b.degree << ' ' << num(b.center) << ' ' << num(b.scale) << '\n';
    for (Eigen::Index i = 0; i < f.coeffs.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.coeffs.cols(); ++j)
            out << (j ? " " : "") << num(f.coeffs(i, j));
        out << '\n';
    }
}

inline SpectralField read_coefficients(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string hash, key;
    int dims = 0;
    in >> hash >> key >> dims;
    if (hash != "#" || key != "dims" || (dims != 1 && dims != 2))
        throw Error("malformed coefficient header in '" + path.string() + "'");
    std::vector<BasisSpec> basis;
    for (int d = 0; d < dims; ++d) {
        std::string c, s;
        BasisSpec b;
        in >> hash >> key >> b.degree >> c >> s;
        if (hash != "#" || key != "basis")
            throw Error("malformed basis line in '" + path.string() + "'");
        b.center = detail::to_double(c, path);
        b.scale = detail::to_double(s, path);
        basis.push_back(b);
    }
    const Eigen::Index rows = basis[0].size();
    const Eigen::Index cols = dims == 2 ? basis[1].size() : 1;
    Eigen::MatrixXd coeffs(rows, cols);
    std::string tok;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> tok))
                throw Error("truncated coefficient data in '" + path.string() + "'");
            coeffs(i, j) = detail::to_double(tok, path);
        }
    return SpectralField(std::move(basis), std::move(coeffs));
}

} // namespace hermwave::io

#endif
