// Field serialization and experiment plumbing.  Fields travel as STRZ files:
//
//   bytes 0-3   magic 'S' 'T' 'R' 'Z'
//   u32         format version, currently 1
//   u32         dimension, currently 2
//   u32         n_points
//   f64         half_width
//   u8          space: 0 physical, 1 frequency
//   n_points^2 x (f64 re, f64 im), row-major, second axis fastest
//
// with every multi-byte value little-endian regardless of host order.
// Experiment configs and run reports are JSON; serialization is
// deterministic (sorted keys), so identical configs make identical bytes.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "strz/grid.hpp"
#include "strz/quadrature.hpp"

namespace strz {

inline constexpr std::uint32_t strz_format_version = 1;
inline constexpr const char* library_version = "1.0.0";

// Anything that went wrong while touching the filesystem or decoding a file,
// as opposed to a bad configuration or a failed check.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//----------------------------------------------------------------------------
// STRZ files
//----------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int k = 0; k < 8; ++k)
        out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

class ByteReader {
  public:
    ByteReader(const std::string& buf, const std::string& path)
        : buf_(buf), path_(path) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 3; k >= 0; --k)
            v = (v << 8) | static_cast<unsigned char>(buf_[pos_ + k]);
        pos_ += 4;
        return v;
    }

    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int k = 7; k >= 0; --k)
            bits = (bits << 8) | static_cast<unsigned char>(buf_[pos_ + k]);
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<unsigned char>(buf_[pos_++]);
    }

    bool exhausted() const { return pos_ == buf_.size(); }

  private:
    void need(std::size_t k) const {
        if (pos_ + k > buf_.size())
            throw IoError("read_field: " + path_ + " is truncated");
    }
    const std::string& buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline void write_field(const ComplexField2D& f, const std::string& path) {
    std::string out;
    const std::size_t cells = f.data.size();
    out.reserve(25 + 16 * cells);
    out += "STRZ";
    detail::put_u32(out, strz_format_version);
    detail::put_u32(out, 2);
    detail::put_u32(out, static_cast<std::uint32_t>(f.grid.n_points));
    detail::put_f64(out, f.grid.half_width);
    out.push_back(f.space == Space::Physical ? '\0' : '\1');
    for (const cd& z : f.data) {
        detail::put_f64(out, z.real());
        detail::put_f64(out, z.imag());
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("write_field: cannot open " + path);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("write_field: short write to " + path);
}

inline ComplexField2D read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_field: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
    detail::ByteReader r(buf, path);

    if (buf.size() < 4 || buf.compare(0, 4, "STRZ") != 0)
        throw IoError("read_field: " + path + " has wrong magic bytes");
    (void)r.u32();  // magic, already checked
    const std::uint32_t version = r.u32();
    if (version != strz_format_version)
        throw IoError("read_field: " + path + " has unsupported version " +
                                 std::to_string(version));
    const std::uint32_t dim = r.u32();
    if (dim != 2)
        throw IoError("read_field: " + path + " has dimension " +
                                 std::to_string(dim) + ", expected 2");
    const std::uint32_t n = r.u32();
    if (n < 2 || n % 2 != 0 || n > 65536)
        throw IoError("read_field: " + path + " has unusable n_points " +
                                 std::to_string(n));
    const double half_width = r.f64();
    if (!(half_width > 0.0))
        throw IoError("read_field: " + path + " has unusable half_width");
    const std::uint8_t space = r.u8();
    if (space > 1)
        throw IoError("read_field: " + path + " has unknown space tag");

    Grid2D g(static_cast<int>(n), half_width);
    ComplexField2D f(g, space == 0 ? Space::Physical : Space::Frequency);
    for (cd& z : f.data) {
        const double re = r.f64(), im = r.f64();
        z = cd(re, im);
    }
    if (!r.exhausted())
        throw IoError("read_field: " + path + " has trailing bytes");
    return f;
}

//----------------------------------------------------------------------------
// experiment configuration
//----------------------------------------------------------------------------

using json = nlohmann::json;

struct ExperimentConfig {
    struct {
        int n_points = 64;
        double half_width = 10.0;
    } grid;
    struct {
        std::string scheme = "tangent";  // or "uniform" with t_max
        int n_nodes = 129;
        double t_max = 0.0;
    } time_quadrature;
    struct {
        int max_iter = 300;
        double tol = 1e-7;
        std::string init = "perturbed";  // random | random_real | perturbed
        std::uint64_t seed = 0;
        bool has_seed = false;
        bool renormalize_scale = true;
    } solver;
    struct {
        double s = 3.0;
        double mu = 0.0;  // zero means s^-4
        std::vector<double> eps_list{1.0, 1e-1, 1e-2, 1e-3};
        double annulus_lo = 2.0;
        double annulus_hi = 0.0;  // zero means 0.8 xi_max
    } analysis;
    struct {
        double s = 1.0;
        std::vector<double> N_list{4.0, 16.0, 64.0, 256.0};
        std::vector<std::uint64_t> seeds{1, 2, 3};
    } sweep;
    struct {
        std::string out_path;
        std::string format = "json";
    } io;

    void validate() const {
        if (grid.n_points < 2 || grid.n_points % 2 != 0)
            throw std::invalid_argument("config: grid.n_points must be even and >= 2");
        if (!(grid.half_width > 0.0))
            throw std::invalid_argument("config: grid.half_width must be positive");
        if (time_quadrature.scheme != "tangent" && time_quadrature.scheme != "uniform")
            throw std::invalid_argument(
                "config: time_quadrature.scheme must be tangent or uniform");
        if (time_quadrature.n_nodes < 1)
            throw std::invalid_argument("config: time_quadrature.n_nodes must be >= 1");
        if (time_quadrature.scheme == "uniform" && !(time_quadrature.t_max > 0.0))
            throw std::invalid_argument(
                "config: uniform time quadrature needs t_max > 0");
        if (solver.max_iter < 1)
            throw std::invalid_argument("config: solver.max_iter must be >= 1");
        if (!(solver.tol > 0.0))
            throw std::invalid_argument("config: solver.tol must be positive");
        if (solver.init != "random" && solver.init != "random_real" &&
            solver.init != "perturbed")
            throw std::invalid_argument(
                "config: solver.init must be random, random_real, or perturbed");
        if (!(analysis.s > 1.0))
            throw std::invalid_argument("config: analysis.s must exceed 1");
        if (analysis.mu < 0.0)
            throw std::invalid_argument("config: analysis.mu must be nonnegative");
        if (!(sweep.s > 0.0))
            throw std::invalid_argument("config: sweep.s must be positive");
    }

    Grid2D make_grid() const { return Grid2D(grid.n_points, grid.half_width); }

    TimeQuadrature make_quadrature() const {
        if (time_quadrature.scheme == "uniform")
            return uniform_truncated(time_quadrature.n_nodes, time_quadrature.t_max);
        return tangent_mapped_legendre(time_quadrature.n_nodes);
    }

    json to_json() const {
        json j;
        j["grid"]["n_points"] = grid.n_points;
        j["grid"]["half_width"] = grid.half_width;
        j["time_quadrature"]["scheme"] = time_quadrature.scheme;
        j["time_quadrature"]["n_nodes"] = time_quadrature.n_nodes;
        if (time_quadrature.scheme == "uniform")
            j["time_quadrature"]["t_max"] = time_quadrature.t_max;
        j["solver"]["max_iter"] = solver.max_iter;
        j["solver"]["tol"] = solver.tol;
        j["solver"]["init"] = solver.init;
        if (solver.has_seed) j["solver"]["seed"] = solver.seed;
        j["solver"]["renormalize_scale"] = solver.renormalize_scale;
        j["analysis"]["s"] = analysis.s;
        j["analysis"]["mu"] = analysis.mu;
        j["analysis"]["eps_list"] = analysis.eps_list;
        j["analysis"]["annulus_lo"] = analysis.annulus_lo;
        j["analysis"]["annulus_hi"] = analysis.annulus_hi;
        j["sweep"]["s"] = sweep.s;
        j["sweep"]["N_list"] = sweep.N_list;
        j["sweep"]["seeds"] = sweep.seeds;
        j["io"]["out_path"] = io.out_path;
        j["io"]["format"] = io.format;
        return j;
    }

    static ExperimentConfig from_json(const json& j) {
        ExperimentConfig c;
        auto grab = [&](const char* section, const char* key, auto& slot) {
            if (j.contains(section) && j[section].contains(key))
                slot = j[section][key].get<std::decay_t<decltype(slot)>>();
        };
        grab("grid", "n_points", c.grid.n_points);
        grab("grid", "half_width", c.grid.half_width);
        grab("time_quadrature", "scheme", c.time_quadrature.scheme);
        grab("time_quadrature", "n_nodes", c.time_quadrature.n_nodes);
        grab("time_quadrature", "t_max", c.time_quadrature.t_max);
        grab("solver", "max_iter", c.solver.max_iter);
        grab("solver", "tol", c.solver.tol);
        grab("solver", "init", c.solver.init);
        grab("solver", "renormalize_scale", c.solver.renormalize_scale);
        if (j.contains("solver") && j["solver"].contains("seed")) {
            c.solver.seed = j["solver"]["seed"].get<std::uint64_t>();
            c.solver.has_seed = true;
        }
        grab("analysis", "s", c.analysis.s);
        grab("analysis", "mu", c.analysis.mu);
        grab("analysis", "eps_list", c.analysis.eps_list);
        grab("analysis", "annulus_lo", c.analysis.annulus_lo);
        grab("analysis", "annulus_hi", c.analysis.annulus_hi);
        grab("sweep", "s", c.sweep.s);
        grab("sweep", "N_list", c.sweep.N_list);
        grab("sweep", "seeds", c.sweep.seeds);
        grab("io", "out_path", c.io.out_path);
        grab("io", "format", c.io.format);
        return c;
    }
};

//----------------------------------------------------------------------------
// run reports
//----------------------------------------------------------------------------

// The config echo is the canonical serialization of the effective config, so
// identical inputs give byte-identical reports apart from the wall time.
struct RunReport {
    json config;
    json outputs;
    double wall_time_s = 0.0;
    std::vector<std::string> artifacts;

    json to_json() const {
        json j;
        j["config"] = config;
        j["outputs"] = outputs;
        j["wall_time_s"] = wall_time_s;
        j["library_version"] = library_version;
        j["artifacts"] = artifacts;
        return j;
    }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("write_text: cannot open " + path);
    os << text;
    if (!os) throw IoError("write_text: short write to " + path);
}

}  // namespace strz
