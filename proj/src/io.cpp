#include "teng/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace teng {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("truncated file while reading " + what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t get_u64(std::istream& is, const std::string& what) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw std::runtime_error("truncated file while reading " + what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is, const std::string& what) {
    const std::uint64_t bits = get_u64(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void expect_magic(std::istream& is, const char* magic, const std::string& what) {
    char buf[4];
    if (!is.read(buf, 4)) throw std::runtime_error("truncated file while reading " + what);
    if (std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(what + ": bad magic bytes");
}

} // namespace

void save_checkpoint(const std::string& path, const NetworkArch& arch, const ParamVector& theta) {
    if (theta.size() != arch.param_count())
        throw std::invalid_argument("save_checkpoint: parameter count mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os.write("TENG", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(arch.input_dim));
    put_u32(os, 3);
    put_u32(os, static_cast<std::uint32_t>(arch.embed_terms));
    put_u32(os, static_cast<std::uint32_t>(arch.hidden_dim));
    put_u32(os, static_cast<std::uint32_t>(arch.n_layers));
    put_u64(os, static_cast<std::uint64_t>(theta.size()));
    for (Eigen::Index i = 0; i < theta.size(); ++i) put_f64(os, theta[i]);
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

ParamVector load_checkpoint(const std::string& path, const NetworkArch& expected_arch) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    expect_magic(is, "TENG", "checkpoint");
    const std::uint32_t version = get_u32(is, "checkpoint version");
    if (version != 1)
        throw std::runtime_error("load_checkpoint: unsupported version " +
                                 std::to_string(version));
    NetworkArch arch;
    arch.input_dim = static_cast<int>(get_u32(is, "checkpoint dims"));
    const std::uint32_t count = get_u32(is, "checkpoint layer-spec count");
    if (count != 3)
        throw std::runtime_error("load_checkpoint: unexpected layer-spec count " +
                                 std::to_string(count));
    arch.embed_terms = static_cast<int>(get_u32(is, "checkpoint embed_terms"));
    arch.hidden_dim = static_cast<int>(get_u32(is, "checkpoint hidden_dim"));
    arch.n_layers = static_cast<int>(get_u32(is, "checkpoint n_layers"));
    arch.lengths = expected_arch.lengths;

    if (!(arch == expected_arch))
        throw std::runtime_error("load_checkpoint: architecture mismatch in " + path);

    const std::uint64_t n = get_u64(is, "checkpoint param_count");
    if (n != static_cast<std::uint64_t>(expected_arch.param_count()))
        throw std::runtime_error("load_checkpoint: parameter count mismatch in " + path);

    ParamVector theta(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        theta[static_cast<Eigen::Index>(i)] = get_f64(is, "checkpoint values");
    return theta;
}

void save_reference(const std::string& path, const ReferenceSolution& ref, int dims) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_reference: cannot open " + path);
    os.write("TREF", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(dims));
    put_u32(os, static_cast<std::uint32_t>(ref.grid_n));
    put_u64(os, ref.times.size());
    const std::uint64_t n_points = ref.fields.empty() ? 0 : ref.fields.front().size();
    put_u64(os, n_points);
    for (double t : ref.times) put_f64(os, t);
    for (const auto& f : ref.fields) {
        if (static_cast<std::uint64_t>(f.size()) != n_points)
            throw std::invalid_argument("save_reference: inconsistent field sizes");
        for (Eigen::Index i = 0; i < f.size(); ++i) put_f64(os, f[i]);
    }
    if (!os) throw std::runtime_error("save_reference: write failed for " + path);
}

ReferenceSolution load_reference(const std::string& path, int* dims_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_reference: cannot open " + path);
    expect_magic(is, "TREF", "reference");
    const std::uint32_t version = get_u32(is, "reference version");
    if (version != 1)
        throw std::runtime_error("load_reference: unsupported version " +
                                 std::to_string(version));
    const int dims = static_cast<int>(get_u32(is, "reference dims"));
    if (dims_out) *dims_out = dims;
    ReferenceSolution ref;
    ref.grid_n = static_cast<int>(get_u32(is, "reference grid_n"));
    const std::uint64_t n_times = get_u64(is, "reference n_times");
    const std::uint64_t n_points = get_u64(is, "reference n_points");
    ref.times.resize(n_times);
    for (auto& t : ref.times) t = get_f64(is, "reference times");
    ref.fields.resize(n_times);
    for (auto& f : ref.fields) {
        f.resize(static_cast<Eigen::Index>(n_points));
        for (std::uint64_t i = 0; i < n_points; ++i)
            f[static_cast<Eigen::Index>(i)] = get_f64(is, "reference fields");
    }
    return ref;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

} // namespace teng
