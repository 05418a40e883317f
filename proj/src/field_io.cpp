#include "chb/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "chb/format.hpp"

namespace chb {

namespace {

std::uint64_t to_little(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int b = 0; b < 8; ++b) r |= ((x >> (8 * b)) & 0xffu) << (8 * (7 - b));
        return r;
    }
    return x;
}

template <class T>
T parse_field(const std::string& token, const std::string& key) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0) throw std::runtime_error("CHF1: expected '" + prefix + "', got '" + token + "'");
    std::istringstream in(token.substr(prefix.size()));
    T value{};
    in >> value;
    if (!in || !in.eof()) throw std::runtime_error("CHF1: bad value in '" + token + "'");
    return value;
}

}  // namespace

void write_chf(std::ostream& out, const TorusField& u, double phi) {
    out << "CHF1 d=" << u.dim().value() << " n=" << u.cells_per_axis() << " L=" << format_double(u.length())
        << " phi=" << format_double(phi) << "\n";
    for (double x : u.values()) {
        const auto word = to_little(std::bit_cast<std::uint64_t>(x));
        char bytes[8];
        std::memcpy(bytes, &word, 8);
        out.write(bytes, 8);
    }
    if (!out) throw std::runtime_error("CHF1: write failed");
}

void write_chf(const std::filesystem::path& path, const TorusField& u, double phi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_chf(out, u, phi);
}

FieldSnapshot read_chf(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("CHF1: missing header");
    std::istringstream tokens(header);
    std::string magic, td, tn, tl, tp, extra;
    tokens >> magic >> td >> tn >> tl >> tp;
    if (magic != "CHF1" || !tokens || (tokens >> extra)) {
        throw std::runtime_error("CHF1: malformed header '" + header + "'");
    }
    const int d = parse_field<int>(td, "d");
    const int n = parse_field<int>(tn, "n");
    const double length = parse_field<double>(tl, "L");
    const double phi = parse_field<double>(tp, "phi");
    const Dimension dim(d);
    if (n < 2) throw std::runtime_error("CHF1: n must be >= 2");

    const std::size_t count = grid_size(n, dim);
    Eigen::VectorXd values(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        char bytes[8];
        if (!in.read(bytes, 8)) {
            throw std::runtime_error("CHF1: payload too short, expected " + std::to_string(count) + " values");
        }
        std::uint64_t word;
        std::memcpy(&word, bytes, 8);
        values[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(to_little(word));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw std::runtime_error("CHF1: payload longer than n^d values");
    }
    return {TorusField(dim, n, length, std::move(values)), phi};
}

FieldSnapshot read_chf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_chf(in);
}

}  // namespace chb
