#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "chb/torus_field.hpp"

namespace chb {

/// A field together with the mean offset it was produced for.
struct FieldSnapshot {
    TorusField field;
    double phi;
};

/// "CHF1 d=<d> n=<n> L=<L> phi=<phi>\n" followed by n^d little-endian
/// binary64 values in row-major order.
void write_chf(std::ostream& out, const TorusField& u, double phi);
void write_chf(const std::filesystem::path& path, const TorusField& u, double phi);

/// Rejects malformed headers and payloads whose length does not match n^d.
FieldSnapshot read_chf(std::istream& in);
FieldSnapshot read_chf(const std::filesystem::path& path);

}  // namespace chb
